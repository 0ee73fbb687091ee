"""
Result export to JSON, CSV and formatted Excel workbooks
"""

import csv
import io
import json
import logging
import os
import tempfile
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
import openpyxl
from openpyxl.styles import Alignment, Border, Font, PatternFill, Side
from openpyxl.utils import get_column_letter

from models.errors import ValidationError

logger = logging.getLogger(__name__)

FORMATS = ("json", "csv", "xlsx")


def _plain(value: Any) -> Any:
    """numpy scalars and arrays, complex numbers and tuples as JSON-ready values"""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, np.generic):
        return _plain(value.item())
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    return value


def format_for(path: Union[str, Path]) -> str:
    suffix = Path(path).suffix.lower().lstrip(".")
    if suffix not in FORMATS:
        raise ValidationError(f"unsupported output format {suffix!r}; use .json, .csv or .xlsx")
    return suffix


def atomic_write_bytes(path: Union[str, Path], data: bytes) -> None:
    """Write through a temporary file in the target directory and rename over the target"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class ResultExporter:
    """Writes command payloads; the payload itself carries no timestamps"""

    def __init__(self, config: Optional[Dict[str, Any]] = None):
        self.config = config or {}

    @staticmethod
    def payload_json(payload: Dict[str, Any]) -> str:
        return json.dumps(_plain(payload), indent=2, sort_keys=True) + "\n"

    def export_json(self, payload: Dict[str, Any], file_path: Union[str, Path],
                    metadata: Optional[Dict[str, Any]] = None) -> None:
        document = {"payload": _plain(payload)}
        if metadata is not None:
            document["metadata"] = dict(_plain(metadata),
                                        written_at=datetime.now(timezone.utc).isoformat(timespec="seconds"))
        atomic_write_bytes(file_path, (json.dumps(document, indent=2, sort_keys=True) + "\n").encode("utf-8"))
        logger.info(f"Wrote JSON results to {file_path}")

    @staticmethod
    def csv_text(rows: Sequence[Dict[str, Any]]) -> str:
        if not rows:
            return ""
        columns = list(rows[0].keys())
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _plain(row.get(k)) for k in columns})
        return buffer.getvalue()

    def export_csv(self, rows: Sequence[Dict[str, Any]], file_path: Union[str, Path]) -> None:
        atomic_write_bytes(file_path, self.csv_text(rows).encode("utf-8"))
        logger.info(f"Wrote {len(rows)} CSV rows to {file_path}")

    def export_xlsx(self, rows: Sequence[Dict[str, Any]], file_path: Union[str, Path],
                    sheet_title: str = "Estimates") -> None:
        workbook = openpyxl.Workbook()
        worksheet = workbook.active
        worksheet.title = sheet_title[:31]
        columns: List[str] = list(rows[0].keys()) if rows else []
        worksheet.append(columns)
        for row in rows:
            worksheet.append([_plain(row.get(k)) for k in columns])
        self.format_cells(worksheet, len(columns), len(rows))

        buffer = io.BytesIO()
        workbook.save(buffer)
        atomic_write_bytes(file_path, buffer.getvalue())
        logger.info(f"Wrote {len(rows)} rows to workbook {file_path}")

    def format_cells(self, worksheet: Any, n_columns: int, n_rows: int) -> None:
        """Bold header row, thin borders, scientific format for large numbers, fitted column widths"""
        header_font = Font(bold=True, color="FFFFFF")
        header_fill = PatternFill(start_color="366092", end_color="366092", fill_type="solid")
        header_alignment = Alignment(horizontal="center", vertical="center")
        border = Border(left=Side(style='thin'), right=Side(style='thin'),
                        top=Side(style='thin'), bottom=Side(style='thin'))

        for col in range(1, n_columns + 1):
            cell = worksheet.cell(row=1, column=col)
            cell.font = header_font
            cell.fill = header_fill
            cell.alignment = header_alignment
            cell.border = border

        for row in range(2, n_rows + 2):
            for col in range(1, n_columns + 1):
                cell = worksheet.cell(row=row, column=col)
                cell.border = border
                cell.alignment = Alignment(horizontal="right", vertical="top")
                if isinstance(cell.value, (int, float)) and not isinstance(cell.value, bool) and abs(cell.value) >= 1e6:
                    cell.number_format = '0.00E+00'

        for col in range(1, n_columns + 1):
            max_length = max((len(str(worksheet.cell(row=row, column=col).value or ""))
                              for row in range(1, n_rows + 2)), default=0)
            worksheet.column_dimensions[get_column_letter(col)].width = min(max_length + 2, 50)

    def export(self, payload: Dict[str, Any], rows: Sequence[Dict[str, Any]], file_path: Union[str, Path],
               metadata: Optional[Dict[str, Any]] = None) -> str:
        """Dispatch on the file suffix; tables go to CSV/xlsx, the full payload to JSON"""
        fmt = format_for(file_path)
        if fmt == "json":
            self.export_json(payload, file_path, metadata)
        elif fmt == "csv":
            self.export_csv(rows, file_path)
        else:
            self.export_xlsx(rows, file_path)
        return fmt
