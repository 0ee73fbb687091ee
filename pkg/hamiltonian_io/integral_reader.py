"""
Reader and writer for FCIDUMP-style integral files with dipole and SOC sections

Grammar (see docs/integral_format.md):

    &FCI NORB=2, NELEC=2, MS2=0,
     ORBSYM=1,1,
     ISYM=1,
    &END
     value  i  j  k  l        two-electron (pq|rs), one-electron when k=l=0,
                              core energy when all indices are 0
    DIPOLE_X                  tagged sections, entries "value i j"
     value  i  j
    SOC_RE / SOC_IM           spin-orbital indices 1..2N (alpha block first)
"""

import json
import logging
import re
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple, Union

import numpy as np

from models.errors import IntegralFormatError, IntegralParseError, ValidationError
from models.hamiltonian import (
    ActiveSpaceHamiltonian,
    DipoleOperator,
    LoadedIntegrals,
    SOCOperator,
    max_asymmetry,
    two_body_asymmetry,
)

logger = logging.getLogger(__name__)

SECTION_TAGS = ("DIPOLE_X", "DIPOLE_Y", "DIPOLE_Z", "SOC_RE", "SOC_IM")
FORMAT_TEXT = "extended-integral-text"
FORMAT_JSON = "structured-config"

_HEADER_ITEM = re.compile(r"([A-Za-z][A-Za-z0-9_]*)\s*=\s*([-+0-9.,\s]*)")


def _two_body_images(i: int, j: int, k: int, l: int) -> List[Tuple[int, int, int, int]]:
    return [(i, j, k, l), (j, i, k, l), (i, j, l, k), (j, i, l, k),
            (k, l, i, j), (l, k, i, j), (k, l, j, i), (l, k, j, i)]


class _SymmetricFill:
    """Accumulates entries into an array, filling symmetry images and
    rejecting images that disagree beyond the input tolerance"""

    def __init__(self, shape: Tuple[int, ...], tol: float, dtype=float):
        self.values = np.zeros(shape, dtype=dtype)
        self.assigned = np.zeros(shape, dtype=bool)
        self.tol = tol

    def put(self, images: Iterable[Tuple[Tuple[int, ...], float]], what: str, line_no: Optional[int]) -> None:
        images = list(images)
        for index, value in images:
            if self.assigned[index] and abs(self.values[index] - value) > self.tol:
                location = f" (line {line_no})" if line_no else ""
                raise ValidationError(
                    f"{what} symmetry violation at {tuple(i + 1 for i in index)}: "
                    f"{self.values[index]!r} vs {value!r}{location}")
        # each symmetry orbit is written once
        if self.assigned[images[0][0]]:
            return
        for index, value in images:
            self.values[index] = value
            self.assigned[index] = True


def _parse_float(token: str, line_no: int, path: str) -> float:
    try:
        return float(token.replace("D", "E").replace("d", "e"))
    except ValueError:
        raise IntegralParseError(f"cannot parse number {token!r}", line_no, path) from None


def _parse_int(token: str, line_no: int, path: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise IntegralParseError(f"cannot parse index {token!r}", line_no, path) from None


def _parse_header(text: str, path: str) -> Dict[str, List[int]]:
    body = re.sub(r"&FCI|&END|/", " ", text, flags=re.IGNORECASE)
    header: Dict[str, List[int]] = {}
    for key, raw in _HEADER_ITEM.findall(body):
        values = [tok for tok in re.split(r"[,\s]+", raw.strip()) if tok]
        try:
            header[key.upper()] = [int(float(v)) for v in values]
        except ValueError:
            raise IntegralFormatError(f"{path}: header entry {key} has non-numeric values") from None
    if "NORB" not in header or not header["NORB"]:
        raise IntegralFormatError(f"{path}: mandatory header entry NORB is missing")
    return header


def _read_text(path: Path, tol: float) -> LoadedIntegrals:
    lines = path.read_text(encoding="utf-8").splitlines()
    source = str(path)

    header_end = None
    if not lines or not lines[0].strip().upper().startswith("&FCI"):
        raise IntegralFormatError(f"{source}: file must start with an &FCI header")
    for idx, line in enumerate(lines):
        stripped = line.strip().upper()
        if stripped.endswith("&END") or stripped == "/":
            header_end = idx
            break
    if header_end is None:
        raise IntegralFormatError(f"{source}: header is not terminated by &END")

    header = _parse_header("\n".join(lines[:header_end + 1]), source)
    n = header["NORB"][0]
    if n < 1:
        raise IntegralFormatError(f"{source}: NORB must be positive, got {n}")
    n_elec = header.get("NELEC", [None])[0]
    ms2 = header.get("MS2", [0])[0]

    t_fill = _SymmetricFill((n, n), tol)
    v_fill = _SymmetricFill((n, n, n, n), tol)
    dip_fill = {tag: _SymmetricFill((n, n), tol) for tag in ("DIPOLE_X", "DIPOLE_Y", "DIPOLE_Z")}
    soc_re = _SymmetricFill((2 * n, 2 * n), tol)
    soc_im = _SymmetricFill((2 * n, 2 * n), tol)
    seen_sections = set()
    e_core = 0.0
    section = None

    for line_no, raw in enumerate(lines[header_end + 1:], start=header_end + 2):
        line = raw.strip()
        if not line or line[0] in "#!":
            continue
        tokens = line.split()
        if tokens[0].upper() in SECTION_TAGS:
            if len(tokens) != 1:
                raise IntegralParseError(f"section tag {tokens[0]} must stand alone", line_no, source)
            section = tokens[0].upper()
            seen_sections.add(section)
            continue

        if section is None:
            if len(tokens) != 5:
                raise IntegralParseError(f"expected 'value i j k l', got {len(tokens)} fields", line_no, source)
            value = _parse_float(tokens[0], line_no, source)
            i, j, k, l = (_parse_int(tok, line_no, source) for tok in tokens[1:])
            if any(idx < 0 or idx > n for idx in (i, j, k, l)):
                raise IntegralParseError(f"index out of range 0..{n}", line_no, source)
            if i == j == k == l == 0:
                e_core += value
            elif k == 0 and l == 0 and i > 0 and j > 0:
                t_fill.put([((i - 1, j - 1), value), ((j - 1, i - 1), value)], "one-electron", line_no)
            elif j == k == l == 0:
                logger.debug(f"Skipping orbital energy entry for orbital {i} (line {line_no})")
            elif min(i, j, k, l) >= 1:
                images = [((a - 1, b - 1, c - 1, d - 1), value) for a, b, c, d in _two_body_images(i, j, k, l)]
                v_fill.put(images, "two-electron", line_no)
            else:
                raise IntegralParseError(f"invalid index pattern {i} {j} {k} {l}", line_no, source)
            continue

        if len(tokens) != 3:
            raise IntegralParseError(f"expected 'value i j' in section {section}", line_no, source)
        value = _parse_float(tokens[0], line_no, source)
        i, j = (_parse_int(tok, line_no, source) for tok in tokens[1:])
        limit = 2 * n if section.startswith("SOC") else n
        if not (1 <= i <= limit and 1 <= j <= limit):
            raise IntegralParseError(f"index out of range 1..{limit} in section {section}", line_no, source)
        a, b = i - 1, j - 1
        if section.startswith("DIPOLE"):
            dip_fill[section].put([((a, b), value), ((b, a), value)], section, line_no)
        elif section == "SOC_RE":
            soc_re.put([((a, b), value), ((b, a), value)], section, line_no)
        else:
            if a == b and abs(value) > tol:
                raise ValidationError(f"SOC_IM diagonal entry must vanish (line {line_no})")
            soc_im.put([((a, b), value), ((b, a), -value)], section, line_no)

    hamiltonian = ActiveSpaceHamiltonian(n_orb=n, t=t_fill.values, v=v_fill.values, e_core=e_core,
                                         n_elec=n_elec, ms2=ms2)
    dipole = None
    if seen_sections & set(dip_fill):
        dipole = DipoleOperator(d=tuple(dip_fill[tag].values for tag in ("DIPOLE_X", "DIPOLE_Y", "DIPOLE_Z")))
    soc = None
    if seen_sections & {"SOC_RE", "SOC_IM"}:
        soc = SOCOperator.from_matrix(soc_re.values + 1j * soc_im.values)
    logger.info(f"Loaded {hamiltonian} from {source} (dipole={dipole is not None}, soc={soc is not None})")
    return LoadedIntegrals(hamiltonian=hamiltonian, dipole=dipole, soc=soc)


def _checked_symmetric(matrix, name: str, tol: float) -> np.ndarray:
    arr = np.asarray(matrix, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"{name} must be a square matrix, got shape {arr.shape}")
    if max_asymmetry(arr) > tol:
        raise ValidationError(f"{name} not symmetric (deviation {max_asymmetry(arr):.3e})")
    return (arr + arr.T) / 2.0


def _read_json(path: Path, tol: float) -> LoadedIntegrals:
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise IntegralParseError(f"invalid JSON: {e.msg}", e.lineno, str(path)) from None
    if "n_orb" not in data:
        raise IntegralFormatError(f"{path}: mandatory key n_orb is missing")
    n = int(data["n_orb"])
    t = _checked_symmetric(data.get("t", np.zeros((n, n))), "t", tol)

    if "v_sparse" in data:
        v_fill = _SymmetricFill((n, n, n, n), tol)
        for entry_no, entry in enumerate(data["v_sparse"], start=1):
            value, i, j, k, l = float(entry[0]), *(int(x) for x in entry[1:5])
            if min(i, j, k, l) < 1 or max(i, j, k, l) > n:
                raise IntegralParseError(f"v_sparse entry {entry_no} index out of range 1..{n}", None, str(path))
            v_fill.put([((a - 1, b - 1, c - 1, d - 1), value) for a, b, c, d in _two_body_images(i, j, k, l)],
                       "two-electron", None)
        v = v_fill.values
    else:
        v = np.asarray(data.get("v", np.zeros((n, n, n, n))), dtype=float)
        if two_body_asymmetry(v) > tol:
            raise ValidationError(f"v violates 8-fold symmetry (deviation {two_body_asymmetry(v):.3e})")
        v = sum(v.transpose(p) for p in ((0, 1, 2, 3), (1, 0, 2, 3), (0, 1, 3, 2), (1, 0, 3, 2),
                                            (2, 3, 0, 1), (3, 2, 0, 1), (2, 3, 1, 0), (3, 2, 1, 0))) / 8.0

    hamiltonian = ActiveSpaceHamiltonian(n_orb=n, t=t, v=v, e_core=float(data.get("e_core", 0.0)),
                                         n_elec=data.get("n_elec"), ms2=int(data.get("ms2", 0)))
    dipole = None
    if "dipole" in data:
        dipole = DipoleOperator(d=tuple(_checked_symmetric(c, f"dipole[{k}]", tol)
                                        for k, c in enumerate(data["dipole"])))
    soc = None
    if "soc_re" in data or "soc_im" in data:
        zeros = np.zeros((2 * n, 2 * n))
        h = np.asarray(data.get("soc_re", zeros), dtype=float) + 1j * np.asarray(data.get("soc_im", zeros), dtype=float)
        if np.max(np.abs(h - h.conj().T)) > tol:
            raise ValidationError("SOC matrix is not Hermitian")
        soc = SOCOperator.from_matrix((h + h.conj().T) / 2.0)
    logger.info(f"Loaded {hamiltonian} from {path}")
    return LoadedIntegrals(hamiltonian=hamiltonian, dipole=dipole, soc=soc)


def load_hamiltonian(path: Union[str, Path], fmt: Optional[str] = None, tol: float = 1e-10) -> LoadedIntegrals:
    """Load integrals (and optional dipole / SOC sections) from a file.

    The format is inferred from the suffix when not given: `.json` selects
    the structured-config layout, everything else the integral text format.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"integral file not found: {path}")
    if fmt is None:
        fmt = FORMAT_JSON if path.suffix.lower() == ".json" else FORMAT_TEXT
    if fmt == FORMAT_TEXT:
        return _read_text(path, tol)
    if fmt == FORMAT_JSON:
        return _read_json(path, tol)
    raise IntegralFormatError(f"unknown integral format {fmt!r}")


def _fmt(value: float) -> str:
    return repr(float(value))


def write_hamiltonian(path: Union[str, Path], h: ActiveSpaceHamiltonian,
                      dipole: Optional[DipoleOperator] = None, soc: Optional[SOCOperator] = None) -> None:
    """Write the integral text format with symmetry-unique entries"""
    n = h.n_orb
    out = [f"&FCI NORB={n}," + (f" NELEC={h.n_elec}," if h.n_elec is not None else "") + f" MS2={h.ms2},",
           " ORBSYM=" + ",".join("1" for _ in range(n)) + ",",
           " ISYM=1,",
           "&END"]
    for i in range(n):
        for j in range(i + 1):
            for k in range(n):
                for l in range(k + 1):
                    if i * (i + 1) // 2 + j < k * (k + 1) // 2 + l:
                        continue
                    if h.v[i, j, k, l] != 0.0:
                        out.append(f" {_fmt(h.v[i, j, k, l])} {i + 1} {j + 1} {k + 1} {l + 1}")
    for i in range(n):
        for j in range(i + 1):
            if h.t[i, j] != 0.0:
                out.append(f" {_fmt(h.t[i, j])} {i + 1} {j + 1} 0 0")
    out.append(f" {_fmt(h.e_core)} 0 0 0 0")

    if dipole is not None:
        for tag, comp in zip(("DIPOLE_X", "DIPOLE_Y", "DIPOLE_Z"), dipole.d):
            out.append(tag)
            out.extend(f" {_fmt(comp[i, j])} {i + 1} {j + 1}"
                       for i in range(n) for j in range(i + 1) if comp[i, j] != 0.0)
    if soc is not None:
        m = 2 * n
        out.append("SOC_RE")
        out.extend(f" {_fmt(soc.h_soc[i, j].real)} {i + 1} {j + 1}"
                   for i in range(m) for j in range(i + 1) if soc.h_soc[i, j].real != 0.0)
        out.append("SOC_IM")
        out.extend(f" {_fmt(soc.h_soc[i, j].imag)} {i + 1} {j + 1}"
                   for i in range(m) for j in range(i) if soc.h_soc[i, j].imag != 0.0)

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(out) + "\n", encoding="utf-8")
    logger.info(f"Wrote integrals for {h} to {path}")
