"""
Validated description of one command-line run
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from models.errors import ValidationError

COMMANDS = ("factorize", "fit-degree", "simulate-window", "isc-proxy", "trotter-audit",
            "vibronic-run", "vibronic-resources", "estimate")
STOCHASTIC_COMMANDS = ("simulate-window",)


@dataclass
class RunConfig:
    command: str
    inputs: Tuple[str, ...] = ()
    window: Optional[Tuple[float, float]] = None
    eps_h: float = 0.01
    eps_samp: float = 0.1
    delta_samp: float = 0.01
    xi: float = 0.1
    seed: Optional[int] = None
    output: Optional[str] = None
    print_json: bool = False
    preset: Optional[str] = None
    solvent: Optional[str] = None
    options: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValidationError(f"unknown command {self.command!r}")
        if self.window is not None and not self.window[0] < self.window[1]:
            raise ValidationError(f"window {self.window} is empty")
        if self.command in STOCHASTIC_COMMANDS and self.seed is None:
            raise ValidationError(f"{self.command} needs a seed")
        if self.output is not None and Path(self.output).suffix.lower() not in (".json", ".csv", ".xlsx"):
            raise ValidationError(f"output {self.output!r} must end in .json, .csv or .xlsx")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "inputs": list(self.inputs),
            "window_ha": list(self.window) if self.window else None,
            "eps_h": self.eps_h,
            "eps_samp": self.eps_samp,
            "delta_samp": self.delta_samp,
            "xi": self.xi,
            "seed": self.seed,
            "preset": self.preset,
            "solvent": self.solvent,
            "options": dict(self.options),
        }
