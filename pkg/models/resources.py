"""
Data models for logical resource estimates
"""

from dataclasses import dataclass, field
from typing import Dict

from models.errors import ValidationError


@dataclass(frozen=True)
class PrecisionBits:
    aleph: int
    beth: int
    eps_coeff: float
    eps_rot: float

    def to_dict(self) -> Dict:
        return {"aleph": self.aleph, "beth": self.beth, "eps_coeff": self.eps_coeff, "eps_rot": self.eps_rot}


@dataclass(frozen=True)
class WalkCostModel:
    """Cost of one qubitization walk step under batched angle loading"""

    m_rank: int
    n_orb: int
    batch_b: int
    l_theta: int
    qrom_calls: int
    g_toffoli: int
    n_aux: int
    prepare_toffoli: int = 0
    select_toffoli: int = 0
    reflection_toffoli: int = 0

    def to_dict(self) -> Dict:
        return {
            "m_rank": self.m_rank, "n_orb": self.n_orb, "batch_b": self.batch_b, "l_theta": self.l_theta,
            "qrom_calls": self.qrom_calls, "g_toffoli": self.g_toffoli, "n_aux": self.n_aux,
            "prepare_toffoli": self.prepare_toffoli, "select_toffoli": self.select_toffoli,
            "reflection_toffoli": self.reflection_toffoli,
        }


@dataclass
class ResourceEstimate:
    """Logical qubits, Toffoli count per shot and shot count of one algorithm run.

    Every breakdown item is tagged with the name of the cost formula it
    evaluates; toffoli_per_shot is the sum of the items.
    """

    family: str
    logical_qubits: int
    toffoli_per_shot: int
    shots: int
    breakdown: Dict[str, int] = field(default_factory=dict)
    formulas: Dict[str, str] = field(default_factory=dict)
    parameters: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if sum(self.breakdown.values()) != self.toffoli_per_shot:
            raise ValidationError(f"{self.family}: breakdown does not sum to toffoli_per_shot")
        if min(list(self.breakdown.values()) + [self.logical_qubits, self.shots, self.toffoli_per_shot]) < 0:
            raise ValidationError(f"{self.family}: negative resource entry")
        if set(self.breakdown) != set(self.formulas):
            raise ValidationError(f"{self.family}: every breakdown item needs a formula tag")

    @property
    def total_toffoli(self) -> int:
        return self.toffoli_per_shot * self.shots

    def to_dict(self) -> Dict:
        return {
            "family": self.family,
            "logical_qubits": self.logical_qubits,
            "toffoli_per_shot": self.toffoli_per_shot,
            "shots": self.shots,
            "total_toffoli": self.total_toffoli,
            "breakdown": dict(self.breakdown),
            "formulas": dict(self.formulas),
            "parameters": dict(self.parameters),
        }

    def to_row(self) -> Dict:
        """Table row (N, qubits, Toffoli/shot, shots)"""
        return {
            "family": self.family,
            "N": int(self.parameters.get("n_orb", self.parameters.get("n_el", 0))),
            "logical_qubits": self.logical_qubits,
            "toffoli_per_shot": self.toffoli_per_shot,
            "shots": self.shots,
        }
