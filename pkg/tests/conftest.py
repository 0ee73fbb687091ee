"""
Shared fixtures: seeded random active spaces and the bundled toy inputs
"""

from pathlib import Path

import numpy as np
import pytest

from models.hamiltonian import ActiveSpaceHamiltonian

ROOT = Path(__file__).resolve().parent.parent
TOY_DIR = ROOT / "Resources" / "toy"

EIGHT_FOLD = ((0, 1, 2, 3), (1, 0, 2, 3), (0, 1, 3, 2), (1, 0, 3, 2),
              (2, 3, 0, 1), (3, 2, 0, 1), (2, 3, 1, 0), (3, 2, 1, 0))


def random_two_body(rng: np.random.Generator, n: int, scale: float = 0.1) -> np.ndarray:
    raw = rng.normal(scale=scale, size=(n, n, n, n))
    return sum(raw.transpose(p) for p in EIGHT_FOLD) / 8.0


def random_one_body(rng: np.random.Generator, n: int, scale: float = 0.5) -> np.ndarray:
    a = rng.normal(scale=scale, size=(n, n))
    return 0.5 * (a + a.T)


def random_hamiltonian(rng: np.random.Generator, n: int, n_elec=None, e_core: float = 0.0,
                       two_body_scale: float = 0.1) -> ActiveSpaceHamiltonian:
    return ActiveSpaceHamiltonian(n_orb=n, t=random_one_body(rng, n), v=random_two_body(rng, n, two_body_scale),
                                  e_core=e_core, n_elec=n_elec)


def random_hermitian(rng: np.random.Generator, dim: int, scale: float = 1.0) -> np.ndarray:
    a = rng.normal(scale=scale, size=(dim, dim)) + 1j * rng.normal(scale=scale, size=(dim, dim))
    return 0.5 * (a + a.conj().T)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def toy_dir() -> Path:
    return TOY_DIR


@pytest.fixture
def h2_path() -> Path:
    return TOY_DIR / "h2_minimal.fcidump"


@pytest.fixture
def three_level_path() -> Path:
    return TOY_DIR / "three_level.json"


@pytest.fixture
def small_hamiltonian(rng) -> ActiveSpaceHamiltonian:
    return random_hamiltonian(rng, 3, n_elec=2, e_core=0.25)
