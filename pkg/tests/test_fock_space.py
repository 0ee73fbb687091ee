from itertools import combinations

import numpy as np
import pytest
import scipy.linalg
from scipy.stats import ortho_group

from models.errors import CapacityError, DomainError, ValidationError
from models.hamiltonian import ActiveSpaceHamiltonian
from utils.fock_space import (
    FockSpace,
    apply_rotation,
    check_hermitian,
    dense_rotation,
    lift_orbital_rotation,
    molecular_hamiltonian,
    spin_operators,
)

from tests.conftest import random_hamiltonian, random_one_body


def test_dimensions():
    assert FockSpace(4).dim == 16
    assert FockSpace(4, sector=2).dim == 6
    assert FockSpace(6, sector=3).dim == 20


def test_caps_and_lookups():
    with pytest.raises(CapacityError):
        FockSpace(8, mode_cap=6)
    with pytest.raises(ValidationError):
        FockSpace(3, sector=4)
    space = FockSpace(4, sector=2)
    with pytest.raises(DomainError):
        space.index_of([0])
    assert space.basis_state([1, 3])[space.index_of([3, 1])] == 1.0


def test_hopping_adjoint_and_number():
    space = FockSpace(4)
    for p in range(4):
        for q in range(4):
            assert (space.hopping(p, q).T != space.hopping(q, p)).nnz == 0
    number = sum(space.hopping(p, p) for p in range(4)).diagonal()
    assert np.array_equal(number, space.particle_number())


def test_one_body_spectrum_by_sector(rng):
    h = random_one_body(rng, 4)
    e = np.linalg.eigvalsh(h)
    one = FockSpace(4, sector=1).one_body_operator(h).toarray()
    assert np.allclose(np.linalg.eigvalsh(one), e)
    two = FockSpace(4, sector=2).one_body_operator(h).toarray()
    pairs = sorted(a + b for a, b in combinations(e, 2))
    assert np.allclose(np.linalg.eigvalsh(two), pairs)


def test_molecular_hamiltonian_one_body_only(rng):
    t = random_one_body(rng, 2)
    h = ActiveSpaceHamiltonian(n_orb=2, t=t, v=np.zeros((2, 2, 2, 2)), e_core=0.3)
    space = FockSpace(4, sector=1)
    dense = molecular_hamiltonian(h, space).toarray()
    expected = np.sort(np.concatenate([np.linalg.eigvalsh(t)] * 2)) + 0.3
    assert np.allclose(np.linalg.eigvalsh(dense), expected)


def test_molecular_hamiltonian_hermitian_and_particle_conserving(rng):
    h = random_hamiltonian(rng, 2)
    space = FockSpace(4)
    dense = molecular_hamiltonian(h, space).toarray()
    assert np.allclose(dense, dense.T)
    n = space.particle_number()
    assert np.allclose(dense[np.not_equal.outer(n, n)], 0.0)


def test_two_body_single_orbital_doubly_occupied():
    v = np.full((1, 1, 1, 1), 0.7)
    h = ActiveSpaceHamiltonian(n_orb=1, t=np.array([[-1.0]]), v=v)
    space = FockSpace(2)
    diag = molecular_hamiltonian(h, space).toarray().diagonal()
    # |0>, alpha, beta, alpha-beta
    assert np.allclose(diag, [0.0, -1.0, -1.0, -2.0 + 0.7])


def test_lifted_rotation_single_particle_block():
    u = ortho_group.rvs(3, random_state=7)
    space = FockSpace(3, sector=1)
    assert np.allclose(dense_rotation(lift_orbital_rotation(u, space)), u, atol=1e-10)


def test_lifted_rotation_transforms_one_body(rng):
    u = ortho_group.rvs(3, random_state=11)
    h = random_one_body(rng, 3)
    space = FockSpace(3)
    r = dense_rotation(lift_orbital_rotation(u, space))
    lhs = r @ space.one_body_operator(h).toarray() @ r.conj().T
    rhs = space.one_body_operator(u @ h @ u.T).toarray()
    assert np.allclose(lhs, rhs, atol=1e-10)


def test_apply_rotation_inverse(rng):
    u = ortho_group.rvs(2, random_state=3)
    space = FockSpace(4, sector=2)
    generator = lift_orbital_rotation(u, space)
    psi = rng.normal(size=space.dim) + 1j * rng.normal(size=space.dim)
    back = apply_rotation(generator, apply_rotation(generator, psi), inverse=True)
    assert np.allclose(back, psi, atol=1e-10)


def test_spin_operators_two_electrons_two_orbitals():
    space = FockSpace(4, sector=2)
    s_z, s2 = spin_operators(2, space)
    assert np.allclose(np.linalg.eigvalsh(s2.toarray()), [0, 0, 0, 2, 2, 2])
    assert np.allclose(sorted(s_z.diagonal()), [-1, 0, 0, 0, 0, 1])


def test_spin_operators_commute_with_hamiltonian(rng):
    h = random_hamiltonian(rng, 2)
    space = FockSpace(4)
    dense = molecular_hamiltonian(h, space).toarray()
    s_z, s2 = spin_operators(2, space)
    for op in (s_z.toarray(), s2.toarray()):
        assert np.allclose(dense @ op, op @ dense, atol=1e-12)


def test_check_hermitian():
    check_hermitian(np.array([[1.0, 2j], [-2j, 0.0]]))
    with pytest.raises(DomainError):
        check_hermitian(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(DomainError):
        check_hermitian(scipy.linalg.block_diag(np.eye(2), [[0, 1], [2, 0]]))
