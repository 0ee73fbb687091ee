import numpy as np
import pytest
import scipy.linalg

from hamiltonian_io.integral_reader import load_hamiltonian
from isc_proxy.evolution import (
    channel_operator,
    fast_forward_soc,
    log_log_slope,
    parse_channel,
    parse_time_grid,
    proxy_rate,
    proxy_series,
)
from isc_proxy.hadamard import modified_hadamard
from isc_proxy.projection import single_sided_projection
from isc_proxy.references import reference_states
from models.errors import DomainError, ValidationError
from models.hamiltonian import SOCOperator
from models.spectral import LEFT_STEP, RIGHT_STEP
from qsp_filter.heaviside import synthesize_heaviside
from utils.fock_space import FockSpace, molecular_hamiltonian, spin_operators

from tests.conftest import random_hermitian


def random_state(rng, dim):
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return psi / np.linalg.norm(psi)


def coupled_pair(n_modes=4):
    """Real symmetric one-body operator and two determinants it couples directly"""
    rng = np.random.default_rng(5)
    h = rng.normal(scale=0.3, size=(n_modes, n_modes))
    h = 0.5 * (h + h.T)
    h[1, 2] = h[2, 1] = 0.5
    space = FockSpace(n_modes)
    return h, space, space.basis_state([0, 1]), space.basis_state([0, 2])


class TestFastForward:
    @pytest.mark.parametrize("seed", range(10))
    def test_matches_dense_exponential(self, seed):
        rng = np.random.default_rng(seed)
        n_modes = 4 if seed % 2 else 6
        h = random_hermitian(rng, n_modes, scale=0.2)
        space = FockSpace(n_modes)
        psi = random_state(rng, space.dim)
        t = float(rng.uniform(0.1, 3.0))
        dense = scipy.linalg.expm(-1j * t * space.one_body_operator(h).toarray()) @ psi
        assert np.max(np.abs(fast_forward_soc(h, t, psi, space) - dense)) < 1e-10

    def test_sector_space(self, rng):
        h = random_hermitian(rng, 4, scale=0.2)
        space = FockSpace(4, sector=2)
        psi = random_state(rng, space.dim)
        dense = scipy.linalg.expm(-1j * 0.7 * space.one_body_operator(h).toarray()) @ psi
        assert np.allclose(fast_forward_soc(h, 0.7, psi, space), dense, atol=1e-10)

    def test_zero_time_is_identity(self, rng):
        h = random_hermitian(rng, 2)
        psi = random_state(rng, 4)
        assert np.array_equal(fast_forward_soc(h, 0.0, psi), psi)

    def test_rejects_bad_inputs(self, rng):
        h = random_hermitian(rng, 2)
        with pytest.raises(DomainError):
            fast_forward_soc(h, 1.0, np.ones(4))
        with pytest.raises(DomainError):
            fast_forward_soc(np.array([[0.0, 1.0], [0.0, 0.0]]), 1.0, random_state(rng, 4))
        with pytest.raises(ValidationError):
            fast_forward_soc(h, 1.0, random_state(rng, 8))


class TestProxyRate:
    def test_two_level_closed_form(self):
        g = 0.3
        h = np.array([[0.0, g], [g, 0.0]])
        space = FockSpace(2)
        i_state, f_state = space.basis_state([0]), space.basis_state([1])
        for t in (0.01, 0.5, 2.0):
            result = proxy_rate(i_state, f_state, h, t, space)
            assert result.proxy_rate == pytest.approx(np.sin(g * t) ** 2, abs=1e-12)
            assert result.coupling_sq == pytest.approx(g * g)

    def test_short_time_law(self):
        h, space, i_state, f_state = coupled_pair()
        norm = np.abs(np.linalg.eigvalsh(h)).sum()
        t_grid = np.geomspace(1e-4, 1e-2, 9) / norm
        results = [proxy_rate(i_state, f_state, h, float(t), space) for t in t_grid]
        slope = log_log_slope(t_grid, [r.proxy_rate for r in results])
        assert slope == pytest.approx(2.0, abs=0.01)
        at_1e3 = proxy_rate(i_state, f_state, h, 1e-3 / norm, space)
        assert at_1e3.limit_estimate == pytest.approx(0.25, rel=1e-3)

    def test_series_limit(self):
        h, space, i_state, f_state = coupled_pair()
        _, limit = proxy_series(i_state, f_state, h, np.geomspace(1e-3, 1e-1, 8), space)
        assert limit == pytest.approx(0.25, rel=1e-4)

    def test_random_instances_quadratic(self):
        for seed in range(20):
            rng = np.random.default_rng(1000 + seed)
            h = rng.normal(scale=0.3, size=(4, 4))
            h = 0.5 * (h + h.T)
            h[0, 3] = h[3, 0] = 0.2 + rng.uniform(0.0, 0.3)
            space = FockSpace(4)
            i_state, f_state = space.basis_state([0]), space.basis_state([3])
            norm = np.abs(np.linalg.eigvalsh(h)).sum()
            ts = np.geomspace(1e-4, 1e-2, 5) / norm
            rates = [proxy_rate(i_state, f_state, h, float(t), space, limit=False).proxy_rate for t in ts]
            assert log_log_slope(ts, rates) == pytest.approx(2.0, abs=0.01)

    def test_time_domain(self):
        h, space, i_state, f_state = coupled_pair()
        with pytest.raises(DomainError):
            proxy_rate(i_state, f_state, h, -1.0, space)
        with pytest.raises(DomainError):
            proxy_rate(i_state, f_state, h, 0.0, space)
        assert proxy_rate(i_state, f_state, h, 0.0, space, limit=False).proxy_rate == 0.0

    def test_time_grid(self):
        grid = parse_time_grid("1e-3:1e-1:3")
        assert np.allclose(grid, [1e-3, 1e-2, 1e-1])
        with pytest.raises(ValidationError):
            parse_time_grid("1e-1:1e-3:3")
        with pytest.raises(ValidationError):
            parse_time_grid("1e-3,1e-1")


class TestChannels:
    def test_aliases(self):
        assert parse_channel("00") == "0,0"
        assert parse_channel("1,+1") == "1,+1"
        assert parse_channel("1-1") == "1,-1"
        with pytest.raises(ValidationError):
            parse_channel("2,0")

    def test_channels_reassemble_operator(self, h2_path):
        soc = load_hamiltonian(h2_path).soc
        total = sum(channel_operator(soc, label) for label in ("0,0", "1,0", "1,+1"))
        assert np.allclose(total, soc.h_soc)
        flip = channel_operator(soc, "1,-1")
        assert np.allclose(flip, flip.conj().T)

    def test_spin_blocks(self):
        h = np.zeros((4, 4), dtype=complex)
        h[0, 0], h[2, 2] = 0.3, 0.1
        h[0, 3] = h[3, 0] = 0.05
        soc = SOCOperator.from_matrix(h)
        assert soc.components["0,0"][0, 0] == pytest.approx(0.2)
        assert soc.components["1,0"][0, 0] == pytest.approx(0.1)
        assert soc.components["1,0"][2, 2] == pytest.approx(-0.1)
        assert soc.components["1,+1"][0, 3] == pytest.approx(0.05)
        assert soc.components["1,-1"][3, 0] == pytest.approx(0.05)


class TestHadamard:
    @pytest.mark.parametrize("alpha, beta", [(1.0, 1.0), (0.6, 0.8j), (2.0, 0.5)])
    def test_exact_readout_recovers_element(self, alpha, beta):
        h, space, i_state, f_state = coupled_pair()
        expected = np.vdot(f_state, fast_forward_soc(h, 0.4, i_state, space))
        readout = modified_hadamard(i_state, f_state, h, 0.4, alpha, beta, space=space)
        assert readout.matrix_element() == pytest.approx(expected, abs=1e-12)

    def test_sampled_readout(self):
        h, space, i_state, f_state = coupled_pair()
        expected = np.vdot(f_state, fast_forward_soc(h, 0.4, i_state, space))
        readout = modified_hadamard(i_state, f_state, h, 0.4, 1.0, 1.0, shots=20000, seed=9, space=space)
        assert abs(readout.matrix_element() - expected) < 0.04
        again = modified_hadamard(i_state, f_state, h, 0.4, 1.0, 1.0, shots=20000, seed=9, space=space)
        assert again == readout

    def test_domain(self):
        h, space, i_state, f_state = coupled_pair()
        with pytest.raises(DomainError):
            modified_hadamard(i_state, f_state, h, 0.4, 0.0, 0.0, space=space)
        with pytest.raises(DomainError):
            modified_hadamard(i_state, f_state, h, 0.4, 1.0, 1.0, shots=0, space=space)


class TestProjection:
    @pytest.fixture(scope="class")
    def left(self):
        return synthesize_heaviside(0.2, 0.01, LEFT_STEP)

    def test_keeps_states_below_cut(self, left):
        h = np.diag([-1.0, 0.0, 1.0])
        state = np.ones(3) / np.sqrt(3.0)
        result = single_sided_projection(state, h, 0.5, left)
        assert result.success_prob == pytest.approx(2.0 / 3.0, abs=0.02)
        assert abs(result.state[2]) < 0.02
        assert np.linalg.norm(result.state) == pytest.approx(1.0)
        assert not result.flagged

    def test_low_success_flagged(self, left):
        h = np.diag([-1.0, 0.0, 1.0])
        result = single_sided_projection(np.array([0.0, 0.0, 1.0]), h, -0.5, left, success_floor=0.5)
        assert result.flagged

    def test_domain(self, left):
        h = np.diag([-1.0, 0.0, 1.0])
        with pytest.raises(DomainError):
            single_sided_projection(np.ones(3) / np.sqrt(3.0), h, 2.0, left)
        with pytest.raises(DomainError):
            single_sided_projection(np.ones(3) / np.sqrt(3.0), h, 0.5, synthesize_heaviside(0.2, 0.01, RIGHT_STEP))


def test_reference_states_h2(h2_path):
    h = load_hamiltonian(h2_path).hamiltonian
    space = FockSpace(4)
    dense = molecular_hamiltonian(h, space).toarray()
    s_z, s2 = spin_operators(2, space)
    singlet, triplet = reference_states(dense, s2, s_z, m=0, singlet_root=1,
                                        number=space.particle_number(), n_elec=2)
    s2 = s2.toarray()
    assert np.vdot(singlet, s2 @ singlet).real == pytest.approx(0.0, abs=1e-8)
    assert np.vdot(triplet, s2 @ triplet).real == pytest.approx(2.0, abs=1e-8)
    assert np.vdot(singlet, space.particle_number() * singlet).real == pytest.approx(2.0)
    assert abs(np.vdot(singlet, triplet)) < 1e-8
