import math

import numpy as np
import pytest
import scipy.linalg

from factorization.cdf import cdf_factorize
from factorization.lcu import identity_shift
from models.errors import CapacityError, DomainError, ValidationError
from models.hamiltonian import ActiveSpaceHamiltonian
from models.spectral import SpectralWindow
from trotter_engine.error_bounds import delta_max, verify_bias, y3_norm_exact, y3_norm_heuristic, y3_operator
from trotter_engine.product_formula import TrotterPropagator, cdf_fragments, trotter_unitary
from trotter_engine.rescaling import pad_and_rescale
from utils.fock_space import FockSpace, molecular_hamiltonian

from tests.conftest import random_hamiltonian, random_hermitian


def seeded_cdf(seed: int, n: int = 2):
    rng = np.random.default_rng(seed)
    h = random_hamiltonian(rng, n, two_body_scale=0.2)
    return h, cdf_factorize(h, threshold=1e-10)


@pytest.fixture(scope="module")
def system():
    return seeded_cdf(314)


class TestRescaling:
    def test_pads_shorter_arc_above(self):
        window = SpectralWindow(e_lo=2.0, e_hi=3.0, e_min=0.0, e_max=4.0, delta=0.1)
        rescaled = pad_and_rescale(window, "L")
        assert rescaled.e_ref == 3.0
        assert rescaled.lambda_pad == pytest.approx(6.0)
        assert rescaled.tau == pytest.approx(math.pi / 3.0)
        assert (rescaled.e_min_pad, rescaled.e_max_pad) == pytest.approx((0.0, 6.0))

    def test_right_side_pads_below(self):
        window = SpectralWindow(e_lo=1.0, e_hi=2.0, e_min=0.0, e_max=4.0, delta=0.1)
        rescaled = pad_and_rescale(window, "R")
        assert rescaled.e_ref == 1.0
        assert rescaled.lambda_pad == pytest.approx(6.0)
        assert (rescaled.e_min_pad, rescaled.e_max_pad) == pytest.approx((-2.0, 4.0))

    def test_symmetric_support_unpadded(self):
        window = SpectralWindow(e_lo=1.0, e_hi=2.0, e_min=0.0, e_max=4.0, delta=0.1)
        rescaled = pad_and_rescale(window, "L")
        assert rescaled.lambda_pad == pytest.approx(4.0)
        assert rescaled.to_dict()["side"] == "L"

    def test_bad_side(self):
        window = SpectralWindow(e_lo=1.0, e_hi=2.0, e_min=0.0, e_max=4.0, delta=0.1)
        with pytest.raises(ValidationError):
            pad_and_rescale(window, "both")


class TestProductFormula:
    def test_fragments_rebuild_hamiltonian(self, system):
        h, cdf = system
        prop = TrotterPropagator(cdf)
        dense = molecular_hamiltonian(h, FockSpace(4)).toarray()
        rebuilt = prop.hamiltonian_matrix() + identity_shift(cdf, h.e_core) * np.eye(prop.dim)
        assert np.allclose(rebuilt, dense, atol=1e-8)

    def test_fragment_order_one_body_first(self, system):
        _, cdf = system
        fragments = cdf_fragments(cdf)
        assert fragments[0].one_body
        assert not any(f.one_body for f in fragments[1:])
        assert len(fragments) == cdf.n_frag + 1

    def test_step_unitary_over_many_steps(self, system, rng):
        _, cdf = system
        prop = TrotterPropagator(cdf)
        psi = rng.normal(size=prop.dim) + 1j * rng.normal(size=prop.dim)
        psi /= np.linalg.norm(psi)
        for _ in range(1000):
            psi = prop.step(psi, 0.05)
        assert np.linalg.norm(psi) == pytest.approx(1.0, abs=1e-10)
        u = prop.unitary(0.3, tau=2.0)
        assert np.allclose(u.conj().T @ u, np.eye(prop.dim), atol=1e-12)

    def test_single_fragment_is_exact(self):
        t = np.array([[-0.4, 0.3], [0.3, 0.2]])
        h = ActiveSpaceHamiltonian(n_orb=2, t=t, v=np.zeros((2, 2, 2, 2)))
        cdf = cdf_factorize(h, 1e-10)
        prop = TrotterPropagator(cdf)
        exact = scipy.linalg.expm(-1j * 0.7 * prop.hamiltonian_matrix())
        assert np.allclose(trotter_unitary(cdf, 0.7), exact, atol=1e-12)

    def test_non_positive_step(self, system):
        _, cdf = system
        prop = TrotterPropagator(cdf)
        with pytest.raises(DomainError):
            prop.step(np.ones(prop.dim), 0.0)

    def test_dense_cap(self, system):
        _, cdf = system
        prop = TrotterPropagator(cdf, dense_cap=4)
        with pytest.raises(CapacityError):
            prop.unitary(0.1)
        with pytest.raises(CapacityError):
            TrotterPropagator(cdf, mode_cap=2)


class TestErrorOperator:
    def test_two_fragments_closed_form(self, rng):
        a, b = random_hermitian(rng, 5, 0.3), random_hermitian(rng, 5, 0.3)

        def comm(x, y):
            return x @ y - y @ x

        expected = -(comm(b, comm(b, a)) / 12.0 - comm(a, comm(a, b)) / 24.0)
        assert np.allclose(y3_operator([a, b]), expected, atol=1e-12)

    def test_matches_effective_generator(self, rng):
        frags = [random_hermitian(rng, 6, 0.3) for _ in range(3)]
        d = 1e-2
        halves = [scipy.linalg.expm(-0.5j * d * f) for f in frags]
        u = halves[0] @ halves[1] @ halves[2] @ halves[2] @ halves[1] @ halves[0]
        effective = 1j * scipy.linalg.logm(u) / d
        y3 = (effective - sum(frags)) / d ** 2
        assert np.max(np.abs(y3 - y3_operator(frags))) < 1e-3

    def test_commuting_fragments_vanish(self):
        t = np.array([[-0.4, 0.3], [0.3, 0.2]])
        cdf = cdf_factorize(ActiveSpaceHamiltonian(n_orb=2, t=t, v=np.zeros((2, 2, 2, 2))), 1e-10)
        assert y3_norm_exact(cdf) == pytest.approx(0.0, abs=1e-14)
        assert y3_norm_heuristic(cdf) == 0.0

    @pytest.mark.parametrize("seed", range(20))
    def test_heuristic_dominates_exact_two_orbitals(self, seed):
        _, cdf = seeded_cdf(seed)
        assert y3_norm_heuristic(cdf) >= y3_norm_exact(cdf)

    @pytest.mark.parametrize("seed", range(3))
    def test_heuristic_dominates_exact_three_orbitals(self, seed):
        _, cdf = seeded_cdf(100 + seed, n=3)
        assert y3_norm_heuristic(cdf) >= y3_norm_exact(cdf)

    def test_mode_cap(self, system):
        _, cdf = system
        with pytest.raises(CapacityError):
            y3_norm_exact(cdf, mode_cap=2)


class TestStepBudget:
    def test_reference_value(self):
        budget = delta_max(1.0, 0.1, 0.01, 1.0)
        assert budget.delta_max == pytest.approx(math.sqrt(1e-3))
        assert not budget.capped

    def test_doubling_tau_halves_step(self):
        assert delta_max(0.3, 0.2, 0.05, 2.0).delta_max == pytest.approx(0.5 * delta_max(0.3, 0.2, 0.05, 1.0).delta_max)

    def test_zero_commutator_capped(self):
        budget = delta_max(0.0, 0.1, 0.01, 1.0, max_step=0.5)
        assert budget.capped
        assert budget.delta_max == 0.5

    @pytest.mark.parametrize("args", [(-1.0, 0.1, 0.01, 1.0), (1.0, 0.0, 0.01, 1.0), (1.0, 0.6, 0.01, 1.0),
                                      (1.0, 0.1, 0.0, 1.0), (1.0, 0.1, 0.01, 0.0)])
    def test_domain(self, args):
        with pytest.raises(DomainError):
            delta_max(*args)


class TestBias:
    def test_commuting_fragments_unbiased(self):
        t = np.array([[-0.4, 0.3], [0.3, 0.2]])
        cdf = cdf_factorize(ActiveSpaceHamiltonian(n_orb=2, t=t, v=np.zeros((2, 2, 2, 2))), 1e-10)
        report = verify_bias(cdf, 0.1)
        assert report.max_bias < 1e-10
        assert report.bound_holds

    @pytest.mark.parametrize("delta", [0.005, 0.01, 0.02])
    def test_bound_holds(self, system, delta):
        _, cdf = system
        report = verify_bias(cdf, delta)
        assert report.bound_holds
        assert report.excluded == 0
        assert report.max_bias > 0.0

    def test_second_order_convergence(self, system):
        _, cdf = system
        c = y3_norm_exact(cdf)
        coarse = verify_bias(cdf, 0.02, c_exact=c).max_bias
        fine = verify_bias(cdf, 0.01, c_exact=c).max_bias
        assert 3.5 <= coarse / fine <= 4.5
        assert math.log2(coarse / fine) == pytest.approx(2.0, abs=0.05)

    @pytest.mark.slow
    @pytest.mark.parametrize("seed", range(400, 420))
    def test_second_order_convergence_across_systems(self, seed):
        _, cdf = seeded_cdf(seed)
        c = y3_norm_exact(cdf)
        assert y3_norm_heuristic(cdf) >= c
        coarse = verify_bias(cdf, 0.01, c_exact=c)
        fine = verify_bias(cdf, 0.005, c_exact=c)
        assert coarse.bound_holds and fine.bound_holds
        assert fine.max_bias > 1e-10
        assert math.log2(coarse.max_bias / fine.max_bias) == pytest.approx(2.0, abs=0.05)

    def test_step_at_budget_resolves_bin(self, system):
        _, cdf = system
        c = y3_norm_exact(cdf)
        budget = delta_max(c, 0.1, 1e-3, 1.0)
        report = verify_bias(cdf, budget.delta_max, c_exact=c)
        assert report.max_bias <= 0.1 * 1e-3 * 1.01 + 1e-10

    def test_rescaled_energies(self, system):
        h, cdf = system
        e_id = identity_shift(cdf, h.e_core)
        spectrum = np.linalg.eigvalsh(molecular_hamiltonian(h, FockSpace(4)).toarray())
        lo, hi = float(spectrum[0]), float(spectrum[-1])
        window = SpectralWindow(e_lo=lo + 0.25 * (hi - lo), e_hi=lo + 0.5 * (hi - lo), e_min=lo, e_max=hi, delta=0.01)
        rescaled = pad_and_rescale(window, "L")
        report = verify_bias(cdf, 0.01, rescaled=rescaled, e_id=e_id)
        assert report.tau == rescaled.tau
        assert report.bound == pytest.approx(report.c_exact * rescaled.tau ** 2 * 1e-4)
        assert report.bound_holds
