import numpy as np
import pytest

from models.dynamics import PopulationTrace, VibronicModel
from models.errors import CapacityError, DomainError, PropagationError, ValidationError
from vibronic_engine.dynamics import extract_rate, propagate
from vibronic_engine.grid_model import VibronicGrid, load_vibronic_model
from vibronic_engine.resources import vibronic_resources


def harmonic(omegas, a=None, **kwargs):
    m = len(omegas)
    return VibronicModel(spin_labels=["S"], omegas=omegas, lambda0=[[0.0]],
                         a_lin=np.zeros((m, 1, 1)) if a is None else np.array(a, dtype=float).reshape(m, 1, 1),
                         b_quad=np.zeros((m, m, 1, 1)), degree=1, **kwargs)


def rabi_model(coupling: float) -> VibronicModel:
    return VibronicModel(spin_labels=["S", "T"], omegas=[1.0], lambda0=[[0.0, coupling], [coupling, 0.0]],
                         a_lin=np.zeros((1, 2, 2)), b_quad=np.zeros((1, 1, 2, 2)), degree=0)


class TestModel:
    def test_from_dict_toy(self, toy_dir):
        model = load_vibronic_model(toy_dir / "two_state_vibronic.json")
        assert model.n_el == 2
        assert model.n_modes == 1
        assert model.triplet_mask.tolist() == [False, True]
        assert model.lambda0[0, 1] == pytest.approx(0.01)
        assert model.grid_k == 32

    def test_imaginary_parts(self):
        model = VibronicModel.from_dict({"spin_labels": ["S", "T"], "omegas": [1.0],
                                         "lambda0": [[0.0, 0.1], [0.1, 0.0]],
                                         "lambda0_im": [[0.0, 0.2], [-0.2, 0.0]]})
        assert model.lambda0[0, 1] == pytest.approx(0.1 + 0.2j)
        assert not np.any(model.a_lin)

    def test_validation(self):
        with pytest.raises(ValidationError):
            VibronicModel(spin_labels=["S", "Q"], omegas=[1.0], lambda0=np.zeros((2, 2)),
                          a_lin=np.zeros((1, 2, 2)), b_quad=np.zeros((1, 1, 2, 2)))
        with pytest.raises(ValidationError):
            VibronicModel(spin_labels=["S", "T"], omegas=[1.0], lambda0=[[0.0, 0.1], [0.2, 0.0]],
                          a_lin=np.zeros((1, 2, 2)), b_quad=np.zeros((1, 1, 2, 2)))
        with pytest.raises(DomainError):
            harmonic([0.0])
        with pytest.raises(ValidationError):
            harmonic([1.0], grid_k=24)


class TestGrid:
    def test_harmonic_ground_energy(self):
        assert VibronicGrid(harmonic([1.0])).ground_energy() == pytest.approx(0.5, abs=1e-6)
        assert VibronicGrid(harmonic([1.0, 2.0])).ground_energy() == pytest.approx(1.5, abs=1e-6)

    def test_displaced_oscillator(self):
        omega, a = 1.3, 0.5
        grid = VibronicGrid(harmonic([omega], a=[a]))
        assert grid.ground_energy() == pytest.approx(omega / 2 - a ** 2 / (2 * omega), abs=1e-6)

    def test_product_state_energy(self):
        grid = VibronicGrid(harmonic([1.0, 2.0]))
        psi = grid.product_state(0)
        assert np.linalg.norm(psi) == pytest.approx(1.0)
        assert grid.energy_expectation(psi) == pytest.approx(1.5, abs=1e-8)

    def test_dense_hamiltonian_hermitian(self, toy_dir):
        grid = VibronicGrid(load_vibronic_model(toy_dir / "two_state_vibronic.json"))
        dense = grid.dense_hamiltonian()
        assert dense.shape == (64, 64)
        psi = grid.product_state(1).ravel()
        assert np.vdot(psi, dense @ psi).real == pytest.approx(grid.energy_expectation(psi))

    def test_caps_and_domain(self, toy_dir):
        model = load_vibronic_model(toy_dir / "two_state_vibronic.json")
        with pytest.raises(CapacityError):
            VibronicGrid(model, dim_cap=10)
        grid = VibronicGrid(model)
        with pytest.raises(CapacityError):
            grid.dense_hamiltonian(limit=10)
        with pytest.raises(DomainError):
            grid.product_state(2)


class TestPropagation:
    def test_uncoupled_triplet_stays_empty(self):
        model = VibronicModel(spin_labels=["S", "T"], omegas=[1.0], lambda0=[[0.0, 0.0], [0.0, 0.3]],
                              a_lin=[[[0.1, 0.0], [0.0, -0.1]]], b_quad=np.zeros((1, 1, 2, 2)), degree=1)
        grid = VibronicGrid(model)
        trace = propagate(grid, grid.product_state(0), 0.05, 200, record_every=10)
        assert np.all(trace.p_t == 0.0)

    def test_rabi_oscillation(self):
        coupling = 0.05
        grid = VibronicGrid(rabi_model(coupling))
        trace = propagate(grid, grid.product_state(0), 0.05, 600, record_every=20)
        assert np.max(np.abs(trace.p_t - np.sin(coupling * trace.times) ** 2)) < 1e-4

    def test_norm_drift(self, toy_dir):
        grid = VibronicGrid(load_vibronic_model(toy_dir / "two_state_vibronic.json"))
        trace = propagate(grid, grid.product_state(0), 0.05, 2000, record_every=100, norm_drift_tol=1e-8)
        assert trace.norm_drift <= 1e-8
        assert trace.times[-1] == pytest.approx(100.0)
        assert 0.0 < trace.p_t[-1] < 1.0

    def test_energy_recorded(self, toy_dir):
        grid = VibronicGrid(load_vibronic_model(toy_dir / "two_state_vibronic.json"))
        trace = propagate(grid, grid.product_state(0), 0.05, 200, record_every=50, record_energy=True)
        assert trace.energies.shape == trace.times.shape
        assert np.ptp(trace.energies) < 5e-3

    def test_drift_tolerance_enforced(self, toy_dir):
        grid = VibronicGrid(load_vibronic_model(toy_dir / "two_state_vibronic.json"))
        with pytest.raises(PropagationError):
            propagate(grid, grid.product_state(0), 0.05, 5, norm_drift_tol=-1.0)

    def test_domain(self, toy_dir):
        grid = VibronicGrid(load_vibronic_model(toy_dir / "two_state_vibronic.json"))
        with pytest.raises(DomainError):
            propagate(grid, grid.product_state(0), 0.0, 10)
        with pytest.raises(DomainError):
            propagate(grid, grid.product_state(0), 0.05, 10, record_every=0)


class TestRate:
    def test_linear_population(self):
        times = np.linspace(0.0, 10.0, 21)
        fit = extract_rate(PopulationTrace(times=times, p_t=0.002 * times, norm_drift=0.0))
        assert fit.k_isc_vib == pytest.approx(0.002)
        assert fit.r_squared == pytest.approx(1.0)
        assert fit.n_points == 20
        assert not fit.flagged

    def test_fit_window(self):
        times = np.linspace(0.0, 10.0, 21)
        p_t = np.where(times <= 5.0, 0.01 * times, 0.05)
        fit = extract_rate(PopulationTrace(times=times, p_t=p_t, norm_drift=0.0), fit_window=(0.0, 5.0))
        assert fit.k_isc_vib == pytest.approx(0.01)

    def test_oscillating_population_flagged(self):
        times = np.linspace(0.0, 2.0 * np.pi, 41)
        fit = extract_rate(PopulationTrace(times=times, p_t=np.sin(times) ** 2, norm_drift=0.0))
        assert fit.flagged
        assert any("0.1" in note for note in fit.notes)

    def test_window_outside_trace(self):
        times = np.linspace(0.0, 1.0, 5)
        trace = PopulationTrace(times=times, p_t=times, norm_drift=0.0)
        with pytest.raises(DomainError):
            extract_rate(trace, fit_window=(0.0, 2.0))
        with pytest.raises(DomainError):
            extract_rate(trace, fit_window=(0.5, 0.5))


class TestResources:
    def test_anchor(self):
        estimate = vibronic_resources(5, 19, 128, 2, 3.7e5)
        assert 3.1e10 / 3 <= estimate.toffoli_per_shot <= 3.1e10 * 3
        assert 146 / 2 <= estimate.logical_qubits <= 146 * 2
        assert estimate.family == "vibronic"
        assert estimate.parameters["system_qubits"] == 19 * 7 + 3

    def test_scaling(self):
        base = vibronic_resources(2, 4, 32, 1, 100).toffoli_per_shot
        assert vibronic_resources(2, 4, 32, 1, 200).toffoli_per_shot == 2 * base
        assert vibronic_resources(2, 8, 32, 1, 100).toffoli_per_shot > base

    @pytest.mark.parametrize("args", [(0, 4, 32, 1, 10), (2, 4, 24, 1, 10), (2, 4, 32, 3, 10), (2, 4, 32, 1, 0)])
    def test_domain(self, args):
        with pytest.raises(DomainError):
            vibronic_resources(*args)
