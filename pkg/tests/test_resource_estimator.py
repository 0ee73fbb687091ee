import math

import numpy as np
import pytest

from factorization.cdf import cdf_factorize
from models.errors import DomainError, ValidationError
from models.hamiltonian import ActiveSpaceHamiltonian
from models.resources import ResourceEstimate
from qsp_filter.heaviside import synthesize_heaviside
from resource_estimator.estimates import (
    evolution_proxy_estimate,
    filter_degree,
    soc_evolution_cost,
    threshold_projection_estimate,
    trotter_isc_estimate,
    trotter_qpe_estimate,
    trotter_step_cost,
)
from resource_estimator.presets import preset_table
from resource_estimator.walk_cost import precision_bits, sos_cost, walk_cost
from utils.resource_manager import ResourceManager
from utils.synthetic import synthetic_system

BITS = precision_bits(1.0, 1.6e-4, 1.6e-4, 11)


@pytest.fixture(scope="module")
def orig_bdp():
    return ResourceManager().load_preset("orig_bdp")


class TestPrecision:
    def test_reference_bits(self):
        assert BITS.aleph == 16
        assert BITS.beth == 23

    def test_formula(self):
        bits = precision_bits(3.7, 1e-3, 2e-4, 7)
        assert bits.aleph == math.ceil(2.5 + math.log2(3.7 / 1e-3))
        assert bits.beth == math.ceil(5.625 + math.log2(2 * 3.7 * 7 / 2e-4))

    def test_domain(self):
        with pytest.raises(DomainError):
            precision_bits(0.0, 1e-4, 1e-4, 2)
        with pytest.raises(DomainError):
            precision_bits(1.0, 1e-4, 1e-4, 0)


class TestSumOfSlaters:
    @pytest.mark.parametrize("d_dets, expected", [(1, (1, 0)), (16, (144, 17)), (10000, (302768, 67))])
    def test_reference_costs(self, d_dets, expected):
        assert sos_cost(d_dets) == expected

    def test_domain(self):
        with pytest.raises(DomainError):
            sos_cost(0)


class TestWalkCost:
    def test_batch_endpoints(self):
        l_theta = 4 * 11
        assert walk_cost(44, 11, BITS, batch_b=1).qrom_calls == l_theta
        assert walk_cost(44, 11, BITS, batch_b=l_theta).qrom_calls == 1

    @pytest.mark.parametrize("batch_b", [1, 2, 3, 5, 8, 11, 44])
    def test_trade_off_conservation(self, batch_b):
        walk = walk_cost(44, 11, BITS, batch_b=batch_b)
        assert walk.qrom_calls * batch_b >= walk.l_theta
        if walk.l_theta % batch_b == 0:
            assert walk.qrom_calls * batch_b == walk.l_theta

    def test_doubling_batch_trades_width_for_depth(self):
        for batch_b in (1, 2, 4, 11):
            narrow = walk_cost(44, 11, BITS, batch_b=batch_b)
            wide = walk_cost(44, 11, BITS, batch_b=2 * batch_b)
            assert wide.n_aux - narrow.n_aux == BITS.beth * batch_b
            assert wide.g_toffoli <= narrow.g_toffoli

    def test_monotone_in_rank_and_size(self):
        assert walk_cost(40, 11, BITS).g_toffoli < walk_cost(80, 11, BITS).g_toffoli
        assert walk_cost(40, 11, BITS).g_toffoli < walk_cost(40, 15, BITS).g_toffoli

    def test_constants_override(self):
        base = walk_cost(8, 2, BITS)
        more = walk_cost(8, 2, BITS, constants={"control_overhead": 18})
        assert more.g_toffoli == base.g_toffoli + 10

    def test_domain(self):
        with pytest.raises(DomainError):
            walk_cost(8, 2, BITS, batch_b=0)
        with pytest.raises(DomainError):
            walk_cost(8, 2, BITS, batch_b=9)
        with pytest.raises(DomainError):
            walk_cost(0, 2, BITS)


class TestThresholdProjection:
    def test_structure(self):
        est = threshold_projection_estimate(11, 44, 20.0, 0.005)
        p = est.parameters
        assert est.shots == 133
        assert p["degree"] == filter_degree(20.0, 0.005)
        assert est.breakdown["state_prep"] == 302768
        assert est.breakdown["projector_L"] == p["degree"] * p["g_toffoli"]
        assert est.toffoli_per_shot == sum(est.breakdown.values())
        assert est.logical_qubits == 22 + max(67, p["n_aux"] + 3)
        assert set(est.formulas) == set(est.breakdown)

    def test_halving_delta_roughly_doubles_projectors(self):
        coarse = threshold_projection_estimate(11, 44, 20.0, 0.01)
        fine = threshold_projection_estimate(11, 44, 20.0, 0.005)
        ratio = fine.breakdown["projector_L"] / coarse.breakdown["projector_L"]
        assert 1.5 < ratio <= 2.0

    def test_deterministic(self):
        assert threshold_projection_estimate(15, 60, 30.0, 0.005).to_dict() == \
            threshold_projection_estimate(15, 60, 30.0, 0.005).to_dict()

    def test_monotone_in_size_and_determinants(self):
        small = threshold_projection_estimate(11, 44, 20.0, 0.005)
        assert threshold_projection_estimate(15, 60, 20.0, 0.005).toffoli_per_shot > small.toffoli_per_shot
        assert threshold_projection_estimate(11, 44, 20.0, 0.005, d_dets=20000).toffoli_per_shot > \
            small.toffoli_per_shot

    def test_filter_degree_sources(self):
        assert filter_degree(10.0, 0.1) == 797
        assert filter_degree(1.0, 0.1, source="synthesized") == synthesize_heaviside(0.1, 0.01).degree
        with pytest.raises(DomainError):
            filter_degree(1.0, 0.1, source="table")
        with pytest.raises(DomainError):
            filter_degree(1.0, 0.0)


class TestEvolutionProxy:
    def test_skeleton(self):
        est = evolution_proxy_estimate(4, 16, 5.0, 0.05, gamma=1.0, s_had=1, c_hsoc=0)
        p = est.parameters
        c_sos_2d, _ = sos_cost(20000)
        assert est.total_toffoli == 4 * (c_sos_2d + p["degree"] * p["g_toffoli"])
        assert est.breakdown["soc_evolution"] == 0

    def test_gamma_scales_projected_terms_only(self):
        full = evolution_proxy_estimate(4, 16, 5.0, 0.05, gamma=1.0)
        half = evolution_proxy_estimate(4, 16, 5.0, 0.05, gamma=0.5)
        assert half.breakdown["state_prep"] == 4 * full.breakdown["state_prep"]
        assert half.breakdown["projector"] == 4 * full.breakdown["projector"]
        assert half.breakdown["soc_evolution"] == full.breakdown["soc_evolution"]

    def test_hadamard_shots(self):
        est = evolution_proxy_estimate(11, 44, 20.0, 0.005)
        assert est.shots == 483
        assert est.total_toffoli == est.toffoli_per_shot * 483
        assert est.breakdown["soc_evolution"] == 4 * soc_evolution_cost(11, est.parameters["beth"])

    @pytest.mark.parametrize("gamma", [0.0, 1.5])
    def test_gamma_domain(self, gamma):
        with pytest.raises(DomainError):
            evolution_proxy_estimate(4, 16, 5.0, 0.05, gamma=gamma)

    def test_negative_soc_override(self):
        with pytest.raises(DomainError):
            evolution_proxy_estimate(4, 16, 5.0, 0.05, c_hsoc=-1)


class TestTrotterFamily:
    def test_step_cost_models(self):
        assert soc_evolution_cost(1, 10) == 48
        assert trotter_step_cost(1, 0, 10) == 56
        assert trotter_step_cost(3, 2, 20) > trotter_step_cost(3, 1, 20)

    def test_single_fragment_needs_one_step(self):
        t = np.array([[-0.5, 0.1], [0.1, 0.3]])
        cdf = cdf_factorize(ActiveSpaceHamiltonian(n_orb=2, t=t, v=np.zeros((2, 2, 2, 2))), 1e-10)
        window = synthetic_system(2, 0).window
        for xi in (0.1, 0.01):
            p = trotter_qpe_estimate(cdf, window, xi=xi).parameters
            assert p["c"] == 0.0
            assert p["steps_L"] == p["steps_R"] == 1
            assert p["capped_L"] and p["capped_R"]

    def test_quartering_xi_halves_step(self):
        system = synthetic_system(4, 7)
        coarse = trotter_qpe_estimate(system.cdf, system.window, xi=0.2).parameters
        fine = trotter_qpe_estimate(system.cdf, system.window, xi=0.05).parameters
        for side in ("L", "R"):
            assert fine[f"delta_max_{side}"] == pytest.approx(0.5 * coarse[f"delta_max_{side}"])
            assert 2 * coarse[f"steps_{side}"] - 1 <= fine[f"steps_{side}"] <= 2 * coarse[f"steps_{side}"]

    def test_explicit_commutator_norm(self):
        system = synthetic_system(3, 2)
        est = trotter_qpe_estimate(system.cdf, system.window, c=0.5, degree=101)
        assert est.parameters["c"] == 0.5
        k_steps = max(est.parameters["steps_L"], est.parameters["steps_R"])
        assert est.parameters["K"] == k_steps
        assert est.breakdown["projector_L"] == k_steps * 101 * est.parameters["c_step"]
        assert est.toffoli_per_shot == k_steps * (302768 + 2 * 101 * est.parameters["c_step"])
        assert est.logical_qubits == 6 + max(67, est.parameters["beth"] + 3)

    def test_one_body_cost_by_hand(self):
        t = np.array([[-0.5, 0.1], [0.1, 0.3]])
        cdf = cdf_factorize(ActiveSpaceHamiltonian(n_orb=2, t=t, v=np.zeros((2, 2, 2, 2))), 1e-10)
        est = trotter_qpe_estimate(cdf, synthetic_system(2, 0).window, d_dets=16, degree=3)
        beth = est.parameters["beth"]
        # one step: 2L+1 exponentials of 4 spin orbitals, 8 Givens and 10 phase rotations each
        c_step = (2 * cdf.n_frag + 1) * 18 * (beth - 2)
        assert est.parameters["c_step"] == c_step
        assert est.parameters["K"] == 1
        assert est.breakdown == {"state_prep": 144, "projector_L": 3 * c_step, "projector_R": 3 * c_step}
        assert est.toffoli_per_shot == 144 + 6 * c_step

    def test_step_count_scales_whole_shot(self):
        system = synthetic_system(3, 2)
        est = trotter_qpe_estimate(system.cdf, system.window, c=0.5, degree=101, d_dets=16)
        k_steps = est.parameters["K"]
        assert k_steps > 1
        assert est.breakdown["state_prep"] == k_steps * 144
        assert est.toffoli_per_shot == k_steps * (144 + 202 * est.parameters["c_step"])

    def test_heuristic_above_mode_cap(self):
        system = synthetic_system(6, 3)
        est = trotter_isc_estimate(system.cdf, system.window, y3_mode_cap=10)
        assert est.parameters["c"] > 0.0
        assert est.shots == 483
        assert est.toffoli_per_shot == sum(est.breakdown.values())


class TestPresets:
    def test_qubits_below_qubitization(self, orig_bdp):
        absorption = {row.parameters["n_orb"]: row for row in preset_table(orig_bdp, "absorption")}
        isc = {row.parameters["n_orb"]: row for row in preset_table(orig_bdp, "isc")}
        trotter = preset_table(orig_bdp, "trotter")
        assert [row.family for row in trotter[:2]] == ["trotter_qpe", "trotter_isc"]
        for row in trotter:
            n_orb = row.parameters["n_orb"]
            reference = absorption[n_orb] if row.family == "trotter_qpe" else isc[n_orb]
            assert row.logical_qubits < reference.logical_qubits

    @pytest.mark.parametrize("family", ["absorption", "isc"])
    def test_monotone_in_active_space(self, orig_bdp, family):
        rows = preset_table(orig_bdp, family)
        assert [row.to_row()["N"] for row in rows] == [11, 15, 19]
        for small, large in zip(rows, rows[1:]):
            assert large.toffoli_per_shot >= small.toffoli_per_shot
            assert large.logical_qubits >= small.logical_qubits

    def test_deterministic(self, orig_bdp):
        first = [row.to_dict() for row in preset_table(orig_bdp, "absorption")]
        second = [row.to_dict() for row in preset_table(orig_bdp, "absorption")]
        assert first == second

    def test_vibronic_row(self, orig_bdp):
        (row,) = preset_table(orig_bdp, "vibronic")
        assert row.to_row()["N"] == 5
        assert 146 / 2 <= row.logical_qubits <= 146 * 2

    def test_every_bundled_preset_loads(self):
        manager = ResourceManager()
        assert manager.list_presets() == ["br_aza", "orig_bdp", "pt_bdp", "trz_aza"]
        for name in manager.list_presets():
            preset = manager.load_preset(name)
            assert len(preset["active_spaces"]) == 3

    def test_bad_family_and_preset(self, orig_bdp):
        with pytest.raises(ValidationError):
            preset_table(orig_bdp, "fluorescence")
        with pytest.raises(ValidationError):
            preset_table({"name": "empty"}, "absorption")
        with pytest.raises(ValidationError):
            preset_table({"name": "empty", "active_spaces": [4]}, "vibronic")


def test_breakdown_must_sum():
    with pytest.raises(ValidationError):
        ResourceEstimate(family="x", logical_qubits=1, toffoli_per_shot=5, shots=1,
                         breakdown={"a": 2}, formulas={"a": "C"})
    with pytest.raises(ValidationError):
        ResourceEstimate(family="x", logical_qubits=1, toffoli_per_shot=2, shots=1,
                         breakdown={"a": 2}, formulas={})
