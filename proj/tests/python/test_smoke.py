"""End-to-end smoke tests through the Python bindings."""

import numpy as np
import pytest

import loqs


def test_ideal_scenario_metrics():
    result = loqs.run_scenario(loqs.builtin_scenario("cswap-ideal-truth-table"))
    assert result.report.f_zzz.value == pytest.approx(1.0, abs=1e-9)
    assert result.report.coherence.value == pytest.approx(1.0, abs=1e-9)
    assert result.report.verdict == loqs.EntanglementClass.RequiresGenuineTripartite
    for p in result.success_per_input.values():
        assert p == pytest.approx(1.0 / 162.0, abs=1e-9)
    assert result.truth.probs.shape == (8, 8)


def test_logical_operator_is_fredkin():
    op = loqs.logical_operator("cswap-simplified")
    assert loqs.operator_distance(op.u, loqs.fredkin_matrix()) < 1e-9
    assert op.success == pytest.approx(1.0 / 162.0, abs=1e-9)


def test_noise_scenario_and_serialization():
    scenario = loqs.builtin_scenario("cswap-measured-noise")
    back = loqs.Scenario.from_json(scenario.to_json())
    assert back.to_json() == scenario.to_json()
    result = loqs.run_scenario(scenario)
    assert 0.75 < result.report.f_zzz.value < 0.95
    assert 0.5 < result.report.coherence.value < 0.9


def test_sampled_determinism_and_sweep():
    scenario = loqs.builtin_scenario("cswap-measured-noise")
    scenario.shots = 20000
    scenario.seed = 5
    a = loqs.run_scenario(scenario)
    b = loqs.run_scenario(scenario)
    assert a.to_json() == b.to_json()
    assert a.counts_csv() == b.counts_csv()

    rows = loqs.sweep(scenario, "overlap", [0.9, 1.0], jobs=2)
    assert [r.value for r in rows] == [0.9, 1.0]
    assert "overlap" in loqs.sweep_table_csv("overlap", rows)


def test_tomography_roundtrip():
    rho = loqs.imperfect_entangled_pair(0.962)
    data = loqs.simulate_tomography(rho, 0, 0)
    est = loqs.project_psd(loqs.reconstruct_linear(data))
    assert np.allclose(est, rho, atol=1e-9)
    bell = np.zeros(4, dtype=complex)
    bell[0] = bell[3] = np.sqrt(0.5)
    assert loqs.state_fidelity(est, bell) == pytest.approx(0.962, abs=1e-9)
    assert loqs.concurrence(est) == pytest.approx(
        loqs.werner_concurrence(0.962), abs=1e-9
    )


def test_validation_and_confidence():
    report = loqs.validate_builtins()
    assert report.ok
    assert loqs.gaussian_confidence(0.69, 0.18, 0.5) > 0.85
