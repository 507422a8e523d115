import json
import math

import numpy as np
import pytest

import qumode


def test_vp_gate_is_unitary_and_block_diagonal():
    u = qumode.vp_gate(0.4 - 0.7j, 8)
    assert u.shape == (16, 16)
    assert np.allclose(u.conj().T @ u, np.eye(16), atol=1e-12)
    assert np.all(u[:8, 8:] == 0)


def test_commutator_is_truncated_identity():
    a = qumode.annihilation(6)
    expected = np.eye(6)
    expected[5, 5] -= 6
    assert np.allclose(a @ a.conj().T - a.conj().T @ a, expected, atol=1e-12)


def test_coherent_state_fidelity_against_vacuum():
    vac = qumode.target("vacuum")
    assert abs(qumode.fidelity([1, 0, 0, 0, 0], vac) - math.exp(-1)) <= 1e-5
    assert qumode.fidelity([0, 0, 0, 0, 0], vac) == pytest.approx(1.0)


def test_ansatz_output_and_reduced_state():
    psi = qumode.apply_ansatz([0.3, 0.1, 0.2, 0.4, 0.5, -0.2, 0.6, 1.0, 0.0, 2.0])
    assert psi.shape == (20,)
    assert np.linalg.norm(psi) == pytest.approx(1.0)
    rho = qumode.partial_trace_qubit(psi, 10)
    assert np.trace(rho).real == pytest.approx(1.0)


def test_targets_are_normalized():
    for spec in ("local-gaussian", "gaussian", "non-gaussian", "fock:3"):
        assert np.linalg.norm(qumode.target(spec)) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        qumode.target("banana")


def test_objective_transform():
    assert qumode.swap_test_p0(0.36) == pytest.approx(0.68)
    assert qumode.objective_from_p0(0.875) == pytest.approx(1 - math.sqrt(0.75))
    vac = qumode.target("vacuum")
    assert qumode.objective([0] * 5, vac, mode="sampled", shots=100, seed=1) == 0.0


def test_minimize_python_callable():
    result = qumode.minimize(lambda x: sum((v - 1.0) ** 2 for v in x), [0.0, 0.0, 0.0], optimizer="nelder-mead")
    assert result["fun"] < 1e-6
    assert np.allclose(result["x"], 1.0, atol=1e-3)
    assert result["total_evals"] >= result["nfev"]


def test_wigner_vacuum_and_single_photon():
    vac = np.zeros((10, 10), complex)
    vac[0, 0] = 1
    one = np.zeros((10, 10), complex)
    one[1, 1] = 1
    assert qumode.wigner_at(vac, 0, 0) == pytest.approx(1 / math.pi, abs=1e-8)
    assert qumode.wigner_at(one, 0, 0) == pytest.approx(-1 / math.pi, abs=1e-8)
    axis = np.linspace(-5, 5, 201)
    grid = qumode.wigner(vac, axis, axis)
    assert grid.shape == (201, 201)
    assert abs(grid.sum() * (axis[1] - axis[0]) ** 2 - 1) <= 0.02


def test_run_cell_local_gaussian():
    cfg = {"target": "local-gaussian", "optimizer": "powell", "layers": 1, "trials": 3, "seed": 2}
    out = qumode.run_cell(json.dumps(cfg))
    assert out["row"]["trials"] == 3
    assert out["row"]["infidelity_mean"] <= 0.05
    assert len(out["trials"]) == 3
    with pytest.raises(ValueError):
        qumode.run_cell(json.dumps({"optimizers": ["powell", "spsa"]}))


def test_run_sweep_writes_aggregate(tmp_path):
    cfg = {"optimizers": ["powell", "cobyla"], "trials": 2}
    rows = qumode.run_sweep(json.dumps(cfg), tmp_path)
    assert len(rows) == 2
    assert (tmp_path / "aggregate.csv").exists()
