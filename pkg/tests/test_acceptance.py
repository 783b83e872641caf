"""Acceptance gate: the seven headline checks, one printed line each.

Each criterion prints a PASS/FAIL line (bypassing capture so the verdicts
always appear in the run log) and then asserts, so a regression fails the
suite loudly.
"""

import json

import numpy as np
import pytest

from conftest import random_hermitian, random_psd, random_skew

from test_cli import assert_json_close, read_csv
from test_geodesic import brute_force_cost

from denflow.cli import main as cli_main
from denflow.cli import save_matrix
from denflow.geodesic import sample_path, solve_geodesic
from denflow.linalg import (
    commutator,
    eig_hermitian,
    expm_skew,
    frob_inner,
    frob_norm,
    logm_unitary,
)
from denflow.regularize import (
    RegularizedModel,
    model_path,
    residual,
    solve_regularization,
    synth_noisy_path,
)
from denflow.tangent import rotation_flow, split_tangent
from denflow.transcription import solve_discrete_path

GOLDEN = None  # set lazily from test_cli's path


def report(capsys, index, label, ok):
    with capsys.disabled():
        print(f"[ACCEPTANCE] criterion {index} ({label}): {'PASS' if ok else 'FAIL'}")
    assert ok, f"criterion {index} ({label}) failed"


def test_criterion_1_two_by_two_regimes(capsys):
    rho0 = np.diag([1.0, 0.0]).astype(complex)
    rho1 = np.diag([0.0, 1.0]).astype(complex)

    fade = solve_geodesic(rho0, rho1, 0.1)
    ok = frob_norm(fade.X) <= 1e-6
    ok &= frob_norm(fade.Z - np.diag([-1.0, 1.0])) <= 1e-6

    spin = solve_geodesic(rho0, rho1, 10.0)
    ok &= frob_norm(spin.Z) <= 1e-6
    ok &= abs(frob_norm(spin.X) - np.pi / np.sqrt(2)) <= 1e-4
    states = sample_path(spin, rho0, np.linspace(0.0, 1.0, 101))
    ok &= bool(np.all(np.linalg.eigvalsh(states).min(axis=1) <= 1e-9))

    # regime crossover: bisect on which mechanism the solver selects
    lo, hi = 1.4, 1.8  # fade at lo, rotation at hi
    for _ in range(20):
        mid = (lo + hi) / 2
        sol = solve_geodesic(rho0, rho1, mid)
        if frob_norm(sol.X) > 1.0:  # rotation regime
            hi = mid
        else:
            lo = mid
    crossover = (lo + hi) / 2
    ok &= abs(crossover - np.pi / 2) <= 1e-3
    report(capsys, 1, "2x2 fade/rotation regimes and crossover", ok)


def test_criterion_2_three_by_three_reproduction(capsys):
    rho0 = np.diag([1.0, 2.0, 3.0]).astype(complex)
    rho1 = np.diag([3.0, 2.0, 1.0]).astype(complex)

    # the reported solution — half turn about (1,1,0)/sqrt(2), entries +-2.2
    # exactified to +-pi/sqrt(2), drift diag(1,1,-2) — is feasible
    a = np.pi / np.sqrt(2)
    X_reported = np.array(
        [[0.0, 0.0, a], [0.0, 0.0, -a], [-a, a, 0.0]], dtype=complex
    )
    Z_reported = np.diag([1.0, 1.0, -2.0]).astype(complex)
    U = expm_skew(X_reported)
    ok = frob_norm(U @ (rho0 + Z_reported) @ U.conj().T - rho1) <= 1e-6

    # the large-epsilon optimum, frozen from the exhaustive oracle
    # (permutations x dense phase grid with golden polish): a quarter turn
    # with Z = 0 and |X| = pi/sqrt(2).  The reported solution's norm is
    # pi*sqrt(2), which the oracle dominates; see the decisions ledger.
    frozen = np.pi / np.sqrt(2)
    oracle_cost = brute_force_cost(rho0.real, rho1.real, 50.0, coarse=24)
    ok &= abs(oracle_cost - frozen) <= 1e-3
    sol = solve_geodesic(rho0, rho1, 50.0)
    ok &= frob_norm(sol.Z) <= 1e-6
    ok &= abs(frob_norm(sol.X) - frozen) <= 1e-3
    ok &= abs(sol.cost_total - oracle_cost) <= 1e-3
    report(capsys, 2, "3x3 reported solution feasible; optimum matches oracle", ok)


def test_criterion_3_splitting_property_suite(capsys):
    rng = np.random.default_rng(2024)
    ok = True
    for _ in range(1000):
        n = int(rng.integers(2, 7))
        rho = random_psd(rng, n)
        T = random_hermitian(rng, n)
        split = split_tangent(rho, T)
        recon = split.rot + split.u + (split.trace / n) * np.eye(n)
        ok &= frob_norm(recon - T) <= 1e-10
        ok &= abs(frob_inner(split.rot, split.u)) <= 1e-10
        ok &= frob_norm(commutator(split.u, rho)) <= 1e-9
        ok &= abs(np.trace(split.u)) <= 1e-10
        if not ok:
            break
    for _ in range(60):
        n = int(rng.integers(2, 7))
        rho = random_psd(rng, n)
        X = random_skew(rng, n)
        base = np.sort(np.linalg.eigvalsh(rho))
        tr = np.trace(rho).real
        for t in np.linspace(0.0, 1.0, 7):
            state = rotation_flow(rho, X, t)
            ok &= np.max(np.abs(np.sort(np.linalg.eigvalsh(state)) - base)) <= 1e-9
            ok &= abs(np.trace(state).real - tr) <= 1e-9
        if not ok:
            break
    report(capsys, 3, "tangent splitting and rotation-flow properties", ok)


def test_criterion_4_discretized_consistency(capsys):
    rho0 = np.diag([1.0, 0.0]).astype(complex)
    rho1 = np.diag([0.0, 1.0]).astype(complex)
    ok = True
    for eps in (0.1, 1.0, 10.0):
        base = solve_geodesic(rho0, rho1, eps)
        path = solve_discrete_path(rho0, rho1, eps, steps=50)
        ok &= path.converged
        ok &= path.cost <= base.cost_total + 1e-2
        ok &= path.endpoint_residual <= 1e-4
        for trace in path.objective_trace:
            ok &= all(b <= a + 1e-12 for a, b in zip(trace, trace[1:]))
        for k in range(path.N):
            u, rho = path.us[k], path.states[k]
            ok &= frob_norm(rho @ u - u @ rho) <= 1e-8
        if not ok:
            break
    report(capsys, 4, "discretized solve matches constant-control bound", ok)


def test_criterion_5_regularization_reproduction(capsys):
    rho0 = np.diag([1.0, 0.1]).astype(complex)
    X = np.array([[0.0, -1.6], [1.6, 0.0]], dtype=complex)
    times = np.arange(1, 21) * 0.05
    vals, V = np.linalg.eigh(rho0)
    truth = RegularizedModel(V=V.astype(complex), p=vals, z=np.zeros(2), X=X,
                             objective=0.0)

    noisy = synth_noisy_path(rho0, X, np.zeros(2), times, noise_amp=0.05, seed=7)
    model = solve_regularization(noisy)
    ok = bool(np.all(model.p >= -1e-12))
    ok &= bool(np.all(model.p + model.z >= -1e-12))
    ok &= abs(model.z.sum()) <= 1e-12
    ok &= frob_norm(model.V @ model.V.conj().T - np.eye(2)) <= 1e-10
    ok &= frob_norm(model.X + model.X.conj().T) <= 1e-12
    Zhat = (model.V * model.z[None, :]) @ model.V.conj().T
    ok &= frob_norm(commutator(model.rho0(), Zhat)) <= 1e-12
    ok &= model.objective <= 1.2 * residual(truth, noisy)

    clean = synth_noisy_path(rho0, X, np.zeros(2), times, noise_amp=0.0, seed=7)
    fit = solve_regularization(clean)
    misfits = [
        frob_norm(a - b)
        for a, b in zip(model_path(fit, times), model_path(truth, times))
    ]
    ok &= max(misfits) <= 1e-4
    report(capsys, 5, "noisy-flow fit constraints, objective, and recovery", ok)


def test_criterion_6_numerical_kernels(capsys):
    rng = np.random.default_rng(99)
    ok = True
    for _ in range(50):
        n = int(rng.integers(2, 9))
        A = random_hermitian(rng, n)
        vals, vecs = eig_hermitian(A)
        ok &= frob_norm((vecs * vals[None, :]) @ vecs.conj().T - A) <= 1e-9
        ok &= frob_norm(vecs.conj().T @ vecs - np.eye(n)) <= 1e-10
        # determinism: identical inputs give bitwise-identical output
        vals2, vecs2 = eig_hermitian(A.copy())
        ok &= np.array_equal(vals, vals2) and np.array_equal(vecs, vecs2)
        if not ok:
            break
    for _ in range(50):
        n = int(rng.integers(2, 7))
        X = random_skew(rng, n)
        # keep the spectrum inside the principal branch
        phases = np.linalg.eigvalsh(-1j * X)
        X = X * (0.8 * np.pi / max(1e-12, np.abs(phases).max()))
        Q = expm_skew(X)
        ok &= frob_norm(Q @ Q.conj().T - np.eye(n)) <= 1e-10
        ok &= frob_norm(logm_unitary(Q) - X) <= 1e-8
        if not ok:
            break
    report(capsys, 6, "eigendecomposition and exp/log kernels", ok)


def test_criterion_7_cli_golden_files(capsys, tmp_path):
    import pathlib

    golden = pathlib.Path(__file__).parent / "golden"
    save_matrix(tmp_path / "rho0.json", np.diag([1.0, 0.0]).astype(complex))
    save_matrix(tmp_path / "rho1.json", np.diag([0.0, 1.0]).astype(complex))
    save_matrix(tmp_path / "rho0spd.json", np.diag([1.0, 0.1]).astype(complex))
    save_matrix(tmp_path / "x.json",
                np.array([[0.0, -1.6], [1.6, 0.0]], dtype=complex), kind="skew")
    ok = True

    out = tmp_path / "interp"
    ok &= cli_main([
        "interpolate", "--rho0", str(tmp_path / "rho0.json"),
        "--rho1", str(tmp_path / "rho1.json"), "--epsilon", "10",
        "--samples", "5", "--glyphs", "--out", str(out), "--quiet",
    ]) == 0
    try:
        for name in ("solution.json", "glyphs.json"):
            assert_json_close(
                json.loads((out / name).read_text()),
                json.loads((golden / "interpolate" / name).read_text()),
            )
        got_header, got_data = read_csv(out / "path.csv")
        want_header, want_data = read_csv(golden / "interpolate" / "path.csv")
        assert got_header == want_header
        assert np.abs(got_data - want_data).max() <= 1e-6
    except AssertionError:
        ok = False

    out_a, out_b = tmp_path / "synth_a", tmp_path / "synth_b"
    for out in (out_a, out_b):
        ok &= cli_main([
            "synth", "--rho0", str(tmp_path / "rho0spd.json"),
            "--x", str(tmp_path / "x.json"), "--z", "0,0",
            "--times", "0.05:0.05:1", "--noise", "0.05", "--seed", "42",
            "--out", str(out), "--quiet",
        ]) == 0
    bytes_a = (out_a / "dataset.json").read_bytes()
    ok &= bytes_a == (out_b / "dataset.json").read_bytes()
    ok &= bytes_a == (golden / "synth" / "dataset.json").read_bytes()

    nf = tmp_path / "nf"
    ok &= cli_main([
        "synth", "--rho0", str(tmp_path / "rho0spd.json"),
        "--x", str(tmp_path / "x.json"), "--z", "0,0",
        "--times", "0.05:0.05:1", "--noise", "0", "--seed", "42",
        "--out", str(nf), "--quiet",
    ]) == 0
    out = tmp_path / "fit"
    ok &= cli_main([
        "regularize", "--data", str(nf / "dataset.json"), "--seeds", "2",
        "--out", str(out), "--quiet",
    ]) == 0
    try:
        assert_json_close(
            json.loads((out / "model.json").read_text()),
            json.loads((golden / "regularize" / "model.json").read_text()),
        )
    except AssertionError:
        ok = False
    report(capsys, 7, "CLI outputs match golden files; synth byte-stable", ok)
