"""Acceptance suite: one test per criterion, each printing a pass line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
report; every tolerance is pinned here.
"""

import math
import time

import numpy as np
import pytest

from qhopfield import (
    FieldMode,
    ModelParams,
    bogolyubov_bounds,
    critical_beta,
    curvature_duhamel,
    dense_hamiltonian,
    apply_hamiltonian,
    asymptote_ratio,
    diagonal_energies,
    fixed_points,
    free_energy,
    hebbian_couplings,
    minimize_f0,
    params_from_patterns,
    run_convergence,
    run_retrieval,
    run_self_averaging,
    sample_patterns,
    slq_free_energy,
    spectrum,
)
from qhopfield.cli import main
from qhopfield.experiments import _dense_free_energy, _random_symmetric, _child_rng
from tests.conftest import kron_hamiltonian, pattern_matrix, random_params


def report(number: int, message: str) -> None:
    print(f"[PASS] criterion {number:2d}: {message}", flush=True)


def test_criterion_01_single_qubit_closed_form():
    cases = [(0.3, 0.4, 1.0), (1.0, 0.0, 5.0), (0.0, 1.0, 2.0)]
    empty = sample_patterns(1, 0, seed=0)

    def solve(h, d, beta):
        params = params_from_patterns(empty, beta=beta, d=d, field=FieldMode.explicit([h]))
        return free_energy(spectrum(params), beta, 1)

    solve(*cases[0][:2], cases[0][2])  # warm up the code paths before timing
    worst_err, worst_time = 0.0, 0.0
    for h, d, beta in cases:
        start = time.perf_counter()
        value = solve(h, d, beta)
        elapsed = time.perf_counter() - start
        expected = -math.log(2 * math.cosh(beta * math.hypot(h, d))) / beta
        worst_err = max(worst_err, abs(value - expected))
        worst_time = max(worst_time, elapsed)
    assert worst_err <= 1e-12
    assert worst_time < 1e-3
    report(1, f"single-qubit closed form, max abs err {worst_err:.1e}, max {worst_time*1e6:.0f} us")


def test_criterion_02_four_level_oracle():
    xi = pattern_matrix([[1.0, 1.0]])
    beta, d = 1.3, 0.7
    params = params_from_patterns(xi, beta=beta, d=d, field=FieldMode.uniform(0.0))
    spec = spectrum(params)

    # Independent oracle: explicit Pauli kron products, no bit arithmetic.
    oracle_h = kron_hamiltonian(np.array([[0.5, 0.5], [0.5, 0.5]]), np.zeros(2), d)
    oracle_evals = np.linalg.eigvalsh(oracle_h)
    np.testing.assert_allclose(spec.eigenvalues, oracle_evals, atol=1e-12)

    oracle_f = -math.log(math.fsum(math.exp(-beta * e) for e in oracle_evals)) / (beta * 2)
    assert free_energy(spec, beta, 2) == pytest.approx(oracle_f, abs=1e-12)
    report(2, "n=2 spectrum and free energy match the hand-built 4x4 oracle")


def test_criterion_03_matrix_free_equivalence(rng):
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 9))
        params = random_params(rng, n)
        hmat = dense_hamiltonian(params)
        for k in range(params.dim):
            unit = np.zeros(params.dim)
            unit[k] = 1.0
            err = np.max(np.abs(apply_hamiltonian(params, unit) - hmat[:, k]))
            worst = max(worst, err)
    assert worst <= 1e-12
    report(3, f"100 random instances, matvec vs dense columns, max err {worst:.1e}")


def test_criterion_04_bogolyubov_suite():
    start = time.perf_counter()
    violations = 0
    for t in range(1000):
        rng = _child_rng(4, 201, t)
        dim = 1 << int(rng.integers(1, 5))
        h0 = _random_symmetric(rng, dim)
        h1 = _random_symmetric(rng, dim)
        beta = float(rng.uniform(0.1, 3.0))
        bounds = bogolyubov_bounds(h0, h1, beta)  # raises on contract violation
        if not (bounds.lower - 1e-10 <= bounds.delta_f <= bounds.upper + 1e-10):
            violations += 1
    elapsed = time.perf_counter() - start
    assert violations == 0
    assert elapsed < 30.0
    report(4, f"1000 Bogolyubov trials, zero violations, {elapsed:.1f}s")


def test_criterion_05_duhamel_curvature():
    step = 1e-3
    worst_rel, most_negative = 0.0, 0.0
    for t in range(100):
        rng = _child_rng(5, 202, t)
        nq = int(rng.integers(1, 5))
        dim = 1 << nq
        h0 = _random_symmetric(rng, dim)
        h1 = _random_symmetric(rng, dim)
        beta = float(rng.uniform(0.2, 2.0))
        value = curvature_duhamel(h0, h1, beta, t=0.0)
        most_negative = min(most_negative, value)
        fd = -(
            _dense_free_energy(h0 + step * h1, beta, nq)
            - 2.0 * _dense_free_energy(h0, beta, nq)
            + _dense_free_energy(h0 - step * h1, beta, nq)
        ) / step**2
        worst_rel = max(worst_rel, abs(value - fd) / abs(fd))
    assert most_negative >= -1e-12
    assert worst_rel <= 1e-5
    report(5, f"100 Duhamel trials, min value {most_negative:.1e}, worst FD rel err {worst_rel:.1e}")


def test_criterion_06_gauge_invariance_and_zero_variance():
    beta, d = 1.5, 0.5
    field = FieldMode.pattern_aligned(0.2)
    reference = params_from_patterns(pattern_matrix(np.ones((1, 10))), beta, d, field)
    f_ref = free_energy(spectrum(reference), beta, 10)
    worst = 0.0
    for seed in range(50):
        xi = sample_patterns(10, 1, seed=seed)
        params = params_from_patterns(xi, beta, d, field)
        worst = max(worst, abs(free_energy(spectrum(params), beta, 10) - f_ref))
    assert worst <= 1e-12

    summaries = run_self_averaging(
        [10], p=1, beta=beta, d=d, field=field, samples=50, seed=6
    )
    assert summaries[0].var_f <= 1e-20
    report(6, f"50 single-pattern instances at n=10, max |df| {worst:.1e}, var {summaries[0].var_f:.1e}")


def test_criterion_07_self_averaging_scaling():
    start = time.perf_counter()
    summaries = run_self_averaging(
        [6, 8, 10, 12],
        p=2,
        beta=1.5,
        d=0.5,
        field=FieldMode.uniform(0.1),
        samples=300,
        seed=0,
    )
    elapsed = time.perf_counter() - start
    scaled = [s.n_times_var for s in summaries]
    ratio = max(scaled) / min(scaled)
    assert ratio < 3.0
    first, last = summaries[0], summaries[-1]
    assert last.var_f < first.var_f
    assert last.var_ci[1] < first.var_ci[0]  # bootstrap intervals separate
    assert elapsed < 600.0
    report(7, f"N*Var ratio {ratio:.2f} < 3, Var(12) < Var(6), CIs separate, {elapsed:.0f}s")


def test_criterion_08_mean_field_convergence():
    start = time.perf_counter()
    records = run_convergence([6, 8, 10, 12], beta=1.5, d=0.5, h=0.2, samples=1, seed=0)
    elapsed = time.perf_counter() - start
    gaps = [rec.gap_corrected for rec in records]
    assert all(later < earlier for earlier, later in zip(gaps, gaps[1:]))
    assert gaps[-1] < gaps[0] / 1.5
    assert elapsed < 120.0
    report(8, f"corrected gap strictly decreasing, gap(12)={gaps[-1]:.4f} < gap(6)/1.5, {elapsed:.1f}s")


def test_criterion_09_mean_field_fixed_points():
    worst_m, worst_res = 0.0, 0.0
    for d in (0.3, 0.6, 0.9):
        sol = minimize_f0(1e4, d, 0.0)
        worst_m = max(worst_m, abs(sol.m_star - math.sqrt(1 - d * d)))
        worst_res = max(worst_res, sol.residual)
    assert worst_m <= 1e-3
    assert worst_res <= 1e-10
    report(9, f"beta=1e4 minimizers within {worst_m:.1e} of sqrt(1-d^2), residual {worst_res:.1e}")


def test_criterion_10_critical_curve():
    assert critical_beta(0.0).beta_c == 1.0

    grid = [round(0.1 * k, 1) for k in range(1, 10)]
    points = [critical_beta(d) for d in grid]
    worst_res = max(pt.residual for pt in points)
    assert worst_res <= 1e-12
    betas = [pt.beta_c for pt in points]
    assert all(b2 > b1 for b1, b2 in zip(betas, betas[1:]))

    near_one = critical_beta(1 - 1e-6)
    ratio = asymptote_ratio(near_one)
    # Frozen derived value of the ratio at d = 1 - 1e-6 (atanh(d)/d over the
    # asymptote): 1.0501727.  The asymptote reproduces beta_c to 4.78%,
    # within the 5% agreement band.
    assert ratio == pytest.approx(1.0501727, abs=1e-6)
    asym = near_one.beta_c / ratio
    assert abs(near_one.beta_c - asym) <= 0.05 * near_one.beta_c
    report(10, f"beta_c(0)=1, grid residual {worst_res:.1e}, monotone, asymptote ratio {ratio:.4f}")


def test_criterion_11_bifurcation():
    for d in (0.2, 0.5, 0.8):
        beta_c = critical_beta(d).beta_c
        below = fixed_points(0.99 * beta_c, d, 0.0)
        assert [pt.m for pt in below] == [0.0]
        above = fixed_points(1.01 * beta_c, d, 0.0)
        positive_stable = [pt for pt in above if pt.m > 0 and pt.stable]
        assert len(positive_stable) == 1
    report(11, "only m=0 at 0.99 beta_c; a nonzero stable branch at 1.01 beta_c (d=0.2,0.5,0.8)")


def test_criterion_12_slq_vs_dense():
    xi = sample_patterns(10, 2, seed=11)
    params = params_from_patterns(xi, beta=1.0, d=0.5, field=FieldMode.uniform(0.1))
    dense = free_energy(spectrum(params), 1.0, 10)
    start = time.perf_counter()
    estimate, stderr = slq_free_energy(params, 1.0, probes=64, krylov_steps=60, seed=3)
    elapsed = time.perf_counter() - start
    rel = abs(estimate - dense) / abs(dense)
    assert rel <= 5e-3
    assert abs(estimate - dense) <= 3 * stderr
    assert elapsed < 10.0
    report(12, f"SLQ rel err {rel:.1e} <= 5e-3, {abs(estimate-dense)/stderr:.2f} sigma, {elapsed:.1f}s")


def test_criterion_13_retrieval_consistency():
    result = run_retrieval(10, beta=30.0, d=0.2, h=0.2, seed=7)
    diff = abs(result.overlap - result.meanfield_m)
    assert diff < 0.1
    report(13, f"|<m1> - m*| = {diff:.4f} < 0.1 at n=10, beta=30, d=0.2, h=0.2")


def test_criterion_14_end_to_end_determinism(tmp_path):
    commands = [
        ["exact", "--n", "4", "--p", "1", "--beta", "2", "--seed", "3"],
        ["meanfield", "--beta", "10000", "--d", "0.6"],
        ["phase-diagram", "--d-grid", "0.2:0.8:0.3"],
        ["selfavg", "--n-grid", "4,5", "--p", "2", "--samples", "50", "--seed", "9"],
        ["converge", "--n-grid", "4,6", "--seed", "2"],
        ["retrieval", "--n", "6", "--seed", "5"],
        ["norms", "--n-grid", "16,32", "--samples", "5", "--seed", "8"],
        ["verify", "--trials", "20", "--seed", "1"],
    ]
    for index, args in enumerate(commands):
        first = tmp_path / f"run{index}_a.csv"
        second = tmp_path / f"run{index}_b.csv"
        assert main(args + ["-o", str(first)]) == 0, args
        assert main(args + ["-o", str(second)]) == 0, args
        assert first.read_bytes() == second.read_bytes(), args
    report(14, "all 8 subcommands re-ran byte-identically with fixed seeds")
