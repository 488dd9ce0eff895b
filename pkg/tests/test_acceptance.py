"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines.  Three criteria pin external reference values that turn out to be
inconsistent with the stated problem data (they are reproducible only with
a control weight near 1.2 instead of 1, respectively with the reaction term
doubled inside the gain synthesis); the tests assert the stated tolerances
anyway and fail honestly rather than loosening the gate:

* criterion 2  -- entry (0,0) of the reference matrix block,
* criterion 4  -- the two least stable closed-loop roots and mu_0,
* criterion 8  -- the cubic-feedback verdict at level 4.0.
"""

import time

import numpy as np
import pytest
from scipy.linalg import expm, solve_continuous_are

import rodlqr
from rodlqr.cli import main
from rodlqr.cubic import solve_cubic_tensor, tensor_equation_residual
from rodlqr.finite_model import closed_loop_matrix
from rodlqr.symtensor import poly_eval, tensor_sym_error
from rodlqr.albrekht import hjb_residual_poly


def report(num, ok, detail=""):
    print(f"[criterion {num:2d}] {'PASS' if ok else 'FAIL'} {detail}")
    return ok


def test_criterion_1_open_loop_spectrum():
    t0 = time.perf_counter()
    basis = rodlqr.build_basis(1.0, 11)
    elapsed = time.perf_counter() - t0
    nu_ref = np.array([0.8603, 3.4256, 6.4373, 9.5293, 12.6453])
    ok_nu = np.abs(basis.nus[:5] - nu_ref).max() <= 1e-4
    ok_lam = np.abs(basis.lams[:5] + basis.nus[:5] ** 2).max() <= 1e-3
    ok_time = elapsed < 0.1
    ok = report(
        1, ok_nu and ok_lam and ok_time,
        f"nu within 1e-4: {ok_nu}, lambda consistent: {ok_lam}, {elapsed:.3f}s < 0.1s",
    )
    assert ok


def test_criterion_2_riccati_block():
    basis = rodlqr.build_basis(1.0, 11)
    w = rodlqr.default_weights(basis)
    t0 = time.perf_counter()
    sol = rodlqr.riccati_iterate(basis, w, max_iter=50, tol=0.0)  # fixed 50 sweeps
    elapsed = time.perf_counter() - t0
    reference = np.array(
        [
            [0.5757, -0.0018, -0.0002, -0.0000],
            [-0.0018, 0.0425, -0.0000, -0.0000],
            [-0.0002, -0.0000, 0.0121, -0.0000],
            [-0.0000, -0.0000, -0.0000, 0.0055],
        ]
    )
    diff = np.abs(sol.p[:4, :4] - reference)
    ok_block = diff.max() <= 5e-4
    ok_time = elapsed < 1.0
    n_match = int((diff <= 5e-4).sum())
    ok = report(
        2, ok_block and ok_time,
        f"{n_match}/16 entries within 5e-4; worst {diff.max():.4f} at "
        f"{np.unravel_index(diff.argmax(), diff.shape)} "
        f"(computed {sol.p[0, 0]:.4f} vs reference 0.5757); {elapsed:.3f}s < 1s",
    )
    assert ok, (
        "entry (0,0) of the reference block is not the solution of the stated "
        "problem (Q=I, R=1); the full block is reproduced only with r ~ 1.2"
    )


def test_criterion_3_riccati_oracle_equivalence():
    worst = 0.0
    for n in (1, 2, 3, 5, 11):
        basis = rodlqr.build_basis(1.0, n)
        w = rodlqr.default_weights(basis)
        sol = rodlqr.riccati_iterate(basis, w)
        oracle = solve_continuous_are(
            np.diag(basis.lams),
            (basis.beta * basis.phi1)[:, None],
            w.q,
            np.array([[w.r]]),
        )
        worst = max(worst, float(np.abs(sol.p - oracle).max()))
    ok = report(3, worst <= 1e-8, f"max |P - oracle| = {worst:.2e} over N in {{1,2,3,5,11}}")
    assert ok


def test_criterion_4_closed_loop_spectrum():
    basis = rodlqr.build_basis(1.0, 11)
    w = rodlqr.default_weights(basis)
    sol = rodlqr.riccati_iterate(basis, w)
    modes = rodlqr.closed_loop_modes(sol, basis, w, count=5)
    rho = np.array([m.rho for m in modes])
    rho_ref = np.array([0.9982, 3.4381, 6.4391, 9.5299, 12.6455])
    diffs = np.abs(rho - rho_ref)
    ok_rho = diffs.max() <= 1e-3
    ok_mu = abs(modes[0].mu - (-0.9964)) <= 2e-3
    per_root = ", ".join(
        f"rho{i}:{'ok' if d <= 1e-3 else f'{d:.4f}'}" for i, d in enumerate(diffs)
    )
    ok = report(
        4, ok_rho and ok_mu,
        f"{per_root}; mu0 computed {modes[0].mu:.4f} vs pinned -0.9964",
    )
    assert ok, (
        "the pinned rho_0, rho_1 and mu_0 are not roots of the stated "
        "characteristic equation at r=1 (they are at r ~ 1.2); rho_2..rho_4 match"
    )


def test_criterion_5_discretization_poles():
    m = rodlqr.build_discrete(10, beta=1.0, alpha=1.0)
    open_poles = np.sort(np.linalg.eigvals(m.f).real)[::-1][:3]
    lqr = rodlqr.solve_discrete_lqr(m)
    closed_poles = np.sort(np.linalg.eigvals(closed_loop_matrix(m, lqr)).real)[::-1][:3]
    ok_open = np.abs(open_poles - [-0.7404, -11.6538, -40.1566]).max() <= 1e-3
    ok_closed = np.abs(closed_poles - [-1.0396, -11.7270, -40.1804]).max() <= 1e-3
    ok = report(
        5, ok_open and ok_closed,
        f"open {np.round(open_poles, 4)}, closed {np.round(closed_poles, 4)}",
    )
    assert ok


def test_criterion_6_cubic_tensor_properties():
    basis = rodlqr.build_basis(1.0, 11)
    w = rodlqr.default_weights(basis)
    sol = rodlqr.riccati_iterate(basis, w)
    ct0 = solve_cubic_tensor(sol, basis, w, alpha=0.0)
    ct1 = solve_cubic_tensor(sol, basis, w, alpha=1.0)
    ct2 = solve_cubic_tensor(sol, basis, w, alpha=2.0)
    ok_zero = np.abs(ct0.t).max() == 0.0
    ok_linear = np.abs(ct2.t - 2.0 * ct1.t).max() <= 1e-12
    resid = tensor_equation_residual(ct1, sol, basis, w)
    ok_resid = resid <= 1e-10
    sym = tensor_sym_error(ct1.t)
    ok_sym = sym <= 1e-12
    ok = report(
        6, ok_zero and ok_linear and ok_resid and ok_sym,
        f"alpha=0 zero: {ok_zero}, linearity: {ok_linear}, "
        f"residual {resid:.1e} <= 1e-10, symmetry {sym:.1e} <= 1e-12",
    )
    assert ok


def test_criterion_7_hjb_residual_order():
    t0 = time.perf_counter()
    m = rodlqr.build_discrete(10, beta=1.0, alpha=1.0)
    lqr = rodlqr.solve_discrete_lqr(m)
    exp, law = rodlqr.albrekht_expand(m, lqr, degree=3)
    poly = hjb_residual_poly(m, exp, law)
    rng = np.random.default_rng(0)
    zhat = rng.standard_normal(11)
    zhat /= np.linalg.norm(zhat)
    scales = [1e-1, 1e-2, 1e-3]
    res = [abs(poly_eval(poly, s * zhat)) for s in scales]
    slope = float(np.polyfit(np.log(scales), np.log(res), 1)[0])
    elapsed = time.perf_counter() - t0
    ok = report(
        7, slope >= 4.8 and elapsed < 5.0,
        f"slope {slope:.2f} >= 4.8, residuals {[f'{r:.1e}' for r in res]}, "
        f"{elapsed:.2f}s < 5s",
    )
    assert ok


def test_criterion_8_basin_reproduction():
    t0 = time.perf_counter()
    m = rodlqr.build_discrete(10, beta=1.0, alpha=1.0)
    lqr = rodlqr.solve_discrete_lqr(m)
    _, cubic_law = rodlqr.albrekht_expand(m, lqr, degree=3)
    laws = {
        "open": rodlqr.FeedbackLaw.open_loop(11),
        "linear": rodlqr.FeedbackLaw(degree=1, k1=lqr.k1),
        "cubic": cubic_law,
    }
    cases = [
        ("open", 0.7, "Converged"),
        ("open", 0.8, "Diverged"),
        ("linear", 1.0, "Converged"),
        ("linear", 1.1, "Diverged"),
        ("cubic", 4.0, "Converged"),
        ("cubic", 4.1, "Diverged"),
    ]
    cfg = rodlqr.SimConfig()  # defaults: dt=1/100, grid 10
    outcomes = []
    for name, level, expected in cases:
        traj = rodlqr.simulate(m, laws[name], np.full(11, level), cfg)
        outcomes.append((name, level, expected, traj.verdict))
    elapsed = time.perf_counter() - t0
    table = "; ".join(
        f"{n}@{lv}: {got}{'' if got == exp else f' (pinned {exp})'}"
        for n, lv, exp, got in outcomes
    )
    matches = sum(got == exp for _, _, exp, got in outcomes)
    ok = report(8, matches == 6 and elapsed < 30.0, f"{matches}/6 verdicts; {table}; {elapsed:.1f}s < 30s")
    assert ok, (
        "the cubic law synthesized from the stated problem diverges at 4.0 "
        "(critical level is near 2.1; the pinned 4.0/4.1 boundary appears only "
        "when the synthesis doubles the reaction term)"
    )


def test_criterion_9_crank_nicolson_order():
    m = rodlqr.build_discrete(10, beta=1.0, alpha=0.0)
    law = rodlqr.FeedbackLaw.open_loop(11)
    z0 = np.cos(np.pi * np.arange(11) / 10.0)
    ref = expm(m.f * 1.0) @ z0
    dts = [1e-2, 5e-3, 2.5e-3]
    errs = []
    for dt in dts:
        cfg = rodlqr.SimConfig(dt=dt, t_final=1.0)
        traj = rodlqr.simulate(m, law, z0, cfg)
        errs.append(float(np.abs(traj.states[-1] - ref).max()))
    slope = float(np.polyfit(np.log(dts), np.log(errs), 1)[0])
    ok = report(9, slope >= 1.9, f"global-error slope {slope:.2f} >= 1.9")
    assert ok


def test_criterion_10_determinism(tmp_path):
    outs = []
    for name in ("first", "second"):
        out = tmp_path / name
        code = main(
            ["spectrum", "--out", str(out), "--paper-mode", "--no-figures"]
        )
        assert code == 0
        outs.append((out / "spectrum.csv").read_bytes())
    same = outs[0] == outs[1]

    outs2 = []
    for name in ("s1", "s2"):
        out = tmp_path / name
        code = main(
            ["simulate", "--out", str(out), "--preset", "linear", "--z0", "0.9",
             "--no-figures"]
        )
        assert code == 0
        outs2.append((out / "trajectory.csv").read_bytes())
    same2 = outs2[0] == outs2[1]
    ok = report(10, same and same2, f"spectrum bytes equal: {same}, trajectory bytes equal: {same2}")
    assert ok
