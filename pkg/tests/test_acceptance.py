"""End-to-end acceptance criteria, one test per criterion.

Each test prints a PASS line with its measured numbers (visible with
``pytest -s`` or on failure), and the test names give the per-criterion
pass/fail report under ``pytest -v``.  Shared expensive artifacts (the
high-resolution scalar reference, the solver-comparison sweeps) are
computed once per session.
"""

import time

import numpy as np
import pytest

from stheat.adjoint import objective, sensitivities, solve_adjoint
from stheat.assembly import Discretization, assemble_global
from stheat.baselines import (
    be_adjoint_and_sensitivity,
    be_aao_solve,
    be_march,
    be_objective,
    fe_assemble,
    run_topology_optimization_be,
)
from stheat.blocksolve import solve_system
from stheat.optimize import run_topology_optimization
from stheat.presets import cooling_benchmark, two_design_benchmark
from stheat.problem import MaterialModel, ProblemSpec, choose_sat_coefficients
from stheat.twodomain import (
    eigencondition_residual,
    transient_eigenvalue,
    two_domain_solution,
)
from stheat.verification import (
    convergence_study,
    crossvalidate_optimum,
    energy_estimate_sides,
    fitted_slope,
    monotone_with_plateau,
    operator_suite_report,
)


def report(criterion, ok, detail):
    line = f"[criterion {criterion}] {'PASS' if ok else 'FAIL'}: {detail}"
    print(line)
    assert ok, line


# -- criterion 1: operator suite -------------------------------------------

def test_criterion_1_operator_suite():
    t0 = time.perf_counter()
    rep = operator_suite_report(n_max=16, n_random=100)
    elapsed = time.perf_counter() - t0
    ok = (
        rep["sbp_identity"] <= 1e-13
        and rep["accuracy"] <= 1e-11
        and rep["spd"] == 0.0
        and rep["ibp_relative"] <= 1e-12
        and elapsed < 5.0
    )
    report(
        1,
        ok,
        f"sbp={rep['sbp_identity']:.1e} acc={rep['accuracy']:.1e} "
        f"ibp={rep['ibp_relative']:.1e} in {elapsed:.1f}s",
    )


# -- criterion 2: forward spectral convergence ------------------------------

def test_criterion_2_forward_spectral_convergence():
    t0 = time.perf_counter()
    points = convergence_study(range(4, 21, 2))
    elapsed = time.perf_counter() - t0
    errs = [p.state_error for p in points]
    pre_plateau = [e for e in errs[:-1] if e > 1e-12]
    ok = (
        monotone_with_plateau(errs)
        and any(e <= 1e-10 for e in errs[:-1])
        and min(errs) <= 1e-12
        and elapsed < 60.0
    )
    report(
        2,
        ok,
        f"errors {errs[0]:.1e} -> {min(errs):.1e} over N=4..20 "
        f"({len(pre_plateau)} pre-plateau points) in {elapsed:.1f}s",
    )


# -- criterion 3: closed-form two-domain solution ---------------------------

def test_criterion_3_two_domain_solution():
    lam_errs = [
        abs(transient_eigenvalue(k, k, 0.5) - np.pi**2 * k) / (np.pi**2 * k)
        for k in (0.25, 0.375, 1.0, 2.0)
    ]
    het_ok = True
    for k1, k2 in ((0.45, 0.30), (4.0, 1.0), (0.8, 0.15)):
        sol = two_domain_solution(k1, k2)
        xi_l, xi_r = np.nextafter(0.5, 0.0), np.nextafter(0.5, 1.0)
        flux_jump = abs(sol.mode_flux(xi_l) - sol.mode_flux(xi_r))
        het_ok &= eigencondition_residual(sol) <= 1e-12 and flux_jump <= 1e-10

    sol = two_domain_solution(0.45, 0.30)
    material = MaterialModel(0.0, 1.0, 1.0)
    errors = []
    for n in (4, 8, 12, 16):
        spec = ProblemSpec(
            domain=(0.0, 1.0), horizon=1.0, n_elements=2, nx=n, nt=n,
            material=material,
            g=lambda t: np.full_like(np.asarray(t, float), sol.u_right),
            q=sol.initial,
            f=lambda x, t: np.full_like(np.asarray(x, float), sol.source),
        )
        disc = Discretization(spec)
        u, _ = solve_system(assemble_global(disc, np.array([sol.kappa_1, sol.kappa_2])))
        exact = np.concatenate([sol(*disc.element_coordinates(k)) for k in range(2)])
        p = disc.global_p()
        errors.append(float(np.sqrt((u - exact) @ (p * (u - exact)))))
    spectral = all(b < 5e-2 * a for a, b in zip(errors, errors[1:]))
    ok = max(lam_errs) <= 1e-10 and het_ok and spectral and errors[-1] <= 1e-8
    report(
        3,
        ok,
        f"lam rel err {max(lam_errs):.1e}; solve errors {errors[0]:.1e}->{errors[-1]:.1e}",
    )


# -- criterion 4: energy stability ------------------------------------------

def _random_initial_spec(K, coeffs, material, sat_sigma0=None):
    def q(x, cs=coeffs):
        x = np.asarray(x, dtype=float)
        return sum(cj * np.cos(j * np.pi * x) for j, cj in enumerate(cs))

    return ProblemSpec(
        domain=(0.0, 1.0), horizon=0.5, n_elements=K, nx=6, nt=6,
        material=material, q=q,
    )


def test_criterion_4_energy_stability():
    rng = np.random.default_rng(2718)
    material = MaterialModel(0.05, 1.0, 2.0)
    worst = -np.inf
    for K in (1, 2, 5):
        for _ in range(20):
            spec = _random_initial_spec(K, rng.standard_normal(6), material)
            lhs, bound = energy_estimate_sides(spec, rng.uniform(0.0, 1.0, K))
            worst = max(worst, (lhs - bound) / max(bound, 1e-300))
    # sensitivity check: sigma_0 below 1/2 flips the bound factor negative,
    # so the same estimate must report a violation
    spec = _random_initial_spec(2, rng.standard_normal(6), material)
    probe = Discretization(spec)
    bad_sat = choose_sat_coefficients(probe.ops[0].op_x, material, sigma_0=0.4)
    lhs_bad, bound_bad = energy_estimate_sides(spec, np.array([0.5, 0.5]), sat=bad_sat)
    detected = not (lhs_bad <= bound_bad)
    ok = worst <= 1e-12 and detected
    report(4, ok, f"worst margin {worst:.1e}; violated-SAT detected={detected}")


# -- criterion 5: gradient correctness ---------------------------------------

def _stse_gradient_case(spec, rho):
    disc = Discretization(spec)
    system = assemble_global(disc, rho)
    u, _ = solve_system(system)
    adj = solve_adjoint(disc, system, u)
    grad = sensitivities(disc, system, u, adj.lam, rho)

    def j_of(r):
        sys_r = assemble_global(disc, r)
        ur, _ = solve_system(sys_r)
        return objective(ur, disc)

    return grad, j_of


def _fd_check(grad, j_of, rho):
    worst = 0.0
    for k in range(rho.size):
        best = np.inf
        for h in (1e-4, 1e-5, 1e-6):
            rp, rm = rho.copy(), rho.copy()
            rp[k] += h
            rm[k] -= h
            fd = (j_of(rp) - j_of(rm)) / (2 * h)
            best = min(best, abs(grad[k] - fd) / max(abs(fd), 1e-12))
        worst = max(worst, best)
    return worst


def test_criterion_5_gradient_correctness():
    t0 = time.perf_counter()
    worst = 0.0

    spec2, _ = two_design_benchmark(nx=10, nt=10)
    grad, j_of = _stse_gradient_case(spec2, np.array([0.45, 0.30]))
    worst = max(worst, _fd_check(grad, j_of, np.array([0.45, 0.30])))

    rng = np.random.default_rng(55)
    material = MaterialModel(0.05, 1.0, 3.0)
    # data chosen so every design cell carries an O(1e-3)-or-larger gradient;
    # components near zero only measure central-difference noise
    spec10 = ProblemSpec(
        domain=(0.0, 1.0), horizon=0.6, n_elements=10, nx=4, nt=5,
        material=material,
        q=lambda x: np.sin(np.pi * np.asarray(x, float)),
        f=lambda x, t: 2.0 + np.sin(3 * np.asarray(x, float)) * np.cos(np.asarray(t, float)),
    )
    rho10 = np.clip(rng.uniform(0, 1, 10), 0.05, 0.95)
    grad, j_of = _stse_gradient_case(spec10, rho10)
    worst = max(worst, _fd_check(grad, j_of, rho10))

    for K, rho in ((2, np.array([0.45, 0.30])), (10, rho10)):
        spec_be = ProblemSpec(
            domain=(0.0, 1.0), horizon=1.0, n_elements=K, nx=1, nt=1,
            material=material, bc_left="neumann",
            f=lambda x, t: 10.0 + np.sin(10.0 * (x + t)) + np.sin(10.0 * t),
        )
        fe = fe_assemble(spec_be, rho)
        sol = be_march(fe, spec_be, 64)
        grad_be = be_adjoint_and_sensitivity(fe, sol, spec_be, rho)

        def j_be(r, s=spec_be):
            fe_r = fe_assemble(s, r)
            return be_objective(fe_r, be_march(fe_r, s, 64))

        worst = max(worst, _fd_check(grad_be, j_be, rho))

    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-5 and elapsed < 120.0
    report(5, ok, f"worst FD relative error {worst:.2e} in {elapsed:.1f}s")


# -- criterion 6: optimum cross-validation -----------------------------------

@pytest.fixture(scope="module")
def crossval():
    # coarse-to-fine sweeps expose the decay; the finest points sit at the
    # optimizer tolerance floor already
    return crossvalidate_optimum(
        nx_sweep=(2, 3, 4, 5, 6, 8, 40),
        nt_sweep=(2, 3, 4, 5, 6, 8, 30),
        fixed_nt=30,
        fixed_nx=40,
        reference=(80, 60),
    )


def test_criterion_6_optimum_cross_validation(crossval):
    ref = crossval.reference_rho
    assert ref[0] > ref[1]  # conductive cell at the cold boundary

    nx_ns = [row[0] for row in crossval.nx_sweep]
    nx_derr = [row[1] for row in crossval.nx_sweep]
    nx_jerr = [row[2] for row in crossval.nx_sweep]
    nt_ns = [row[0] for row in crossval.nt_sweep]
    nt_derr = [row[1] for row in crossval.nt_sweep]
    nt_jerr = [row[2] for row in crossval.nt_sweep]

    agree_fine = nx_derr[-1]  # the (40, 30) point
    floor = 5e-8
    decay_ok = monotone_with_plateau(nx_derr, plateau=floor, slack=3.0) and \
        monotone_with_plateau(nt_derr, plateau=floor, slack=3.0)
    slopes = {
        "design_nx": fitted_slope(nx_ns, nx_derr, floor=floor),
        "design_nt": fitted_slope(nt_ns, nt_derr, floor=floor),
        "objective_nx": fitted_slope(nx_ns, nx_jerr, floor=floor),
        "objective_nt": fitted_slope(nt_ns, nt_jerr, floor=floor),
    }
    # the protocol fixes the initial state, so both optimizers minimize the
    # same function and the design error decays spectrally; "at least the
    # published linear rate, objective at least third order" is the bound
    ok = (
        agree_fine <= 1e-3
        and decay_ok
        and slopes["design_nx"] >= 0.9
        and slopes["design_nt"] >= 0.9
        and slopes["objective_nx"] >= 2.5
        and slopes["objective_nt"] >= 2.5
    )
    report(
        6,
        ok,
        f"agreement at (40,30)={agree_fine:.2e}; slopes "
        + ", ".join(f"{k}={v:.2f}" for k, v in slopes.items()),
    )


# -- criteria 7 and 8: solver comparison and optimized design ----------------

@pytest.fixture(scope="module")
def comparison():
    t0 = time.perf_counter()
    stse = {}
    prev = None
    stse_changes = {}
    for nt in (11, 13, 15):
        spec, vstar = cooling_benchmark(nx=5, nt=nt)
        tr = run_topology_optimization(spec, vstar, tol_design=1e-4, max_iters=300)
        if prev is not None:
            stse_changes[nt] = float(np.max(np.abs(tr.final_rho - prev)))
        prev = tr.final_rho
        stse[nt] = tr
    be = {}
    be_changes = {}
    prev = None
    for steps in (8, 16, 32, 64, 128, 256, 512, 1024, 2048, 4096, 8192, 16384):
        spec, vstar = cooling_benchmark()
        tr = run_topology_optimization_be(spec, vstar, steps, tol_design=1e-4, max_iters=300)
        if prev is not None:
            be_changes[steps] = float(np.max(np.abs(tr.final_rho - prev)))
        prev = tr.final_rho
        be[steps] = tr
    return {
        "stse": stse,
        "stse_changes": stse_changes,
        "be": be,
        "be_changes": be_changes,
        "elapsed": time.perf_counter() - t0,
    }


def test_criterion_7_solver_comparison_trend(comparison):
    t0 = time.perf_counter()
    stse_ok = min(comparison["stse_changes"].values()) <= 1e-5

    be_changes = comparison["be_changes"]
    reached = [n for n, ch in sorted(be_changes.items()) if ch <= 6.1e-5]
    first_reached = reached[0] if reached else None
    # thousands of backward-Euler steps against <= 16 collocation nodes:
    # the temporal-DoF-at-tolerance ordering of the reference data
    be_ok = first_reached is not None and first_reached >= 2048

    spec, _ = cooling_benchmark()
    rho_probe = comparison["be"][16384].final_rho
    fe = fe_assemble(spec, rho_probe)
    march = be_march(fe, spec, 16384)
    aao = be_aao_solve(fe, spec, 16384)
    agree = float(np.max(np.abs(march.states - aao.states)))
    scale = float(np.max(np.abs(march.states)))
    aao_ok = agree <= 1e-12 * scale and aao.aao_unknowns == 835_635

    elapsed = comparison["elapsed"] + (time.perf_counter() - t0)
    ok = stse_ok and be_ok and aao_ok and elapsed < 900.0
    report(
        7,
        ok,
        f"st-se min change {min(comparison['stse_changes'].values()):.1e} at Nt<=15; "
        f"be-fe first<=6.1e-5 at {first_reached}; aao gap {agree / scale:.1e}; "
        f"unknowns {aao.aao_unknowns}; total {elapsed:.0f}s",
    )


def test_criterion_8_cooling_design_structure(comparison):
    tr = comparison["stse"][15]
    rho = tr.final_rho
    # high-density block hugs the Dirichlet (right) boundary
    right_heavy = rho[-1] >= 0.99 and np.mean(rho[-10:]) > np.mean(rho[:10]) + 0.5
    # conductivity tapers monotonically away from the sink
    monotone = bool(np.all(np.diff(rho) >= -0.02))
    j_be = comparison["be"][16384].final_objective
    j_gap = abs(tr.final_objective - j_be) / abs(j_be)
    ok = right_heavy and monotone and j_gap <= 0.02
    report(
        8,
        ok,
        f"right-heavy={right_heavy} monotone={monotone} objective gap {j_gap:.2e}",
    )
