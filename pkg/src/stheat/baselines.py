"""Low-order reference solvers: linear finite elements with backward Euler.

Two drivers share the same algebra: sequential marching (factor the step
matrix once, then sweep the time levels) and an all-at-once formulation
that assembles the block lower-bidiagonal space-time system and solves it
by exact block forward elimination.  Both store the full time history,
which is what the adjoint march consumes.  The discrete adjoint of the
marching scheme runs the transposed step matrix backward in time, giving
gradients of the right-endpoint-quadrature objective

    J = sum_n dt * u_n^T M u_n,   n = 1 .. N_t

that match finite differences to solver precision.
"""

import time
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .mma import MmaConfig, MmaState, mma_update
from .optimize import IterationRecord, OptimizationTrace, uniform_feasible_design
from .problem import dkappa_drho, kappa


@dataclass
class FeDiscretization:
    """P1 mass/stiffness pair on the element partition of a problem spec."""

    spec: object
    nodes: np.ndarray
    mass: np.ndarray
    stiffness: np.ndarray
    free: np.ndarray
    dirichlet: np.ndarray

    @property
    def n_nodes(self):
        return self.nodes.size

    @property
    def element_lengths(self):
        return np.diff(self.nodes)

    def stiffness_for(self, rho):
        return _stiffness_matrix(self.spec, self.nodes, rho)


def _stiffness_matrix(spec, nodes, rho):
    kap = kappa(np.asarray(rho, dtype=float), spec.material)
    h = np.diff(nodes)
    n = nodes.size
    K = np.zeros((n, n))
    w = kap / h
    idx = np.arange(n - 1)
    K[idx, idx] += w
    K[idx + 1, idx + 1] += w
    K[idx, idx + 1] -= w
    K[idx + 1, idx] -= w
    return K


def fe_assemble(spec, rho):
    """Assemble consistent mass and design-dependent stiffness matrices."""
    nodes = spec.element_edges
    n = nodes.size
    h = np.diff(nodes)
    M = np.zeros((n, n))
    idx = np.arange(n - 1)
    M[idx, idx] += h / 3.0
    M[idx + 1, idx + 1] += h / 3.0
    M[idx, idx + 1] += h / 6.0
    M[idx + 1, idx] += h / 6.0
    K = _stiffness_matrix(spec, nodes, rho)
    fixed = []
    if spec.bc_left == "dirichlet":
        fixed.append(0)
    if spec.bc_right == "dirichlet":
        fixed.append(n - 1)
    dirichlet = np.array(fixed, dtype=int)
    free = np.setdiff1d(np.arange(n), dirichlet)
    return FeDiscretization(
        spec=spec, nodes=nodes, mass=M, stiffness=K, free=free, dirichlet=dirichlet
    )


@dataclass
class MarchingSolution:
    """Full time history of a backward-Euler run."""

    times: np.ndarray
    states: np.ndarray  # (n_nodes, n_levels) including the initial level
    fe: FeDiscretization
    aao_unknowns: int = None
    aao_memory_bytes: int = None

    @property
    def n_steps(self):
        return self.times.size - 1


def _dirichlet_values(spec, fe, times):
    vals = np.zeros((fe.dirichlet.size, times.size))
    for i, node in enumerate(fe.dirichlet):
        data = spec.h if node == 0 else spec.g
        vals[i] = np.asarray(data(times), dtype=float)
    return vals


def _load_matrix(spec, fe, times):
    """Nodal loads M f(t_n) plus Neumann flux data, one column per level."""
    X, T = np.broadcast_arrays(fe.nodes[:, None], times[None, :])
    f_nodes = np.asarray(spec.f(X.copy(), T.copy()), dtype=float)
    loads = fe.mass @ f_nodes
    if spec.bc_left == "neumann":
        loads[0] -= np.asarray(spec.h(times), dtype=float)
    if spec.bc_right == "neumann":
        loads[-1] += np.asarray(spec.g(times), dtype=float)
    return loads


def _step_pieces(spec, fe, n_steps):
    dt = spec.horizon / n_steps
    times = np.linspace(0.0, spec.horizon, n_steps + 1)
    fr = fe.free
    m_dt = fe.mass / dt
    step = m_dt + fe.stiffness
    lu = sla.lu_factor(step[np.ix_(fr, fr)])
    return dt, times, m_dt, step, lu


def be_march(fe, spec, n_steps):
    """Sequential backward-Euler time stepping."""
    if n_steps < 1:
        raise ValueError("need at least one time step")
    dt, times, m_dt, step, lu = _step_pieces(spec, fe, n_steps)
    fr, dr = fe.free, fe.dirichlet
    u = np.zeros((fe.n_nodes, n_steps + 1))
    u[:, 0] = np.asarray(spec.q(fe.nodes), dtype=float)
    u_d = _dirichlet_values(spec, fe, times)
    u[dr, :] = u_d
    loads = _load_matrix(spec, fe, times)
    # constant-per-step pieces solved in one batched call
    rhs_fixed = loads[fr, 1:] - step[np.ix_(fr, dr)] @ u_d[:, 1:]
    correction = sla.lu_solve(lu, rhs_fixed)
    prop_free = sla.lu_solve(lu, m_dt[np.ix_(fr, fr)])
    prop_dir = sla.lu_solve(lu, m_dt[np.ix_(fr, dr)])
    for n in range(n_steps):
        u[fr, n + 1] = prop_free @ u[fr, n] + prop_dir @ u_d[:, n] + correction[:, n]
    return MarchingSolution(times=times, states=u, fe=fe)


def be_aao_solve(fe, spec, n_steps):
    """All-at-once space-time system solved by block forward elimination.

    The system stacks every time level: diagonal blocks M/dt + K,
    subdiagonal blocks -M/dt.  Forward elimination of a lower-bidiagonal
    block system is exact, so the result reproduces marching to roundoff;
    the point of this driver is the accounting of the assembled system
    size, which grows linearly with the number of steps.
    """
    if n_steps < 1:
        raise ValueError("need at least one time step")
    dt, times, m_dt, step, lu = _step_pieces(spec, fe, n_steps)
    fr, dr = fe.free, fe.dirichlet
    n_free = fr.size
    u_d = _dirichlet_values(spec, fe, times)
    loads = _load_matrix(spec, fe, times)
    rhs = np.empty((n_free, n_steps))
    rhs[:] = loads[fr, 1:] - step[np.ix_(fr, dr)] @ u_d[:, 1:]
    q0 = np.asarray(spec.q(fe.nodes), dtype=float)
    sub_free = m_dt[np.ix_(fr, fr)]
    sub_dir = m_dt[np.ix_(fr, dr)]
    u = np.zeros((fe.n_nodes, n_steps + 1))
    u[:, 0] = q0
    u[dr, :] = u_d
    # block forward elimination down the lower-bidiagonal system
    prev = q0[fr]
    for n in range(n_steps):
        b_n = rhs[:, n] + sub_free @ prev + sub_dir @ u_d[:, n]
        prev = sla.lu_solve(lu, b_n)
        u[fr, n + 1] = prev
    unknowns = fe.n_nodes * (n_steps + 1)
    memory = rhs.nbytes + 2 * step.nbytes + u.nbytes
    return MarchingSolution(
        times=times, states=u, fe=fe, aao_unknowns=unknowns, aao_memory_bytes=memory
    )


def be_objective(fe, solution):
    """Right-endpoint quadrature of u^T M u over the marched history."""
    u = solution.states[:, 1:]
    dt = solution.times[1] - solution.times[0]
    return float(dt * np.einsum("in,in->", u, fe.mass @ u))


def be_adjoint_and_sensitivity(fe, solution, spec, rho):
    """Backward adjoint march and the design gradient of be_objective."""
    n_steps = solution.n_steps
    dt = solution.times[1] - solution.times[0]
    fr = fe.free
    m_dt = fe.mass / dt
    step = m_dt + fe.stiffness
    lu = sla.lu_factor(step[np.ix_(fr, fr)].T)
    prop = sla.lu_solve(lu, m_dt[np.ix_(fr, fr)].T)
    dj_du = 2.0 * dt * (fe.mass @ solution.states)[fr, 1:]
    source = sla.lu_solve(lu, dj_du)  # all levels in one batched solve
    lam = np.zeros((fe.n_nodes, n_steps + 1))  # level n holds lambda^n, n >= 1
    nxt = np.zeros(fr.size)
    for n in range(n_steps, 0, -1):
        nxt = prop @ nxt + source[:, n - 1]
        lam[fr, n] = nxt
    # dJ/drho_k = -sum_n lambda_n^T (dK/drho_k) u_n over the element pair
    u = solution.states[:, 1:]
    lam_u = lam[:, 1:]
    du = u[:-1, :] - u[1:, :]
    dl = lam_u[:-1, :] - lam_u[1:, :]
    dkap = dkappa_drho(np.asarray(rho, dtype=float), spec.material)
    h = fe.element_lengths
    return -(dkap / h) * np.sum(dl * du, axis=1)


def run_topology_optimization_be(
    spec,
    volume_bound,
    n_steps,
    aao=False,
    initial_rho=None,
    tol_design=1e-4,
    max_iters=300,
    mma_config=None,
):
    """MMA loop driven by the backward-Euler forward/adjoint pair."""
    volumes = spec.element_volumes
    rho = (
        uniform_feasible_design(volumes, volume_bound)
        if initial_rho is None
        else np.asarray(initial_rho, dtype=float).copy()
    )
    solver = be_aao_solve if aao else be_march
    state = MmaState(config=mma_config or MmaConfig())
    trace = OptimizationTrace()
    prev_j = None
    stop_reason = "max_iterations"
    for it in range(1, max_iters + 1):
        t0 = time.perf_counter()
        fe = fe_assemble(spec, rho)
        sol = solver(fe, spec, n_steps)
        j = be_objective(fe, sol)
        grad = be_adjoint_and_sensitivity(fe, sol, spec, rho)
        new_rho = mma_update(rho, grad, volumes, volume_bound, state)
        change = float(np.max(np.abs(new_rho - rho)))
        j_rel = np.inf if prev_j is None else abs(j - prev_j) / max(abs(prev_j), 1e-12)
        trace.records.append(
            IterationRecord(
                iteration=it,
                rho=new_rho.copy(),
                objective=j,
                design_change=change,
                objective_rel_change=j_rel,
                wall_time=time.perf_counter() - t0,
            )
        )
        rho, prev_j = new_rho, j
        if change < tol_design:
            stop_reason = "design_change"
            break
    trace.stop_reason = stop_reason
    trace.final_rho = rho.copy()
    fe = fe_assemble(spec, rho)
    trace.final_objective = be_objective(fe, solver(fe, spec, n_steps))
    return trace
