"""Gradient-based topology optimization loop.

Each iteration performs one forward solve, one adjoint solve, a sensitivity
contraction, and an MMA design update; the loop stops when the max design
update drops below tolerance or the iteration cap is reached.  The whole
time history lives in the monolithic space-time state, so no checkpointing
is involved.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from .adjoint import objective, sensitivities, solve_adjoint
from .assembly import Discretization, assemble_global
from .blocksolve import solve_system
from .mma import MmaConfig, MmaState, mma_update

REL_EPS = 1e-12


@dataclass
class IterationRecord:
    iteration: int
    rho: np.ndarray
    objective: float
    design_change: float
    objective_rel_change: float
    wall_time: float


@dataclass
class OptimizationTrace:
    records: list = field(default_factory=list)
    stop_reason: str = ""
    final_rho: np.ndarray = None
    final_objective: float = np.nan

    @property
    def iterations(self):
        return len(self.records)

    def design_changes(self):
        return np.array([r.design_change for r in self.records])

    def objectives(self):
        return np.array([r.objective for r in self.records])


def uniform_feasible_design(volumes, volume_bound):
    """Uniform design saturating the volume bound (the standard start)."""
    volumes = np.asarray(volumes, dtype=float)
    return np.full(volumes.size, min(1.0, volume_bound / volumes.sum()))


def run_topology_optimization(
    spec,
    volume_bound,
    initial_rho=None,
    tol_design=1e-4,
    max_iters=100,
    sat=None,
    mma_config=None,
    disc=None,
):
    """Minimize the space-time squared temperature over the design box.

    Returns the per-iteration trace; the final design is re-evaluated once
    so the reported objective belongs to the returned design.
    """
    if disc is None:
        disc = Discretization(spec, sat=sat)
    volumes = spec.element_volumes
    rho = (
        uniform_feasible_design(volumes, volume_bound)
        if initial_rho is None
        else np.asarray(initial_rho, dtype=float).copy()
    )
    state = MmaState(config=mma_config or MmaConfig())
    trace = OptimizationTrace()
    prev_j = None
    stop_reason = "max_iterations"
    for it in range(1, max_iters + 1):
        t0 = time.perf_counter()
        system = assemble_global(disc, rho)
        u, _ = solve_system(system)
        j = objective(u, disc)
        adj = solve_adjoint(disc, system, u)
        grad = sensitivities(disc, system, u, adj.lam, rho)
        new_rho = mma_update(rho, grad, volumes, volume_bound, state)
        change = float(np.max(np.abs(new_rho - rho)))
        j_rel = np.inf if prev_j is None else abs(j - prev_j) / max(abs(prev_j), REL_EPS)
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
    system = assemble_global(disc, rho)
    u, _ = solve_system(system)
    trace.final_objective = objective(u, disc)
    return trace
