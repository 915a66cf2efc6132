"""Direct block-tridiagonal solves by block LU (block Thomas algorithm).

Elimination proceeds block row by block row with LAPACK partial-pivoted LU
inside each pivot block; no pivoting happens across blocks, which preserves
the banded layout.  Transposed systems get their own factorization of the
transposed block pattern rather than reusing the primal factors.
"""

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse.linalg as spla

from .errors import SingularSystemError


@dataclass
class BlockTriFactorization:
    """Pivot-block LU factors and elimination multipliers."""

    pivot_lus: list
    multipliers: list
    uppers: list
    transpose: bool

    @property
    def n_blocks(self):
        return len(self.pivot_lus)

    @property
    def block_size(self):
        return self.pivot_lus[0][0].shape[0]


def _transposed_blocks(system):
    diag = [a.T for a in system.diag]
    upper = [c.T for c in system.lower]
    lower = [b.T for b in system.upper]
    return diag, upper, lower


def _pivot_lu(block, element):
    with warnings.catch_warnings():
        # singularity is detected below and raised as a typed error
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(block, check_finite=False)
    if np.min(np.abs(np.diag(lu))) == 0.0:
        raise SingularSystemError(element)
    return lu, piv


def factor(system, transpose=False):
    """Block LU of the system (or of its transpose)."""
    if transpose:
        diag, upper, lower = _transposed_blocks(system)
    else:
        diag, upper, lower = system.diag, system.upper, system.lower
    pivot_lus = [_pivot_lu(diag[0], 0)]
    multipliers = []
    for k in range(1, len(diag)):
        lu_prev = pivot_lus[k - 1]
        # L_k = C_k U_{k-1}^{-1}, obtained from U_{k-1}^T L_k^T = C_k^T
        L_k = sla.lu_solve(lu_prev, lower[k - 1].T, trans=1, check_finite=False).T
        U_k = diag[k] - L_k @ upper[k - 1]
        multipliers.append(L_k)
        pivot_lus.append(_pivot_lu(U_k, k))
    return BlockTriFactorization(
        pivot_lus=pivot_lus,
        multipliers=multipliers,
        uppers=list(upper),
        transpose=transpose,
    )


def solve(fact, rhs):
    """Forward/back substitution for one stacked right-hand side."""
    K, n = fact.n_blocks, fact.block_size
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape != (K * n,):
        raise ValueError(f"rhs has shape {rhs.shape}, expected ({K * n},)")
    y = rhs.reshape(K, n).copy()
    for k in range(1, K):
        y[k] -= fact.multipliers[k - 1] @ y[k - 1]
    x = np.empty_like(y)
    x[K - 1] = sla.lu_solve(fact.pivot_lus[K - 1], y[K - 1], check_finite=False)
    for k in range(K - 2, -1, -1):
        x[k] = sla.lu_solve(
            fact.pivot_lus[k], y[k] - fact.uppers[k] @ x[k + 1], check_finite=False
        )
    return x.ravel()


def solve_system(system):
    """Factor once and solve A x = b for the assembled right-hand side."""
    fact = factor(system)
    return solve(fact, system.rhs_vector()), fact


def to_dense(system):
    """Materialize the block-tridiagonal matrix (testing/small systems only)."""
    K, n = system.n_blocks, system.block_size
    dense = np.zeros((K * n, K * n))
    for k in range(K):
        dense[k * n:(k + 1) * n, k * n:(k + 1) * n] = system.diag[k]
        if k + 1 < K:
            dense[k * n:(k + 1) * n, (k + 1) * n:(k + 2) * n] = system.upper[k]
            dense[(k + 1) * n:(k + 2) * n, k * n:(k + 1) * n] = system.lower[k]
    return dense


def one_norm(system):
    """Exact 1-norm of the block-tridiagonal matrix."""
    K = system.n_blocks
    worst = 0.0
    for k in range(K):
        cols = np.abs(system.diag[k]).sum(axis=0)
        if k > 0:
            cols = cols + np.abs(system.upper[k - 1]).sum(axis=0)
        if k + 1 < K:
            cols = cols + np.abs(system.lower[k]).sum(axis=0)
        worst = max(worst, float(cols.max()))
    return worst


def condition_estimate(system):
    """Hager-style 1-norm condition estimate via forward/transpose solves."""
    try:
        primal = factor(system)
        dual = factor(system, transpose=True)
    except SingularSystemError:
        return np.inf
    m = system.n_unknowns
    inv_op = spla.LinearOperator(
        (m, m),
        matvec=lambda v: solve(primal, np.ravel(v)),
        rmatvec=lambda v: solve(dual, np.ravel(v)),
        dtype=float,
    )
    inv_norm = spla.onenormest(inv_op)
    return one_norm(system) * inv_norm
