"""Monolithic space-time SBP-SAT assembly of the heat equation.

The space-time domain is split into K elements in x (one element in t).
Each element contributes one diagonal block; interface penalties couple
nearest neighbours only, so the global matrix is block tridiagonal:

    [ A1 B1          ] [u1]   [b1]
    [ C2 A2 B2       ] [u2]   [b2]
    [    ..  ..  ..  ] [..] = [..]
    [        CK  AK  ] [uK]   [bK]

Every block is a short sum of Kronecker products of small 1D factors.  The
diagonal blocks collect the time derivative, the diffusion term, the weak
initial condition and the element's share of boundary/interface penalties;
off-diagonal blocks carry the neighbour couplings.  The whole system is
premultiplied by the quadrature matrix P, which symmetrizes the penalty
structure and makes the algebraic transpose the natural dual scheme.
"""

from dataclasses import dataclass

import numpy as np

from .problem import choose_sat_coefficients, kappa
from .sbp import build_sbp_1d
from .spacetime import build_element_ops, kron_acc, restrict


@dataclass
class GlobalSystem:
    """Blocks and right-hand side of the assembled space-time system.

    ``diag[k]`` is the k-th diagonal block (0-based), ``upper[k]`` couples
    block row k to k+1 and ``lower[k]`` couples block row k+1 to k.  The
    right-hand side is independent of the design; only the diagonal and
    off-diagonal blocks carry the diffusivities.
    """

    diag: list
    upper: list
    lower: list
    rhs: list
    kappa_values: np.ndarray = None
    disc: object = None

    @property
    def n_blocks(self):
        return len(self.diag)

    @property
    def block_size(self):
        return self.diag[0].shape[0]

    @property
    def n_unknowns(self):
        return self.n_blocks * self.block_size

    def rhs_vector(self):
        return np.concatenate(self.rhs)

    def blocks_of(self, u):
        return u.reshape(self.n_blocks, self.block_size)

    def matvec(self, u):
        ub = self.blocks_of(np.asarray(u))
        out = np.empty_like(ub)
        for k in range(self.n_blocks):
            acc = self.diag[k] @ ub[k]
            if k > 0:
                acc += self.lower[k - 1] @ ub[k - 1]
            if k + 1 < self.n_blocks:
                acc += self.upper[k] @ ub[k + 1]
            out[k] = acc
        return out.ravel()

    def rmatvec(self, v):
        vb = self.blocks_of(np.asarray(v))
        out = np.empty_like(vb)
        for k in range(self.n_blocks):
            acc = self.diag[k].T @ vb[k]
            if k + 1 < self.n_blocks:
                acc += self.lower[k].T @ vb[k + 1]
            if k > 0:
                acc += self.upper[k - 1].T @ vb[k - 1]
            out[k] = acc
        return out.ravel()


class Discretization:
    """Element operators and SAT coefficients for one problem setup.

    Building the 1D operators once per element keeps reassembly at a new
    design cheap: only the diffusivity-weighted terms change.
    """

    def __init__(self, spec, sat=None):
        self.spec = spec
        edges = spec.element_edges
        op_t = build_sbp_1d(spec.nt + 1, (0.0, spec.horizon))
        self.ops = [
            build_element_ops(
                build_sbp_1d(spec.nx + 1, (edges[k], edges[k + 1])), op_t
            )
            for k in range(spec.n_elements)
        ]
        self.op_t = op_t
        self.sat = sat if sat is not None else choose_sat_coefficients(
            self.ops[0].op_x, spec.material
        )

    @property
    def n_elements(self):
        return self.spec.n_elements

    @property
    def block_size(self):
        return self.ops[0].n

    @property
    def n_unknowns(self):
        return self.n_elements * self.block_size

    def kappa_of(self, rho):
        rho = np.asarray(rho, dtype=float)
        if rho.shape != (self.n_elements,):
            raise ValueError(
                f"design must have {self.n_elements} entries, got shape {rho.shape}"
            )
        return kappa(rho, self.spec.material)

    def element_coordinates(self, k):
        return self.ops[k].layout.coordinates()

    def global_p(self):
        """Quadrature weights of all elements, concatenated."""
        return np.concatenate([ops.p_vec for ops in self.ops])


def _face_projectors(n_x):
    e_w = np.zeros(n_x)
    e_w[0] = 1.0
    e_e = np.zeros(n_x)
    e_e[-1] = 1.0
    return np.outer(e_w, e_w), np.outer(e_e, e_e), np.outer(e_w, e_e), np.outer(e_e, e_w)


def assemble_element(k, disc, kappa_k, kappa_left=None, kappa_right=None):
    """Diagonal block, rhs block, and neighbour blocks of element k.

    Returns (A_k, b_k, B_k, C_next) where B_k couples row k to element k+1
    and C_next couples row k+1 to element k; each is None at the domain
    ends.  ``kappa_left``/``kappa_right`` are the neighbour diffusivities
    required by the flux-penalty cross terms.
    """
    spec, sat = disc.spec, disc.sat
    ops = disc.ops[k]
    n_x, n_t = ops.n_x, ops.n_t
    wt, wx = ops.op_t.weights, ops.op_x.weights
    Pt = np.diag(wt)
    Dx = ops.op_x.D
    W, Eee, WE, EW = _face_projectors(n_x)
    first, last = k == 0, k == spec.n_elements - 1

    A = np.zeros((ops.n, ops.n))
    # P D_t - kappa P D_x^2 with P = P_t (x) P_x
    kron_acc(A, ops.op_t.Q, np.diag(wx))
    kron_acc(A, Pt, ops.op_x.Q @ Dx, scale=-kappa_k)
    # weak initial condition
    es_outer = np.zeros((n_t, n_t))
    es_outer[0, 0] = 1.0
    kron_acc(A, es_outer, np.diag(wx), scale=sat.sigma_0)

    # physical boundaries: Dirichlet penalty, or a flux penalty whose sign
    # cancels the boundary term of the discrete integration by parts
    if first:
        if spec.bc_left == "dirichlet":
            kron_acc(A, Pt, W, scale=sat.sigma_w)
        else:
            kron_acc(A, Pt, W @ Dx, scale=kappa_k)
    else:
        kron_acc(A, Pt, W, scale=sat.sigma_1)
        kron_acc(A, Pt, W @ Dx, scale=sat.sigma_2 * kappa_k)
        kron_acc(A, Pt, Dx.T @ W, scale=sat.tau_1 * kappa_k)
    if last:
        if spec.bc_right == "dirichlet":
            kron_acc(A, Pt, Eee, scale=sat.sigma_e)
        else:
            kron_acc(A, Pt, Eee @ Dx, scale=-kappa_k)
    else:
        kron_acc(A, Pt, Eee, scale=sat.sigma_3)
        kron_acc(A, Pt, Eee @ Dx, scale=sat.sigma_4 * kappa_k)
        kron_acc(A, Pt, Dx.T @ Eee, scale=sat.tau_2 * kappa_k)

    b = _element_rhs(k, disc)

    B = None
    if not last:
        Dx_right = disc.ops[k + 1].op_x.D
        B = np.zeros((ops.n, ops.n))
        kron_acc(B, Pt, EW, scale=-sat.sigma_3)
        kron_acc(B, Pt, EW @ Dx_right, scale=-sat.sigma_4 * kappa_right)
        kron_acc(B, Pt, Dx.T @ EW, scale=-sat.tau_2 * kappa_k)
    C = None
    if not first:
        Dx_left = disc.ops[k - 1].op_x.D
        C = np.zeros((ops.n, ops.n))
        kron_acc(C, Pt, WE, scale=-sat.sigma_1)
        kron_acc(C, Pt, WE @ Dx_left, scale=-sat.sigma_2 * kappa_left)
        kron_acc(C, Pt, Dx.T @ WE, scale=-sat.tau_1 * kappa_k)
    return A, b, B, C


def _element_rhs(k, disc):
    spec, sat = disc.spec, disc.sat
    ops = disc.ops[k]
    wt, wx = ops.op_t.weights, ops.op_x.weights
    X, T = ops.layout.coordinates()
    if getattr(spec.f, "element_aware", False):
        # sources built from a per-element diffusivity are one-sided at
        # interface nodes, so they need to know which element is asking
        f_vals = spec.f(X, T, element=k)
    else:
        f_vals = spec.f(X, T)
    b = ops.p_vec * np.asarray(f_vals, dtype=float)
    q_nodes = np.asarray(spec.q(ops.op_x.nodes), dtype=float)
    e_s = np.zeros(ops.n_t)
    e_s[0] = 1.0
    b += sat.sigma_0 * np.kron(e_s, wx * q_nodes)
    e_w = np.zeros(ops.n_x)
    e_w[0] = 1.0
    e_e = np.zeros(ops.n_x)
    e_e[-1] = 1.0
    if k == 0:
        data = np.asarray(spec.h(ops.op_t.nodes), dtype=float)
        scale = sat.sigma_w if spec.bc_left == "dirichlet" else 1.0
        b += scale * np.kron(wt * data, e_w)
    if k == spec.n_elements - 1:
        data = np.asarray(spec.g(ops.op_t.nodes), dtype=float)
        scale = sat.sigma_e if spec.bc_right == "dirichlet" else -1.0
        b += scale * np.kron(wt * data, e_e)
    return b


def assemble_global(disc, rho):
    """Assemble all blocks of the design-dependent space-time system."""
    kap = disc.kappa_of(rho)
    K = disc.n_elements
    diag, upper, lower, rhs = [], [], [], []
    for k in range(K):
        A, b, B, C = assemble_element(
            k,
            disc,
            kap[k],
            kappa_left=kap[k - 1] if k > 0 else None,
            kappa_right=kap[k + 1] if k + 1 < K else None,
        )
        diag.append(A)
        rhs.append(b)
        if B is not None:
            upper.append(B)
        if C is not None:
            lower.append(C)
    return GlobalSystem(
        diag=diag, upper=upper, lower=lower, rhs=rhs, kappa_values=kap, disc=disc
    )


def residual(u, system):
    """Blockwise A(rho) u - b for a stacked state vector."""
    u = np.asarray(u, dtype=float)
    if u.shape != (system.n_unknowns,):
        raise ValueError(
            f"state has shape {u.shape}, expected ({system.n_unknowns},)"
        )
    return system.matvec(u) - system.rhs_vector()


def north_trace(disc, u):
    """Terminal-time traces of all elements for a stacked state."""
    ub = u.reshape(disc.n_elements, disc.block_size)
    return [restrict("north", disc.ops[k], ub[k]) for k in range(disc.n_elements)]
