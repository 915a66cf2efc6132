"""Method of moving asymptotes for one linear constraint, plus a scalar
bracket minimizer used as an independent optimization reference.

The MMA update builds the usual separable rational approximation of the
objective around the current design, with asymptotes adapted by oscillation
detection.  Because the volume constraint is linear it is kept exact in the
subproblem rather than approximated, so the dual is a one-dimensional
bisection on the volume multiplier and every update is feasible by
construction.  Gradients are normalized by the first iteration's magnitude
(see MmaState), which makes whole trajectories invariant to positive
rescaling of the objective without losing the step damping near optima.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalError


@dataclass
class MmaConfig:
    asy_init: float = 0.5
    asy_incr: float = 1.2
    asy_decr: float = 0.7
    move_limit: float = 0.5
    raa0: float = 1e-5
    albefa: float = 0.1


@dataclass
class MmaState:
    """Iteration memory: previous two designs and the moving asymptotes.

    ``gradient_scale`` freezes the normalization at the first iteration's
    gradient magnitude.  Later gradients then shrink relative to the raa0
    curvature floor as the optimum is approached, which is what damps the
    steps, while uniform rescaling of the objective still leaves the whole
    trajectory unchanged.
    """

    config: MmaConfig = field(default_factory=MmaConfig)
    iteration: int = 0
    x_prev1: np.ndarray = None
    x_prev2: np.ndarray = None
    low: np.ndarray = None
    upp: np.ndarray = None
    gradient_scale: float = None


def _update_asymptotes(x, state):
    cfg = state.config
    if state.iteration < 2 or state.x_prev2 is None:
        low = x - cfg.asy_init
        upp = x + cfg.asy_init
    else:
        osc = (x - state.x_prev1) * (state.x_prev1 - state.x_prev2)
        factor = np.ones_like(x)
        factor[osc > 0] = cfg.asy_incr
        factor[osc < 0] = cfg.asy_decr
        low = x - factor * (state.x_prev1 - state.low)
        upp = x + factor * (state.upp - state.x_prev1)
        # the lower clamp bounds the achievable resolution of an interior
        # optimum (limit cycles scale with it), so keep it tight
        low = np.clip(low, x - 10.0, x - 1e-5)
        upp = np.clip(upp, x + 1e-5, x + 10.0)
    return low, upp


def _subproblem_minimizer(mu, p, q, low, upp, alfa, beta, volumes):
    """Componentwise minimizer of the separable dual Lagrangian.

    phi_j'(x) = p/(U-x)^2 - q/(x-L)^2 + mu V is strictly increasing on
    (L, U), so a vectorized bisection on [alfa, beta] is exact and branch
    free.
    """
    lo = alfa.copy()
    hi = beta.copy()
    c = mu * volumes

    def dphi(x):
        return p / (upp - x) ** 2 - q / (x - low) ** 2 + c

    take_lo = dphi(lo) >= 0.0
    take_hi = dphi(hi) <= 0.0
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        positive = dphi(mid) > 0.0
        hi = np.where(positive, mid, hi)
        lo = np.where(positive, lo, mid)
    x = 0.5 * (lo + hi)
    x[take_lo] = alfa[take_lo]
    x[take_hi] = beta[take_hi]
    return x


def mma_update(rho, dj, volumes, volume_bound, state):
    """One MMA design update under sum(rho * volumes) <= volume_bound."""
    rho = np.asarray(rho, dtype=float)
    dj = np.asarray(dj, dtype=float)
    volumes = np.asarray(volumes, dtype=float)
    if not np.all(np.isfinite(dj)):
        raise ValueError("objective gradient contains non-finite entries")
    if rho @ volumes > volume_bound + 1e-6:
        raise ValueError("current design violates the volume constraint")
    cfg = state.config

    if state.gradient_scale is None:
        scale = np.max(np.abs(dj))
        if scale == 0.0:
            state.iteration += 1
            state.x_prev2, state.x_prev1 = state.x_prev1, rho.copy()
            return rho.copy()
        state.gradient_scale = scale
    d = dj / state.gradient_scale

    low, upp = _update_asymptotes(rho, state)
    alfa = np.maximum.reduce(
        [np.zeros_like(rho), low + cfg.albefa * (rho - low), rho - cfg.move_limit]
    )
    beta = np.minimum.reduce(
        [np.ones_like(rho), upp - cfg.albefa * (upp - rho), rho + cfg.move_limit]
    )

    dpos = np.maximum(d, 0.0)
    dneg = np.maximum(-d, 0.0)
    p = (upp - rho) ** 2 * (1.001 * dpos + 0.001 * dneg + cfg.raa0)
    q = (rho - low) ** 2 * (0.001 * dpos + 1.001 * dneg + cfg.raa0)

    x0 = _subproblem_minimizer(0.0, p, q, low, upp, alfa, beta, volumes)
    if x0 @ volumes <= volume_bound:
        new_rho = x0
    else:
        mu_lo, mu_hi = 0.0, 1.0
        while (
            _subproblem_minimizer(mu_hi, p, q, low, upp, alfa, beta, volumes) @ volumes
            > volume_bound
        ):
            mu_hi *= 2.0
            if mu_hi > 1e12:
                raise NumericalError("volume multiplier bracket not found")
        while mu_hi - mu_lo > 1e-12 * max(1.0, mu_hi):
            mid = 0.5 * (mu_lo + mu_hi)
            x_mid = _subproblem_minimizer(mid, p, q, low, upp, alfa, beta, volumes)
            if x_mid @ volumes > volume_bound:
                mu_lo = mid
            else:
                mu_hi = mid
        # the upper endpoint is feasible by construction
        new_rho = _subproblem_minimizer(mu_hi, p, q, low, upp, alfa, beta, volumes)

    state.low, state.upp = low, upp
    state.x_prev2, state.x_prev1 = state.x_prev1, rho.copy()
    state.iteration += 1
    return new_rho


_GOLDEN = 0.5 * (3.0 - math.sqrt(5.0))


def scalar_minimize(f, bracket, tol=1e-8, max_iter=10_000, width_history=None):
    """Brent-style bounded scalar minimization.

    Parabolic interpolation through the three best points, with
    golden-section fallback whenever the parabola is untrustworthy.  The
    bracket shrinks monotonically and the search stops once its width drops
    below ``tol``; for unimodal f the returned point is within tol of the
    minimizer.
    """
    a, b = float(bracket[0]), float(bracket[1])
    if not a < b:
        raise ValueError("bracket must satisfy lo < hi")

    def safe_eval(x):
        val = f(x)
        if not np.isfinite(val):
            raise NumericalError(f"objective returned non-finite value at {x}")
        return val

    x = w = v = a + _GOLDEN * (b - a)
    fx = fw = fv = safe_eval(x)
    d = e = b - a
    if width_history is not None:
        width_history.append(b - a)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        m = 0.5 * (a + b)
        tol1 = 0.25 * tol + 1e-15 * abs(x)
        use_golden = True
        if abs(e) > tol1:
            r = (x - w) * (fx - fv)
            qq = (x - v) * (fx - fw)
            pp = (x - v) * qq - (x - w) * r
            qq = 2.0 * (qq - r)
            if qq > 0:
                pp = -pp
            qq = abs(qq)
            e_prev, e = e, d
            if abs(pp) < abs(0.5 * qq * e_prev) and qq * (a - x) < pp < qq * (b - x):
                d = pp / qq
                use_golden = False
        if use_golden:
            e = (b - x) if x < m else (a - x)
            d = _GOLDEN * e
        if abs(d) < tol1:
            d = tol1 if d >= 0 else -tol1
        u = x + d
        fu = safe_eval(u)
        if fu <= fx:
            if u < x:
                b = x
            else:
                a = x
            v, w, x = w, x, u
            fv, fw, fx = fw, fx, fu
        else:
            if u < x:
                a = u
            else:
                b = u
            if fu <= fw or w == x:
                v, w = w, u
                fv, fw = fw, fu
            elif fu <= fv or v == x or v == w:
                v, fv = u, fu
        if width_history is not None:
            width_history.append(b - a)
    else:
        raise NumericalError("scalar minimizer exceeded the iteration cap")
    return x, fx
