"""Independent brute-force checks of the equilibrium construction.

Two routes that share no code with the contour-integral machinery:

* direct minimization of the discretized energy functional over
  probability weights on a fixed grid (projected-gradient with
  Barzilai-Borwein steps and an Armijo backtracking line search), from
  which support endpoints and moments are read off;
* direct quadrature of the defining multiple integral for very small
  system sizes, used to check symmetry and differential identities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss

from .model import ModelParams, derive_scales, potential
from .wiener_hopf import WHFactorSet

# ---------------------------------------------------------------------------
# discretized energy minimization
# ---------------------------------------------------------------------------


@dataclass
class DiscreteMeasure:
    """Minimizer of the discretized energy functional.

    ``weights`` lives on the probability simplex over ``nodes``;
    ``grad_residual`` is the sup norm of the projected gradient at the
    returned point.
    """

    nodes: np.ndarray
    weights: np.ndarray
    energy: float
    grad_residual: float
    n_iter: int
    converged: bool
    meta: dict = field(default_factory=dict)

    @property
    def mean(self) -> float:
        return float(self.weights @ self.nodes)


def _log_sinh_abs(z: np.ndarray) -> np.ndarray:
    """ln|sinh(z)| for z >= 0, stable for large arguments."""
    with np.errstate(divide="ignore"):
        return z - math.log(2.0) + np.log1p(-np.exp(-2.0 * z))


def _interaction_matrix(params: ModelParams, nodes: np.ndarray) -> np.ndarray:
    """Pairwise logarithmic interaction with a half-cell self term."""
    diff = np.abs(nodes[:, None] - nodes[None, :])
    spacing = nodes[1] - nodes[0]
    np.fill_diagonal(diff, 0.5 * spacing)
    kmat = np.zeros_like(diff)
    for ob in (params.omega_bar1, params.omega_bar2):
        kmat += _log_sinh_abs(0.5 * ob * diff)
    return kmat


def _project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, v.size + 1)
    cond = u - css / idx > 0.0
    rho = idx[cond][-1]
    theta = css[rho - 1] / rho
    return np.maximum(v - theta, 0.0)


def minimize_energy(params: ModelParams, tba=None, grid_m: int = 400,
                    half_width: float | None = None, max_iter: int = 20000,
                    tol: float = 1e-10, seed: int = 7) -> DiscreteMeasure:
    """Minimize the discretized energy over probability weights on a grid.

    The objective is w . V - w . K w / (2 tau) with K the pairwise
    logarithmic interaction; its negative-definite part on zero-sum
    directions makes the problem convex, which is smoke-checked on
    random directions and recorded in ``meta``.

    Parameters
    ----------
    grid_m : int
        Number of grid nodes.
    half_width : float, optional
        Half-extent of the grid; default is 1.5x the leading endpoint
        scale so the support is strictly interior.
    """
    if half_width is None:
        wh = WHFactorSet(params.omega1, params.omega2)
        c0 = wh.constants(params.r).c0
        half_width = 1.5 * math.log(0.5 * c0 * params.n) / params.tau
    nodes = np.linspace(-half_width, half_width, grid_m)
    v_vals = np.array([potential(params, tba, x) for x in nodes])
    kmat = _interaction_matrix(params, nodes)
    tau = params.tau

    rng = np.random.default_rng(seed)
    convex_ok = True
    for _ in range(3):
        d = rng.standard_normal(grid_m)
        d -= d.mean()
        if d @ (kmat @ d) / tau > 0.0:
            convex_ok = False

    def energy(w):
        return float(w @ v_vals - 0.5 * (w @ (kmat @ w)) / tau)

    def gradient(w):
        return v_vals - (kmat @ w) / tau

    w = np.full(grid_m, 1.0 / grid_m)
    g = gradient(w)
    e = energy(w)
    step = 1.0 / max(1.0, float(np.max(np.abs(g))))
    w_prev, g_prev = None, None
    it = 0
    grad_res = math.inf
    for it in range(1, max_iter + 1):
        if w_prev is not None:
            s = w - w_prev
            y = g - g_prev
            sy = float(s @ y)
            step = float(s @ s) / sy if sy > 1e-300 else 1.0
            step = min(max(step, 1e-12), 1e12)
        # Armijo backtracking on the projected-gradient arc
        accepted = False
        t = step
        for _ in range(60):
            w_new = _project_simplex(w - t * g)
            delta = w_new - w
            e_new = energy(w_new)
            if e_new <= e + 1e-4 * float(g @ delta) or not delta.any():
                accepted = True
                break
            t *= 0.5
        if not accepted:
            break
        w_prev, g_prev = w, g
        w, e = w_new, e_new
        g = gradient(w)
        grad_res = float(np.max(np.abs(w - _project_simplex(w - g))))
        if grad_res < tol:
            break
    # polish: solve the stationarity system exactly on the active set
    active = np.nonzero(w > 0.0)[0]
    if active.size >= 2:
        m_a = active.size
        sys = np.zeros((m_a + 1, m_a + 1))
        sys[:m_a, :m_a] = kmat[np.ix_(active, active)] / tau
        sys[:m_a, m_a] = 1.0
        sys[m_a, :m_a] = 1.0
        rhs = np.concatenate([v_vals[active], [1.0]])
        try:
            sol = np.linalg.solve(sys, rhs)
        except np.linalg.LinAlgError:
            sol = None
        if sol is not None and np.all(sol[:m_a] >= 0.0):
            w_pol = np.zeros_like(w)
            w_pol[active] = sol[:m_a]
            g_pol = gradient(w_pol)
            res_pol = float(np.max(np.abs(
                w_pol - _project_simplex(w_pol - g_pol))))
            if res_pol < grad_res:
                w, g, grad_res = w_pol, g_pol, res_pol
                e = energy(w)
    return DiscreteMeasure(
        nodes=nodes,
        weights=w,
        energy=e,
        grad_residual=grad_res,
        n_iter=it,
        converged=grad_res < tol,
        meta={"convex_ok": convex_ok, "half_width": half_width,
              "grid_m": grid_m},
    )


def oracle_endpoints(measure: DiscreteMeasure, threshold: float = 1e-3,
                     n_fit: int = 10) -> dict:
    """Support endpoints read off a discrete minimizer.

    A threshold cut on the weights locates the bulk; the edge is then
    refined by fitting the square of the weights (proportional to the
    squared density, hence linear near a square-root edge) on the last
    ``n_fit`` interior nodes and extrapolating to zero.
    """
    w = measure.weights
    x = measure.nodes
    cut = threshold * float(w.max())
    idx = np.nonzero(w > cut)[0]
    if idx.size < 2 * n_fit + 8:
        raise ValueError("bulk too narrow for the edge fit")
    i_lo, i_hi = int(idx[0]), int(idx[-1])
    out = {"a_cut": float(x[i_lo]), "b_cut": float(x[i_hi])}
    for side, sl in (("b", slice(i_hi - n_fit + 1, i_hi + 1)),
                     ("a", slice(i_lo, i_lo + n_fit))):
        xs = x[sl]
        ys = w[sl] ** 2
        coef = np.polyfit(xs, ys, 1)
        out[side] = float(-coef[1] / coef[0])
    return out


# ---------------------------------------------------------------------------
# direct quadrature for very small system sizes
# ---------------------------------------------------------------------------


def _auto_half_width(params: ModelParams) -> float:
    """Smallest box on which the confining term dominates the interaction."""
    rate = 2.0 * math.pi * params.tau * params.omega_sum * (params.n - 1)
    half = 2.0
    while params.r * math.cosh(params.tau * half) < rate * half + 50.0:
        half *= 1.25
        if half > 64.0:
            raise RuntimeError("no dominating box found")
    return half


def z_small_n(r: float, b: float, alpha: float, n_small: int,
              n_nodes: int = 64, tba=None,
              half_width: float | None = None) -> float:
    """Log of the defining multiple integral for a small system size.

    Tensor-product Gauss-Legendre quadrature of the fully symmetric
    integrand (pairwise interaction terms times the confining weight),
    evaluated in log space with a global shift for stability.  Supports
    n_small in {2, 3, 4}.
    """
    if n_small not in (2, 3, 4):
        raise ValueError("direct quadrature is limited to n_small in {2,3,4}")
    params = derive_scales(r=r, b=b, alpha=alpha, n=n_small)
    if half_width is None:
        half_width = _auto_half_width(params)
    x0, w0 = leggauss(n_nodes)
    nodes = half_width * x0
    weights = half_width * w0
    ntv = np.array([params.n * params.tau * potential(params, tba, x)
                    for x in nodes])

    diff = np.abs(nodes[:, None] - nodes[None, :])
    with np.errstate(divide="ignore"):
        lnk = sum(_log_sinh_abs(0.5 * ob * diff)
                  for ob in (params.omega_bar1, params.omega_bar2))
    # coincident nodes carry a vanishing integrand: keep -inf, exp -> 0
    log_w = np.log(weights)

    if n_small == 2:
        expo = (lnk - ntv[:, None] - ntv[None, :]
                + log_w[:, None] + log_w[None, :])
    elif n_small == 3:
        expo = (lnk[:, :, None] + lnk[:, None, :] + lnk[None, :, :]
                - ntv[:, None, None] - ntv[None, :, None] - ntv[None, None, :]
                + log_w[:, None, None] + log_w[None, :, None]
                + log_w[None, None, :])
    else:
        expo = (lnk[:, :, None, None] + lnk[:, None, :, None]
                + lnk[:, None, None, :] + lnk[None, :, :, None]
                + lnk[None, :, None, :] + lnk[None, None, :, :])
        for axis_vec in (ntv[:, None, None, None] - log_w[:, None, None, None],
                         ntv[None, :, None, None] - log_w[None, :, None, None],
                         ntv[None, None, :, None] - log_w[None, None, :, None],
                         ntv[None, None, None, :] - log_w[None, None, None, :]):
            expo = expo - axis_vec
    shift = float(np.max(expo[np.isfinite(expo)]))
    with np.errstate(over="ignore", invalid="ignore"):
        total = float(np.sum(np.exp(expo - shift)))
    if not total > 0.0:
        raise ArithmeticError("direct quadrature lost all mass")
    return shift + math.log(total)
