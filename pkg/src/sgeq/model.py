"""Scalar parameters, derived scales, and the confining potential.

The potential seen by each particle is a rescaled cosh well plus a linear
tilt plus a small smooth dressing obtained by convolving the solved
pseudo-energy weight against a sech kernel:

    V(lam) = (r/(N tau)) cosh(tau lam) - alpha lam / N
             + sign * (1/(2 pi N tau)) * integral g(x) sech(tau lam - x) dx

with ``sign`` the convention with which the dressing enters (default -1).
First and second lambda-derivatives are evaluated with the kernel
derivatives written analytically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# ---------------------------------------------------------------------------
# parameters and derived scales
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ModelParams:
    """All scalar inputs plus the derived scales used downstream.

    Attributes
    ----------
    r, b, alpha : float
        Mass-volume parameter, coupling, and linear-tilt strength.
    n : int
        System size N (>= 2).
    eta : float
        Asymptotic-control slack in (0, 1/2).
    tau : float
        ln N.
    omega1, omega2 : float
        Periods (1+b**2)/pi and (1+b**-2)/pi under the specialization.
    omega_bar1, omega_bar2 : float
        2 pi tau omega_a.
    zeta : float
        2 pi omega1 omega2 / (omega1 + omega2); equals 2 when specialized.
    kappa_eta : float
        (1 - eta) * min(2, zeta).
    specialized : bool
        Whether the periods follow the specialization above.
    sign_convention : int
        Sign with which the smooth dressing enters the potential (-1
        normative).
    """

    r: float
    b: float
    alpha: float
    n: int
    eta: float = 0.1
    sign_convention: int = -1
    tau: float = field(init=False)
    omega1: float = field(init=False)
    omega2: float = field(init=False)
    omega_bar1: float = field(init=False)
    omega_bar2: float = field(init=False)
    zeta: float = field(init=False)
    kappa_eta: float = field(init=False)
    specialized: bool = field(init=False, default=True)

    def __post_init__(self) -> None:
        if not (self.r > 0):
            raise ValueError(f"r must be positive, got {self.r}")
        if not (self.b > 0):
            raise ValueError(f"b must be positive, got {self.b}")
        if self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n}")
        if not (0 < self.eta < 0.5):
            raise ValueError(f"eta must lie in (0, 1/2), got {self.eta}")
        if self.sign_convention not in (-1, 1):
            raise ValueError("sign_convention must be +1 or -1")
        b2 = self.b * self.b
        omega1 = (1.0 + b2) / math.pi
        omega2 = (1.0 + 1.0 / b2) / math.pi
        tau = math.log(self.n)
        zeta = 2.0 * math.pi * omega1 * omega2 / (omega1 + omega2)
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "omega1", omega1)
        object.__setattr__(self, "omega2", omega2)
        object.__setattr__(self, "omega_bar1", 2.0 * math.pi * tau * omega1)
        object.__setattr__(self, "omega_bar2", 2.0 * math.pi * tau * omega2)
        object.__setattr__(self, "zeta", zeta)
        object.__setattr__(self, "kappa_eta", (1.0 - self.eta) * min(2.0, zeta))
        object.__setattr__(self, "specialized", True)

    # convenience scales -----------------------------------------------------

    @property
    def s1(self) -> float:
        """Inverse-period scale 1/(2 pi omega1) = 1/(2(1+b^2))."""
        return 1.0 / (2.0 * math.pi * self.omega1)

    @property
    def s2(self) -> float:
        """Inverse-period scale 1/(2 pi omega2) = 1/(2(1+b^-2))."""
        return 1.0 / (2.0 * math.pi * self.omega2)

    @property
    def omega_sum(self) -> float:
        return self.omega1 + self.omega2


def derive_scales(
    r: float,
    b: float,
    alpha: float,
    n: int,
    eta: float = 0.1,
    sign_convention: int = -1,
) -> ModelParams:
    """Build a ModelParams with every derived scale filled in."""
    return ModelParams(r=r, b=b, alpha=alpha, n=int(n), eta=eta,
                       sign_convention=sign_convention)


# ---------------------------------------------------------------------------
# confining potential
# ---------------------------------------------------------------------------


def _dressing_integral(tba, y: float, order: int) -> float:
    # integral of g(x) * k(y - x) dx over the pseudo-energy grid, where k is
    # sech (order 0), (sech*tanh) (order 1) or (sech - 2 sech^3) (order 2);
    # the grid weight g vanishes with all derivatives at the edges, so the
    # trapezoid rule is effectively exact here.
    x = tba.grid
    u = y - x
    sech = 1.0 / np.cosh(u)
    if order == 0:
        kern = sech
    elif order == 1:
        kern = sech * np.tanh(u)
    else:
        kern = sech - 2.0 * sech**3
    return float(np.trapezoid(tba.g_values * kern, x))


def potential(params: ModelParams, tba, lam: float, order: int = 0) -> float:
    """Confining potential V (order=0) or its derivatives V', V''.

    ``tba=None`` drops the dressing term entirely (test mode).
    """
    if order not in (0, 1, 2):
        raise ValueError(f"order must be 0, 1 or 2, got {order}")
    r, n, tau, alpha = params.r, params.n, params.tau, params.alpha
    s = float(params.sign_convention)
    y = tau * lam
    if order == 0:
        out = (r / (n * tau)) * math.cosh(y) - alpha * lam / n
        if tba is not None:
            out += s / (2.0 * math.pi * n * tau) * _dressing_integral(tba, y, 0)
    elif order == 1:
        out = (r / n) * math.sinh(y) - alpha / n
        if tba is not None:
            out -= s / (2.0 * math.pi * n) * _dressing_integral(tba, y, 1)
    else:
        out = (r * tau / n) * math.cosh(y)
        if tba is not None:
            out += s * tau / (2.0 * math.pi * n) * _dressing_integral(tba, y, 2)
    return out


def convexity_margin(params: ModelParams, tba, lambda_grid) -> float:
    """Minimum of V'' over the given grid (caller asserts positivity)."""
    return min(potential(params, tba, float(lam), order=2) for lam in lambda_grid)
