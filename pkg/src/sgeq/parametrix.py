"""Leading matrix parametrix for the two-band contour geometry.

Everything here is built from the plus/minus factors R_up, R_down of the
jump function and the support exponent xbar = bar_b - bar_a.  The matrix
is given by one closed formula per band,

  upper band (between the real axis and the upper contour):
      chi11 = 1/(lam R_up) - e^{i lam xbar}/R_down,  chi12 = 1/R_up,
      chi21 = -R_up,                                 chi22 = 0,

  lower band (between the lower contour and the real axis):
      chi11 = -1/R_down + e^{-i lam xbar}/(lam R_up),
      chi12 = e^{-i lam xbar}/R_up,
      chi21 = R_down/lam,                            chi22 = R_down,

and the dropped corrector is carried along as a scalar error budget
e^{-zeta (1-eta) xbar}.  Row one of the lower band is exactly
e^{-i lam xbar} times row one of the upper band, which is the minus-side
continuation rule used at the origin.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = ["ChiEval", "EVectors", "UFunctions", "chi_eval",
           "chi_minus_row1", "chi_minus_at_zero", "e_vectors",
           "e_left", "e_right", "pairing", "u_functions"]

_REGIONS = ("upper_band", "lower_band")


# ---------------------------------------------------------------------------
# matrix evaluation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChiEval:
    """Parametrix entries at one point, with the discarded-term budget.

    chi21/chi22 carry a simple pole at 0 in the lower band; at the
    origin itself they are left as None and ``pole_flagged`` is set.
    """

    region: str
    lam: complex
    chi11: complex
    chi12: complex
    chi21: complex | None
    chi22: complex | None
    budget: float
    pole_flagged: bool = False


def chi_eval(support, wh, lam: complex, region: str) -> ChiEval:
    """Evaluate the leading parametrix at ``lam`` in the given band.

    The upper-band formula is used for points with Im lam >= 0 (this
    includes +i), the lower-band one for Im lam <= 0 (includes -i).
    The returned ``budget`` bounds the dropped corrector relative to
    the values themselves.
    """
    if region not in _REGIONS:
        raise ValueError(f"unknown region {region!r}")
    lam = complex(lam)
    if region == "upper_band" and lam.imag < -1e-12:
        raise ValueError("upper_band point must not lie below the real axis")
    if region == "lower_band" and lam.imag > 1e-12:
        raise ValueError("lower_band point must not lie above the real axis")

    xbar = support.bar_x
    lru = complex(wh.lam_up(lam))        # lam * R_up(lam), regular at 0
    rdw = complex(wh.down(lam))
    budget = float(support.budget)

    if region == "upper_band":
        chi11 = 1.0 / lru - cmath.exp(1j * lam * xbar) / rdw
        chi12 = lam / lru
        if lam == 0:
            return ChiEval(region, lam, chi11, chi12, None, None,
                           budget, pole_flagged=True)
        return ChiEval(region, lam, chi11, chi12, -lru / lam, 0.0, budget)

    phase = cmath.exp(-1j * lam * xbar)
    chi11 = -1.0 / rdw + phase / lru
    chi12 = phase * lam / lru
    if lam == 0:
        raise ValueError("lower-band chi21/chi22 have a simple pole at 0")
    return ChiEval(region, lam, chi11, chi12, rdw / lam, rdw, budget,
                   pole_flagged=abs(lam) < 1e-2)


def chi_minus_row1(support, wh, lam: complex) -> tuple[complex, complex]:
    """Minus-side continuation of row one: e^{-i lam xbar} (chi11, chi12)."""
    ce = chi_eval(support, wh, lam, "upper_band")
    phase = cmath.exp(-1j * complex(lam) * support.bar_x)
    return phase * ce.chi11, phase * ce.chi12


def chi_minus_at_zero(support, wh) -> dict:
    """Values and first derivatives of the minus continuations at 0.

    Writing A for the (finite, nonzero) limit of lam*R_up at 0, the
    continued row expands as

        chi11m(lam) = (1/A)[e^{-i lam xbar - phi(lam)} + e^{-phi(-lam)}],
        chi12m(lam) = (lam/A) e^{-i lam xbar - phi(lam)},

    where phi is the log of lam*R_up normalized to phi(0)=0.  The
    phi'(0) contributions cancel between the two chi11m terms, so the
    first-order coefficients involve only A and xbar.
    """
    a0 = complex(wh.lim0_lambda_R_up)
    xbar = support.bar_x
    return {
        "chi11m0": 2.0 / a0,
        "chi11m0_prime": -1j * xbar / a0,
        "chi12m0": 0.0 + 0.0j,
        "chi12m0_prime": 1.0 / a0,
    }


# ---------------------------------------------------------------------------
# edge vectors and their pairing
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EVectors:
    """Leading-order left/right vectors at one point."""

    lam: complex
    E_L_up: np.ndarray
    E_L_down: np.ndarray
    E_R_up: np.ndarray
    E_R_down: np.ndarray


def e_vectors(wh, lam: complex) -> EVectors:
    lam = complex(lam)
    ru = complex(wh.up(lam))
    rd = complex(wh.down(lam))
    return EVectors(
        lam=lam,
        E_L_up=np.array([1.0 / ru, -1.0 / ru]),
        E_L_down=np.array([lam / rd, 0.0]),
        E_R_up=np.array([1.0 / ru, 1.0 / ru]),
        E_R_down=np.array([0.0, lam / rd]),
    )


def e_left(chi: ChiEval) -> np.ndarray:
    """Dressed left vector (chi11, -chi12/lam) at the ChiEval's point."""
    return np.array([chi.chi11, -chi.chi12 / chi.lam])


def e_right(chi: ChiEval) -> np.ndarray:
    """Dressed right vector (chi12, lam chi11) at the ChiEval's point."""
    return np.array([chi.chi12, chi.lam * chi.chi11])


def pairing(v_left, v_right) -> complex:
    """Bilinear (not sesquilinear) dot product of two 2-vectors."""
    return complex(v_left[0] * v_right[0] + v_left[1] * v_right[1])


# ---------------------------------------------------------------------------
# endpoint-data rational functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UFunctions:
    """The two rational functions carrying the endpoint exponentials.

    Built from Nu = e^{bar_b} + e^{-bar_a}, v = e^{bar_b} - e^{-bar_a}
    and the parametrix values at +-i (the value at -i follows from the
    one at +i through the variable-reflection relation
    chi11(-lam) = chi11(lam), chi12(-lam) = chi12(lam) - lam chi11(lam)).
    Both functions have simple poles at lam = +-i.
    """

    nu: float
    v: float
    chi11_i: complex
    chi12_i: complex
    chi12_mi: complex

    def u12(self, lam) -> complex:
        lam = complex(lam)
        return 1j * self.chi11_i * (self.nu * lam + 1j * self.v) / (1.0 + lam * lam)

    def u11(self, lam) -> complex:
        lam = complex(lam)
        eb = 0.5 * (self.nu + self.v)
        ema = 0.5 * (self.nu - self.v)
        return eb * self.chi12_i / (1j - lam) + ema * self.chi12_mi / (1j + lam)

    def u12_stripped_at_i(self) -> complex:
        """Half the residue factor: (1+lam^2) u12 / 2 at lam = i."""
        return (self.nu * 1j + 1j * self.v) / 2.0 * (1j * self.chi11_i)

    def identity_residual(self, support, wh, lam: complex) -> float:
        """Residual of the two-pole expansion of the paired kernel.

        Sums e^{bar_b} and e^{-bar_a} times the pairing of the dressed
        left vector at lam with the dressed right vector at sigma*i,
        against chi12(lam) u12(lam)/lam + chi11(lam) u11(lam).
        """
        lam = complex(lam)
        ce = chi_eval(support, wh, lam,
                      "upper_band" if lam.imag >= 0 else "lower_band")
        eb = 0.5 * (self.nu + self.v)
        ema = 0.5 * (self.nu - self.v)
        lhs = 0.0 + 0.0j
        for sigma, weight in ((1.0, eb), (-1.0, ema)):
            chi11_s = self.chi11_i
            chi12_s = self.chi12_i if sigma > 0 else self.chi12_mi
            pair = ce.chi11 * chi12_s - (sigma * 1j / lam) * chi11_s * ce.chi12
            lhs += weight * pair / (1j - sigma * lam)
        rhs = ce.chi12 * self.u12(lam) / lam + ce.chi11 * self.u11(lam)
        scale = max(abs(lhs), abs(rhs), 1.0)
        return abs(lhs - rhs) / scale


def u_functions(support, chi_i_values: dict) -> UFunctions:
    """Bundle the endpoint rational functions from parametrix data at +i.

    chi_i_values must hold chi11_i and chi12_i as returned by chi_eval
    in the upper band at lam = i.
    """
    chi11_i = complex(chi_i_values["chi11_i"])
    chi12_i = complex(chi_i_values["chi12_i"])
    nu = float(support.n) * float(support.u_n)
    return UFunctions(
        nu=nu,
        v=float(support.v_n),
        chi11_i=chi11_i,
        chi12_i=chi12_i,
        chi12_mi=chi12_i - 1j * chi11_i,
    )
