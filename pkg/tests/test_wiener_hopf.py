"""Plus/minus factorization of the two-period kernel."""

import math

import numpy as np
import pytest
from scipy.special import gamma

from sgeq.model import derive_scales
from sgeq.wiener_hopf import (WHFactorSet, constants, make_factors, r_down,
                              r_kernel, r_up, wh_special)


def _omegas(b):
    p = derive_scales(r=1.0, b=b, alpha=0.0, n=100)
    return p.omega1, p.omega2


# ---------------------------------------------------------------------------
# factorization identities
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("b", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("height", [0.0, 0.4, -0.4])
def test_product_identity(b, height):
    o1, o2 = _omegas(b)
    lam = np.linspace(-30.0, 30.0, 241) + 1j * height
    lam = lam[np.abs(lam) > 1e-9]
    prod = r_up(o1, o2, lam) * r_down(o1, o2, lam)
    ker = r_kernel(o1, o2, lam)
    np.testing.assert_allclose(prod, ker, rtol=1e-10)


@pytest.mark.parametrize("b", [0.5, 1.0, 2.0])
def test_reflection_and_conjugation(b):
    o1, o2 = _omegas(b)
    lam = np.linspace(-30.0, 30.0, 121) + 0.4j
    lam = lam[np.abs(lam) > 1e-9]
    # reflecting the argument exchanges the factors (with a 1/lam twist)
    up_neg = r_up(o1, o2, -lam)
    down = r_down(o1, o2, lam)
    np.testing.assert_allclose(up_neg, down / lam, rtol=1e-10)
    # Schwarz symmetry ties conjugation to the same exchange
    conj_up = np.conj(r_up(o1, o2, np.conj(lam)))
    np.testing.assert_allclose(conj_up, down / lam, rtol=1e-10)


def test_limit_at_large_real_argument():
    # convergence to 1 is exponential, so moderate arguments already land
    o1, o2 = _omegas(1.0)
    lam = np.array([30.0, 45.0, 60.0 + 0.4j])
    np.testing.assert_allclose(r_kernel(o1, o2, lam), 1.0, atol=1e-8)
    # odd parity sends the limit to -1 on the other side
    np.testing.assert_allclose(r_kernel(o1, o2, -lam), -1.0, atol=1e-8)


@pytest.mark.parametrize("b", [0.5, 1.0])
def test_deep_branch_continuity(b):
    # the two evaluation branches agree across the switchover depth
    o1, o2 = _omegas(b)
    p = derive_scales(r=1.0, b=b, alpha=0.0, n=100)
    y0 = max(48.0, 6.0 / min(p.s1, p.s2))
    for t in (-3.0, 0.3, 5.0):
        above = complex(r_up(o1, o2, t + 1j * (y0 - 1e-6)))
        below = complex(r_up(o1, o2, t + 1j * (y0 + 1e-6)))
        assert abs(above - below) < 1e-6 * abs(above)
        above = complex(r_down(o1, o2, t - 1j * (y0 - 1e-6)))
        below = complex(r_down(o1, o2, t - 1j * (y0 + 1e-6)))
        assert abs(above - below) < 1e-6 * abs(above)


# ---------------------------------------------------------------------------
# special values at the origin and at +/- i
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("b", [0.5, 1.0, 2.0])
def test_special_values_at_origin(b):
    o1, o2 = _omegas(b)
    sp = wh_special(o1, o2)
    w = o1 + o2
    # lower factor value and the limit of lam * upper factor
    assert abs(sp["R_down_0"] + 1j * math.sqrt(w)) < 1e-8
    assert abs(sp["lim0_lambda_R_up"] - 1j * math.sqrt(w)) < 1e-8
    # log-derivative of the lower factor at the origin is purely imaginary
    assert abs(sp["dlog_R_down_0"].real) < 1e-8


def test_log_derivative_closed_form():
    o1, o2 = _omegas(1.0)
    sp = wh_special(o1, o2)
    # at unit coupling the constant reduces to (ln 2)/2
    assert sp["dlog_R_down_0"].imag == pytest.approx(0.5 * math.log(2.0),
                                                     abs=1e-8)
    o1, o2 = _omegas(0.5)
    sp = wh_special(o1, o2)
    assert sp["dlog_R_down_0"].imag == pytest.approx(0.2502012117690707,
                                                     abs=1e-8)


def test_values_at_unit_imaginary_point():
    o1, o2 = _omegas(1.0)
    wh = WHFactorSet(o1, o2)
    closed_up = math.sqrt(2.0) * gamma(0.25) ** 2 / (4.0 * math.pi)
    assert complex(wh.R_up_i) == pytest.approx(closed_up, rel=1e-10)
    assert complex(wh.R_down_i).real == pytest.approx(0.0, abs=1e-10)
    # product of the factor values at +i gives the kernel value -i
    assert complex(wh.R_up_i * wh.R_down_i) == pytest.approx(-1j, rel=1e-10)
    # the upper factor at -i is real negative with the same magnitude
    up_mi = complex(wh.up(-1j))
    assert up_mi == pytest.approx(-abs(complex(wh.R_down_i)), rel=1e-10)


# ---------------------------------------------------------------------------
# closed-form constants
# ---------------------------------------------------------------------------


def test_constants_at_unit_coupling():
    p = derive_scales(r=10.0, b=1.0, alpha=0.0, n=1000)
    cst = make_factors(p).constants(p.r)
    g4 = gamma(0.25) ** 2
    assert cst.c0 * p.r == pytest.approx(
        2.0 * math.sqrt(2.0) * g4 / math.sqrt(math.pi), rel=1e-6)
    assert cst.d0 * p.r == pytest.approx(
        math.sqrt(2.0) * g4 / math.sqrt(math.pi), rel=1e-6)
    assert cst.d1 == pytest.approx(p.r ** 2 / (8.0 * math.pi), rel=1e-10)
    assert cst.ratio_c0_d0 == pytest.approx(2.0, rel=1e-8)


@pytest.mark.parametrize("b", [0.7, 1.0, 1.3])
def test_constant_ratio_identity(b):
    p = derive_scales(r=3.0, b=b, alpha=0.0, n=1000)
    cst = constants(p.r, p.omega1, p.omega2)
    s1, s2 = p.s1, p.s2
    closed = (2.0 * s1) ** (-2.0 * s1) * (2.0 * s2) ** (-2.0 * s2)
    assert cst.ratio_c0_d0 == pytest.approx(closed, rel=1e-8)


def test_inverse_coupling_symmetry():
    # the factorization data is invariant under b -> 1/b
    pa = derive_scales(r=10.0, b=0.5, alpha=0.0, n=1000)
    pb = derive_scales(r=10.0, b=2.0, alpha=0.0, n=1000)
    ca = make_factors(pa).constants(pa.r)
    cb = make_factors(pb).constants(pb.r)
    assert ca.c0 == pytest.approx(cb.c0, rel=1e-14)
    assert ca.d0 == pytest.approx(cb.d0, rel=1e-14)
    assert ca.d1 == pytest.approx(cb.d1, rel=1e-14)


def test_frozen_constants_off_unit_coupling():
    p = derive_scales(r=10.0, b=0.5, alpha=0.0, n=1000)
    cst = make_factors(p).constants(p.r)
    assert cst.c0 * p.r == pytest.approx(30.580847639, rel=1e-9)
    assert cst.d0 * p.r == pytest.approx(18.540758953, rel=1e-9)
    assert cst.d1 == pytest.approx(1.496782854, rel=1e-8)
    assert cst.ratio_c0_d0 == pytest.approx(1.64938488847, rel=1e-9)
