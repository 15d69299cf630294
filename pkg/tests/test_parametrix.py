"""Leading two-band matrix parametrix and its interpolation data."""

import math

import numpy as np
import pytest

from sgeq.equilibrium import _support_from_uv
from sgeq.model import derive_scales
from sgeq.parametrix import (chi_eval, chi_minus_at_zero, chi_minus_row1,
                             e_left, e_right, pairing, u_functions)
from sgeq.wiener_hopf import make_factors


@pytest.fixture(scope="module")
def band_setup():
    params = derive_scales(r=10.0, b=1.0, alpha=0.5, n=1000)
    wh = make_factors(params)
    sup = _support_from_uv(params, 2.0976460434336994, 0.2622, "newton_solved")
    return params, wh, sup


# ---------------------------------------------------------------------------
# matrix structure
# ---------------------------------------------------------------------------


def test_band_determinants(band_setup):
    _, wh, sup = band_setup
    rng = np.random.default_rng(11)
    for _ in range(10):
        t = rng.uniform(-8.0, 8.0)
        y = rng.uniform(0.05, 3.0)
        up = chi_eval(sup, wh, complex(t, y), "upper_band")
        lo = chi_eval(sup, wh, complex(t, -y), "lower_band")
        det_up = up.chi11 * up.chi22 - up.chi12 * up.chi21
        det_lo = lo.chi11 * lo.chi22 - lo.chi12 * lo.chi21
        assert det_up == pytest.approx(1.0, abs=1e-11)
        assert det_lo == pytest.approx(-1.0, abs=1e-11)


def test_row_continuation_across_axis(band_setup):
    # approaching the axis from below multiplies the first row by a phase
    _, wh, sup = band_setup
    for t in (-5.0, 0.7, 3.3):
        up = chi_eval(sup, wh, complex(t, 0.0), "upper_band")
        lo = chi_eval(sup, wh, complex(t, 0.0), "lower_band")
        ph = np.exp(-1j * t * sup.bar_x)
        assert lo.chi11 == pytest.approx(ph * up.chi11, rel=1e-10)
        assert lo.chi12 == pytest.approx(ph * up.chi12, rel=1e-10)


def test_region_validation(band_setup):
    _, wh, sup = band_setup
    with pytest.raises(ValueError):
        chi_eval(sup, wh, 1j, "lower_band")
    with pytest.raises(ValueError):
        chi_eval(sup, wh, -1j, "upper_band")
    with pytest.raises(ValueError):
        chi_eval(sup, wh, 1j, "nowhere")


def test_values_at_unit_imaginary_point(band_setup):
    _, wh, sup = band_setup
    chi = chi_eval(sup, wh, 1j, "upper_band")
    # first entry is purely imaginary, second purely real, and their
    # difference combination is exponentially small in the support width
    assert abs(chi.chi11.real) < 1e-12
    assert abs(chi.chi12.imag) < 1e-12
    small = chi.chi12 - 1j * chi.chi11
    expected = 1j * math.exp(-sup.bar_x) / complex(wh.R_down_i)
    assert small == pytest.approx(expected, rel=1e-10)


# ---------------------------------------------------------------------------
# boundary-value row at the origin
# ---------------------------------------------------------------------------


def test_zero_limit_series(band_setup):
    _, wh, sup = band_setup
    m0 = chi_minus_at_zero(sup, wh)
    w = complex(wh.lim0_lambda_R_up) / 1j
    assert m0["chi12m0"] == 0.0
    assert m0["chi11m0"] == pytest.approx(2.0 / (1j * w), rel=1e-9)
    h = 1e-5
    r_p = chi_minus_row1(sup, wh, h)
    r_m = chi_minus_row1(sup, wh, -h)
    assert 0.5 * (r_p[0] + r_m[0]) == pytest.approx(m0["chi11m0"],
                                                    rel=1e-7)
    assert (r_p[0] - r_m[0]) / (2.0 * h) == pytest.approx(
        m0["chi11m0_prime"], rel=1e-7)
    assert (r_p[1] - r_m[1]) / (2.0 * h) == pytest.approx(
        m0["chi12m0_prime"], rel=1e-7)


# ---------------------------------------------------------------------------
# interpolation data
# ---------------------------------------------------------------------------


def test_interpolation_identity_on_shifted_line(band_setup):
    # the rational interpolant against the band values must reproduce
    # the defining residue identity on the evaluation line
    _, wh, sup = band_setup
    chi_i = chi_eval(sup, wh, 1j, "upper_band")
    ufun = u_functions(sup, {"chi11_i": chi_i.chi11, "chi12_i": chi_i.chi12})
    rng = np.random.default_rng(5)
    for _ in range(10):
        lam = complex(rng.uniform(-20.0, 20.0), 0.2)
        resid = ufun.identity_residual(sup, wh, lam)
        assert abs(resid) < 1e-10


def test_u_values_at_origin(band_setup):
    params, wh, sup = band_setup
    chi_i = chi_eval(sup, wh, 1j, "upper_band")
    ufun = u_functions(sup, {"chi11_i": chi_i.chi11, "chi12_i": chi_i.chi12})
    nu, v = params.n * sup.u_n, sup.v_n
    assert ufun.u12(0.0) == pytest.approx(-v * chi_i.chi11, rel=1e-12)
    h = 1e-6
    fd = (ufun.u12(h) - ufun.u12(-h)) / (2.0 * h)
    assert fd == pytest.approx(1j * nu * chi_i.chi11, rel=1e-8)
    expected_u11 = -1j * nu * chi_i.chi12 - chi_i.chi11 * (nu - v) / 2.0
    assert ufun.u11(0.0) == pytest.approx(expected_u11, rel=1e-12)


def test_pairing_decay(band_setup):
    # the left/right vector pairing collapses to a pure factor product
    _, wh, sup = band_setup
    for t in (-6.0, 2.0, 9.0):
        lam = complex(t, -1.8)
        mu = complex(-t, 1.8)
        lo = chi_eval(sup, wh, lam, "lower_band")
        up = chi_eval(sup, wh, mu, "upper_band")
        val = pairing(e_left(lo), e_right(up))
        assert np.isfinite(val.real) and np.isfinite(val.imag)
