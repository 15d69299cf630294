"""Brute-force oracles: energy minimization and direct quadrature."""

import math

import numpy as np
import pytest

from sgeq import oracle as orc
from sgeq.model import derive_scales

# ---------------------------------------------------------------------------
# simplex projection
# ---------------------------------------------------------------------------


def test_simplex_projection_known_case():
    out = orc._project_simplex(np.array([0.8, 0.4]))
    np.testing.assert_allclose(out, [0.7, 0.3], rtol=1e-14)


def test_simplex_projection_properties():
    rng = np.random.default_rng(2)
    for _ in range(20):
        v = rng.standard_normal(50) * rng.uniform(0.1, 10.0)
        w = orc._project_simplex(v)
        assert np.all(w >= 0.0)
        assert np.sum(w) == pytest.approx(1.0, abs=1e-12)
        # projection is idempotent
        np.testing.assert_allclose(orc._project_simplex(w), w, atol=1e-12)


# ---------------------------------------------------------------------------
# energy minimization
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def small_minimizer(tba_r10):
    params = derive_scales(r=10.0, b=1.0, alpha=0.0, n=200)
    return params, orc.minimize_energy(params, tba_r10, grid_m=400)


def test_minimizer_converges(small_minimizer):
    _, meas = small_minimizer
    assert meas.converged
    assert meas.grad_residual < 1e-10
    assert meas.meta["convex_ok"]
    assert np.all(meas.weights >= 0.0)
    assert np.sum(meas.weights) == pytest.approx(1.0, abs=1e-10)


def test_minimizer_beats_uniform(small_minimizer, tba_r10):
    params, meas = small_minimizer
    uniform = orc.minimize_energy(params, tba_r10, grid_m=400, max_iter=0)
    assert meas.energy < uniform.energy


def test_minimizer_symmetric_at_zero_tilt(small_minimizer):
    _, meas = small_minimizer
    np.testing.assert_allclose(meas.weights, meas.weights[::-1], atol=1e-8)
    assert abs(meas.mean) < 1e-10


def test_minimizer_mean_shifts_with_tilt(tba_r10):
    params = derive_scales(r=10.0, b=1.0, alpha=0.5, n=200)
    meas = orc.minimize_energy(params, tba_r10, grid_m=400)
    assert meas.mean > 0.0


def test_oracle_endpoints(small_minimizer):
    params, meas = small_minimizer
    ends = orc.oracle_endpoints(meas)
    # threshold cut brackets the refined fit on both sides
    assert ends["a"] < ends["a_cut"] < 0.0 < ends["b_cut"] < ends["b"]
    # symmetric problem gives symmetric endpoints
    assert ends["a"] == pytest.approx(-ends["b"], abs=5e-3)
    # close to the leading closed-form endpoint
    c0 = 2.0976460434336994
    lead = math.log(0.5 * c0 * params.n) / params.tau
    assert ends["b"] == pytest.approx(lead, abs=0.05)


# ---------------------------------------------------------------------------
# direct quadrature of the few-particle integral
# ---------------------------------------------------------------------------


def test_z_even_in_tilt(tba_r10):
    for n_small, nn in ((2, 48), (3, 32)):
        zp = orc.z_small_n(10.0, 1.0, 0.3, n_small, n_nodes=nn, tba=tba_r10)
        zm = orc.z_small_n(10.0, 1.0, -0.3, n_small, n_nodes=nn, tba=tba_r10)
        assert math.isfinite(zp)
        assert zp == pytest.approx(zm, abs=1e-10)


def test_z_refinement_stable(tba_r10):
    za = orc.z_small_n(10.0, 1.0, 0.3, 2, n_nodes=48, tba=tba_r10)
    zb = orc.z_small_n(10.0, 1.0, 0.3, 2, n_nodes=72, tba=tba_r10)
    assert za == pytest.approx(zb, rel=1e-8)


def test_z_derivative_vanishes_at_zero_tilt(tba_r10):
    h = 1e-4
    zp = orc.z_small_n(10.0, 1.0, h, 2, n_nodes=48, tba=tba_r10)
    zm = orc.z_small_n(10.0, 1.0, -h, 2, n_nodes=48, tba=tba_r10)
    assert abs(zp - zm) / (2.0 * h) < 1e-8


def test_z_rejects_large_sizes():
    with pytest.raises(ValueError):
        orc.z_small_n(10.0, 1.0, 0.0, 7)
