"""Shared fixtures: the expensive pipeline artifacts are built once."""

import pytest

from sgeq.equilibrium import density, solve_endpoints
from sgeq.model import derive_scales
from sgeq.tba import solve_tba
from sgeq.wiener_hopf import make_factors


@pytest.fixture(scope="session")
def tba_r10():
    return solve_tba(10.0, 1.0)


@pytest.fixture(scope="session")
def stack_n1000(tba_r10):
    """Solved pipeline at n=1000, b=1, r=10, alpha=0."""
    params = derive_scales(r=10.0, b=1.0, alpha=0.0, n=1000)
    wh = make_factors(params)
    sup = solve_endpoints(params, tba_r10, wh)
    return params, wh, sup


@pytest.fixture(scope="session")
def dens_n1000(tba_r10, stack_n1000):
    params, wh, sup = stack_n1000
    return density(params, tba_r10, wh, sup)


@pytest.fixture(scope="session")
def stack_n1000_tilted(tba_r10):
    """Solved pipeline at n=1000, b=1, r=10, alpha=0.5."""
    params = derive_scales(r=10.0, b=1.0, alpha=0.5, n=1000)
    wh = make_factors(params)
    sup = solve_endpoints(params, tba_r10, wh)
    return params, wh, sup
