"""Shared fixtures: the desk-scale ring and the expensive propagation runs,
computed once per session."""

import numpy as np
import pytest

from kitaevcd import build_lattice, fidelity
from kitaevcd.dynamics import Schedule, propagate
from kitaevcd.spectra import cluster_state, ground_state

J = 1.0
LAMBDA_0 = 0.5
LAMBDA_F = 0.05


@pytest.fixture(scope="session")
def lat4():
    return build_lattice(4)


@pytest.fixture(scope="session")
def gs05(lat4):
    """(E0, psi0, gap, unique) at the quench start lambda = 0.5 J."""
    return ground_state(lat4, J, LAMBDA_0)


@pytest.fixture(scope="session")
def cluster4(lat4):
    return cluster_state(lat4, [+1, +1, +1, +1])


@pytest.fixture(scope="session")
def run_none_fast(lat4, gs05, cluster4):
    """Fast quench without driving (T = 0.1/J, default step)."""
    return propagate(lat4, J, Schedule(LAMBDA_0, LAMBDA_F, 0.1), "none", gs05[1], cluster4)


@pytest.fixture(scope="session")
def run_oracle_fast(lat4, gs05, cluster4):
    """Fast quench with the spectral-oracle counterdiabatic term."""
    return propagate(lat4, J, Schedule(LAMBDA_0, LAMBDA_F, 0.1), "oracle-cd", gs05[1], cluster4)


@pytest.fixture(scope="session")
def run_analytic_fast(lat4, gs05, cluster4):
    """Fast quench with the assembled string counterdiabatic term."""
    return propagate(
        lat4, J, Schedule(LAMBDA_0, LAMBDA_F, 0.1), "analytic-cd", gs05[1], cluster4
    )


@pytest.fixture(scope="session")
def run_adiabatic(lat4, gs05, cluster4):
    """Slow reference quench (T = 50/J) without driving."""
    return propagate(lat4, J, Schedule(LAMBDA_0, LAMBDA_F, 50.0), "none", gs05[1], cluster4)
