"""Shared fixtures: tame parameter sets for fast tests and the session-scoped
solve cache used by the acceptance suite (the preset runs are expensive, so
every criterion reuses the same trajectories)."""

import numpy as np
import pytest

from rubberfront import (CoefficientFunction, DimensionlessParams,
                         InitialCondition, IntegratorConfig,
                         nondimensionalize, preset, solve, uniform_mesh)


def tame_params(A0: float = 2.0, T: float = 0.5) -> DimensionlessParams:
    """Small, smooth, explicitly stable configuration for unit tests."""
    return DimensionlessParams(
        Bi=2.0, A0=A0, h0=0.2, T=T, H=2.5, m0=0.1,
        b_dimless=CoefficientFunction.constant(1.0),
        sigma_dimless=CoefficientFunction.linear(0.1))


def tame_u0(value: float = 0.3) -> InitialCondition:
    return InitialCondition.constant(value)


@pytest.fixture(scope="session")
def dense_dim():
    p, u0 = preset("dense")
    return nondimensionalize(p), u0


@pytest.fixture(scope="session")
def foam_dim():
    p, u0 = preset("foam")
    return nondimensionalize(p), u0


@pytest.fixture(scope="session")
def dense_runs(dense_dim):
    """Adaptive dense-preset runs keyed by element count, shared record grid."""
    params, u0 = dense_dim
    config = IntegratorConfig(rel_tol=1e-8, abs_tol=1e-10, n_records=400)
    return {N: solve(params, u0, uniform_mesh(N + 1), config)
            for N in (20, 40, 80, 160, 320, 640)}


@pytest.fixture(scope="session")
def foam_runs(foam_dim):
    """Adaptive foam-preset runs for the invariant suite (looser tolerance)."""
    params, u0 = foam_dim
    config = IntegratorConfig(rel_tol=1e-6, abs_tol=1e-9, n_records=200)
    return {N: solve(params, u0, uniform_mesh(N + 1), config)
            for N in (20, 40, 80, 160, 320)}
