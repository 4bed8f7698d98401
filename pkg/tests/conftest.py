from __future__ import annotations

import numpy as np
import pytest

from thermobvp import (
    STANDARD_GEOMETRY, BFunctional, GridFunction, Mesh, ProblemGeometry, ProblemSpec, builtin_problem, make_mesh
)


def sqrt_history(t):
    return np.sqrt(1 + t)


def q_linear(t):
    """Solution of u'' + 1 = 0, u(0) = 0, u'(1)/4 + u(1/4) = 0."""
    return 9 * t / 16 - t ** 2 / 2


@pytest.fixture
def geom() -> ProblemGeometry:
    return STANDARD_GEOMETRY


@pytest.fixture
def mesh(geom: ProblemGeometry) -> Mesh:
    return make_mesh(geom.r, geom, 256, 64)


@pytest.fixture
def coarse_mesh(geom: ProblemGeometry) -> Mesh:
    return make_mesh(geom.r, geom, 16, 4)


@pytest.fixture
def exp_spec() -> ProblemSpec:
    return builtin_problem('paper_example')


@pytest.fixture
def linear_spec() -> ProblemSpec:
    return builtin_problem('linear_oracle')


@pytest.fixture
def gamma_only_spec(geom: ProblemGeometry) -> ProblemSpec:
    return ProblemSpec(
        geom, lambda t, u, v: 0.0, lambda t: t, lambda t: 0.0 * t, BFunctional.constant(1.0), name='gamma_only'
    )


@pytest.fixture
def gamma_function(geom: ProblemGeometry, mesh: Mesh) -> GridFunction:
    return GridFunction.sample(mesh, lambda t: np.where(t > 0, t / geom.p, 0.0))
