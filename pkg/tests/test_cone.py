from __future__ import annotations

import numpy as np
import pytest

from thermobvp import (
    ConeSpec, GeometryError, GridFunction, MeshError, boundary_gap, cone_defect, is_member, make_mesh, min_on,
    sup_norm, translate_norm, vertex
)

from .conftest import q_linear


@pytest.fixture
def cone(geom) -> ConeSpec:
    return ConeSpec.from_geometry(geom)


@pytest.fixture
def psi(exp_spec, mesh) -> GridFunction:
    return vertex(exp_spec, mesh)


class TestMembership:
    """K₀ and its defect."""

    def test_constants(self, cone):
        assert cone.c == pytest.approx(1 / 16, rel=1e-14)
        assert (cone.a, cone.b, cone.r) == (0.125, 0.25, 1.0)

    def test_invalid(self):
        with pytest.raises(GeometryError):
            ConeSpec(0.0, 0.1, 0.2, 1.0)

        with pytest.raises(GeometryError):
            ConeSpec(0.5, 0.3, 0.2, 1.0)

    def test_gamma(self, cone, gamma_function):
        assert cone_defect(gamma_function, cone) == (0.0, 0.0)
        assert is_member(gamma_function, cone, tol=0.0)

    def test_zero(self, cone, mesh):
        assert is_member(GridFunction.zeros(mesh), cone, tol=0.0)

    def test_nonzero_history(self, cone, mesh):
        one = GridFunction.sample(mesh, lambda t: np.ones_like(t))

        defect = cone_defect(one, cone)

        assert defect.history == 1.0
        assert defect.ratio == 0.0
        assert not is_member(one, cone)

    def test_negative(self, cone, mesh):
        minus_t = GridFunction.sample(mesh, lambda t: -np.maximum(t, 0.0))

        assert cone_defect(minus_t, cone).ratio > 0
        assert not is_member(minus_t, cone)

    def test_scaling(self, cone, mesh):
        minus_t = GridFunction.sample(mesh, lambda t: -np.maximum(t, 0.0))

        single = cone_defect(minus_t, cone)
        triple = cone_defect(minus_t * 3.0, cone)

        assert triple.ratio == pytest.approx(3 * single.ratio, rel=1e-14)

    def test_sum_of_members(self, cone, mesh, gamma_function):
        q = GridFunction.sample(mesh, lambda t: np.where(t > 0, q_linear(t), 0.0))

        assert is_member(q, cone)
        assert is_member(q + gamma_function, cone)
        assert is_member(q * 2.5, cone)

    def test_negative_tolerance(self, cone, gamma_function):
        with pytest.raises(GeometryError):
            is_member(gamma_function, cone, tol=-1.0)


class TestTranslate:
    """ψ + K₀ and the sphere of radius ρ around ψ."""

    def test_vertex_changes_sign(self, psi):
        # the translate admits ψ although ψ is negative near t = 1
        assert min_on(psi, 0.0, 1.0) == pytest.approx(-1.0, abs=1e-14)

    @pytest.mark.parametrize('rho', [0.5, 1.0, 3.0])
    def test_boundary_gap(self, psi, gamma_function, rho):
        unit = gamma_function * (1 / sup_norm(gamma_function, 0.0, 1.0))

        assert boundary_gap(psi, psi, rho) == -rho
        assert boundary_gap(psi + unit * rho, psi, rho) == pytest.approx(0.0, abs=1e-12)
        assert boundary_gap(psi + unit * (2 * rho), psi, rho) == pytest.approx(rho, abs=1e-12)

    def test_translate_norm(self, psi, gamma_function):
        u = psi + gamma_function * 0.75

        assert translate_norm(u, psi) == pytest.approx(sup_norm(u, -1.0, 1.0), rel=1e-14)
        assert translate_norm(psi, psi) == pytest.approx(1.0, abs=1e-14)

    def test_mesh_mismatch(self, psi, geom):
        other = GridFunction.zeros(make_mesh(1.0, geom, 64, 16))

        with pytest.raises(MeshError):
            boundary_gap(other, psi, 1.0)

        with pytest.raises(MeshError):
            translate_norm(other, psi)
