from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .exceptions import GeometryError, MeshError
from .geometry import ProblemGeometry, cone_constants
from .grid import GridFunction, min_on, sup_norm

__all__ = [
    'ConeSpec',
    'ConeDefect',

    'cone_defect', 'is_member', 'boundary_gap', 'translate_norm'
]


@dataclass(frozen=True)
class ConeSpec:
    """
    K₀: functions vanishing on [-r, 0] whose minimum on [a, b] is at least c times their norm on [0, 1].

    Translates ψ + K₀ are not represented by a type; they are ψ plus a member.
    """

    c: float
    a: float
    b: float
    r: float

    def __post_init__(self) -> None:
        if not 0 < self.c <= 1:
            raise GeometryError(f'cone constant must lie in (0, 1], got {self.c}', self.__class__)

        if not 0 < self.a < self.b < 1:
            raise GeometryError(f'need 0 < a < b < 1, got a={self.a}, b={self.b}', self.__class__)

        if not self.r > 0:
            raise GeometryError(f'r must be positive, got {self.r}', self.__class__)

    @classmethod
    def from_geometry(cls, geom: ProblemGeometry) -> ConeSpec:
        return cls(cone_constants(geom).c, geom.a, geom.b, geom.r)


class ConeDefect(NamedTuple):
    history: float
    ratio: float

    def within(self, tol: float) -> bool:
        return self.history <= tol and self.ratio <= tol


def cone_defect(v: GridFunction, spec: ConeSpec) -> ConeDefect:
    """How far ``v`` is from K₀; both parts are zero for members."""

    return ConeDefect(
        sup_norm(v, -spec.r, 0.0),
        max(0.0, spec.c * sup_norm(v, 0.0, 1.0) - min_on(v, spec.a, spec.b))
    )


def is_member(v: GridFunction, spec: ConeSpec, tol: float = 1e-9) -> bool:
    if tol < 0:
        raise GeometryError(f'tolerance must be nonnegative, got {tol}', is_member)

    return cone_defect(v, spec).within(tol)


def boundary_gap(u: GridFunction, psi: GridFunction, rho: float) -> float:
    """‖u − ψ‖ on [0, 1] minus ρ; zero on the sphere ∂K_{ψ,ρ}."""

    if not u.mesh.same_as(psi.mesh):
        raise MeshError('u and psi live on different meshes', boundary_gap)

    return sup_norm(u - psi, 0.0, 1.0) - rho


def translate_norm(u: GridFunction, psi: GridFunction) -> float:
    """‖u‖ on [-r, 1] for u in ψ + K₀, as max(‖ψ‖ on [-r, 0], ‖u‖ on [0, 1])."""

    if not u.mesh.same_as(psi.mesh):
        raise MeshError('u and psi live on different meshes', translate_norm)

    return max(sup_norm(psi, -psi.r, 0.0), sup_norm(u, 0.0, 1.0))
