from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from ..exceptions import MeshError
from ..geometry import ProblemGeometry
from ..utils import FloatArray, debug_print

__all__ = [
    'Mesh',
    'make_mesh'
]


MARKERS = ('start', 'zero', 'a', 'b', 'eta', 'end')


@dataclass(frozen=True, eq=False)
class Mesh:
    """Strictly increasing nodes covering [-r, 1], with the kinks of k, γ and ψ as nodes."""

    nodes: FloatArray
    markers: Mapping[str, int]

    def __post_init__(self) -> None:
        if set(self.markers) != set(MARKERS):
            raise MeshError(f'mesh markers must be exactly {MARKERS}', self.__class__)

        if self.nodes.ndim != 1 or self.nodes.size < 3:
            raise MeshError('a mesh needs at least three nodes', self.__class__)

        if np.any(np.diff(self.nodes) <= 0):
            raise MeshError('mesh nodes must be strictly increasing', self.__class__)

        self.nodes.setflags(write=False)

    def __len__(self) -> int:
        return self.nodes.size

    @property
    def r(self) -> float:
        return -float(self.nodes[0])

    @property
    def zero(self) -> int:
        return self.markers['zero']

    @property
    def history(self) -> FloatArray:
        return self.nodes[:self.zero + 1]

    @property
    def unit(self) -> FloatArray:
        """Nodes on [0, 1]."""
        return self.nodes[self.zero:]

    def index_of(self, marker: str) -> int:
        return self.markers[marker]

    def same_as(self, other: Mesh) -> bool:
        return self is other or (len(self) == len(other) and bool(np.array_equal(self.nodes, other.nodes)))


def _even_panels(length: float, n: int) -> int:
    return max(2, 2 * round(length * n / 2))


def make_mesh(r: float, geom: ProblemGeometry, n: int = 256, n_hist: int = 64) -> Mesh:
    """
    Build the solver mesh.

    :param r:           History length, the mesh starts at -r.
    :param geom:        Geometry whose a, b, η become nodes.
    :param n:           Target panel count on [0, 1], even and at least 8.
    :param n_hist:      Panels on [-r, 0].
    """

    if n < 8 or n % 2:
        raise MeshError(f'n must be an even number >= 8, got {n}', make_mesh)

    if n_hist < 1:
        raise MeshError(f'n_hist must be positive, got {n_hist}', make_mesh)

    if not r > 0:
        raise MeshError(f'r must be positive, got {r}', make_mesh)

    history = np.linspace(-r, 0.0, n_hist + 1)

    breaks = sorted({0.0, geom.a, geom.b, geom.eta, 1.0})

    # each segment between markers is uniform with an even panel count
    segments = [
        np.linspace(lo, hi, _even_panels(hi - lo, n) + 1)[1:]
        for lo, hi in zip(breaks[:-1], breaks[1:])
    ]

    nodes = np.concatenate([history, *segments])

    def _locate(x: float) -> int:
        return int(np.argmin(np.abs(nodes - x)))

    markers = {
        'start': 0, 'zero': n_hist, 'a': _locate(geom.a), 'b': _locate(geom.b),
        'eta': _locate(geom.eta), 'end': nodes.size - 1
    }

    debug_print(f'make_mesh: {nodes.size} nodes, {nodes.size - n_hist - 1} panels on [0, 1]')

    return Mesh(nodes, markers)
