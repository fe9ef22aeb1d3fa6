"""Newton-Hadamard polygon of a polynomial.

The polygon is the upper convex envelope of the points (k, log|lambda_k|).
Its vertices are exactly the indices that are, for some radius r, the
largest maximiser of |lambda_k| r^k; collinear interior points never are,
so they are excluded from the vertex set.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .poly import DomainError, Polynomial, TWO_PI

HULL_EPS = 1e-12


def _turn_is_strict(o, a, b, eps=HULL_EPS) -> bool:
    """True when o -> a -> b is a clockwise (strictly concave) turn."""
    ax, ay = a[0] - o[0], a[1] - o[1]
    bx, by = b[0] - o[0], b[1] - o[1]
    cross = ax * by - ay * bx
    scale = abs(ax * by) + abs(ay * bx)
    return cross < -eps * scale


def upper_hull(points: Sequence[tuple[float, float]]) -> list[tuple[float, float]]:
    """Vertices of the upper convex envelope of points sorted by increasing x.

    Collinear interior points are dropped, so on an exact tie the outer pair
    survives.
    """
    if len(points) < 1:
        raise DomainError("upper_hull needs at least one point")
    hull: list[tuple[float, float]] = []
    prev_x = -math.inf
    for p in points:
        if not p[0] > prev_x:
            raise DomainError("points must have strictly increasing x")
        prev_x = p[0]
        while len(hull) >= 2 and not _turn_is_strict(hull[-2], hull[-1], p):
            hull.pop()
        hull.append((p[0], p[1]))
    return hull


@dataclass(frozen=True)
class NewtonHadamardPolygon:
    vertex_indices: tuple[int, ...]
    breakpoint_radii: tuple[float, ...]

    @property
    def V(self) -> int:
        return len(self.vertex_indices)

    @property
    def breakpoint_times(self) -> tuple[float, ...]:
        """Breakpoints in the t-picture, r = exp(-2*pi*t); decreasing in t order."""
        return tuple(-math.log(r) / TWO_PI for r in self.breakpoint_radii)

    def dominant_index(self, r: float) -> int:
        """Largest maximiser of |lambda_k| r^k (a vertex index)."""
        j = int(np.searchsorted(self.breakpoint_radii, r, side="right"))
        return self.vertex_indices[j]

    def to_json(self) -> str:
        return json.dumps(
            {
                "vertex_indices": list(self.vertex_indices),
                "breakpoint_radii": list(self.breakpoint_radii),
                "V": self.V,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "NewtonHadamardPolygon":
        d = json.loads(text)
        poly = cls(tuple(d["vertex_indices"]), tuple(d["breakpoint_radii"]))
        if poly.V != d.get("V", poly.V):
            raise ValueError("V does not match vertex_indices")
        return poly


def polygon(P: Polynomial) -> NewtonHadamardPolygon:
    mod = np.abs(P.coeffs)
    idx = np.flatnonzero(mod > 0)
    if idx.size == 0:
        raise DomainError("all coefficients vanish")
    logs = np.log(mod[idx])
    hull = upper_hull(list(zip(idx.tolist(), logs.tolist())))
    verts = tuple(int(x) for x, _ in hull)
    radii = tuple(
        math.exp((y0 - y1) / (x1 - x0)) for (x0, y0), (x1, y1) in zip(hull, hull[1:])
    )
    return NewtonHadamardPolygon(verts, radii)


def vertex_count(P: Polynomial) -> int:
    return polygon(P).V


def harmonic_v_bound(n: int) -> float:
    """2 * (1 + 1/2 + ... + 1/n), the bound on E[V] for i.i.d. coefficients."""
    if n < 1:
        raise DomainError("n must be at least 1")
    return 2.0 * math.fsum(1.0 / j for j in range(1, n + 1))


def initial_root_radii(P: Polynomial) -> np.ndarray:
    """Root-modulus estimates: each edge radius repeated by its horizontal span."""
    if P.coeffs[0] == 0:
        raise DomainError("initial_root_radii needs lambda_0 != 0")
    poly = polygon(P)
    spans = np.diff(poly.vertex_indices)
    return np.repeat(np.array(poly.breakpoint_radii, dtype=float), spans)
