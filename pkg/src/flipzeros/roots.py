"""All-roots solver, root clustering and zero counts on Lipschitz curves.

Curves are given in polar form r -> r * exp(i * theta(r)) with theta
Lipschitz in log r.  Real-axis counts go through exact Sturm chains; counts
on other curves use the Aberth-Ehrlich roots.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .newton import initial_root_radii
from .poly import DomainError, Polynomial
from .sturm import count_real_integer, integer_coeffs

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
EPS = np.finfo(float).eps
CLUSTER_RTOL = 1e-7


class ConvergenceError(RuntimeError):
    """Root iteration did not settle; carries the best iterate."""

    def __init__(self, message: str, roots: np.ndarray, residuals: np.ndarray):
        super().__init__(message)
        self.roots = roots
        self.residuals = residuals


# curves


@dataclass(frozen=True)
class LipschitzCurve:
    theta: Callable[[np.ndarray], np.ndarray]
    L: float
    description: str = "curve"

    def __post_init__(self):
        if not self.L >= 0:
            raise DomainError("Lipschitz constant must be non-negative")

    def angle(self, r) -> np.ndarray:
        return np.asarray(self.theta(np.asarray(r, dtype=float)), dtype=float)

    def check_lipschitz(self, samples: int = 2000, seed: int = 0) -> bool:
        """Sampled check of |theta(r1) - theta(r2)| <= L |log(r1/r2)| on [1e-3, 1e3]."""
        rng = np.random.default_rng(seed)
        lr = rng.uniform(math.log(1e-3), math.log(1e3), size=(2, samples))
        t1, t2 = self.angle(np.exp(lr[0])), self.angle(np.exp(lr[1]))
        return bool(np.all(np.abs(t1 - t2) <= self.L * np.abs(lr[0] - lr[1]) + 1e-9))


def positive_axis() -> LipschitzCurve:
    return LipschitzCurve(lambda r: np.zeros_like(r), 0.0, "positive real axis")


def negative_axis() -> LipschitzCurve:
    return LipschitzCurve(lambda r: np.full_like(r, math.pi), 0.0, "negative real axis")


def real_line() -> tuple[LipschitzCurve, LipschitzCurve]:
    return positive_axis(), negative_axis()


def spiral(L: float) -> LipschitzCurve:
    """Logarithmic spiral theta(r) = L log r, the steepest L-Lipschitz curve."""
    return LipschitzCurve(lambda r: L * np.log(r), float(L), f"spiral L={L:g}")


def table_curve(radii: Sequence[float], angles: Sequence[float]) -> LipschitzCurve:
    """Piecewise-linear theta in log r through the given nodes, constant beyond them."""
    lr = np.log(np.asarray(radii, dtype=float))
    th = np.asarray(angles, dtype=float)
    if lr.size < 1 or lr.size != th.size:
        raise DomainError("table curve needs matching non-empty radii and angles")
    if np.any(np.diff(lr) <= 0):
        raise DomainError("table radii must be strictly increasing")
    L = float(np.max(np.abs(np.diff(th) / np.diff(lr)))) if lr.size > 1 else 0.0
    return LipschitzCurve(lambda r: np.interp(np.log(r), lr, th), L, "table")


def curve_distance(curve: LipschitzCurve, z: np.ndarray) -> np.ndarray:
    """Angular distance from each point to the curve at the same modulus, in [0, pi]."""
    z = np.asarray(z, dtype=complex)
    d = np.angle(z) - curve.angle(np.abs(z))
    d = np.mod(d + math.pi, 2 * math.pi) - math.pi
    return np.abs(d)


# root sets


@dataclass(frozen=True)
class Cluster:
    center: complex
    multiplicity: int
    residual: float


@dataclass(frozen=True)
class RootSet:
    roots: np.ndarray
    residuals: np.ndarray
    poly: Polynomial = field(repr=False)
    cluster_rtol: float = CLUSTER_RTOL

    def __len__(self):
        return self.roots.size

    @property
    def clusters(self) -> list[Cluster]:
        z = self.roots
        n = z.size
        parent = list(range(n))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        if n > 1:
            diff = np.abs(z[:, None] - z[None, :])
            scale = self.cluster_rtol * (1 + np.maximum(np.abs(z)[:, None], np.abs(z)[None, :]))
            for i, j in zip(*np.nonzero(np.triu(diff <= scale, 1))):
                parent[find(i)] = find(j)
        groups: dict[int, list[int]] = {}
        for i in range(n):
            groups.setdefault(find(i), []).append(i)
        out = []
        for members in groups.values():
            out.append(
                Cluster(
                    complex(np.mean(z[members])),
                    len(members),
                    float(np.max(self.residuals[members])),
                )
            )
        return out

    def vieta_errors(self) -> tuple[float, float]:
        """Relative errors of the root sum and product against the coefficients."""
        c = self.poly.coeffs
        n = self.poly.degree
        if n == 0:
            return 0.0, 0.0
        s_true = -c[-2] / c[-1]
        s_err = abs(np.sum(self.roots) - s_true) / (1 + abs(s_true))
        p_true = (-1) ** n * c[0] / c[-1]
        logs = np.log(np.abs(self.roots[self.roots != 0]))
        if np.any(self.roots == 0) or p_true == 0:
            p_err = float(abs(np.prod(self.roots) - p_true))
        else:
            # compare through logs so huge/small products do not overflow
            mag = math.exp(np.sum(logs) - math.log(abs(p_true)))
            phase = np.exp(1j * (np.sum(np.angle(self.roots)) - np.angle(p_true)))
            p_err = abs(mag * phase - 1) * abs(p_true) / (1 + abs(p_true))
        return float(s_err), float(p_err)

    def to_json(self) -> str:
        rows = [
            {"re": c.center.real, "im": c.center.imag, "multiplicity": c.multiplicity, "residual": c.residual}
            for c in self.clusters
        ]
        return json.dumps(rows)


# Aberth-Ehrlich iteration


def _horner2(c: np.ndarray, z: np.ndarray):
    p = np.zeros_like(z)
    dp = np.zeros_like(z)
    for a in c[::-1]:
        dp = dp * z + p
        p = p * z + a
    return p, dp


def _abs_horner(m: np.ndarray, r: np.ndarray) -> np.ndarray:
    acc = np.zeros_like(r)
    for a in m[::-1]:
        acc = acc * r + a
    return acc


def _newton_terms(c: np.ndarray, z: np.ndarray):
    """Newton ratio p/p' and scaled residual |p| / S(|z|) at each z.

    Points outside the unit disk use the reversed polynomial in 1/z to keep
    powers bounded.
    """
    n = c.size - 1
    mod = np.abs(c)
    ratio = np.empty_like(z)
    resid = np.empty(z.shape)
    inside = np.abs(z) <= 1
    if np.any(inside):
        zi = z[inside]
        p, dp = _horner2(c, zi)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio[inside] = p / dp
        resid[inside] = np.abs(p) / _abs_horner(mod, np.abs(zi))
    out = ~inside
    if np.any(out):
        zo = z[out]
        y = 1 / zo
        q, dq = _horner2(c[::-1], y)
        # p(z) = z^n q(1/z)  =>  p/p' = z / (n - y q'(y)/q(y))
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio[out] = zo * q / (n * q - y * dq)
        resid[out] = np.abs(q) / _abs_horner(mod[::-1], np.abs(y))
    return ratio, resid


def _initial_points(c: np.ndarray) -> np.ndarray:
    radii = initial_root_radii(Polynomial(c))
    n = radii.size
    pts = np.empty(n, dtype=complex)
    start = 0
    edge = 0
    while start < n:
        stop = start
        while stop < n and radii[stop] == radii[start]:
            stop += 1
        span = stop - start
        j = np.arange(span)
        jitter = 0.1 * np.mod((j + 1) * GOLDEN, 1.0)
        angles = 2 * math.pi * (j + jitter) / span + 0.7 + edge * GOLDEN
        pts[start:stop] = radii[start] * np.exp(1j * angles)
        start = stop
        edge += 1
    return pts


def _aberth(c: np.ndarray, max_iters: int):
    n = c.size - 1
    z = _initial_points(c)
    active = np.ones(n, dtype=bool)
    floor = 4 * n * EPS
    ratio, resid = _newton_terms(c, z)
    for _ in range(max_iters):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        za = z[idx]
        diff = za[:, None] - z[None, :]
        diff[np.arange(idx.size), idx] = 1.0
        inv = 1 / diff
        inv[np.arange(idx.size), idx] = 0.0
        s = inv.sum(axis=1)
        N = ratio[idx]
        w = N / (1 - N * s)
        bad = ~np.isfinite(w)
        w[bad] = 0.0
        z[idx] = za - w
        ratio[idx], resid[idx] = _newton_terms(c, z[idx])
        done = (np.abs(w) < 1e-13 * (1 + np.abs(z[idx]))) | (resid[idx] <= floor)
        done &= ~bad
        active[idx[done]] = False
    else:
        if np.any(active):
            raise ConvergenceError(
                f"{int(active.sum())} of {n} roots did not converge", z.copy(), resid.copy()
            )
    # guarded Newton polish
    for _ in range(2):
        ratio, resid = _newton_terms(c, z)
        cand = z - np.where(np.isfinite(ratio), ratio, 0)
        _, cres = _newton_terms(c, cand)
        take = cres < resid
        z = np.where(take, cand, z)
    _, resid = _newton_terms(c, z)
    return z, resid


def all_roots(P: Polynomial, max_iters: int = 500) -> RootSet:
    """All n roots of P with scaled residuals |P(z)| / S(|z|, P)."""
    if P.degree < 1:
        raise DomainError("need degree at least 1")
    c = P.coeffs
    k0 = int(np.flatnonzero(c)[0])
    reduced = c[k0:]
    zeros = np.zeros(k0, dtype=complex)
    m = reduced.size - 1
    if m == 0:
        z, resid = np.empty(0, dtype=complex), np.empty(0)
    elif m == 1:
        z = np.array([-reduced[0] / reduced[1]])
        _, resid = _newton_terms(reduced, z)
    else:
        z, resid = _aberth(reduced, max_iters)
    roots = np.concatenate([zeros, z])
    residuals = np.concatenate([np.zeros(k0), resid])
    return RootSet(roots, residuals, P)


# counting


class CurveCount(NamedTuple):
    count: int
    ambiguous: int


def count_on_curve(
    P: Polynomial,
    curve: LipschitzCurve | Sequence[LipschitzCurve],
    tol: float = 1e-8,
    roots: RootSet | None = None,
) -> CurveCount:
    """Zeros of P on a curve (or union of curves), with multiplicity.

    A cluster counts when its angular distance to the curve is at most
    tol * (1 + L); clusters farther than that but within ten times the
    threshold are reported as ambiguous instead.
    """
    if not tol > 0:
        raise DomainError("tol must be positive")
    curves = [curve] if isinstance(curve, LipschitzCurve) else list(curve)
    rs = roots if roots is not None else all_roots(P)
    count = ambiguous = 0
    for cl in rs.clusters:
        if cl.center == 0:
            continue
        z = np.array([cl.center])
        best = min(float(curve_distance(cu, z)[0]) / (1 + cu.L) for cu in curves)
        if best <= tol:
            count += cl.multiplicity
        elif best < 10 * tol:
            ambiguous += cl.multiplicity
    return CurveCount(count, ambiguous)


def count_real(P: Polynomial) -> int:
    """Real zeros of a real-coefficient P counted with multiplicity."""
    return count_real_integer(integer_coeffs(P))


def near_real_count(rs: RootSet, rtol: float = 1e-7) -> tuple[int, bool]:
    """Roots with |Im z| < rtol (1 + |z|), and whether any root sits in the grey zone.

    The flag marks roots off the axis by less than 1e-6 that a real count could
    reasonably disagree about.
    """
    z = rs.roots
    im = np.abs(z.imag)
    near = im < rtol * (1 + np.abs(z))
    grey = (~near) & (im < 1e-6 * (1 + np.abs(z)))
    return int(near.sum()), bool(grey.any())
