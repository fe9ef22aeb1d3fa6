"""Polynomials P(z) = sum_k lambda_k z^k and the transforms used throughout.

Coefficients are stored lowest degree first.  The exponential picture uses
z = exp(-2*pi*w), w = t + i*s, so that a circle |z| = r corresponds to the
vertical line t = -log(r) / (2*pi).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True, eq=False)
class Polynomial:
    """Immutable complex polynomial with a non-vanishing top coefficient."""

    coeffs: np.ndarray
    nondegenerate: bool = False

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=np.complex128).ravel()
        if c.size == 0:
            raise DomainError("polynomial needs at least one coefficient")
        if not np.all(np.isfinite(c)):
            raise DomainError("coefficients must be finite")
        if c[-1] == 0:
            raise DomainError("top coefficient must be nonzero")
        if self.nondegenerate and c[0] == 0:
            raise DomainError("non-degenerate polynomial must not vanish at the origin")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.coeffs.imag == 0))

    def __call__(self, z):
        return evaluate(self, z)

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def __repr__(self):
        return f"Polynomial({self.coeffs.tolist()!r})"

    @classmethod
    def from_roots(cls, roots: Iterable[complex], lead: complex = 1.0) -> "Polynomial":
        c = np.array([lead], dtype=np.complex128)
        for r in roots:
            c = np.concatenate([[0], c]) - r * np.concatenate([c, [0]])
        return cls(c)


def evaluate(P: Polynomial, z):
    """Horner evaluation, highest degree first.  ``z`` may be an array."""
    z = np.asarray(z, dtype=np.complex128)
    acc = np.zeros_like(z)
    for c in P.coeffs[::-1]:
        acc = acc * z + c
    return acc if acc.ndim else complex(acc)


def evaluate_with_derivative(coeffs: np.ndarray, z: np.ndarray):
    p = np.zeros_like(z)
    dp = np.zeros_like(z)
    for c in coeffs[::-1]:
        dp = dp * z + p
        p = p * z + c
    return p, dp


def s_majorant(P: Polynomial, r: float) -> float:
    """S(r, P) = sum |lambda_k| r^k."""
    if not r > 0:
        raise DomainError(f"radius must be positive, got {r}")
    acc = 0.0
    for a in np.abs(P.coeffs[::-1]):
        acc = acc * r + a
    return float(acc)


def _log_moduli(P: Polynomial) -> tuple[np.ndarray, np.ndarray]:
    mod = np.abs(P.coeffs)
    idx = np.flatnonzero(mod > 0)
    if idx.size == 0:
        raise DomainError("all coefficients vanish")
    return idx, np.log(mod[idx])


def h_function(P: Polynomial, t: float) -> float:
    """h(t) = max_k (log|lambda_k| - 2*pi*k*t), zero coefficients skipped."""
    idx, logs = _log_moduli(P)
    return float(np.max(logs - TWO_PI * idx * t))


def H_function(P: Polynomial, t: float) -> float:
    return math.exp(h_function(P, t))


def central_index(P: Polynomial, t: float) -> int:
    """Largest index attaining the maximum in h(t)."""
    idx, logs = _log_moduli(P)
    vals = logs - TWO_PI * idx * t
    best = vals.max()
    return int(idx[np.flatnonzero(vals == best)[-1]])


def t_to_radius(t: float) -> float:
    return math.exp(-TWO_PI * t)


def radius_to_t(r: float) -> float:
    if not r > 0:
        raise DomainError("radius must be positive")
    return -math.log(r) / TWO_PI


def reverse(P: Polynomial) -> Polynomial:
    """P*(z) = z^n P(1/z).  Leading zeros of the reversed sequence are dropped."""
    c = P.coeffs[::-1]
    nz = np.flatnonzero(c)
    return Polynomial(c[: nz[-1] + 1])


def bar_transform(P: Polynomial) -> Polynomial:
    """(1 - z) P(z)."""
    c = P.coeffs
    out = np.empty(c.size + 1, dtype=np.complex128)
    out[0] = c[0]
    out[1:-1] = c[1:] - c[:-1]
    out[-1] = -c[-1]
    return Polynomial(out)


@dataclass(frozen=True)
class ExpPolynomialView:
    """Q(w) = P(exp(-2*pi*w)) = sum_k lambda_k exp(-2*pi*k*w)."""

    base: Polynomial

    def __call__(self, w):
        return exp_eval(self, w)


def exp_eval(Q: ExpPolynomialView, w):
    return evaluate(Q.base, np.exp(-TWO_PI * np.asarray(w, dtype=np.complex128)))


# serialization


def to_json(P: Polynomial) -> str:
    return json.dumps([[float(c.real), float(c.imag)] for c in P.coeffs])


def from_json(text: str, nondegenerate: bool = False) -> Polynomial:
    data = json.loads(text)
    if isinstance(data, dict):
        data = data["coeffs"]
    coeffs = [complex(*c) if isinstance(c, (list, tuple)) else complex(c) for c in data]
    return Polynomial(coeffs, nondegenerate=nondegenerate)


def to_text(P: Polynomial) -> str:
    return "".join(f"{float(c.real)!r} {float(c.imag)!r}\n" for c in P.coeffs)


def from_text(text: str, nondegenerate: bool = False) -> Polynomial:
    coeffs = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        re_ = float(parts[0])
        im = float(parts[1]) if len(parts) > 1 else 0.0
        coeffs.append(complex(re_, im))
    return Polynomial(coeffs, nondegenerate=nondegenerate)


def load(path: str | Path, nondegenerate: bool = False) -> Polynomial:
    text = Path(path).read_text()
    if text.lstrip().startswith(("[", "{")):
        return from_json(text, nondegenerate)
    return from_text(text, nondegenerate)


def as_polynomial(P: Polynomial | Sequence[complex]) -> Polynomial:
    return P if isinstance(P, Polynomial) else Polynomial(P)
