"""Sign-flip coefficient models with the separation property.

A model fixes, for every index k, two candidate values (plus, minus) and a
common centre a.  A random polynomial takes plus or minus at each index by an
independent fair sign.  The separation property asks that every pair be far
apart compared with its distance to the centre:

    |plus_k - minus_k| >= kappa * (|plus_k - a| + |minus_k - a|).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Iterator, Mapping, Sequence

import numpy as np

from .errors import ConfigError, DomainError
from .poly import Polynomial

MAX_ENUMERATION_DEGREE = 24


def check_theta(pairs, a: complex, kappa: float = 0.5) -> tuple[bool, float]:
    """Whether every pair satisfies the separation inequality, and the worst slack."""
    if not 0 < kappa <= 1:
        raise DomainError("kappa must lie in (0, 1]")
    pairs = np.asarray(pairs, dtype=complex).reshape(-1, 2)
    if pairs.shape[0] == 0:
        return True, math.inf
    plus, minus = pairs[:, 0], pairs[:, 1]
    margin = np.abs(plus - minus) - kappa * (np.abs(plus - a) + np.abs(minus - a))
    worst = float(margin.min())
    return worst >= 0, worst


@dataclass(frozen=True, eq=False)
class FlipModel:
    plus: np.ndarray
    minus: np.ndarray
    a: complex = 0.0
    kappa: float = 0.5
    nondegenerate: bool = False

    def __post_init__(self):
        plus = np.array(self.plus, dtype=complex).ravel()
        minus = np.array(self.minus, dtype=complex).ravel()
        if plus.size == 0 or plus.size != minus.size:
            raise DomainError("plus and minus values must be non-empty and of equal length")
        ok, worst = check_theta(np.stack([plus, minus], axis=1), self.a, self.kappa)
        if not ok:
            raise DomainError(f"separation property fails, worst margin {worst:.3g}")
        if self.nondegenerate:
            ends = [plus[0], minus[0], plus[-1], minus[-1]]
            if any(v == 0 for v in ends):
                raise DomainError("non-degenerate model needs nonzero end coefficients")
        plus.setflags(write=False)
        minus.setflags(write=False)
        object.__setattr__(self, "plus", plus)
        object.__setattr__(self, "minus", minus)
        object.__setattr__(self, "a", complex(self.a))

    @property
    def n(self) -> int:
        return self.plus.size - 1

    @property
    def pairs(self) -> np.ndarray:
        return np.stack([self.plus, self.minus], axis=1)

    def coefficients(self, signs) -> np.ndarray:
        """Coefficient rows for one sign sequence or a stack of them."""
        s = as_signs(signs, self.n)
        return np.where(s > 0, self.plus, self.minus)


def as_signs(signs, n: int | None = None) -> np.ndarray:
    """Normalise a sign sequence given as +-1 values or '+'/'-' characters."""
    if isinstance(signs, str):
        signs = [1 if ch == "+" else -1 if ch == "-" else 0 for ch in signs]
    s = np.asarray(signs)
    if s.dtype.kind in "US":
        s = np.where(s == "+", 1, np.where(s == "-", -1, 0))
    s = s.astype(np.int8)
    if np.any((s != 1) & (s != -1)):
        raise DomainError("signs must be +1 or -1")
    if n is not None and s.shape[-1] != n + 1:
        raise DomainError(f"sign sequence has length {s.shape[-1]}, expected {n + 1}")
    return s


def sample_flip(model: FlipModel, signs) -> Polynomial:
    return Polynomial(model.coefficients(signs), nondegenerate=model.nondegenerate)


def random_signs(rng: np.random.Generator, n: int, size: int | None = None) -> np.ndarray:
    shape = (n + 1,) if size is None else (size, n + 1)
    return np.where(rng.integers(0, 2, size=shape) == 0, 1, -1).astype(np.int8)


def all_signs(n: int) -> np.ndarray:
    """Every sequence in {+1,-1}^(n+1), lexicographic with + before -."""
    if n > MAX_ENUMERATION_DEGREE:
        raise DomainError(
            f"refusing to enumerate 2^{n + 1} sign sequences; degree limit is {MAX_ENUMERATION_DEGREE}"
        )
    codes = np.arange(2 ** (n + 1), dtype=np.int64)
    bits = (codes[:, None] >> np.arange(n, -1, -1)) & 1
    return (1 - 2 * bits).astype(np.int8)


def enumerate_flips(model: FlipModel) -> Iterator[tuple[tuple[int, ...], Polynomial]]:
    signs = all_signs(model.n)
    for row in signs:
        yield tuple(int(x) for x in row), sample_flip(model, row)


def greedy_pairing(atoms: Sequence[complex]) -> tuple[list[tuple[complex, complex]], complex]:
    """Pair atoms by repeatedly removing the two farthest apart.

    Ties go to the lexicographically smallest index pair.  The centre is the
    midpoint of the last pair removed; every pair then satisfies the
    separation inequality with kappa = 1/2.
    """
    z = np.asarray(atoms, dtype=complex).ravel()
    if z.size < 2 or z.size % 2:
        raise DomainError("greedy_pairing needs an even number (>= 2) of atoms")
    dist = np.abs(z[:, None] - z[None, :])
    dist[np.tril_indices(z.size)] = -1.0
    pairs = []
    for _ in range(z.size // 2):
        i, j = divmod(int(np.argmax(dist)), z.size)
        pairs.append((complex(z[i]), complex(z[j])))
        dist[[i, j], :] = -1.0
        dist[:, [i, j]] = -1.0
    a = (pairs[-1][0] + pairs[-1][1]) / 2
    ok, worst = check_theta(pairs, a, 0.5)
    if not ok:
        raise AssertionError(f"greedy pairing violated the separation property by {worst:.3g}")
    return pairs, a


def make_median_model(pairs, a: float, kappa: float = 0.5, nondegenerate: bool = False) -> FlipModel:
    """Real pairs placed symmetrically about a common median a."""
    arr = np.asarray(pairs)
    if np.iscomplexobj(arr) and np.any(arr.imag != 0):
        raise ConfigError("median model needs real values")
    arr = np.asarray(arr.real if np.iscomplexobj(arr) else arr, dtype=float).reshape(-1, 2)
    a = float(a)
    scale = 1 + np.abs(arr).max(axis=1) + abs(a)
    if np.any(np.abs(arr[:, 0] + arr[:, 1] - 2 * a) > 1e-12 * scale):
        raise ConfigError("each pair must be symmetric about the median a")
    return FlipModel(arr[:, 0], arr[:, 1], a, kappa, nondegenerate)


# samplers


MAGNITUDE_LAWS = ("rademacher", "normal", "uniform", "complex-normal")


@dataclass(frozen=True)
class ModelSampler:
    """Draws a flip model per trial, then a polynomial from it.

    kind is one of 'symmetric', 'iid_atoms', 'median'.
    """

    kind: str
    n: int
    kappa: float = 0.5
    nondegenerate: bool = False
    magnitudes: Any = "rademacher"
    atoms: tuple = ()
    pairs: tuple = ()
    a: float = 0.0

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError("n must be at least 1")
        if not 0 < self.kappa <= 1:
            raise ConfigError("kappa must lie in (0, 1]")
        if self.kind == "symmetric":
            m = self.magnitudes
            if isinstance(m, str):
                if m not in MAGNITUDE_LAWS:
                    raise ConfigError(f"unknown magnitude law {m!r}")
            elif len(m) != self.n + 1:
                raise ConfigError("explicit magnitudes need n+1 values")
            elif m[-1] == 0 or (self.nondegenerate and m[0] == 0):
                raise ConfigError("end magnitudes must be nonzero")
        elif self.kind == "iid_atoms":
            if len(self.atoms) < 2 or len(self.atoms) % 2:
                raise ConfigError("iid_atoms needs an even number (>= 2) of atoms")
            if any(x == 0 for x in self.atoms):
                # a zero atom could land on the top coefficient and drop the degree
                raise ConfigError("atoms must be nonzero")
            pairs, a = greedy_pairing(self.atoms)
            object.__setattr__(self, "_atom_pairs", np.array(pairs, dtype=complex))
            object.__setattr__(self, "_atom_center", a)
        elif self.kind == "median":
            model = make_median_model(self.pairs, self.a, self.kappa, self.nondegenerate)
            if model.n != self.n:
                raise ConfigError("median model pairs must have n+1 entries")
            if np.any(model.pairs[-1] == 0):
                raise ConfigError("top pair values must be nonzero")
            object.__setattr__(self, "_median", model)
        else:
            raise ConfigError(f"unknown model kind {self.kind!r}")

    @property
    def iid_continuous(self) -> bool:
        """Coefficients are i.i.d. with a continuous law (exchangeable, no ties)."""
        return self.kind == "symmetric" and self.magnitudes in ("normal", "uniform", "complex-normal")

    def draw_model(self, rng: np.random.Generator) -> FlipModel:
        n1 = self.n + 1
        if self.kind == "symmetric":
            m = self.magnitudes
            if m == "rademacher":
                v = np.ones(n1)
            elif m == "normal":
                v = rng.standard_normal(n1)
            elif m == "uniform":
                v = 1.0 - rng.random(n1)
            elif m == "complex-normal":
                v = (rng.standard_normal(n1) + 1j * rng.standard_normal(n1)) / math.sqrt(2)
            else:
                v = np.asarray(m, dtype=complex)
            return FlipModel(v, -v, 0.0, self.kappa, self.nondegenerate)
        if self.kind == "iid_atoms":
            pairs = self._atom_pairs[rng.integers(0, len(self._atom_pairs), size=n1)]
            return FlipModel(pairs[:, 0], pairs[:, 1], self._atom_center, self.kappa, self.nondegenerate)
        return self._median

    def sample(self, rng: np.random.Generator) -> Polynomial:
        model = self.draw_model(rng)
        return sample_flip(model, random_signs(rng, self.n))


def make_symmetric_model(
    magnitudes: str | Sequence[float], n: int, kappa: float = 0.5, nondegenerate: bool = False
) -> ModelSampler:
    """Pairs (v, -v) about a = 0 with v drawn from the named law each trial."""
    if not isinstance(magnitudes, str):
        magnitudes = tuple(magnitudes)
    return ModelSampler("symmetric", n, kappa, nondegenerate, magnitudes=magnitudes)


def sampler_from_config(cfg: Mapping[str, Any], n: int | None = None) -> ModelSampler:
    """Build a sampler from keys {kind, magnitudes | atoms | pairs + a, n, kappa, nondegenerate}."""
    if not isinstance(cfg, Mapping):
        raise ConfigError("model config must be a mapping")
    known = {"kind", "magnitudes", "atoms", "pairs", "a", "n", "kappa", "nondegenerate"}
    extra = set(cfg) - known
    if extra:
        raise ConfigError(f"unknown model keys: {sorted(extra)}")
    kind = cfg.get("kind", "symmetric")
    deg = n if n is not None else cfg.get("n")
    if deg is None:
        raise ConfigError("model needs a degree n")
    try:
        deg = int(deg)
        kappa = float(cfg.get("kappa", 0.5))
        nondeg = bool(cfg.get("nondegenerate", False))
        if kind == "symmetric":
            return make_symmetric_model(cfg.get("magnitudes", "rademacher"), deg, kappa, nondeg)
        if kind == "iid_atoms":
            atoms = tuple(_parse_complex(x) for x in cfg["atoms"])
            return ModelSampler("iid_atoms", deg, kappa, nondeg, atoms=atoms)
        if kind == "median":
            pairs = tuple(tuple(float(v) for v in p) for p in cfg["pairs"])
            return ModelSampler("median", deg, kappa, nondeg, pairs=pairs, a=float(cfg.get("a", 0.0)))
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"bad model config: {exc}") from exc
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    raise ConfigError(f"unknown model kind {kind!r}")


def _parse_complex(x) -> complex:
    if isinstance(x, (list, tuple)):
        return complex(x[0], x[1])
    return complex(x)


__all__ = [
    "FlipModel",
    "ModelSampler",
    "all_signs",
    "as_signs",
    "check_theta",
    "enumerate_flips",
    "greedy_pairing",
    "make_median_model",
    "make_symmetric_model",
    "random_signs",
    "sample_flip",
    "sampler_from_config",
]
