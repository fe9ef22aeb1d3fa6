"""Checkable forms of the analytic estimates behind the zero counts.

* sup-norm of exponential sums on an arc (grid plus parabolic refinement)
* the Turan ratio max_I |p| / sum |a_k| and an empirical estimate of its
  worst case
* the majorant inequality for (1 - z) P(z)
* the Jensen zero-count bound with constant 1 / log(5/4)
* the dominant-term certificate for zero-free circles
* the exhaustive (or sampled) small-arc-maximum experiment over sign flips
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import ConfigError, DomainError, NumericalError
from .poly import Polynomial, bar_transform, central_index, s_majorant, evaluate, TWO_PI
from .rng import derive_seed, trial_generator
from .roots import all_roots
from .theta import FlipModel, all_signs, random_signs

REFINE_STEPS = 20
VANISHING = 1e-300
LOG_5_4 = math.log(5.0 / 4.0)
HIST_EDGES = np.logspace(-16.0, 0.0, 65)


@dataclass(frozen=True, eq=False)
class ExpPolynomial:
    """p(t) = sum_k a_k exp(i l_k t) with distinct integer frequencies l_k."""

    terms: tuple

    def __post_init__(self):
        terms = tuple((complex(a), int(l)) for a, l in self.terms)
        if not terms:
            raise DomainError("exponential polynomial needs at least one term")
        freqs = [l for _, l in terms]
        if len(set(freqs)) != len(freqs):
            raise DomainError("frequencies must be distinct")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def from_arrays(cls, coeffs, freqs) -> "ExpPolynomial":
        return cls(tuple(zip(np.asarray(coeffs).tolist(), np.asarray(freqs).tolist())))

    @property
    def m(self) -> int:
        return len(self.terms)

    @property
    def coeffs(self) -> np.ndarray:
        return np.array([a for a, _ in self.terms], dtype=complex)

    @property
    def freqs(self) -> np.ndarray:
        return np.array([l for _, l in self.terms], dtype=float)

    @property
    def l1(self) -> float:
        return float(np.sum(np.abs(self.coeffs)))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.exp(1j * np.multiply.outer(t, self.freqs)) @ self.coeffs


def default_grid(m: int) -> int:
    return max(1024, 64 * (m + 1))


def _check_interval(interval) -> tuple[float, float]:
    lo, hi = float(interval[0]), float(interval[1])
    if not hi > lo:
        raise DomainError("interval must have positive length")
    if hi - lo > TWO_PI * (1 + 1e-12):
        raise DomainError("interval longer than 2*pi")
    return lo, hi


def _refine(grid_sq, theta, lo, hi, sqfun):
    """Largest |f|^2 per row after parabolic refinement of the grid maxima.

    grid_sq holds |f|^2 on the grid (rows x points); sqfun(rows, x) evaluates
    |f_row(x)|^2 pointwise.  The result never falls below the grid maximum.
    """
    B, G = grid_sq.shape
    best_row = grid_sq.max(axis=1)
    left = np.concatenate([np.full((B, 1), -np.inf), grid_sq[:, :-1]], axis=1)
    right = np.concatenate([grid_sq[:, 1:], np.full((B, 1), -np.inf)], axis=1)
    # strict on the left so a flat run yields one candidate
    cand = (grid_sq > left) & (grid_sq >= right) & (grid_sq >= 0.9 * best_row[:, None])
    rows, cols = np.nonzero(cand)
    if rows.size == 0:
        return best_row
    c = theta[cols].copy()
    f0 = grid_sq[rows, cols].copy()
    h = (hi - lo) / (G - 1)
    for _ in range(REFINE_STEPS):
        fm = sqfun(rows, c - h)
        fp = sqfun(rows, c + h)
        denom = fm - 2 * f0 + fp
        with np.errstate(divide="ignore", invalid="ignore"):
            vertex = np.where(denom < 0, h * (fm - fp) / (2 * denom), h * np.sign(fp - fm))
        x = np.clip(c + np.clip(vertex, -h, h), lo, hi)
        fx = sqfun(rows, x)
        # pick the best of centre, vertex and in-range neighbours
        options_x = np.stack([c, x, c - h, c + h])
        options_f = np.stack(
            [
                f0,
                fx,
                np.where(c - h >= lo, fm, -np.inf),
                np.where(c + h <= hi, fp, -np.inf),
            ]
        )
        k = np.argmax(options_f, axis=0)
        idx = np.arange(rows.size)
        c = options_x[k, idx]
        f0 = options_f[k, idx]
        h *= 0.5
    np.maximum.at(best_row, rows, f0)
    return best_row


def _exp_batch_max(coeffs: np.ndarray, freqs: np.ndarray, lo: float, hi: float, G: int) -> np.ndarray:
    theta = np.linspace(lo, hi, G)
    if freqs.ndim == 1:
        grid_sq = np.abs(coeffs @ np.exp(1j * np.outer(freqs, theta))) ** 2
        freqs = np.broadcast_to(freqs, coeffs.shape)
    else:
        # one frequency set per row
        basis = np.exp(1j * freqs[:, :, None] * theta)
        grid_sq = np.abs(np.einsum("bm,bmg->bg", coeffs, basis)) ** 2

    def sqfun(rows, x):
        return np.abs(np.sum(coeffs[rows] * np.exp(1j * x[:, None] * freqs[rows]), axis=1)) ** 2

    return np.sqrt(_refine(grid_sq, theta, lo, hi, sqfun))


def _callable_max(fun: Callable, lo: float, hi: float, G: int) -> float:
    theta = np.linspace(lo, hi, G)
    grid_sq = np.abs(np.asarray(fun(theta))) ** 2

    def sqfun(rows, x):
        return np.abs(np.asarray(fun(x))) ** 2

    return float(np.sqrt(_refine(grid_sq[None, :], theta, lo, hi, sqfun))[0])


def arc_max_batch(coeffs, freqs, interval, grid_points: int | None = None, check: bool = False) -> np.ndarray:
    """max over the arc of |sum_k coeffs[b, k] exp(i freqs[k] t)| for every row b.

    freqs may also be a matrix giving each row its own frequencies.
    """
    lo, hi = _check_interval(interval)
    coeffs = np.atleast_2d(np.asarray(coeffs, dtype=complex))
    freqs = np.asarray(freqs, dtype=float)
    if coeffs.shape[1] == 0:
        raise DomainError("empty term list")
    G = grid_points or default_grid(coeffs.shape[1])
    if G < 2:
        raise DomainError("grid_points must be at least 2")
    out = _exp_batch_max(coeffs, freqs, lo, hi, G)
    if check:
        finer = _exp_batch_max(coeffs, freqs, lo, hi, 2 * G)
        _compare_grids(out, finer)
    return out


def _compare_grids(coarse, fine):
    scale = np.maximum(np.abs(fine), np.finfo(float).tiny)
    worst = float(np.max(np.abs(fine - coarse) / scale))
    if worst >= 1e-9:
        raise NumericalError(f"arc maximum moved by {worst:.2e} when the grid was doubled")


def arc_max(
    p: ExpPolynomial | Polynomial | Callable,
    interval,
    grid_points: int | None = None,
    r: float | None = None,
    check: bool = False,
) -> float:
    """Maximum modulus on the arc {t in interval}.

    p may be an exponential polynomial, a polynomial evaluated on the circle
    of radius r (t is then the angle), or any vectorised callable of t.
    """
    if isinstance(p, ExpPolynomial):
        return float(arc_max_batch(p.coeffs, p.freqs, interval, grid_points, check)[0])
    if isinstance(p, Polynomial):
        if r is None:
            raise DomainError("a polynomial needs the circle radius r")
        coeffs = p.coeffs * float(r) ** np.arange(p.degree + 1)
        return float(arc_max_batch(coeffs, np.arange(p.degree + 1), interval, grid_points, check)[0])
    lo, hi = _check_interval(interval)
    G = grid_points or default_grid(1)
    out = _callable_max(p, lo, hi, G)
    if check:
        _compare_grids(np.array([out]), np.array([_callable_max(p, lo, hi, 2 * G)]))
    return out


# Turan-type lower bound


def turan_ratio(p: ExpPolynomial, interval, grid_points: int | None = None) -> float:
    return arc_max(p, interval, grid_points) / p.l1


def _random_freqs(rng: np.random.Generator, m: int, trial: int) -> np.ndarray:
    if trial % 2 == 0:
        return np.arange(m, dtype=float)
    return np.sort(rng.choice(3 * m, size=m, replace=False)).astype(float)


def _random_coeffs(rng: np.random.Generator, m: int) -> np.ndarray:
    a = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    return a / np.sum(np.abs(a))


def _ratio(coeffs, freqs, interval, G) -> float:
    return float(arc_max_batch(coeffs, freqs, interval, G)[0] / np.sum(np.abs(coeffs)))


def _ratios(coeffs, freqs, interval, G) -> np.ndarray:
    return arc_max_batch(coeffs, freqs, interval, G) / np.sum(np.abs(coeffs), axis=1)


def estimate_turan_b(
    m: int,
    interval_lengths: Sequence[float],
    trials: int,
    seed: int = 0,
    steps: int = 200,
    grid_points: int | None = None,
) -> list[dict]:
    """Empirical worst case of the Turan ratio for m-term sums on arcs.

    Every trial starts from a random sum and runs a coordinate-wise local
    search; the smallest ratio over trials gives
    b_emp = min_ratio^(1/(m-1)) / |I|, an upper estimate of the best
    constant.  Trial t uses the same stream regardless of the trial count,
    so adding trials can only lower the minimum.
    """
    if m < 2:
        raise ConfigError("m must be at least 2")
    if trials < 10:
        raise ConfigError("need at least 10 trials")
    G = grid_points or default_grid(m)
    table = []
    for li, length in enumerate(interval_lengths):
        length = float(length)
        interval = (-length / 2, length / 2)
        stream = derive_seed(seed, li)
        rngs = [trial_generator(stream, t) for t in range(trials)]
        freqs = np.array([_random_freqs(g, m, t) for t, g in enumerate(rngs)])
        a = np.array([_random_coeffs(g, m) for g in rngs])
        val = _ratios(a, freqs, interval, G)
        step = np.full(trials, 0.5)
        for s in range(steps):
            j = s % m
            kick = np.array([g.standard_normal() + 1j * g.standard_normal() for g in rngs])
            prop = a.copy()
            prop[:, j] += step * kick
            prop /= np.sum(np.abs(prop), axis=1, keepdims=True)
            v = _ratios(prop, freqs, interval, G)
            better = v < val
            a[better] = prop[better]
            val[better] = v[better]
            step = np.where(better, np.minimum(step * 1.5, 1.0), np.maximum(step * 0.8, 1e-9))
        k = int(np.argmin(val))
        best = (float(val[k]), a[k], freqs[k])
        min_ratio, a, freqs = best
        table.append(
            {
                "m": m,
                "length": length,
                "trials": trials,
                "min_ratio": min_ratio,
                "b_emp": min_ratio ** (1.0 / (m - 1)) / length,
                "witness": {
                    "coeffs": [[float(z.real), float(z.imag)] for z in a],
                    "freqs": [int(f) for f in freqs],
                },
            }
        )
    return table


def turan_self_check(row: dict, samples: int, seed: int = 1) -> tuple[bool, float]:
    """Fresh random sums must not beat the reported constant.

    Returns (ok, worst) with worst = min ratio / (b_emp |I|)^(m-1).
    """
    m, length = row["m"], row["length"]
    interval = (-length / 2, length / 2)
    floor = (row["b_emp"] * length) ** (m - 1)
    G = default_grid(m)
    worst = math.inf
    for t in range(samples):
        rng = trial_generator(seed, t)
        freqs = _random_freqs(rng, m, t)
        worst = min(worst, _ratio(_random_coeffs(rng, m), freqs, interval, G) / floor)
    return worst >= 1 - 1e-9, worst


# majorant inequality for (1 - z) P


def sbar_check(P: Polynomial, r: float) -> tuple[float, float, bool]:
    lhs = s_majorant(bar_transform(P), r)
    rhs = (1 + r) / (2 * (P.degree + 1)) * s_majorant(P, r)
    return lhs, rhs, lhs >= rhs * (1 - 1e-12)


# Jensen bound


class JensenResult(NamedTuple):
    bound: float
    actual: int
    ok: bool


def jensen_bound(
    P: Polynomial,
    center: complex,
    radius: float,
    grid_points: int | None = None,
    roots=None,
) -> JensenResult:
    """Zero count in the closed disk of half radius against log(M_R / M_{R/2}) / log(5/4)."""
    if not radius > 0:
        raise DomainError("radius must be positive")
    center = complex(center)
    G = grid_points or default_grid(P.degree)

    def on_circle(rad):
        return lambda th: evaluate(P, center + rad * np.exp(1j * np.asarray(th)))

    full = (0.0, TWO_PI)
    outer = _callable_max(on_circle(radius), *full, G)
    inner = _callable_max(on_circle(radius / 2), *full, G)
    if inner < VANISHING:
        raise NumericalError("polynomial numerically vanishing on the inner circle")
    bound = max(math.log(outer / inner), 0.0) / LOG_5_4
    if P.degree == 0:
        actual = 0
    else:
        z = (roots if roots is not None else all_roots(P)).roots
        actual = int(np.sum(np.abs(z - center) <= radius / 2))
    return JensenResult(bound, actual, actual <= math.ceil(bound))


# zero-free circles


def zero_free_circle(P: Polynomial, t: float) -> tuple[bool, float]:
    """Dominant-term certificate that P has no zero on |z| = exp(-2 pi t).

    Certified when log|l_v| - 2 pi v t >= log|l_k| - 2 pi k t + 2 pi |k - v|
    for every other nonzero coefficient, v the central index.  The tail is
    then below 2 sum_j exp(-2 pi j) < 1 times the dominant term.
    """
    nu = central_index(P, t)
    mod = np.abs(P.coeffs)
    idx = np.flatnonzero(mod > 0)
    idx = idx[idx != nu]
    if idx.size == 0:
        return True, math.inf
    top = math.log(mod[nu]) - TWO_PI * nu * t
    slack = top - (np.log(mod[idx]) - TWO_PI * idx * t + TWO_PI * np.abs(idx - nu))
    margin = float(slack.min())
    return margin >= 0, margin


# small arc maxima over sign flips


def _block_ratios(args):
    coeffs, freqs, interval, G, check = args
    peaks = arc_max_batch(coeffs, freqs, interval, G, check)
    return peaks / np.sum(np.abs(coeffs), axis=1)


def theorem2_experiment(
    model: FlipModel,
    r: float,
    interval,
    m: int,
    c_grid: Sequence[float],
    grid_points: int | None = None,
    seed: int = 0,
    samples: int | None = None,
    block: int = 1024,
    workers: int = 1,
    check: bool = True,
) -> dict:
    """Distribution of max_I |P(r e^{i t})| / S(r, P) over sign flips.

    Enumerates all 2^(n+1) sequences when n <= 24, otherwise samples at least
    2^(m+10) of them.  For each c the failure fraction counts sequences with
    ratio <= n^-2 (c |I|)^(6m); c_star is the largest c whose fraction is
    within 2^-m.
    """
    if not r > 0:
        raise DomainError("r must be positive")
    if m < 1:
        raise ConfigError("m must be at least 1")
    lo, hi = _check_interval(interval)
    n = model.n
    G = grid_points or default_grid(max(m, n))
    if n <= 24:
        signs = all_signs(n)
        mode = "exhaustive"
    else:
        count = max(samples or 0, 2 ** (m + 10))
        signs = random_signs(trial_generator(seed, 0), n, size=count)
        mode = "sampled"
    total = signs.shape[0]
    freqs = np.arange(n + 1, dtype=float)
    weights = float(r) ** np.arange(n + 1)
    jobs = [
        (model.coefficients(signs[i : i + block]) * weights, freqs, (lo, hi), G, check)
        for i in range(0, total, block)
    ]
    try:
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                parts = list(pool.map(_block_ratios, jobs))
        else:
            parts = [_block_ratios(j) for j in jobs]
    except NumericalError as exc:
        raise NumericalError(f"arc maximum refinement failed: {exc}") from exc
    ratios = np.concatenate(parts)

    length = hi - lo
    degree_factor = float(n) ** -2 if n >= 1 else 1.0
    f_table = []
    c_star = None
    for c in sorted(float(x) for x in c_grid):
        threshold = degree_factor * (c * length) ** (6 * m)
        failures = int(np.sum(ratios <= threshold))
        f_table.append({"c": c, "threshold": threshold, "failures": failures, "f": failures / total})
        if failures * 2**m <= total:
            c_star = c
    f_star = next((row["f"] for row in f_table if row["c"] == c_star), None)
    counts, _ = np.histogram(np.clip(ratios, HIST_EDGES[0], HIST_EDGES[-1]), bins=HIST_EDGES)
    return {
        "params": {
            "n": n,
            "r": float(r),
            "interval": [lo, hi],
            "m": m,
            "grid_points": G,
            "mode": mode,
            "sequences": total,
        },
        "target": 2.0**-m,
        "f_table": f_table,
        "c_star": c_star,
        "f_at_c_star": f_star,
        # one failing sequence already weighs at least the target
        "resolution_limit": total * 2.0**-m <= 1.0,
        "min_ratio": float(ratios.min()),
        "max_ratio": float(ratios.max()),
        "histogram": {"edges": HIST_EDGES.tolist(), "counts": counts.tolist()},
    }
