"""Reproducible experiment runners.

Every trial draws from its own stream derived from (master seed, trial), so
results do not depend on worker count or scheduling.  Per-trial rows are
emitted in trial order and summaries are recomputable from them.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping

import numpy as np

from . import certificates as cert
from .errors import ConfigError, NumericalError
from .newton import harmonic_v_bound, vertex_count
from .poly import Polynomial
from .rng import derive_seed, trial_generator
from .roots import (
    ConvergenceError,
    LipschitzCurve,
    all_roots,
    count_on_curve,
    count_real,
    real_line,
    spiral,
    table_curve,
)
from .theta import FlipModel, ModelSampler, sampler_from_config

CSV_COLUMNS = ("trial", "seed", "V", "N_real", "N_curve", "ratio", "excluded")
QUANTILES = (0.5, 0.9, 0.99)
MAX_EXCLUDED_FRACTION = 0.01
SUPREMUM_NOTE = (
    "counts are over the configured curve family only; "
    "the supremum over all L-Lipschitz curves is not computed"
)


class CertificateFailure(AssertionError):
    """A bound that must always hold was violated; carries the offending input."""

    def __init__(self, message: str, payload: Any = None):
        super().__init__(message)
        self.payload = payload


class FailureBudgetExceeded(NumericalError):
    """Too many trials were excluded; the partial results ride along."""

    def __init__(self, message: str, reports=None, summary=None):
        super().__init__(message)
        self.reports = reports
        self.summary = summary


@dataclass
class ExperimentConfig:
    model: dict
    n: int
    trials: int = 100
    seed: int = 0
    curve: dict = field(default_factory=lambda: {"kind": "real-axis"})
    A: float = 1.0
    C: float | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if int(self.trials) < 1:
            raise ConfigError("trials must be at least 1")
        if int(self.n) < 1:
            raise ConfigError("n must be at least 1")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned value")
        if not float(self.A) > 0:
            raise ConfigError("A must be positive")
        self.n = int(self.n)
        self.trials = int(self.trials)
        self.seed = int(self.seed)

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any], **overrides) -> "ExperimentConfig":
        data = dict(data)
        for k, v in overrides.items():
            if v is not None:
                data[k] = v
        model = dict(data.pop("model", {"kind": "symmetric", "magnitudes": "rademacher"}))
        n = data.pop("n", model.get("n"))
        if n is None:
            raise ConfigError("config needs a degree n")
        known = {"trials", "seed", "curve", "A", "C"}
        kwargs = {k: data.pop(k) for k in list(data) if k in known}
        try:
            return cls(model=model, n=n, params=data, **kwargs)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from exc

    @classmethod
    def load(cls, path: str | Path, **overrides) -> "ExperimentConfig":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        return cls.from_mapping(data, **overrides)

    def sampler(self) -> ModelSampler:
        return sampler_from_config(self.model, n=self.n)

    def as_dict(self) -> dict:
        return {
            "model": self.model,
            "n": self.n,
            "trials": self.trials,
            "seed": self.seed,
            "curve": self.curve,
            "A": self.A,
            "C": self.C,
            "params": self.params,
        }


def curve_from_spec(spec: Mapping[str, Any]) -> LipschitzCurve | tuple[LipschitzCurve, ...]:
    kind = spec.get("kind", "real-axis")
    if kind == "real-axis":
        return real_line()
    if kind == "spiral":
        return spiral(float(spec.get("L", 1.0)))
    if kind == "table":
        try:
            return table_curve(spec["radii"], spec["angles"])
        except KeyError as exc:
            raise ConfigError("table curve needs radii and angles") from exc
    raise ConfigError(f"unknown curve kind {kind!r}")


@dataclass(frozen=True)
class TrialReport:
    trial: int
    seed: int
    V: int
    N_real: int | None
    N_curve: int | None
    ratio: float | None
    excluded: bool

    def row(self) -> list:
        def fmt(x):
            return "" if x is None else repr(x) if isinstance(x, float) else str(x)

        return [
            str(self.trial),
            str(self.seed),
            str(self.V),
            fmt(self.N_real),
            fmt(self.N_curve),
            fmt(self.ratio),
            "1" if self.excluded else "0",
        ]


def ratio_statistic(N: int, V: int, n: int) -> float:
    return N / (V * math.log(n) ** 3)


def _theorem1_trial(args) -> TrialReport:
    sampler, curve_spec, master, trial = args
    n = sampler.n
    seed = derive_seed(master, trial)
    P = sampler.sample(trial_generator(master, trial))
    V = vertex_count(P)
    real_axis = curve_spec.get("kind", "real-axis") == "real-axis"
    try:
        if P.is_real:
            N_real = count_real(P)
        if real_axis and P.is_real:
            N_curve = N_real
        else:
            roots = all_roots(P)
            if not P.is_real:
                N_real = count_on_curve(P, real_line(), roots=roots).count
            N_curve = count_on_curve(P, curve_from_spec(curve_spec), roots=roots).count
    except ConvergenceError:
        return TrialReport(trial, seed, V, None, None, None, True)
    return TrialReport(trial, seed, V, N_real, N_curve, ratio_statistic(N_curve, V, n), False)


def _map_trials(fn, jobs: list, workers: int) -> list:
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, jobs, chunksize=max(1, len(jobs) // (8 * workers))))
    return [fn(j) for j in jobs]


def summarize_ratios(ratios: Iterable[float], excluded: int, C: float | None) -> dict:
    r = np.asarray(list(ratios), dtype=float)
    total = r.size + excluded
    out: dict[str, Any] = {"trials": total, "excluded": excluded, "used": int(r.size)}
    if r.size:
        out["mean"] = float(np.mean(r))
        out["median"] = float(np.median(r))
        out["quantiles"] = {str(q): float(np.quantile(r, q)) for q in QUANTILES}
        out["max"] = float(np.max(r))
    if C is not None and r.size:
        out["C"] = float(C)
        out["exceedance"] = float(np.mean(r > C))
    return out


def run_theorem1(config: ExperimentConfig, workers: int = 1) -> tuple[list[TrialReport], dict]:
    if config.n < 2:
        raise ConfigError("theorem1 needs n >= 2")
    sampler = config.sampler()
    curve_from_spec(config.curve)  # validate early
    jobs = [(sampler, dict(config.curve), config.seed, t) for t in range(config.trials)]
    reports = _map_trials(_theorem1_trial, jobs, workers)
    used = [r for r in reports if not r.excluded]
    excluded = len(reports) - len(used)
    summary = summarize_ratios((r.ratio for r in used), excluded, config.C)
    summary.update(
        {
            "experiment": "theorem1",
            "n": config.n,
            "curve": config.curve,
            "A": config.A,
            "target_exceedance": config.n ** -config.A,
            "max_N_real": max((r.N_real for r in used), default=None),
            "max_N_curve": max((r.N_curve for r in used), default=None),
            "note": SUPREMUM_NOTE,
        }
    )
    if excluded > 0 and excluded >= MAX_EXCLUDED_FRACTION * len(reports):
        raise FailureBudgetExceeded(
            f"{excluded} of {len(reports)} trials failed to converge", reports, summary
        )
    return reports, summary


def _vcount_trial(args) -> TrialReport:
    sampler, master, trial = args
    P = sampler.sample(trial_generator(master, trial))
    return TrialReport(trial, derive_seed(master, trial), vertex_count(P), None, None, None, False)


def run_corollary_v(config: ExperimentConfig, workers: int = 1) -> tuple[list[TrialReport], dict]:
    sampler = config.sampler()
    if not sampler.iid_continuous:
        raise ConfigError("the vertex-count bound needs i.i.d. coefficients with a continuous law")
    jobs = [(sampler, config.seed, t) for t in range(config.trials)]
    reports = _map_trials(_vcount_trial, jobs, workers)
    summary = summarize_v([r.V for r in reports], config.n)
    return reports, summary


def summarize_v(values: Iterable[int], n: int) -> dict:
    v = np.asarray(list(values), dtype=float)
    mean = float(np.mean(v))
    stderr = float(np.std(v, ddof=1) / math.sqrt(v.size)) if v.size > 1 else 0.0
    bound = harmonic_v_bound(n)
    return {
        "experiment": "corollary-v",
        "n": n,
        "trials": int(v.size),
        "mean_V": mean,
        "stderr": stderr,
        "bound": bound,
        "ok": mean <= bound + 3 * stderr,
    }


def model_from_config(config: ExperimentConfig) -> FlipModel:
    """The fixed flip model used by the enumeration experiment.

    Samplers that draw magnitudes per trial contribute their draw for trial 0.
    """
    return config.sampler().draw_model(trial_generator(config.seed, 0))


def run_theorem2(config: ExperimentConfig, workers: int = 1) -> dict:
    p = config.params
    try:
        r = float(p.get("r", 1.0))
        interval = tuple(float(x) for x in p.get("interval", (0.0, 1.0)))
        m = int(p.get("m", 2))
        c_grid = [float(c) for c in p.get("c_grid", np.geomspace(1e-3, 10.0, 97).tolist())]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad theorem2 parameters: {exc}") from exc
    report = cert.theorem2_experiment(
        model_from_config(config),
        r,
        interval,
        m,
        c_grid,
        grid_points=p.get("grid_points"),
        seed=config.seed,
        samples=p.get("samples"),
        workers=workers,
    )
    report["experiment"] = "theorem2"
    report["seed"] = config.seed
    return report


def run_turan_b(config: ExperimentConfig) -> dict:
    p = config.params
    m = int(p.get("m", 2))
    lengths = [float(x) for x in p.get("lengths", (1.0, 0.5, 0.1))]
    table = cert.estimate_turan_b(m, lengths, config.trials, seed=config.seed, steps=int(p.get("steps", 200)))
    checks = [cert.turan_self_check(row, int(p.get("check_samples", 1000)), seed=config.seed + 1) for row in table]
    for row, (ok, worst) in zip(table, checks):
        row["self_check_ok"] = bool(ok)
        row["self_check_worst"] = worst
    return {"experiment": "turan-b", "seed": config.seed, "b_emp_table": table}


def _random_poly(rng: np.random.Generator, max_degree: int, complex_coeffs: bool) -> Polynomial:
    n = int(rng.integers(1, max_degree + 1))
    c = rng.standard_normal(n + 1)
    if complex_coeffs:
        c = c + 1j * rng.standard_normal(n + 1)
    # spread magnitudes so the dominant index varies along the circle family
    c = c * np.exp(rng.normal(0.0, 2.0, n + 1))
    return Polynomial(c)


def _steep_poly(rng: np.random.Generator, max_degree: int) -> Polynomial:
    """Coefficients falling off geometrically around a random peak index.

    Such polynomials have circles where one term dominates, so the
    zero-free certificate actually fires and its soundness gets exercised.
    """
    n = int(rng.integers(1, max_degree + 1))
    k = np.arange(n + 1)
    peak = int(rng.integers(0, n + 1))
    logs = -rng.uniform(8.0, 14.0) * np.abs(k - peak) + rng.normal(0.0, 1.0, n + 1)
    # keep far terms representable so the degree never drops
    logs = np.maximum(logs, -700.0)
    phase = np.exp(2j * np.pi * rng.random(n + 1))
    return Polynomial(np.exp(logs) * phase)


def certify_sbar(master: int, trials: int, max_degree: int = 64) -> dict:
    fails = []
    for t in range(trials):
        rng = trial_generator(master, t)
        P = _random_poly(rng, max_degree, bool(t % 2))
        r = float(np.exp(rng.uniform(math.log(1e-3), math.log(1e3))))
        lhs, rhs, ok = cert.sbar_check(P, r)
        if not ok:
            fails.append({"trial": t, "coeffs": _coeff_pairs(P), "r": r, "lhs": lhs, "rhs": rhs})
    return {"trials": trials, "pass_rate": 1 - len(fails) / trials, "failures": fails}


def certify_jensen(master: int, trials: int, max_degree: int = 32) -> dict:
    fails = []
    skipped = 0
    for t in range(trials):
        rng = trial_generator(master, t)
        n = int(rng.integers(1, max_degree + 1))
        P = Polynomial(rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1))
        roots = all_roots(P)
        # disks centred near the zeros so the half disk usually holds some
        anchor = roots.roots[int(rng.integers(0, n))]
        center = anchor + complex(*rng.normal(0.0, 0.3, 2))
        radius = float(np.exp(rng.uniform(math.log(0.05), math.log(3.0))))
        try:
            res = cert.jensen_bound(P, center, radius, roots=roots)
        except NumericalError:
            skipped += 1
            continue
        if not res.ok:
            fails.append(
                {"trial": t, "coeffs": _coeff_pairs(P), "center": [center.real, center.imag],
                 "radius": radius, "bound": res.bound, "actual": res.actual}
            )
    checked = trials - skipped
    return {"trials": trials, "skipped": skipped, "pass_rate": 1 - len(fails) / max(checked, 1), "failures": fails}


def certify_zero_free(master: int, trials: int, max_degree: int = 32) -> dict:
    certified = 0
    violations = []
    for t in range(trials):
        rng = trial_generator(master, t)
        if t % 2:
            P = _steep_poly(rng, max_degree)
        else:
            P = _random_poly(rng, max_degree, True)
        radius = float(np.exp(rng.uniform(-3.0, 3.0)))
        tt = -math.log(radius) / (2 * math.pi)
        ok, _ = cert.zero_free_circle(P, tt)
        if not ok:
            continue
        certified += 1
        mods = np.abs(all_roots(P).roots)
        if np.any(np.abs(mods - radius) <= 1e-9 * radius):
            violations.append({"trial": t, "coeffs": _coeff_pairs(P), "t": tt})
    return {"trials": trials, "certified_fraction": certified / trials, "violations": violations}


def _coeff_pairs(P: Polynomial) -> list:
    return [[float(c.real), float(c.imag)] for c in P.coeffs]


def run_certify(config: ExperimentConfig) -> dict:
    trials = config.trials
    base = config.seed
    report = {
        "experiment": "certify",
        "seed": base,
        "sbar": certify_sbar(derive_seed(base, 1), trials),
        "jensen": certify_jensen(derive_seed(base, 2), trials),
        "zero_free": certify_zero_free(derive_seed(base, 3), trials),
    }
    report["ok"] = (
        not report["sbar"]["failures"]
        and not report["jensen"]["failures"]
        and not report["zero_free"]["violations"]
    )
    return report


# flat-file output


def reports_to_csv(reports: Iterable[TrialReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in reports:
        w.writerow(r.row())
    return buf.getvalue()


def reports_to_json(reports: Iterable[TrialReport]) -> str:
    rows = [dict(zip(CSV_COLUMNS, [r.trial, r.seed, r.V, r.N_real, r.N_curve, r.ratio, int(r.excluded)])) for r in reports]
    return dumps(rows)


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def read_csv(text: str) -> list[dict]:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
        raise ConfigError(f"CSV columns must be {','.join(CSV_COLUMNS)}")
    return list(reader)


def verify_csv(csv_text: str, summary: Mapping[str, Any], rtol: float = 1e-12) -> tuple[bool, list[str]]:
    """Recompute a summary from per-trial rows and list any disagreement."""
    rows = read_csv(csv_text)
    problems = []
    experiment = summary.get("experiment", "theorem1")
    if experiment == "corollary-v":
        fresh = summarize_v([int(r["V"]) for r in rows], int(summary["n"]))
        keys = ("trials", "mean_V", "stderr", "bound", "ok")
    else:
        n = int(summary["n"])
        used = [r for r in rows if r["excluded"] == "0"]
        for r in used:
            expect = ratio_statistic(int(r["N_curve"]), int(r["V"]), n)
            if not math.isclose(float(r["ratio"]), expect, rel_tol=rtol, abs_tol=0.0):
                problems.append(f"trial {r['trial']}: ratio {r['ratio']} != {expect!r}")
        fresh = summarize_ratios(
            (float(r["ratio"]) for r in used), len(rows) - len(used), summary.get("C")
        )
        keys = tuple(k for k in ("trials", "excluded", "used", "mean", "median", "quantiles", "max", "exceedance") if k in summary)
    for k in keys:
        if not _close(fresh.get(k), summary.get(k), rtol):
            problems.append(f"{k}: recomputed {fresh.get(k)!r} != reported {summary.get(k)!r}")
    return not problems, problems


def _close(a, b, rtol) -> bool:
    if isinstance(a, dict) and isinstance(b, dict):
        return a.keys() == b.keys() and all(_close(a[k], b[k], rtol) for k in a)
    if isinstance(a, float) or isinstance(b, float):
        return a is not None and b is not None and math.isclose(float(a), float(b), rel_tol=rtol, abs_tol=1e-300)
    return a == b
