"""Empirical check of a predicted local law against exact probabilities."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .distribution import ExactDistribution, exact_distribution, sample_counts
from .laws import LawKind, LimitLaw, law_density, law_local_value, predict_law
from .model import ValidatedModel
from .structure import classify

DEFAULT_BAND = (-0.75, -0.25)


class VerifyError(ValueError):
    pass


@dataclass(frozen=True)
class Window:
    """Admissible k-sets.

    ``half_width``: Gaussian-type laws use ``|k - a_n| <= half_width * s_n``.
    ``delta_frac``: the uniform law drops ``delta_frac * (b2 - b1)`` around each endpoint.
    """

    half_width: float = 3.0
    delta_frac: float = 0.1


def _window(law: LimitLaw, n: int, win: Window) -> tuple[np.ndarray, str]:
    k = np.arange(n + 1)
    if law.kind in (LawKind.GAUSSIAN, LawKind.TMIX):
        x = (k - law.centering(n)) / law.scaling(n)
        sel = k[np.abs(x) <= win.half_width]
        desc = f"|k - a_n| <= {win.half_width:g} s_n"
    elif law.kind is LawKind.UNIFORM:
        b1, b2 = law.params
        delta = win.delta_frac * (b2 - b1)
        x = k / n
        inside = (x >= b1 + delta) & (x <= b2 - delta)
        outside = (x <= b1 - delta) | (x >= b2 + delta)
        sel = k[inside | outside]
        desc = (f"k/n in [{b1 + delta:.6g}, {b2 - delta:.6g}] "
                f"and k/n in [0, {b1 - delta:.6g}] u [{b2 + delta:.6g}, 1]")
    else:
        _, be1, g1, be2, g2 = law.params
        w1 = np.abs(k - be1 * n) <= win.half_width * math.sqrt(g1 * n)
        w2 = np.abs(k - be2 * n) <= win.half_width * math.sqrt(g2 * n)
        sel = k[w1 | w2]
        desc = f"|k - beta_j n| <= {win.half_width:g} sqrt(gamma_j n), j = 1, 2"
    return sel, desc


def _minimum_n(law: LimitLaw, win: Window, start: int, limit: int = 1_000_000) -> int | None:
    for n in range(start, limit):
        if len(_window(law, n, win)[0]):
            return n
    return None


def _scaled_gap(law: LimitLaw, n: int, ks: np.ndarray, p: np.ndarray) -> np.ndarray:
    if law.kind is LawKind.GAUSSMIX:
        s = math.sqrt(n)
        return np.abs(s * p[ks] - s * law_local_value(law, ks.astype(float), n))
    s = law.scaling(n)
    x = (ks - law.centering(n)) / s
    return np.abs(s * p[ks] - law_density(law, x))


def discrepancy_detail(model: ValidatedModel, law: LimitLaw, n: int, window: Window = Window(),
                       dist: ExactDistribution | None = None) -> tuple[float, str]:
    """``(D_n, window description)`` with ``D_n = max_k |s_n p_n(k) - f((k - a_n)/s_n)|``."""
    if law.model_size is not None and law.model_size != model.size:
        raise VerifyError(f"law was predicted for a model of size {law.model_size}, got size {model.size}")
    if n < 1:
        raise VerifyError("n must be positive")
    ks, desc = _window(law, n, window)
    if not len(ks):
        least = _minimum_n(law, window, n + 1)
        raise VerifyError(f"admissible window is empty at n={n}; smallest usable n is {least}")
    if dist is None:
        dist = exact_distribution(model, n)
    elif dist.n != n:
        raise VerifyError(f"distribution is for n={dist.n}, not {n}")
    gap = _scaled_gap(law, n, ks, dist.probabilities)
    return float(gap.max()), desc


def discrepancy(model: ValidatedModel, law: LimitLaw, n: int, window: Window = Window()) -> float:
    return discrepancy_detail(model, law, n, window)[0]


@dataclass(frozen=True)
class Entry:
    n: int
    D: float
    window: str


@dataclass(frozen=True)
class ConvergenceReport:
    law: LimitLaw
    entries: tuple[Entry, ...]
    fitted_slope: float
    slope_stderr: float
    passed: bool
    band: tuple[float, float] = field(default=DEFAULT_BAND)

    def to_dict(self) -> dict:
        return {
            "law": self.law.to_dict(),
            "entries": [{"n": e.n, "D": e.D, "window": e.window} for e in self.entries],
            "slope": self.fitted_slope,
            "stderr": self.slope_stderr,
            "band": list(self.band),
            "pass": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=True)

    @classmethod
    def from_dict(cls, obj: dict) -> "ConvergenceReport":
        return cls(
            law=LimitLaw.from_dict(obj["law"]),
            entries=tuple(Entry(int(e["n"]), float(e["D"]), e["window"]) for e in obj["entries"]),
            fitted_slope=float(obj["slope"]),
            slope_stderr=float(obj["stderr"]),
            passed=bool(obj["pass"]),
            band=tuple(obj.get("band", DEFAULT_BAND)),
        )

    @classmethod
    def from_json(cls, text: str) -> "ConvergenceReport":
        return cls.from_dict(json.loads(text))


def fit_slope(ns, ds) -> tuple[float, float]:
    """Least-squares slope of ``log D`` against ``log n`` and its standard error."""
    ns = np.asarray(ns, dtype=float)
    ds = np.asarray(ds, dtype=float)
    if np.any(ds <= 0) or not np.all(np.isfinite(ds)):
        return math.nan, math.nan
    res = stats.linregress(np.log(ns), np.log(ds))
    return float(res.slope), float(res.stderr)


def convergence_report(model: ValidatedModel, n_grid, slope_band=DEFAULT_BAND,
                       law: LimitLaw | None = None, window: Window = Window()) -> ConvergenceReport:
    grid = sorted(int(n) for n in n_grid)
    if len(grid) < 3:
        raise VerifyError("need ≥ 3 points in the n grid")
    if len(set(grid)) != len(grid) or grid[0] < 1:
        raise VerifyError("n grid must hold distinct positive integers")
    lo, hi = slope_band
    if not lo < hi:
        raise VerifyError("slope band must satisfy lo < hi")
    if law is None:
        law = predict_law(classify(model))
    entries = tuple(Entry(n, *discrepancy_detail(model, law, n, window)) for n in grid)
    slope, stderr = fit_slope(grid, [e.D for e in entries])
    ok = all(math.isfinite(e.D) for e in entries) and math.isfinite(slope) and lo <= slope <= hi
    return ConvergenceReport(law, entries, slope, stderr, ok, (float(lo), float(hi)))


def noise_bound(count: int) -> float:
    """Four binomial standard deviations at p = 1/2."""
    return 4.0 * math.sqrt(1.0 / (4.0 * count))


def montecarlo_crosscheck(model: ValidatedModel, n: int, count: int, seed: int) -> float:
    """``max_k |empirical - exact|`` for ``count`` sampled words of length ``n``."""
    hist = sample_counts(model, n, count, seed)
    exact = exact_distribution(model, n).probabilities
    return float(np.abs(hist / count - exact).max())
