"""Exact law of the counted-letter statistic ``Y_n`` and a Monte Carlo sampler.

All quantities are ratios of ``xi'(A x + B)^n eta``-type expressions, so the
DP state is divided by its total mass every step; the normaliser cancels.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .model import ValidatedModel


class DistributionError(ArithmeticError):
    pass


@dataclass(frozen=True)
class ExactDistribution:
    n: int
    probabilities: np.ndarray
    mean: float
    variance: float

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["k", "p"])
        for k, p in enumerate(self.probabilities):
            writer.writerow([k, repr(float(p))])
        return buf.getvalue()


def _check_n(model: ValidatedModel, n: int) -> int:
    if isinstance(n, bool) or int(n) != n:
        raise ValueError(f"n must be an integer, got {n!r}")
    n = int(n)
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    if n == 0 and not model.xi @ model.eta > 0:
        raise DistributionError("n = 0 is undefined for this model (xi'eta = 0)")
    return n


def exact_distribution(model: ValidatedModel, n: int) -> ExactDistribution:
    """``p_n(k) = [x^k] xi'(Ax+B)^n eta / xi'(A+B)^n eta`` for ``k = 0..n``.

    O(n^2 m^2) time, O(n m) memory.
    """
    n = _check_n(model, n)
    raw = _kernels.coefficients(model.a_matrix, model.b_matrix, model.xi, model.eta, n)
    total = raw.sum()
    if not (np.all(np.isfinite(raw)) and total > 0):
        raise DistributionError("total mass vanished or overflowed during the recurrence")
    p = raw / total
    k = np.arange(n + 1)
    mean = float(k @ p)
    var = float(((k - mean) ** 2) @ p)
    p.flags.writeable = False
    return ExactDistribution(n, p, mean, var)


def moments(model: ValidatedModel, n: int) -> tuple[float, float]:
    """Exact ``(E Y_n, Var Y_n)`` from derivatives of ``h_n`` at 0, in O(n m^2)."""
    n = _check_n(model, n)
    h0, h1, h2 = _kernels.moments(model.a_matrix, model.b_matrix, model.xi, model.eta, n)
    if not (np.isfinite([h0, h1, h2]).all() and h0 > 0):
        raise DistributionError("total mass vanished or overflowed during the recurrence")
    mean = h1 / h0
    return float(mean), float(h2 / h0 - mean * mean)


def characteristic_function(model: ValidatedModel, n: int, t):
    """``Psi_n(t) = xi'(A e^{it} + B)^n eta / xi'(A+B)^n eta``; ``t`` scalar or array."""
    n = _check_n(model, n)
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    ts = np.atleast_1d(t)
    a, b, mm = model.a_matrix, model.b_matrix, model.m_matrix
    # one column per t; the real column carries the normaliser
    z = np.exp(1j * ts)
    w = np.repeat(model.eta[:, None].astype(complex), len(ts), axis=1)
    w0 = model.eta.astype(float)
    for _ in range(n):
        w = (a @ w) * z[None, :] + b @ w
        w0 = mm @ w0
        s = w0.sum()
        w /= s
        w0 = w0 / s
    psi = (model.xi @ w) / (model.xi @ w0)
    return complex(psi[0]) if scalar else psi


def _suffix_masses(model: ValidatedModel, n: int) -> np.ndarray:
    """Row r is ``(A+B)^r eta`` scaled to unit sum."""
    out = np.empty((n + 1, model.size))
    v = model.eta / model.eta.sum()
    out[0] = v
    for r in range(1, n + 1):
        v = model.m_matrix @ v
        v = v / v.sum()
        out[r] = v
    return out


def _cumulative(w: np.ndarray) -> np.ndarray:
    tot = w.sum(axis=-1, keepdims=True)
    safe = np.where(tot > 0, tot, 1.0)
    cum = np.cumsum(w, axis=-1) / safe
    cum[..., -1] = 1.0
    return cum


def sampling_tables(model: ValidatedModel, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Cumulative start distribution and per-step move tables for the sampler."""
    suffix = _suffix_masses(model, n)
    start = _cumulative(model.xi * suffix[n])
    a, b = model.a_matrix, model.b_matrix
    table = np.empty((n, model.size, 2 * model.size))
    for s in range(n):
        v = suffix[n - 1 - s]
        table[s] = _cumulative(np.concatenate([a * v[None, :], b * v[None, :]], axis=1))
    return start, table


def sample_counts(model: ValidatedModel, n: int, count: int, seed: int) -> np.ndarray:
    """Histogram (length n+1) of ``Y_n`` over ``count`` words drawn with ``Pr(w) ∝ xi'mu(w)eta``.

    Word ``w`` consumes row ``w`` of one uniform stream seeded by ``seed``,
    so the result depends only on ``(model, n, count, seed)``.
    """
    n = _check_n(model, n)
    if n == 0:
        raise ValueError("sampling needs n >= 1")
    if count < 1:
        raise ValueError("count must be positive")
    start, table = sampling_tables(model, n)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed) & (2**64 - 1))))
    hist = np.zeros(n + 1, dtype=np.int64)
    chunk = max(1, (1 << 22) // (n + 1))
    done = 0
    while done < count:
        rows = min(chunk, count - done)
        u = rng.random((rows, n + 1))
        hist += np.bincount(_kernels.walk_counts(start, table, u), minlength=n + 1)
        done += rows
    return hist


def histogram_csv(hist: np.ndarray) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["k", "count"])
    for k, c in enumerate(hist):
        writer.writerow([k, int(c)])
    return buf.getvalue()
