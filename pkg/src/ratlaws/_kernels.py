"""Hot loops: coefficient DP, moment recurrence, word sampler.

Each kernel exists twice, a numba ``@njit`` version and a pure-numpy
version with identical results.  Set ``RATLAWS_DISABLE_NUMBA=1`` to force
the numpy path (numba is also skipped when it cannot be imported).
"""
import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

DISABLED = os.environ.get("RATLAWS_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")
USE_NUMBA = numba is not None and not DISABLED


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"


def _njit(fn):
    if numba is None:
        return fn
    return numba.njit(cache=True)(fn)


# ---------------------------------------------------------------------------
# coefficients of xi' (A x + B)^n eta, renormalised every step

def coefficients_numpy(a, b, xi, eta, n):
    v = np.zeros((n + 1, a.shape[0]))
    v[0] = eta
    at, bt = a.T, b.T
    for j in range(1, n + 1):
        w = np.zeros_like(v)
        w[:j] = v[:j] @ bt
        w[1:j + 1] += v[:j] @ at
        total = w.sum()
        if not (total > 0 and np.isfinite(total)):
            return np.full(n + 1, np.nan)
        v = w / total
    return v @ xi


@_njit
def coefficients_jit(a, b, xi, eta, n):
    # loops run over the nonzero transitions only; automata here are sparse
    m = a.shape[0]
    ai, aj, av = _nonzeros(a)
    bi, bj, bv = _nonzeros(b)
    cur = np.zeros((n + 1, m))
    nxt = np.zeros((n + 1, m))
    for i in range(m):
        cur[0, i] = eta[i]
    scale = 1.0
    na, nb = av.shape[0], bv.shape[0]
    for j in range(1, n + 1):
        nxt[:j + 1, :] = 0.0
        for k in range(j):
            for e in range(nb):
                nxt[k, bi[e]] += bv[e] * cur[k, bj[e]]
            for e in range(na):
                nxt[k + 1, ai[e]] += av[e] * cur[k, aj[e]]
        total = 0.0
        for k in range(j + 1):
            for i in range(m):
                nxt[k, i] *= scale
                total += nxt[k, i]
        if not (total > 0.0 and np.isfinite(total)):
            return np.full(n + 1, np.nan)
        scale = 1.0 / total
        tmp = cur
        cur = nxt
        nxt = tmp
    out = np.zeros(n + 1)
    for k in range(n + 1):
        s = 0.0
        for i in range(m):
            s += cur[k, i] * xi[i]
        out[k] = s * scale
    return out


@_njit
def _nonzeros(mat):
    m = mat.shape[0]
    cnt = 0
    for i in range(m):
        for j in range(m):
            if mat[i, j] != 0.0:
                cnt += 1
    rows = np.empty(cnt, dtype=np.int64)
    cols = np.empty(cnt, dtype=np.int64)
    vals = np.empty(cnt)
    c = 0
    for i in range(m):
        for j in range(m):
            if mat[i, j] != 0.0:
                rows[c] = i
                cols[c] = j
                vals[c] = mat[i, j]
                c += 1
    return rows, cols, vals


def coefficients(a, b, xi, eta, n):
    """Unnormalised ``[x^k] xi'(Ax+B)^n eta`` up to a common positive factor."""
    args = (np.ascontiguousarray(a, dtype=np.float64), np.ascontiguousarray(b, dtype=np.float64),
            np.ascontiguousarray(xi, dtype=np.float64), np.ascontiguousarray(eta, dtype=np.float64), int(n))
    return coefficients_jit(*args) if USE_NUMBA else coefficients_numpy(*args)


# ---------------------------------------------------------------------------
# h_n(0), h_n'(0), h_n''(0) up to a common factor

def moments_numpy(a, b, xi, eta, n):
    mm = a + b
    w0 = eta.copy()
    w1 = np.zeros_like(eta)
    w2 = np.zeros_like(eta)
    for _ in range(n):
        aw0, aw1 = a @ w0, a @ w1
        w0, w1, w2 = mm @ w0, aw0 + mm @ w1, aw0 + 2.0 * aw1 + mm @ w2
        total = w0.sum()
        if not (total > 0 and np.isfinite(total)):
            return np.full(3, np.nan)
        w0, w1, w2 = w0 / total, w1 / total, w2 / total
    return np.array([xi @ w0, xi @ w1, xi @ w2])


@_njit
def moments_jit(a, b, xi, eta, n):
    m = a.shape[0]
    w0 = eta.copy()
    w1 = np.zeros(m)
    w2 = np.zeros(m)
    n0 = np.empty(m)
    n1 = np.empty(m)
    n2 = np.empty(m)
    for _ in range(n):
        total = 0.0
        for i in range(m):
            aw0 = 0.0
            aw1 = 0.0
            mw0 = 0.0
            mw1 = 0.0
            mw2 = 0.0
            for l in range(m):
                mil = a[i, l] + b[i, l]
                aw0 += a[i, l] * w0[l]
                aw1 += a[i, l] * w1[l]
                mw0 += mil * w0[l]
                mw1 += mil * w1[l]
                mw2 += mil * w2[l]
            n0[i] = mw0
            n1[i] = aw0 + mw1
            n2[i] = aw0 + 2.0 * aw1 + mw2
            total += mw0
        if not (total > 0.0 and np.isfinite(total)):
            return np.full(3, np.nan)
        for i in range(m):
            w0[i] = n0[i] / total
            w1[i] = n1[i] / total
            w2[i] = n2[i] / total
    out = np.zeros(3)
    for i in range(m):
        out[0] += xi[i] * w0[i]
        out[1] += xi[i] * w1[i]
        out[2] += xi[i] * w2[i]
    return out


def moments(a, b, xi, eta, n):
    args = (np.ascontiguousarray(a, dtype=np.float64), np.ascontiguousarray(b, dtype=np.float64),
            np.ascontiguousarray(xi, dtype=np.float64), np.ascontiguousarray(eta, dtype=np.float64), int(n))
    return moments_jit(*args) if USE_NUMBA else moments_numpy(*args)


# ---------------------------------------------------------------------------
# sampler
#
# ``start`` is the cumulative distribution of the first state, ``table[s, i]``
# the cumulative distribution over the 2m moves (A-moves first, then B-moves)
# out of state i at step s.  ``uniforms[w]`` drives word w, column 0 picks
# the start state.  A move index is the number of cumulative entries <= u.

def walk_counts_numpy(start, table, uniforms):
    m = start.shape[0]
    state = (uniforms[:, 0, None] >= start[None, :]).sum(axis=1)
    np.minimum(state, m - 1, out=state)
    counts = np.zeros(uniforms.shape[0], dtype=np.int64)
    for s in range(table.shape[0]):
        cum = table[s][state]
        move = (uniforms[:, s + 1, None] >= cum).sum(axis=1)
        np.minimum(move, 2 * m - 1, out=move)
        counts += move < m
        state = move % m
    return counts


@_njit
def walk_counts_jit(start, table, uniforms):
    m = start.shape[0]
    words = uniforms.shape[0]
    steps = table.shape[0]
    counts = np.zeros(words, dtype=np.int64)
    for w in range(words):
        u = uniforms[w, 0]
        state = 0
        while state < m - 1 and start[state] <= u:
            state += 1
        c = 0
        for s in range(steps):
            u = uniforms[w, s + 1]
            move = 0
            while move < 2 * m - 1 and table[s, state, move] <= u:
                move += 1
            if move < m:
                c += 1
            state = move % m
        counts[w] = c
    return counts


def walk_counts(start, table, uniforms):
    args = (np.ascontiguousarray(start, dtype=np.float64), np.ascontiguousarray(table, dtype=np.float64),
            np.ascontiguousarray(uniforms, dtype=np.float64))
    return walk_counts_jit(*args) if USE_NUMBA else walk_counts_numpy(*args)
