"""Perron-Frobenius data and the mean/variance constants of an irreducible block.

For an irreducible pair ``(A, B)`` with ``M = A + B`` let ``u(z)`` be the
eigenvalue of ``A e^z + B`` through ``u(0) = lambda``.  The constants are

    alpha = (xi . nu) (zeta . eta)
    beta  = u'(0) / lambda
    gamma = u''(0) / lambda - beta**2

``u'(0)`` and ``u''(0)`` come from first/second order eigenvalue
perturbation and are cross-checked against Richardson-extrapolated finite
differences of :func:`dominant_eigenvalue_at`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

EIG_RESIDUAL = 1e-10
CROSSCHECK_RTOL = 1e-8
FD_STEP = 0.05


class SpectralError(ArithmeticError):
    pass


@dataclass(frozen=True)
class PerronTriple:
    lam: float
    left: np.ndarray   # zeta, zeta' M = lam zeta'
    right: np.ndarray  # nu,   M nu = lam nu,  zeta' nu = 1


@dataclass(frozen=True)
class SpectralConstants:
    lam: float
    alpha: float
    beta: float
    gamma: float
    du0: float
    d2u0: float
    triple: PerronTriple
    beta_fd: float
    gamma_fd: float


def is_irreducible(mat: np.ndarray) -> bool:
    """Strongly connected transition graph with at least one edge."""
    adj = np.asarray(mat) > 0
    n = adj.shape[0]
    if not adj.any():
        return False

    def reach(g):
        seen = np.zeros(n, dtype=bool)
        seen[0] = True
        frontier = seen.copy()
        while frontier.any():
            nxt = g[frontier].any(axis=0) & ~seen
            seen |= nxt
            frontier = nxt
        return seen.all()

    return reach(adj) and reach(adj.T)


def _power(s: np.ndarray, max_iter: int) -> np.ndarray:
    v = np.full(s.shape[0], 1.0 / s.shape[0])
    for _ in range(max_iter):
        w = s @ v
        w /= w.sum()
        if np.abs(w - v).max() <= 1e-15:
            return w
        v = w
    raise SpectralError(f"power iteration did not converge in {max_iter} steps (near-degenerate input?)")


def perron_triple(mat, max_iter: int = 1_000_000) -> PerronTriple:
    """Perron eigenvalue and positive eigenvectors of an irreducible matrix.

    Power iteration runs on ``M/s + I`` (``s`` the max row sum), which is
    primitive even when ``M`` is periodic.  The right vector has unit
    Euclidean norm and the left one is scaled so that ``zeta . nu = 1``.
    """
    mat = np.asarray(mat, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError("matrix must be square")
    if np.any(mat < 0) or not np.all(np.isfinite(mat)):
        raise ValueError("matrix must be finite and non-negative")
    if not is_irreducible(mat):
        raise SpectralError("matrix is not irreducible")
    scale = mat.sum(axis=1).max()
    shifted = mat / scale + np.eye(mat.shape[0])
    nu = _power(shifted, max_iter)
    zeta = _power(shifted.T, max_iter)
    lam = float(zeta @ mat @ nu / (zeta @ nu))
    nu = nu / np.linalg.norm(nu)
    zeta = zeta / (zeta @ nu)
    if (np.linalg.norm(mat @ nu - lam * nu) > EIG_RESIDUAL * lam * np.linalg.norm(nu)
            or np.linalg.norm(zeta @ mat - lam * zeta) > EIG_RESIDUAL * lam * np.linalg.norm(zeta)):
        raise SpectralError("eigenvector residual above tolerance")
    if np.any(nu <= 0) or np.any(zeta <= 0):
        raise SpectralError("Perron vectors are not strictly positive")
    return PerronTriple(lam, zeta, nu)


def dominant_eigenvalue_at(a, b, z, triple: PerronTriple | None = None) -> complex:
    """``u(z)``: the eigenvalue of ``A e^z + B`` on the branch through ``lambda``.

    The branch is the eigenvalue closest to the first-order prediction
    ``lambda + u'(0) z``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if triple is None:
        triple = perron_triple(a + b)
    guess = triple.lam + (triple.left @ a @ triple.right) * z
    ev = np.linalg.eigvals(a * np.exp(z) + b)
    dist = np.abs(ev - guess)
    order = np.argsort(dist, kind="stable")
    best = ev[order[0]]
    if len(ev) > 1 and abs(ev[order[1]] - best) < 1e-12 * max(1.0, abs(triple.lam)):
        raise SpectralError(f"ambiguous dominant branch at z={z}")
    return complex(best)


def _richardson(f, h: float, levels: int = 2) -> float:
    table = [f(h / 2**i) for i in range(levels + 1)]
    for lvl in range(1, levels + 1):
        p = 4**lvl
        table = [(p * table[i + 1] - table[i]) / (p - 1) for i in range(len(table) - 1)]
    return table[0]


def fd_derivatives(a, b, h: float = FD_STEP, levels: int = 2, triple=None) -> tuple[float, float]:
    """Finite-difference ``(u'(0), u''(0))`` with Richardson extrapolation."""
    if triple is None:
        triple = perron_triple(np.asarray(a) + np.asarray(b))

    def u(z):
        return dominant_eigenvalue_at(a, b, z, triple).real

    u0 = u(0.0)
    d1 = _richardson(lambda s: (u(s) - u(-s)) / (2 * s), h, levels)
    d2 = _richardson(lambda s: (u(s) - 2 * u0 + u(-s)) / s**2, h, levels)
    return d1, d2


def perturbation_derivatives(a, b, triple: PerronTriple) -> tuple[float, float]:
    """``u'(0) = zeta'A nu`` and ``u''(0) = zeta'A nu + 2 zeta'A R A nu``.

    ``R`` is the reduced resolvent of ``M`` at ``lambda``, applied through
    the bordered system ``[[lam I - M, nu], [zeta', 0]]``.
    """
    a = np.asarray(a, dtype=float)
    mat = a + np.asarray(b, dtype=float)
    lam, zeta, nu = triple.lam, triple.left, triple.right
    m = mat.shape[0]
    anu = a @ nu
    d1 = float(zeta @ anu)
    border = np.zeros((m + 1, m + 1))
    border[:m, :m] = lam * np.eye(m) - mat
    border[:m, m] = nu
    border[m, :m] = zeta
    rhs = np.append(anu - d1 * nu, 0.0)
    x = np.linalg.solve(border, rhs)[:m]
    d2 = d1 + 2.0 * float(zeta @ a @ x)
    return d1, d2


def _close(x: float, y: float) -> bool:
    return abs(x - y) <= CROSSCHECK_RTOL * max(abs(x), abs(y)) + 1e-12


def spectral_constants(a, b, xi_block, eta_block, *, require_alpha: bool = True) -> SpectralConstants:
    """Constants of one irreducible block ``(A_j, B_j)`` with boundary vectors.

    ``alpha`` is zero when ``xi_block`` or ``eta_block`` misses the block;
    that raises unless ``require_alpha=False`` (communicating models do not
    use alpha).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    triple = perron_triple(a + b)
    lam = triple.lam
    alpha = float(np.asarray(xi_block, dtype=float) @ triple.right
                  * (triple.left @ np.asarray(eta_block, dtype=float)))
    if require_alpha and not alpha > 0:
        raise SpectralError("alpha = 0: initial or final vector misses this component")
    d1, d2 = perturbation_derivatives(a, b, triple)
    beta = d1 / lam
    gamma = d2 / lam - beta**2

    f1, f2 = fd_derivatives(a, b, triple=triple)
    beta_fd = f1 / lam
    gamma_fd = f2 / lam - beta_fd**2
    if not (_close(beta, beta_fd) and _close(gamma, gamma_fd)):
        raise SpectralError(
            f"perturbation and finite-difference constants disagree: "
            f"beta {beta!r} vs {beta_fd!r}, gamma {gamma!r} vs {gamma_fd!r}"
        )
    return SpectralConstants(lam, alpha, beta, gamma, d1, d2, triple, beta_fd, gamma_fd)
