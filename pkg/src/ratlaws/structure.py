"""Component structure, aperiodicity index and model classification."""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field

import networkx as nx
import numpy as np
from scipy.optimize import minimize_scalar

from .model import ValidatedModel
from .spectral import SpectralConstants, SpectralError, spectral_constants

CYCLE_BUDGET = 10**6
GRID_POINTS = 720
GRID_MARGIN = 1e-9


class StructureError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# condensation

@dataclass(frozen=True)
class Block:
    """One irreducible component: states (0-based, ascending) and restricted data."""

    states: tuple[int, ...]
    a: np.ndarray
    b: np.ndarray
    xi: np.ndarray
    eta: np.ndarray

    @property
    def m(self) -> np.ndarray:
        return self.a + self.b

    @property
    def trivial(self) -> bool:
        """A single state without self-loop carries no cycle."""
        return not self.m.any()


@dataclass(frozen=True)
class ComponentStructure:
    size: int
    blocks: tuple[Block, ...]
    coupling: np.ndarray                      # coupling[i, j]: M has a nonzero block i -> j
    off_diagonal: dict = field(repr=False)    # (i, j) -> (A_ij, B_ij) for i != j

    @property
    def components(self) -> list[tuple[int, ...]]:
        return [blk.states for blk in self.blocks]

    @property
    def a0(self) -> np.ndarray:
        return self._coupling_block(0)

    @property
    def b0(self) -> np.ndarray:
        return self._coupling_block(1)

    def _coupling_block(self, which: int) -> np.ndarray:
        if len(self.blocks) != 2:
            raise StructureError("coupling blocks exist only for two components")
        return self.off_diagonal[(0, 1)][which]

    def reassemble(self) -> tuple[np.ndarray, np.ndarray]:
        """Rebuild ``(A, B)`` in the original state order from the blocks."""
        a = np.zeros((self.size, self.size))
        b = np.zeros((self.size, self.size))
        for blk in self.blocks:
            idx = np.ix_(blk.states, blk.states)
            a[idx] = blk.a
            b[idx] = blk.b
        for (i, j), (aij, bij) in self.off_diagonal.items():
            idx = np.ix_(self.blocks[i].states, self.blocks[j].states)
            a[idx] = aij
            b[idx] = bij
        return a, b


def condensation(model: ValidatedModel) -> ComponentStructure:
    """Strongly connected components of ``M`` in topological order."""
    a, b = model.a_matrix, model.b_matrix
    graph = nx.DiGraph()
    graph.add_nodes_from(range(model.size))
    graph.add_edges_from(zip(*np.nonzero(model.m_matrix > 0)))
    cond = nx.condensation(graph)
    # deterministic topological order: smallest state first among ready components
    order = list(nx.lexicographical_topological_sort(
        cond, key=lambda c: min(cond.nodes[c]["members"])))
    members = [tuple(sorted(cond.nodes[c]["members"])) for c in order]
    blocks = tuple(
        Block(s, a[np.ix_(s, s)].copy(), b[np.ix_(s, s)].copy(), model.xi[list(s)].copy(), model.eta[list(s)].copy())
        for s in members
    )
    k = len(blocks)
    coupling = np.zeros((k, k), dtype=bool)
    off = {}
    for i, j in itertools.permutations(range(k), 2):
        idx = np.ix_(members[i], members[j])
        aij, bij = a[idx].copy(), b[idx].copy()
        if aij.any() or bij.any():
            if j < i:
                raise StructureError("condensation order has a back edge")
            coupling[i, j] = True
        if i < j:
            off[(i, j)] = (aij, bij)
    return ComponentStructure(model.size, blocks, coupling, off)


# ---------------------------------------------------------------------------
# aperiodicity

@dataclass(frozen=True)
class AperiodicityResult:
    d: int
    lattice_basis: tuple[tuple[int, int], ...]
    spectral_agrees: bool      # no eigenvalue of A e^{it} + B reaches lambda for t in (0, 2 pi)
    max_ratio: float           # largest |mu| / lambda seen on the grid
    cycle_count: int

    @property
    def period(self) -> int:
        """GCD of cycle lengths (index of imprimitivity of ``A + B``)."""
        return self.lattice_basis[0][0] if self.lattice_basis else 0

    @property
    def aperiodic(self) -> bool:
        return self.d == 1

    @property
    def consistent(self) -> bool:
        return self.aperiodic == self.spectral_agrees


def cycle_vectors(a, b, budget: int = CYCLE_BUDGET):
    """``(length, count)`` generators from the simple cycles of the labelled graph.

    A state cycle whose edges carry fixed labels contributes one vector; if
    some edge carries both labels the cycle with one more counted letter is
    also a simple cycle, so ``(L, c_min + 1)`` is added too.
    """
    a = np.asarray(a) > 0
    b = np.asarray(b) > 0
    graph = nx.DiGraph()
    graph.add_nodes_from(range(a.shape[0]))
    graph.add_edges_from(zip(*np.nonzero(a | b)))
    vectors = set()
    count = 0
    for cyc in nx.simple_cycles(graph):
        count += 1
        if count > budget:
            raise StructureError(
                f"more than {budget} simple cycles; use a smaller component")
        edges = list(zip(cyc, cyc[1:] + cyc[:1]))
        forced = sum(1 for i, j in edges if a[i, j] and not b[i, j])
        flexible = any(a[i, j] and b[i, j] for i, j in edges)
        vectors.add((len(cyc), forced))
        if flexible:
            vectors.add((len(cyc), forced + 1))
    return sorted(vectors), count


def _xgcd(x: int, y: int) -> tuple[int, int, int]:
    s0, s1, t0, t1 = 1, 0, 0, 1
    while y:
        q = x // y
        x, y = y, x - q * y
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    return x, s0, t0


def hermite_basis(vectors) -> tuple[tuple[int, int], ...]:
    """Upper-triangular basis ``((g, h), (0, d))`` of the lattice spanned by 2-vectors.

    ``g > 0`` and ``0 <= h < d`` when ``d > 0``; the second row is omitted
    when the lattice has rank one.  Empty input gives an empty basis.
    """
    g, h, d = 0, 0, 0
    for length, cnt in vectors:
        if length == 0:
            d = math.gcd(d, cnt)
            continue
        if g == 0:
            g, h = length, cnt
            if g < 0:
                g, h = -g, -h
            continue
        r, s, t = _xgcd(g, length)
        # unimodular combination: first row (r, s h + t c), and a zero-first-coordinate row
        new_h = s * h + t * cnt
        zero_row = (length // r) * h - (g // r) * cnt
        g, h = r, new_h
        d = math.gcd(d, zero_row)
        if g < 0:
            g, h = -g, -h
    if g == 0:
        return ((0, d),) if d else ()
    if d:
        h %= d
        return ((g, h), (0, d))
    return ((g, h),)


def lattice_index(vectors) -> int:
    """Generator of ``L ∩ ({0} x Z)``; 0 when that intersection is trivial."""
    basis = hermite_basis(vectors)
    for row in basis:
        if row[0] == 0:
            return row[1]
    return 0


def spectral_aperiodicity(a, b, lam: float, points: int = GRID_POINTS,
                          margin: float = GRID_MARGIN) -> tuple[bool, float]:
    """Grid check that every eigenvalue of ``A e^{it} + B`` is below ``lam`` in modulus.

    ``t`` runs over ``2 pi j / points``, ``j = 1..points-1``; grid maxima are
    then polished with a bounded scalar search so that an isolated touch
    between grid points is not missed.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)

    def ratio(t):
        return np.abs(np.linalg.eigvals(a * np.exp(1j * t) + b)).max() / lam

    ts = 2 * np.pi * np.arange(1, points) / points
    vals = np.array([ratio(t) for t in ts])
    best = vals.max()
    if best >= 1.0 - margin or len(ts) < 3:
        return bool(best < 1.0 - margin), float(best)
    step = ts[1] - ts[0]
    peaks = [i for i in range(len(vals))
             if (i == 0 or vals[i] >= vals[i - 1]) and (i == len(vals) - 1 or vals[i] >= vals[i + 1])]
    for i in peaks:
        lo = max(ts[i] - step, ts[0])
        hi = min(ts[i] + step, ts[-1])
        res = minimize_scalar(lambda t: -ratio(t), bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-12})
        best = max(best, -res.fun)
    return bool(best < 1.0 - margin), float(best)


def aperiodicity_index(a, b, lam: float | None = None) -> AperiodicityResult:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    vectors, count = cycle_vectors(a, b)
    basis = hermite_basis(vectors)
    d = lattice_index(vectors)
    if lam is None:
        lam = float(np.abs(np.linalg.eigvals(a + b)).max())
    agrees, ratio = spectral_aperiodicity(a, b, lam)
    return AperiodicityResult(d, basis, agrees, ratio, count)


# ---------------------------------------------------------------------------
# classification

class Kind(enum.Enum):
    PRIMITIVE = "Primitive"
    DOMINANT_COMMUNICATING = "DominantCommunicating"
    EQUIPOTENT_COMMUNICATING = "EquipotentCommunicating"
    DOMINANT_SUM = "DominantSum"
    EQUIPOTENT_SUM = "EquipotentSum"
    UNSUPPORTED = "Unsupported"


class Subcase(enum.Enum):
    BETA_DIFFER = "BetaDiffer"
    BETA_EQUAL_GAMMA_DIFFER = "BetaEqualGammaDiffer"
    BETA_GAMMA_EQUAL = "BetaGammaEqual"


@dataclass(frozen=True)
class ModelClass:
    kind: Kind
    constants: tuple[SpectralConstants, ...] = ()
    aperiodicity: tuple[AperiodicityResult, ...] = ()
    dominant: int | None = None          # 1-based
    subcase: Subcase | None = None
    reason: str = ""
    structure: ComponentStructure | None = field(default=None, repr=False)
    size: int = 0

    def __str__(self):
        if self.kind is Kind.UNSUPPORTED:
            return f"Unsupported({self.reason})"
        if self.dominant is not None:
            return f"{self.kind.value}({self.dominant})"
        if self.subcase is not None:
            return f"{self.kind.value}({self.subcase.value})"
        return self.kind.value

    @property
    def supported(self) -> bool:
        return self.kind is not Kind.UNSUPPORTED


def _rel_equal(x: float, y: float, tol: float) -> bool:
    return abs(x - y) <= tol * max(abs(x), abs(y))


def _subcase(c1: SpectralConstants, c2: SpectralConstants, tol: float) -> Subcase:
    if not _rel_equal(c1.beta, c2.beta, tol):
        return Subcase.BETA_DIFFER
    if not _rel_equal(c1.gamma, c2.gamma, tol):
        return Subcase.BETA_EQUAL_GAMMA_DIFFER
    return Subcase.BETA_GAMMA_EQUAL


def _block_hypothesis(j: int, blk: Block, ap: AperiodicityResult) -> str | None:
    """Reason why block j fails the primitive + aperiodic-pair hypothesis, or None."""
    if not blk.a.any() or not blk.b.any():
        letter = "A" if not blk.a.any() else "B"
        return f"component {j} is degenerate ({letter}_{j} = 0)"
    if ap.period != 1:
        return f"M_{j} is not primitive (period {ap.period})"
    if ap.d != 1:
        return f"pair (A_{j}, B_{j}) is not aperiodic (d = {ap.d})"
    return None


def classify(model: ValidatedModel, tol_eq: float = 1e-9) -> ModelClass:
    """Place the model in the classification of local limit regimes.

    Structural failures and failed aperiodicity hypotheses give
    ``Kind.UNSUPPORTED`` with the reason; constants and aperiodicity data
    are still attached whenever they could be computed.
    """
    struct = condensation(model)
    blocks = struct.blocks
    unsupported = dict(kind=Kind.UNSUPPORTED, structure=struct, size=model.size)

    if len(blocks) > 2:
        return ModelClass(reason=f"{len(blocks)} irreducible components (at most 2 supported)", **unsupported)
    for j, blk in enumerate(blocks, 1):
        if blk.trivial:
            return ModelClass(reason=f"component {j} (state {blk.states[0] + 1}) has no cycle", **unsupported)

    if len(blocks) == 1:
        blk = blocks[0]
        try:
            c = spectral_constants(blk.a, blk.b, blk.xi, blk.eta)
        except SpectralError as exc:
            return ModelClass(reason=str(exc), **unsupported)
        ap = aperiodicity_index(blk.a, blk.b, c.lam)
        base = dict(constants=(c,), aperiodicity=(ap,), structure=struct, size=model.size)
        if ap.period != 1:
            return ModelClass(Kind.UNSUPPORTED, reason=f"M is not primitive (period {ap.period})", **base)
        if ap.d != 1:
            return ModelClass(Kind.UNSUPPORTED, reason=f"pair (A, B) is not aperiodic (d = {ap.d})", **base)
        return ModelClass(Kind.PRIMITIVE, **base)

    b1, b2 = blocks
    communicating = bool(struct.coupling[0, 1])
    if communicating:
        if not b1.xi.any() or not b2.eta.any():
            return ModelClass(reason="communicating model needs xi_1 != 0 and eta_2 != 0", **unsupported)
    else:
        if not (b1.xi.any() and b1.eta.any() and b2.xi.any() and b2.eta.any()):
            return ModelClass(reason="sum model needs xi_j != 0 != eta_j for both components", **unsupported)

    try:
        consts = tuple(spectral_constants(blk.a, blk.b, blk.xi, blk.eta, require_alpha=not communicating)
                       for blk in blocks)
    except SpectralError as exc:
        return ModelClass(reason=str(exc), **unsupported)
    aps = tuple(aperiodicity_index(blk.a, blk.b, c.lam) for blk, c in zip(blocks, consts))
    base = dict(constants=consts, aperiodicity=aps, structure=struct, size=model.size)

    l1, l2 = consts[0].lam, consts[1].lam
    if not _rel_equal(l1, l2, tol_eq):
        dom = 1 if l1 > l2 else 2
        why = _block_hypothesis(dom, blocks[dom - 1], aps[dom - 1])
        if why:
            return ModelClass(Kind.UNSUPPORTED, reason=f"dominant {why}", **base)
        kind = Kind.DOMINANT_COMMUNICATING if communicating else Kind.DOMINANT_SUM
        return ModelClass(kind, dominant=dom, **base)

    for j in (1, 2):
        why = _block_hypothesis(j, blocks[j - 1], aps[j - 1])
        if why:
            return ModelClass(Kind.UNSUPPORTED, reason=f"equipotent model: {why}", **base)
    kind = Kind.EQUIPOTENT_COMMUNICATING if communicating else Kind.EQUIPOTENT_SUM
    return ModelClass(kind, subcase=_subcase(consts[0], consts[1], tol_eq), **base)
