"""Linear representations of rational stochastic models.

A model is a weighted finite automaton ``(xi, {mu(x)}, eta)`` over a small
alphabet, one letter of which is *counted*.  Everything downstream only
needs the split ``A = mu(counted)`` / ``B = sum of the other letters``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np


class ModelError(ValueError):
    """Raised for malformed or inadmissible model descriptions."""


@dataclass(frozen=True, eq=False)
class LinearRepresentation:
    """A weighted automaton exactly as written in a model file.

    ``letter_matrices[x][i, j]`` is the weight of the transition
    ``i -> j`` labelled ``x`` (0-based states).
    """

    size: int
    initial: np.ndarray
    final: np.ndarray
    letter_matrices: Mapping[str, np.ndarray]
    counted_letter: str

    def __post_init__(self):
        for arr in (self.initial, self.final, *self.letter_matrices.values()):
            arr.flags.writeable = False

    @property
    def alphabet(self) -> tuple[str, ...]:
        return tuple(self.letter_matrices)

    def __eq__(self, other):
        if not isinstance(other, LinearRepresentation):
            return NotImplemented
        return (
            self.size == other.size
            and self.counted_letter == other.counted_letter
            and self.alphabet == other.alphabet
            and np.array_equal(self.initial, other.initial)
            and np.array_equal(self.final, other.final)
            and all(np.array_equal(self.letter_matrices[x], other.letter_matrices[x])
                    for x in self.alphabet)
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class ValidatedModel:
    """A representation that passed :func:`validate`, with ``A`` and ``B`` split out."""

    representation: LinearRepresentation
    a_matrix: np.ndarray
    b_matrix: np.ndarray

    @property
    def size(self) -> int:
        return self.representation.size

    @property
    def xi(self) -> np.ndarray:
        return self.representation.initial

    @property
    def eta(self) -> np.ndarray:
        return self.representation.final

    @property
    def m_matrix(self) -> np.ndarray:
        return self.a_matrix + self.b_matrix


def _as_vector(value, size: int, name: str) -> np.ndarray:
    if not isinstance(value, list):
        raise ModelError(f"'{name}' must be a list of {size} numbers")
    if len(value) != size:
        raise ModelError(f"dimension mismatch: '{name}' has length {len(value)}, size is {size}")
    return np.array([_weight(v, f"{name}[{i}]") for i, v in enumerate(value)], dtype=float)


def _as_matrix(value, size: int, name: str) -> np.ndarray:
    if not isinstance(value, list):
        raise ModelError(f"'{name}' must be a list of rows")
    if len(value) != size:
        raise ModelError(f"dimension mismatch: '{name}' has {len(value)} rows, size is {size}")
    rows = []
    for i, row in enumerate(value):
        if not isinstance(row, list) or len(row) != size:
            got = len(row) if isinstance(row, list) else type(row).__name__
            raise ModelError(f"dimension mismatch: '{name}' row {i} has length {got}, size is {size}")
        rows.append([_weight(v, f"{name}[{i}][{j}]") for j, v in enumerate(row)])
    return np.array(rows, dtype=float).reshape(size, size)


def _weight(v, where: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ModelError(f"weight {where} is not a number: {v!r}")
    x = float(v)
    if not math.isfinite(x):
        raise ModelError(f"weight {where} is not finite: {v!r}")
    if x < 0:
        raise ModelError(f"weight {where} is negative: {v!r}")
    return x


def from_dict(obj) -> LinearRepresentation:
    """Build a representation from an already-decoded model object."""
    if not isinstance(obj, dict):
        raise ModelError("model must be an object with keys size, counted_letter, initial, final, letters")
    missing = [k for k in ("size", "counted_letter", "initial", "final", "letters") if k not in obj]
    if missing:
        raise ModelError(f"missing key(s): {', '.join(missing)}")
    size = obj["size"]
    if isinstance(size, bool) or not isinstance(size, int) or size < 1:
        raise ModelError(f"'size' must be a positive integer, got {size!r}")
    letters = obj["letters"]
    if not isinstance(letters, dict) or not letters:
        raise ModelError("'letters' must be a non-empty object mapping letters to matrices")
    mats = {}
    for x, mat in letters.items():
        if len(x) != 1 or not x.isprintable() or x.isspace():
            raise ModelError(f"letter {x!r} is not a single printable character")
        mats[x] = _as_matrix(mat, size, f"letters.{x}")
    counted = obj["counted_letter"]
    if not isinstance(counted, str) or counted not in mats:
        raise ModelError(f"unknown counted letter {counted!r}; letters are {sorted(mats)}")
    return LinearRepresentation(
        size=size,
        initial=_as_vector(obj["initial"], size, "initial"),
        final=_as_vector(obj["final"], size, "final"),
        letter_matrices=mats,
        counted_letter=counted,
    )


def parse_model(text: str) -> LinearRepresentation:
    """Parse the JSON model format.  Weights are kept exactly as written."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return from_dict(obj)


def load_model(path) -> LinearRepresentation:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except FileNotFoundError:
        raise ModelError(f"model file not found: {path}") from None
    except OSError as exc:
        raise ModelError(f"cannot read model file {path}: {exc.strerror}") from None
    return parse_model(text)


def _num(x: float):
    return int(x) if float(x).is_integer() and abs(x) < 2**53 else float(x)


def to_dict(rep: LinearRepresentation) -> dict:
    return {
        "size": rep.size,
        "counted_letter": rep.counted_letter,
        "initial": [_num(v) for v in rep.initial],
        "final": [_num(v) for v in rep.final],
        "letters": {x: [[_num(v) for v in row] for row in mat]
                    for x, mat in rep.letter_matrices.items()},
    }


def dump_model(rep: LinearRepresentation) -> str:
    return json.dumps(to_dict(rep), indent=2)


def from_matrices(a, b, xi, eta, *, counted: str = "a", other: str = "b") -> LinearRepresentation:
    """Two-letter representation ``(xi, A, B, eta)``; handy for tests and constructions."""
    a = np.asarray(a, dtype=float)
    return from_dict({
        "size": a.shape[0],
        "counted_letter": counted,
        "initial": np.asarray(xi, dtype=float).tolist(),
        "final": np.asarray(eta, dtype=float).tolist(),
        "letters": {counted: a.tolist(), other: np.asarray(b, dtype=float).tolist()},
    })


# ---------------------------------------------------------------------------
# validation

def _reach(adj: np.ndarray, start: np.ndarray) -> np.ndarray:
    seen = start.copy()
    frontier = start.copy()
    while frontier.any():
        nxt = adj[frontier].any(axis=0) & ~seen
        seen |= nxt
        frontier = nxt
    return seen


def _on_cycle(adj: np.ndarray, states: np.ndarray) -> np.ndarray:
    """Boolean mask: states of ``states`` lying on a cycle inside ``states``."""
    sub = adj & states[:, None] & states[None, :]
    out = np.zeros(len(states), dtype=bool)
    for i in np.flatnonzero(states):
        start = np.zeros(len(states), dtype=bool)
        start[sub[i]] = True
        out[i] = _reach(sub, start)[i]
    return out


def _first_empty_length(adj: np.ndarray, src: np.ndarray, dst: np.ndarray, budget: int) -> int | None:
    """Smallest n >= 1 with no length-n path from ``src`` to ``dst``; None if there is none.

    The reachable-set sequence is deterministic on a finite set of subsets,
    so it becomes periodic; every n is decided once a subset repeats.
    Past ``budget`` steps the answer is taken to be None.
    """
    seen = {}
    cur = src
    for n in range(1, budget + 1):
        cur = adj[cur].any(axis=0)
        if not (cur & dst).any():
            return n
        key = cur.tobytes()
        if key in seen:
            return None
        seen[key] = n
    return None


def validate(rep: LinearRepresentation) -> ValidatedModel:
    """Check admissibility and aggregate the non-counted letters into ``B``.

    Raises :class:`ModelError` naming the violated condition.
    """
    if len(rep.letter_matrices) < 2:
        raise ModelError("at least two letters are required")
    if rep.counted_letter not in rep.letter_matrices:
        raise ModelError(f"unknown counted letter {rep.counted_letter!r}")
    m = rep.size
    arrays = [rep.initial, rep.final, *rep.letter_matrices.values()]
    if any(arr.shape not in ((m,), (m, m)) for arr in arrays):
        raise ModelError("dimension mismatch between size and vectors/matrices")
    for arr in arrays:
        if not np.all(np.isfinite(arr)) or np.any(arr < 0):
            raise ModelError("weights must be finite and non-negative")
    if not rep.initial.any():
        raise ModelError("initial vector is zero")
    if not rep.final.any():
        raise ModelError("final vector is zero")

    a = np.array(rep.letter_matrices[rep.counted_letter], dtype=float)
    b = np.zeros((m, m))
    for x, mat in rep.letter_matrices.items():
        if x != rep.counted_letter:
            b = b + mat
    if not a.any():
        raise ModelError(f"matrix of counted letter {rep.counted_letter!r} is zero")
    if not b.any():
        raise ModelError("aggregated matrix of the non-counted letters is zero")

    total = sum(rep.letter_matrices.values())
    if not np.allclose(a + b, total, rtol=1e-12, atol=0):
        raise ModelError("internal: letter aggregation mismatch")

    adj = (a + b) > 0
    src = rep.initial > 0
    dst = rep.final > 0
    useful = _reach(adj, src) & _reach(adj.T, dst)
    if not useful.any() or not _on_cycle(adj, useful).any():
        witness = _first_empty_length(adj, src, dst, 2 * m)
        raise ModelError(
            "no accepted word of length n for all large n (no cycle between initial and final states)"
            + (f"; first empty length n={witness}" if witness else "")
        )
    # numerical check for short lengths (normalised to avoid overflow)
    v = rep.final / rep.final.sum()
    big_m = a + b
    for n in range(1, 2 * m + 1):
        v = big_m @ v
        if not rep.initial @ v > 0:
            raise ModelError(f"no accepted word of length n={n}")
        v = v / v.sum()
    witness = _first_empty_length(adj, src, dst, budget=max(10_000, 4 * m * m))
    if witness is not None:
        raise ModelError(f"no accepted word of length n={witness}")

    a.flags.writeable = False
    b.flags.writeable = False
    return ValidatedModel(rep, a, b)


def load_validated(path) -> ValidatedModel:
    return validate(load_model(path))
