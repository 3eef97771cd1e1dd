import numpy as np
import pytest
from hypothesis import settings

from ratlaws import corpus
from ratlaws.model import from_matrices, validate

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

CORPUS = corpus.names()


def brute_force(model, n):
    """p_n(k) by summing xi' mu(w) eta over every word of length n.

    Row vectors xi' mu(prefix) are expanded one letter at a time, keeping
    one vector per word, so all |alphabet|^n words are visited.
    """
    rep = model.representation
    mats = [(rep.letter_matrices[x], x == rep.counted_letter) for x in rep.alphabet]
    rows = rep.initial[None, :].astype(float)
    counts = np.zeros(1, dtype=int)
    for _ in range(n):
        rows = np.concatenate([rows @ m for m, _ in mats])
        counts = np.concatenate([counts + int(c) for _, c in mats])
    weights = rows @ rep.final
    out = np.bincount(counts, weights=weights, minlength=n + 1)
    return out / out.sum()


@pytest.fixture(scope="session")
def binomial():
    return corpus.load("binomial")


@pytest.fixture(scope="session")
def fig1():
    return corpus.load("fig1")


@pytest.fixture(scope="session")
def fig2():
    return corpus.load("fig2")


@pytest.fixture(scope="session")
def tmix_model():
    return corpus.load("tmix")


def two_letter(a, b, xi, eta):
    return validate(from_matrices(a, b, xi, eta))
