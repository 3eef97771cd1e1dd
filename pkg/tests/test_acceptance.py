"""Acceptance criteria, one check per criterion.

Each check returns ``(ok, detail)``; the pytest wrappers print one
``PASS``/``FAIL`` line per criterion and then assert.  Running this file
directly prints the same lines without pytest.
"""
import math
import os
import subprocess
import sys
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest
from scipy import integrate

from ratlaws import corpus
from ratlaws.distribution import exact_distribution, moments
from ratlaws.laws import LawKind, LimitLaw, law_density, law_local_value, t_characteristic
from ratlaws.model import from_matrices, validate
from ratlaws.spectral import spectral_constants
from ratlaws.structure import Kind, Subcase, aperiodicity_index, classify, condensation
from ratlaws.verify import convergence_report

sys.path.insert(0, str(Path(__file__).parent))
from conftest import brute_force  # noqa: E402

TOL = 1e-9
GRID = (250, 500, 1000, 2000)
BAND = (-0.75, -0.25)


def _close(x, y, tol=TOL):
    return abs(x - y) <= tol


def criterion_1():
    t0 = time.perf_counter()
    cls = classify(corpus.load("fig1"))
    elapsed = time.perf_counter() - t0
    c1, c2 = cls.constants
    checks = [
        cls.kind is Kind.EQUIPOTENT_COMMUNICATING,
        _close(c1.lam, 2), _close(c2.lam, 2),
        _close(c1.beta, 1 / 3), _close(c2.beta, 2 / 3),
        [ap.d for ap in cls.aperiodicity] == [1, 1],
        elapsed < 1.0,
    ]
    return all(checks), (f"{cls}, lambda=({c1.lam:.12g}, {c2.lam:.12g}), beta=({c1.beta:.12g}, {c2.beta:.12g}), "
                         f"d=({cls.aperiodicity[0].d}, {cls.aperiodicity[1].d}), {elapsed:.3f}s")


def criterion_2():
    t0 = time.perf_counter()
    cls = classify(corpus.load("fig2"))
    elapsed = time.perf_counter() - t0
    c1, c2 = cls.constants
    checks = [
        cls.kind is Kind.EQUIPOTENT_SUM,
        _close(c1.alpha, 2 / 3), _close(c2.alpha, 4 / 3),
        _close(c1.beta, 1 / 3), _close(c2.beta, 2 / 3),
        _close(c1.gamma, 2 / 27), _close(c2.gamma, 2 / 27),
        elapsed < 1.0,
    ]
    return all(checks), (f"{cls}, alpha=({c1.alpha:.12g}, {c2.alpha:.12g}), beta=({c1.beta:.12g}, {c2.beta:.12g}), "
                         f"gamma=({c1.gamma:.12g}, {c2.gamma:.12g}), {elapsed:.3f}s")


def _reweighted(name, weight):
    rep = corpus.representation(name)
    mats = {x: m.copy() for x, m in rep.letter_matrices.items()}
    mats["b"][1, 0] = weight
    a = mats.pop("a")
    return validate(from_matrices(a, sum(mats.values()), rep.initial, rep.final))


def criterion_3():
    c1 = classify(_reweighted("fig1", 3.0))
    c2 = classify(_reweighted("fig2", 2.0))
    lam1 = c1.constants[0].lam
    lam2 = c2.constants[0].lam
    ok = (c1.kind is Kind.DOMINANT_COMMUNICATING and c1.dominant == 1 and _close(lam1, 3)
          and c2.kind is Kind.DOMINANT_SUM and c2.dominant == 1 and _close(lam2, (1 + math.sqrt(17)) / 2))
    return ok, f"{c1} lambda1={lam1:.12g}; {c2} lambda1={lam2:.12g}"


def criterion_4():
    worst = 0.0
    for name in corpus.names():
        model = corpus.load(name)
        for n in range(1, 9):
            gap = np.abs(exact_distribution(model, n).probabilities - brute_force(model, n)).max()
            worst = max(worst, gap)
    binom = corpus.load("binomial")
    worst_bin = 0.0
    for n in range(0, 31):
        p = exact_distribution(binom, n).probabilities
        exact = np.array([math.comb(n, k) / 2**n for k in range(n + 1)])
        worst_bin = max(worst_bin, np.abs(p - exact).max())
    ok = worst <= 1e-10 and worst_bin <= 1e-12
    return ok, f"max brute-force gap {worst:.2e} over {len(corpus.names())} models; binomial gap {worst_bin:.2e}"


def criterion_5():
    binom = corpus.load("binomial")
    worst = 0.0
    for n in list(range(1, 51)) + [100, 1000, 10_000]:
        mean, var = moments(binom, n)
        worst = max(worst, abs(mean - n / 2), abs(var - n / 4))
    details = [f"binomial moment error {worst:.2e}"]
    ok = worst <= 1e-10
    ns = [100, 200, 400, 800, 1600]
    for name in corpus.names():
        cls = classify(corpus.load(name))
        if cls.kind is not Kind.PRIMITIVE:
            continue
        c = cls.constants[0]
        model = corpus.load(name)
        dm = [moments(model, n)[0] - c.beta * n for n in ns]
        dv = [moments(model, n)[1] - c.gamma * n for n in ns]
        bounded = max(map(abs, dm + dv)) < 10 and abs(dm[-1] - dm[-2]) < 1e-6 and abs(dv[-1] - dv[-2]) < 1e-6
        ok &= bounded
        details.append(f"{name}: E-beta*n -> {dm[-1]:+.6f}, Var-gamma*n -> {dv[-1]:+.6f}")
    return ok, "; ".join(details)


def tmix_construction():
    """First reference component joined to a reweighted variant with equal beta."""
    a1 = np.array([[0.0, 2.0], [0.0, 0.0]])
    b1 = np.array([[1.0, 0.0], [1.0, 0.0]])
    a2 = np.array([[0.0, 4 / 3], [0.0, 0.0]])
    b2 = np.array([[2 / 3, 0.0], [4 / 3, 2 / 3]])
    k1 = spectral_constants(a1, b1, [1, 0], [0, 0], require_alpha=False)
    k2 = spectral_constants(a2, b2, [0, 0], [1, 1], require_alpha=False)
    assert abs(k1.lam - k2.lam) <= TOL * k1.lam
    assert abs(k1.beta - k2.beta) <= TOL
    assert abs(k1.gamma - k2.gamma) > 1e-3
    a = np.zeros((4, 4))
    b = np.zeros((4, 4))
    a[:2, :2], a[2:, 2:] = a1, a2
    b[:2, :2], b[2:, 2:] = b1, b2
    b[0, 2] = b[1, 2] = 1.0
    return validate(from_matrices(a, b, [1, 0, 0, 0], [0, 0, 1, 1]))


def _slope(model, expected_kind):
    rep = convergence_report(model, GRID, BAND)
    assert rep.law.kind is expected_kind
    ds = ", ".join(f"{e.D:.3g}" for e in rep.entries)
    return rep.passed, f"slope {rep.fitted_slope:+.4f} (D = {ds})"


def criterion_6a():
    return _slope(corpus.load("binomial"), LawKind.GAUSSIAN)


def criterion_6b():
    return _slope(corpus.load("fig1"), LawKind.UNIFORM)


def criterion_6c():
    return _slope(corpus.load("fig2"), LawKind.GAUSSMIX)


def criterion_6d():
    model = tmix_construction()
    cls = classify(model)
    assert cls.subcase is Subcase.BETA_EQUAL_GAMMA_DIFFER
    return _slope(model, LawKind.TMIX)


def criterion_7():
    laws = [
        LimitLaw(LawKind.GAUSSIAN, (0.5, 0.25)),
        LimitLaw(LawKind.UNIFORM, (1 / 3, 2 / 3)),
        LimitLaw(LawKind.TMIX, (1 / 3, 2 / 27, 1 / 18)),
        LimitLaw(LawKind.TMIX, (0.5, 1.0, 3.0)),
        LimitLaw(LawKind.GAUSSMIX, (1 / 3, 1 / 3, 2 / 27, 2 / 3, 2 / 27)),
    ]
    worst_mass = 0.0
    for law in laws:
        if law.kind is LawKind.UNIFORM:
            mass = integrate.quad(lambda x: law_density(law, x), *law.params, epsabs=1e-12)[0]
        elif law.kind is LawKind.GAUSSMIX:
            n = 400
            mass = integrate.quad(lambda k: law_local_value(law, k, n), -n, 2 * n,
                                  points=[law.params[1] * n, law.params[3] * n], epsabs=1e-12, limit=400)[0]
        else:
            mass = 2 * integrate.quad(lambda x: law_density(law, x), 0, np.inf, epsabs=1e-12, limit=200)[0]
        worst_mass = max(worst_mass, abs(mass - 1))
    t_law = laws[3]
    phi0 = t_characteristic(t_law, 0.0)
    fourier = max(
        abs(2 * integrate.quad(lambda x: law_density(t_law, x) * math.cos(t * x), 0, 40,
                               epsabs=1e-12, limit=400)[0] - t_characteristic(t_law, t))
        for t in (0.5, 1.0, 2.0))
    mom = 0.0
    for law in laws[2:4]:
        mean = integrate.quad(lambda x: x * law_density(law, x), -np.inf, np.inf, epsabs=1e-12, limit=200)[0]
        var = 2 * integrate.quad(lambda x: x * x * law_density(law, x), 0, np.inf, epsabs=1e-12, limit=200)[0]
        mom = max(mom, abs(mean), abs(var - 1))
    ok = worst_mass <= 1e-8 and phi0 == 1.0 and fourier <= 1e-6 and mom <= 1e-6
    return ok, (f"mass error {worst_mass:.1e}, Phi_T(0)={phi0!r}, Fourier error {fourier:.1e}, "
                f"T moment error {mom:.1e}")


def criterion_8():
    rows = []
    ok = True
    for name in corpus.names():
        model = corpus.load(name)
        for j, blk in enumerate(condensation(model).blocks, 1):
            if blk.trivial:
                continue
            ap = aperiodicity_index(blk.a, blk.b)
            ok &= ap.consistent
            rows.append(f"{name}[{j}] d={ap.d}")
    alt = aperiodicity_index([[0.0, 1.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]])
    ok &= alt.d == 0 and alt.consistent
    return ok, f"{len(rows)} components agree; alternating pair d={alt.d}, grid strict={alt.spectral_agrees}"


def _cli(cwd, *argv):
    env = dict(os.environ, PYTHONHASHSEED="random")
    proc = subprocess.run([sys.executable, "-m", "ratlaws", *argv], cwd=cwd, env=env, capture_output=True)
    return proc.returncode, proc.stdout, proc.stderr


def criterion_9():
    commands = [
        ("classify", "corpus:fig1"),
        ("constants", "corpus:fig2"),
        ("dist", "corpus:fig1", "-n", "40", "--csv", "dist.csv"),
        ("verify", "corpus:fig2", "--grid", "100,200,400", "--report", "rep.json", "--svg", "plot.svg"),
        ("sample", "corpus:tmix", "-n", "50", "--count", "20000", "--seed", "12345"),
    ]
    artifacts = ("dist.csv", "rep.json", "plot.svg")
    outputs = []
    for _ in range(2):
        with tempfile.TemporaryDirectory() as tmp:
            run = [_cli(tmp, *cmd) for cmd in commands]
            files = {a: (Path(tmp) / a).read_bytes() for a in artifacts}
            outputs.append((run, files))
    same = outputs[0] == outputs[1]
    codes = [r[0] for r in outputs[0][0]]
    return same and codes == [0] * len(commands), f"exit codes {codes}, byte-identical={same}"


CRITERIA = {
    "1 fig1 constants": criterion_1,
    "2 fig2 constants": criterion_2,
    "3 dominance flips": criterion_3,
    "4 oracle equivalence": criterion_4,
    "5 moment constants": criterion_5,
    "6a binomial vs Gaussian slope": criterion_6a,
    "6b fig1 vs Uniform slope": criterion_6b,
    "6c fig2 vs GaussMix slope": criterion_6c,
    "6d constructed model vs TMix slope": criterion_6d,
    "7 density calculus": criterion_7,
    "8 aperiodicity cross-validation": criterion_8,
    "9 determinism": criterion_9,
}


def _line(name, ok, detail):
    return f"criterion {name}: {'PASS' if ok else 'FAIL'} ({detail})"


@pytest.mark.parametrize("name", list(CRITERIA))
def test_criterion(name, capsys):
    ok, detail = CRITERIA[name]()
    with capsys.disabled():
        print("\n" + _line(name, ok, detail))
    assert ok, detail


def test_criterion_6_total_runtime():
    t0 = time.perf_counter()
    for key in ("6a", "6b", "6c", "6d"):
        CRITERIA[next(k for k in CRITERIA if k.startswith(key))]()
    assert time.perf_counter() - t0 < 600


if __name__ == "__main__":
    failed = 0
    for name, check in CRITERIA.items():
        ok, detail = check()
        failed += not ok
        print(_line(name, ok, detail))
    sys.exit(1 if failed else 0)
