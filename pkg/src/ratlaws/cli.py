"""Command-line front end.

    ratlaws classify MODEL
    ratlaws constants MODEL
    ratlaws dist MODEL -n N [--csv FILE]
    ratlaws verify MODEL --grid N1,N2,... [--band LO,HI] [--report FILE] [--svg FILE]
    ratlaws sample MODEL -n N --count C --seed S

MODEL is a path to a JSON model file, or ``corpus:NAME`` for a bundled
example.  Exit status: 0 success, 1 model/classification refusal, 2 usage.
"""
from __future__ import annotations

import argparse
import io
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import corpus
from .distribution import DistributionError, exact_distribution, histogram_csv, sample_counts
from .laws import LawRefused, LimitLaw, predict_law
from .model import ModelError, ValidatedModel, load_model, validate
from .spectral import SpectralError, spectral_constants
from .structure import ModelClass, StructureError, classify, condensation
from .svgplot import emit_svg_plot
from .verify import DEFAULT_BAND, VerifyError, convergence_report

REFUSALS = (ModelError, DistributionError, LawRefused, VerifyError, SpectralError,
            StructureError, KeyError, OSError)


@dataclass
class CommandOutcome:
    exit_code: int
    stdout: str = ""
    stderr: str = ""
    artifacts: list[str] = field(default_factory=list)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


def fmt(x: float) -> str:
    """12 significant digits, plus ``(≈ p/q)`` when ``x`` is within 1e-9 of a small fraction."""
    x = float(x)
    s = f"{x:.12g}"
    if not math.isfinite(x):
        return s
    frac = Fraction(x).limit_denominator(64)
    if frac.denominator > 1 and abs(x - frac.numerator / frac.denominator) <= 1e-9:
        s += f" (≈ {frac.numerator}/{frac.denominator})"
    return s


def _vec(v) -> str:
    return "(" + ", ".join(f"{x:.12g}" for x in v) + ")"


def format_law(law: LimitLaw) -> str:
    names = {
        "Gaussian": ("beta", "gamma"),
        "Uniform": ("b1", "b2"),
        "TMix": ("beta", "gamma1", "gamma2"),
        "GaussMix": ("p", "beta1", "gamma1", "beta2", "gamma2"),
    }[law.kind.value]
    return f"{law.kind.value}(" + ", ".join(f"{k}={fmt(v)}" for k, v in zip(names, law.params)) + ")"


def _load(spec: str) -> ValidatedModel:
    if spec.startswith("corpus:"):
        return corpus.load(spec[len("corpus:"):])
    return validate(load_model(spec))


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _int_list(text: str) -> list[int]:
    try:
        return [_positive_int(t) for t in text.split(",") if t.strip()]
    except argparse.ArgumentTypeError as exc:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}: {exc}") from None


def _band(text: str) -> tuple[float, float]:
    parts = text.split(",")
    try:
        lo, hi = (float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"band must be LO,HI, got {text!r}") from None
    if not lo < hi:
        raise argparse.ArgumentTypeError("band needs LO < HI")
    return lo, hi


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError("expected a positive finite number")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ratlaws", description="Symbol statistics and local limit laws of weighted automata.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def model_cmd(name, help_):
        c = sub.add_parser(name, help=help_)
        c.add_argument("model", help="model JSON file, or corpus:NAME")
        return c

    c = model_cmd("classify", "classify the component structure and predict the local law")
    c.add_argument("--tol-eq", type=_positive_float, default=1e-9,
                   help="relative tolerance for equal lambda/beta/gamma (default 1e-9)")
    model_cmd("constants", "print Perron data and alpha, beta, gamma per component")
    c = model_cmd("dist", "exact distribution of Y_n")
    c.add_argument("-n", type=_positive_int, required=True)
    c.add_argument("--csv", metavar="FILE", help="write k,p rows to FILE instead of stdout")
    c = model_cmd("verify", "discrepancies D_n and fitted log-log slope")
    c.add_argument("--grid", type=_int_list, required=True, metavar="N1,N2,...")
    c.add_argument("--band", type=_band, default=DEFAULT_BAND, metavar="LO,HI")
    c.add_argument("--report", metavar="FILE", help="write the JSON report")
    c.add_argument("--svg", metavar="FILE", help="write a log-log plot")
    c.add_argument("--tol-eq", type=_positive_float, default=1e-9)
    c = model_cmd("sample", "Monte Carlo histogram of Y_n as CSV")
    c.add_argument("-n", type=_positive_int, required=True)
    c.add_argument("--count", type=_positive_int, required=True)
    c.add_argument("--seed", type=int, required=True)
    return p


# ---------------------------------------------------------------------------
# subcommands; each writes to ``out`` and returns an exit code

def _describe_class(cls: ModelClass, out) -> None:
    print(f"class: {cls}", file=out)
    struct = cls.structure
    if struct is not None:
        for j, comp in enumerate(struct.components, 1):
            print(f"component {j}: states {' '.join(str(s + 1) for s in comp)}", file=out)
        if len(struct.components) == 2:
            kind = "nonzero (communicating)" if struct.coupling[0, 1] else "zero (sum)"
            print(f"coupling block M_0: {kind}", file=out)
    for j, (c, ap) in enumerate(zip(cls.constants, cls.aperiodicity), 1):
        print(f"  [{j}] lambda = {fmt(c.lam)}", file=out)
        print(f"  [{j}] alpha  = {fmt(c.alpha)}", file=out)
        print(f"  [{j}] beta   = {fmt(c.beta)}", file=out)
        print(f"  [{j}] gamma  = {fmt(c.gamma)}", file=out)
        check = "agrees" if ap.consistent else "DISAGREES"
        print(f"  [{j}] d = {ap.d}, period = {ap.period}, spectral check {check} "
              f"(max |mu|/lambda = {ap.max_ratio:.6f})", file=out)


def cmd_classify(args, out) -> int:
    model = _load(args.model)
    cls = classify(model, tol_eq=args.tol_eq)
    _describe_class(cls, out)
    if not cls.supported:
        print(f"no local law: {cls.reason}", file=out)
        return 1
    law = predict_law(cls)
    print(f"regime: {law.regime}", file=out)
    print(f"law: {format_law(law)}", file=out)
    return 0


def cmd_constants(args, out) -> int:
    model = _load(args.model)
    struct = condensation(model)
    status = 0
    for j, blk in enumerate(struct.blocks, 1):
        print(f"component {j}: states {' '.join(str(s + 1) for s in blk.states)}", file=out)
        if blk.trivial:
            print("  no cycle (trivial component)", file=out)
            continue
        try:
            c = spectral_constants(blk.a, blk.b, blk.xi, blk.eta, require_alpha=False)
        except SpectralError as exc:
            print(f"  error: {exc}", file=out)
            status = 1
            continue
        print(f"  lambda = {fmt(c.lam)}", file=out)
        print(f"  zeta   = {_vec(c.triple.left)}", file=out)
        print(f"  nu     = {_vec(c.triple.right)}", file=out)
        print(f"  alpha  = {fmt(c.alpha)}", file=out)
        print(f"  beta   = {fmt(c.beta)}   (finite differences {c.beta_fd:.12g})", file=out)
        print(f"  gamma  = {fmt(c.gamma)}   (finite differences {c.gamma_fd:.12g})", file=out)
        print(f"  u'(0)  = {fmt(c.du0)}", file=out)
        print(f"  u''(0) = {fmt(c.d2u0)}", file=out)
    return status


def cmd_dist(args, out, artifacts) -> int:
    model = _load(args.model)
    dist = exact_distribution(model, args.n)
    if args.csv:
        Path(args.csv).write_text(dist.to_csv(), encoding="utf-8")
        artifacts.append(args.csv)
        print(f"n = {dist.n}", file=out)
        print(f"mean = {fmt(dist.mean)}", file=out)
        print(f"variance = {fmt(dist.variance)}", file=out)
        print(f"wrote {args.csv}", file=out)
    else:
        out.write(dist.to_csv())
    return 0


def cmd_verify(args, out, artifacts) -> int:
    model = _load(args.model)
    cls = classify(model, tol_eq=args.tol_eq)
    law = predict_law(cls)
    report = convergence_report(model, args.grid, args.band, law=law)
    print(f"law: {format_law(law)}", file=out)
    print(f"regime: {law.regime}", file=out)
    print("n,D,window", file=out)
    for e in report.entries:
        print(f"{e.n},{e.D!r},{e.window}", file=out)
    lo, hi = report.band
    print(f"slope = {report.fitted_slope:.6f} +/- {report.slope_stderr:.6f}  band [{lo:g}, {hi:g}]", file=out)
    print(f"pass = {str(report.passed).lower()}", file=out)
    if args.report:
        Path(args.report).write_text(report.to_json() + "\n", encoding="utf-8")
        artifacts.append(args.report)
    if args.svg:
        emit_svg_plot(report, args.svg)
        artifacts.append(args.svg)
    return 0


def cmd_sample(args, out) -> int:
    model = _load(args.model)
    hist = sample_counts(model, args.n, args.count, args.seed)
    out.write(histogram_csv(hist))
    return 0


def run(argv=None) -> CommandOutcome:
    out, err = io.StringIO(), io.StringIO()
    artifacts: list[str] = []
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as exc:
        return CommandOutcome(2, "", f"{exc}\n")
    except SystemExit as exc:  # --help
        return CommandOutcome(int(exc.code or 0), out.getvalue(), err.getvalue())
    handlers = {
        "classify": lambda: cmd_classify(args, out),
        "constants": lambda: cmd_constants(args, out),
        "dist": lambda: cmd_dist(args, out, artifacts),
        "verify": lambda: cmd_verify(args, out, artifacts),
        "sample": lambda: cmd_sample(args, out),
    }
    try:
        with np.errstate(all="ignore"):
            code = handlers[args.command]()
    except REFUSALS as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        err.write(f"error: {msg}\n")
        code = 1
    return CommandOutcome(code, out.getvalue(), err.getvalue(), artifacts)


def main(argv=None) -> int:
    result = run(argv)
    sys.stdout.write(result.stdout)
    sys.stderr.write(result.stderr)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
