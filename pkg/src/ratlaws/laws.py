"""Limit densities and selection of the predicted local law."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .structure import Kind, ModelClass, Subcase

SQRT_2PI = math.sqrt(2 * math.pi)


class LawRefused(ValueError):
    """No local law is predicted for the given class."""


class LawKind(enum.Enum):
    GAUSSIAN = "Gaussian"
    UNIFORM = "Uniform"
    TMIX = "TMix"
    GAUSSMIX = "GaussMix"


@dataclass(frozen=True)
class LimitLaw:
    """A local limit law ``s_n Pr(Y_n = k) ~ f((k - a_n) / s_n)``.

    ``params`` by kind:
      Gaussian (beta, gamma); Uniform (b1, b2); TMix (beta, gamma1, gamma2);
      GaussMix (p, beta1, gamma1, beta2, gamma2).
    """

    kind: LawKind
    params: tuple[float, ...]
    model_size: int | None = None
    regime: str = ""

    def __post_init__(self):
        expected = {LawKind.GAUSSIAN: 2, LawKind.UNIFORM: 2, LawKind.TMIX: 3, LawKind.GAUSSMIX: 5}[self.kind]
        if len(self.params) != expected:
            raise ValueError(f"{self.kind.value} takes {expected} parameters, got {len(self.params)}")
        object.__setattr__(self, "params", tuple(float(x) for x in self.params))
        p = self.params
        if self.kind is LawKind.GAUSSIAN and not p[1] > 0:
            raise ValueError("Gaussian law needs gamma > 0")
        if self.kind is LawKind.UNIFORM and not 0 < p[0] < p[1] < 1:
            raise ValueError("Uniform law needs 0 < b1 < b2 < 1")
        if self.kind is LawKind.TMIX and not (p[1] > 0 and p[2] > 0 and p[1] != p[2]):
            raise ValueError("TMix law needs distinct positive gammas")
        if self.kind is LawKind.GAUSSMIX and not (0 < p[0] < 1 and p[2] > 0 and p[4] > 0):
            raise ValueError("GaussMix law needs 0 < p < 1 and positive gammas")

    @property
    def gamma(self) -> float:
        """Variance constant used for scaling (TMix: mean of the two gammas)."""
        if self.kind is LawKind.GAUSSIAN:
            return self.params[1]
        if self.kind is LawKind.TMIX:
            return 0.5 * (self.params[1] + self.params[2])
        raise AttributeError(f"{self.kind.value} has no single gamma")

    def centering(self, n: int) -> float:
        if self.kind in (LawKind.GAUSSIAN, LawKind.TMIX):
            return self.params[0] * n
        return 0.0

    def scaling(self, n: int) -> float:
        if self.kind in (LawKind.GAUSSIAN, LawKind.TMIX):
            return math.sqrt(self.gamma * n)
        if self.kind is LawKind.UNIFORM:
            return float(n)
        return math.sqrt(n)

    def density(self, x):
        return law_density(self, x)

    def local_value(self, k, n: int):
        """Predicted ``Pr(Y_n = k)``."""
        return law_local_value(self, k, n)

    def __str__(self):
        return f"{self.kind.value}({', '.join(f'{v:.12g}' for v in self.params)})"

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "params": list(self.params),
                "model_size": self.model_size, "regime": self.regime}

    @classmethod
    def from_dict(cls, obj: dict) -> "LimitLaw":
        return cls(LawKind(obj["kind"]), tuple(obj["params"]), obj.get("model_size"), obj.get("regime", ""))


# ---------------------------------------------------------------------------
# densities

def _phi(x):
    return np.exp(-0.5 * np.square(x)) / SQRT_2PI


def t_density(x, gamma1: float, gamma2: float) -> float:
    """Variance mixture of centred normals, variance uniform on ``[g1/g, g2/g]``."""
    g = 0.5 * (gamma1 + gamma2)
    lo, hi = sorted((gamma1 / g, gamma2 / g))
    x = abs(float(x))
    if x == 0.0:
        return math.sqrt(2 * g / math.pi) / (math.sqrt(gamma1) + math.sqrt(gamma2))
    val, _ = integrate.quad(lambda s: math.exp(-x * x / (2 * s)) / math.sqrt(2 * math.pi * s),
                            lo, hi, epsabs=1e-13, epsrel=1e-12, limit=200)
    return val / (hi - lo)


def t_characteristic(law: LimitLaw, t: float) -> float:
    """Characteristic function of the T-density, with a series branch near 0."""
    if law.kind is not LawKind.TMIX:
        raise ValueError("t_characteristic needs a TMix law")
    _, g1, g2 = law.params
    g = 0.5 * (g1 + g2)
    a, b = g1 / (2 * g), g2 / (2 * g)
    t = float(t)
    if abs(t) < 1e-4:
        u = t * t
        return 1.0 - 0.5 * u + (a * a + a * b + b * b) / 6.0 * u * u
    u = t * t
    # e^{-au} - e^{-bu} written with expm1 to avoid cancellation for small u
    return -2 * g * math.exp(-a * u) * math.expm1(-(b - a) * u) / ((g2 - g1) * u)


def _check_x(x):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("density argument must be finite")
    return arr


def law_density(law: LimitLaw, x):
    """Limit density ``f`` at the normalised point ``x`` (scalar or array)."""
    arr = _check_x(x)
    if law.kind is LawKind.GAUSSIAN:
        out = _phi(arr)
    elif law.kind is LawKind.UNIFORM:
        b1, b2 = law.params
        out = np.where((arr >= b1) & (arr <= b2), 1.0 / (b2 - b1), 0.0)
    elif law.kind is LawKind.TMIX:
        _, g1, g2 = law.params
        out = np.vectorize(lambda v: t_density(v, g1, g2), otypes=[float])(arr)
    else:
        raise ValueError("GaussMix has no n-free density; use law_local_value(law, k, n)")
    return float(out) if np.ndim(out) == 0 else out


def law_local_value(law: LimitLaw, k, n: int):
    """Predicted probability of ``Y_n = k`` (``k`` may be fractional for quadrature)."""
    k = _check_x(k)
    if law.kind is LawKind.GAUSSMIX:
        p, b1, g1, b2, g2 = law.params
        s1, s2 = math.sqrt(g1 * n), math.sqrt(g2 * n)
        if b1 == b2 and g1 == g2:
            out = _phi((k - b1 * n) / s1) / s1
        else:
            out = p * _phi((k - b1 * n) / s1) / s1 + (1 - p) * _phi((k - b2 * n) / s2) / s2
    else:
        s = law.scaling(n)
        out = np.asarray(law_density(law, (k - law.centering(n)) / s)) / s
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# Table of regimes

_REGIMES = {
    Kind.PRIMITIVE: "primitive model: Gaussian local law",
    Kind.DOMINANT_COMMUNICATING: "dominant communicating bicomponent model: Gaussian local law of the dominant component",
    Kind.DOMINANT_SUM: "dominant sum model: Gaussian local law of the dominant component",
}


def predict_law(cls: ModelClass) -> LimitLaw:
    """Local limit law predicted for a classified model."""
    if not cls.supported:
        raise LawRefused(f"no local law: {cls.reason}")
    for j, ap in enumerate(cls.aperiodicity, 1):
        needed = cls.dominant in (None, j)
        if needed and ap.d != 1:
            raise LawRefused(f"hypothesis failed: pair of component {j} is not aperiodic (d = {ap.d})")
    size = cls.size or None
    if cls.kind is Kind.PRIMITIVE:
        c = cls.constants[0]
        return LimitLaw(LawKind.GAUSSIAN, (c.beta, c.gamma), size, _REGIMES[cls.kind])
    if cls.kind in (Kind.DOMINANT_COMMUNICATING, Kind.DOMINANT_SUM):
        c = cls.constants[cls.dominant - 1]
        return LimitLaw(LawKind.GAUSSIAN, (c.beta, c.gamma), size, _REGIMES[cls.kind])
    c1, c2 = cls.constants
    if cls.kind is Kind.EQUIPOTENT_COMMUNICATING:
        if cls.subcase is Subcase.BETA_DIFFER:
            b1, b2 = sorted((c1.beta, c2.beta))
            return LimitLaw(LawKind.UNIFORM, (b1, b2), size,
                            "equipotent communicating model, distinct betas: uniform local law for Y_n/n")
        if cls.subcase is Subcase.BETA_EQUAL_GAMMA_DIFFER:
            return LimitLaw(LawKind.TMIX, (0.5 * (c1.beta + c2.beta), c1.gamma, c2.gamma), size,
                            "equipotent communicating model, equal betas, distinct gammas: T-type local law")
        return LimitLaw(LawKind.GAUSSIAN, (0.5 * (c1.beta + c2.beta), 0.5 * (c1.gamma + c2.gamma)), size,
                        "equipotent communicating model, equal betas and gammas: Gaussian local law")
    if cls.kind is Kind.EQUIPOTENT_SUM:
        if cls.subcase is Subcase.BETA_GAMMA_EQUAL:
            return LimitLaw(LawKind.GAUSSIAN, (0.5 * (c1.beta + c2.beta), 0.5 * (c1.gamma + c2.gamma)), size,
                            "equipotent sum model, equal betas and gammas: Gaussian local law")
        p = c1.alpha / (c1.alpha + c2.alpha)
        return LimitLaw(LawKind.GAUSSMIX, (p, c1.beta, c1.gamma, c2.beta, c2.gamma), size,
                        "equipotent sum model: two-Gaussian mixture local law")
    raise LawRefused(f"unhandled class {cls}")  # pragma: no cover
