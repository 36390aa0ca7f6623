"""Linguistic probability labels and fuzzy connectives.

Labels are piecewise-linear membership functions on the probability axis
[0, 1]. Centroids are computed in closed form.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Mapping


class FuzzyError(ValueError):
    pass


@dataclass(frozen=True)
class FuzzyLabel:
    """A named membership function.

    ``shape`` is ``"crisp"``, ``"tri"`` or ``"trap"``; ``params`` holds the
    value ``(v,)``, ``(a, b, c)`` or ``(a, b, c, d)`` respectively.
    """

    name: str
    shape: str
    params: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(float(x) for x in self.params))
        arity = {"crisp": 1, "tri": 3, "trap": 4}
        if self.shape not in arity:
            raise FuzzyError(f"unknown label shape {self.shape!r}")
        if len(self.params) != arity[self.shape]:
            raise FuzzyError(f"{self.shape} takes {arity[self.shape]} parameters, got {len(self.params)}")
        if any(not 0.0 <= x <= 1.0 for x in self.params):
            raise FuzzyError(f"label {self.name!r}: parameters must lie in [0, 1]")
        if list(self.params) != sorted(self.params):
            raise FuzzyError(f"label {self.name!r}: breakpoints must be non-decreasing")

    @property
    def corners(self) -> tuple[float, float, float, float]:
        """The trapezoid (a, b, c, d) equivalent of any shape."""
        p = self.params
        if self.shape == "crisp":
            return (p[0],) * 4
        if self.shape == "tri":
            return p[0], p[1], p[1], p[2]
        return p

    def __str__(self):
        return f"{self.shape}({','.join(_num(x) for x in self.params)})"


def crisp(v: float, name: str = "") -> FuzzyLabel:
    return FuzzyLabel(name or f"crisp_{v:g}", "crisp", (v,))


def triangular(a: float, b: float, c: float, name: str = "") -> FuzzyLabel:
    return FuzzyLabel(name or "tri", "tri", (a, b, c))


def trapezoidal(a: float, b: float, c: float, d: float, name: str = "") -> FuzzyLabel:
    return FuzzyLabel(name or "trap", "trap", (a, b, c, d))


# Default lexicon; redefinable per document.
LEXICON: dict[str, FuzzyLabel] = {
    "unlikely": trapezoidal(0.0, 0.0, 0.1, 0.3, name="unlikely"),
    "possible": triangular(0.3, 0.5, 0.7, name="possible"),
    "highly_probable": triangular(0.6, 0.8, 1.0, name="highly_probable"),
    "almost_certain": trapezoidal(0.8, 0.95, 1.0, 1.0, name="almost_certain"),
}


def _num(x: float) -> str:
    return repr(float(x)).removesuffix(".0") if float(x).is_integer() else repr(float(x))


def membership(label: FuzzyLabel, x: float) -> float:
    if not 0.0 <= x <= 1.0:
        raise FuzzyError(f"membership argument {x} outside [0, 1]")
    if label.shape == "crisp":
        return 1.0 if x == label.params[0] else 0.0
    a, b, c, d = label.corners
    if b <= x <= c:
        return 1.0
    if a < x < b:
        return (x - a) / (b - a)
    if c < x < d:
        return (d - x) / (d - c)
    return 0.0


def _mass_and_moment(label: FuzzyLabel) -> tuple[float, float]:
    # Exact integrals of mu and x*mu over the three linear pieces.
    a, b, c, d = label.corners
    mass = (c - a + d - b) / 2.0
    rise = (b - a) * (a + 2 * b) / 6.0  # int_a^b x (x-a)/(b-a) dx
    core = (c * c - b * b) / 2.0
    fall = (d - c) * (2 * c + d) / 6.0  # int_c^d x (d-x)/(d-c) dx
    return mass, rise + core + fall


def defuzzify_centroid(label: FuzzyLabel) -> float:
    if label.shape == "crisp":
        return label.params[0]
    mass, moment = _mass_and_moment(label)
    if mass <= 0.0:
        raise FuzzyError(f"label {label.name!r} has zero membership mass")
    return moment / mass


def alpha_cut(label: FuzzyLabel, alpha: float) -> tuple[float, float]:
    if not 0.0 < alpha <= 1.0:
        raise FuzzyError(f"alpha {alpha} outside (0, 1]")
    a, b, c, d = label.corners
    return a + alpha * (b - a), d - alpha * (d - c)


def sample_membership(label: FuzzyLabel, rng) -> float:
    """Draw x with density proportional to the label's membership.

    Uses the mixture of the rising ramp, the flat core and the falling
    ramp; each piece is sampled by inversion.
    """
    if label.shape == "crisp":
        return label.params[0]
    a, b, c, d = label.corners
    pieces = ((b - a) / 2.0, c - b, (d - c) / 2.0)
    total = sum(pieces)
    if total <= 0.0:
        raise FuzzyError(f"label {label.name!r} has zero membership mass")
    pick = rng.random() * total
    u = rng.random()
    if pick < pieces[0]:
        return a + (b - a) * math.sqrt(u)
    if pick < pieces[0] + pieces[1]:
        return b + (c - b) * u
    return d - (d - c) * math.sqrt(u)


class TNorm(enum.Enum):
    GODEL = "godel"
    PRODUCT = "product"
    LUKASIEWICZ = "lukasiewicz"


def _check_unit(*xs: float) -> None:
    for x in xs:
        if not 0.0 <= x <= 1.0:
            raise FuzzyError(f"operand {x} outside [0, 1]")


def tnorm(kind: TNorm | str, a: float, b: float) -> float:
    kind = TNorm(kind)
    _check_unit(a, b)
    if kind is TNorm.GODEL:
        return min(a, b)
    if kind is TNorm.PRODUCT:
        return a * b
    return max(a + b - 1.0, 0.0)


def tconorm(kind: TNorm | str, a: float, b: float) -> float:
    kind = TNorm(kind)
    _check_unit(a, b)
    if kind is TNorm.GODEL:
        return max(a, b)
    if kind is TNorm.PRODUCT:
        return a + b - a * b
    return min(a + b, 1.0)


def fuzzy_event_probability(memberships: Mapping, pmf: Mapping) -> float:
    """Probability of a fuzzy event over a discrete outcome space.

    The expectation of the membership degree under ``pmf``.
    """
    if set(memberships) != set(pmf):
        raise FuzzyError("membership and pmf are defined over different outcomes")
    if abs(math.fsum(pmf.values()) - 1.0) > 1e-9:
        raise FuzzyError("pmf does not sum to 1")
    for o, mu in memberships.items():
        _check_unit(mu)
        if pmf[o] < 0:
            raise FuzzyError(f"negative probability for outcome {o!r}")
    return math.fsum(memberships[o] * pmf[o] for o in pmf)
