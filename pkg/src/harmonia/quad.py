"""Adaptive Simpson quadrature with Richardson error estimates."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

__all__ = [
    "DEFAULT_TOL",
    "DEFAULT_MAX_SUBDIVISIONS",
    "Interval",
    "QuadResult",
    "QuadratureError",
    "integrate",
    "integrate_kink_split",
]

DEFAULT_TOL = 1e-10
DEFAULT_MAX_SUBDIVISIONS = 10_000

# A panel whose Richardson difference is within this many ulps of its own
# value cannot be refined further; it is accepted with its honest estimate.
_ROUNDOFF_ULPS = 64.0
_EPS = 2.220446049250313e-16


class QuadratureError(ArithmeticError):
    """The integrand could not be integrated to the requested tolerance."""


@dataclass(frozen=True)
class Interval:
    """A closed interval ``[a, b]`` with ``a < b`` that excludes zero."""

    a: float
    b: float

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if not (math.isfinite(a) and math.isfinite(b)):
            raise ValueError(f"interval endpoints must be finite, got [{a}, {b}]")
        if not a < b:
            raise ValueError(f"interval requires a < b, got [{a}, {b}]")
        if a <= 0.0 <= b:
            raise ValueError(f"interval must exclude 0, got [{a}, {b}]")

    @property
    def positive(self) -> bool:
        return self.a > 0.0

    @property
    def width(self) -> float:
        return self.b - self.a


@dataclass(frozen=True)
class QuadResult:
    value: float
    error_estimate: float
    subdivisions: int

    def __add__(self, other: "QuadResult") -> "QuadResult":
        return QuadResult(
            self.value + other.value,
            self.error_estimate + other.error_estimate,
            self.subdivisions + other.subdivisions,
        )


def _sample(g: Callable[[float], float], x: float) -> float:
    y = g(x)
    if not math.isfinite(y):
        raise QuadratureError(f"non-finite integrand value {y!r} at {x!r}")
    return float(y)


def _l1_estimate(g: Callable[[float], float], lo: float, hi: float, panels: int = 64) -> float:
    h = (hi - lo) / (2 * panels)
    total = 0.0
    for i in range(2 * panels + 1):
        w = 1.0 if i in (0, 2 * panels) else (4.0 if i % 2 else 2.0)
        total += w * abs(_sample(g, lo + i * h))
    return total * h / 3.0


def integrate(
    g: Callable[[float], float],
    lo: float = 0.0,
    hi: float = 1.0,
    tol: float = DEFAULT_TOL,
    max_subdivisions: int = DEFAULT_MAX_SUBDIVISIONS,
    rel_tol: float = 0.0,
) -> QuadResult:
    """Integrate ``g`` over ``[lo, hi]`` by adaptive Simpson.

    A panel of width ``w`` is accepted once its Richardson estimate
    ``|S2 - S1| / 15`` is at most ``tol * w / (hi - lo)``, so the summed error
    estimate stays within ``tol``.  Accepted panels contribute the
    extrapolated value ``S2 + (S2 - S1) / 15``.  ``subdivisions`` counts the
    accepted panels; cubic polynomials are exact on the first panel.

    With ``rel_tol > 0`` the working tolerance is raised to
    ``rel_tol * int |g|`` when that is larger, the magnitude coming from a
    fixed 64-panel Simpson pass.  If a panel's estimate is already at the
    round-off level of its value it is accepted as is, and its (honest)
    estimate may then exceed the tolerance.
    """
    if not tol > 0.0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    lo, hi = float(lo), float(hi)
    if lo == hi:
        return QuadResult(0.0, 0.0, 0)
    if hi < lo:
        r = integrate(g, hi, lo, tol, max_subdivisions, rel_tol)
        return QuadResult(-r.value, r.error_estimate, r.subdivisions)

    span = hi - lo
    if rel_tol > 0.0:
        tol = max(tol, rel_tol * _l1_estimate(g, lo, hi))
    f_lo, f_hi = _sample(g, lo), _sample(g, hi)
    mid = 0.5 * (lo + hi)
    f_mid = _sample(g, mid)
    whole = span / 6.0 * (f_lo + 4.0 * f_mid + f_hi)

    values: list[float] = []
    error = 0.0
    bisections = 0
    stack = [(lo, mid, hi, f_lo, f_mid, f_hi, whole)]
    while stack:
        a, m, b, fa, fm, fb, s = stack.pop()
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = _sample(g, lm), _sample(g, rm)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        diff = left + right - s
        budget = 15.0 * tol * (b - a) / span
        roundoff = _ROUNDOFF_ULPS * _EPS * (abs(left) + abs(right))
        if abs(diff) <= budget or abs(diff) <= roundoff or not (a < lm < m < rm < b):
            values.append(left + right + diff / 15.0)
            error += abs(diff) / 15.0
            continue
        bisections += 1
        if bisections >= max_subdivisions:
            raise QuadratureError(
                f"subdivision cap {max_subdivisions} exceeded on [{lo}, {hi}] "
                f"(tolerance {tol:g}); integrand too rough for the tolerance"
            )
        # right half pushed first so panels are consumed left to right
        stack.append((m, rm, b, fm, frm, fb, right))
        stack.append((a, lm, m, fa, flm, fm, left))
    return QuadResult(math.fsum(values), error, len(values))


def integrate_kink_split(
    g: Callable[[float], float],
    lo: float,
    hi: float,
    kinks: Sequence[float],
    tol: float = DEFAULT_TOL,
    max_subdivisions: int = DEFAULT_MAX_SUBDIVISIONS,
    rel_tol: float = 0.0,
) -> QuadResult:
    """Integrate piecewise between known non-smooth points.

    The tolerance is shared among the pieces in proportion to their width.
    """
    points = [float(lo), *map(float, kinks), float(hi)]
    for left, right in zip(points, points[1:]):
        if not left < right:
            raise ValueError(f"kinks must be sorted and strictly inside [{lo}, {hi}], got {list(kinks)}")
    span = points[-1] - points[0]
    pieces = [
        integrate(g, left, right, tol * (right - left) / span, max_subdivisions, rel_tol)
        for left, right in zip(points, points[1:])
    ]
    return QuadResult(
        math.fsum(p.value for p in pieces),
        sum(p.error_estimate for p in pieces),
        sum(p.subdivisions for p in pieces),
    )
