"""Two-argument means and the Hermite-Hadamard corollaries built on them.

Every mean is evaluated as ``a * F(r)`` with ``r = b/a - 1``, which makes
homogeneity exact up to rounding and lets near-equal arguments switch to a
series in ``r``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .expr import parse
from .hh import hh_triple
from .quad import DEFAULT_TOL

__all__ = [
    "MeanValues",
    "PropositionReport",
    "NEAR_EQUAL",
    "PROPOSITIONS",
    "arithmetic",
    "geometric",
    "harmonic",
    "logarithmic",
    "identric",
    "p_logarithmic",
    "compute_means",
    "lp_monotonicity_check",
    "default_p_grid",
    "proposition_check",
]

# relative gap below which L, I and L_p use their series
NEAR_EQUAL = 1e-8
PROPOSITIONS = ("3.1", "3.2", "3.3", "3.4")
_EPS = 2.220446049250313e-16


def _normalize(a: float, b: float) -> tuple[float, float]:
    a, b = float(a), float(b)
    if not (a > 0.0 and b > 0.0) or not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError(f"means require strictly positive finite arguments, got ({a}, {b})")
    return (a, b) if a <= b else (b, a)


def arithmetic(a: float, b: float) -> float:
    return (a + b) / 2.0


def geometric(a: float, b: float) -> float:
    return math.sqrt(a * b)


def harmonic(a: float, b: float) -> float:
    return 2.0 * a * b / (a + b)


def logarithmic(a: float, b: float) -> float:
    """``(b - a) / (ln b - ln a)``, equal to ``a`` when ``a == b``."""
    a, b = _normalize(a, b)
    r = b / a - 1.0
    if r < NEAR_EQUAL:
        return a * (1.0 + r / 2.0 - r * r / 12.0)
    return a * r / math.log1p(r)


def identric(a: float, b: float) -> float:
    """``(1/e) (b^b / a^a)^(1/(b-a))``, equal to ``a`` when ``a == b``."""
    a, b = _normalize(a, b)
    r = b / a - 1.0
    if r < NEAR_EQUAL:
        return a * (1.0 + r / 2.0 - r * r / 24.0)
    # ln(I/a) = (1+r) ln(1+r) / r - 1
    return a * math.exp((1.0 + r) * math.log1p(r) / r - 1.0)


def _log_expm1(z: float) -> float:
    # ln|e^z - 1|
    if z > 30.0:
        return z + math.log1p(-math.exp(-z))
    return math.log(abs(math.expm1(z)))


def p_logarithmic(a: float, b: float, p: float) -> float:
    """``((b^(p+1) - a^(p+1)) / ((p+1)(b-a)))^(1/p)``.

    ``p = -1`` and ``p = 0`` return the logarithmic and identric means, the
    continuous extensions at those points.
    """
    a, b = _normalize(a, b)
    p = float(p)
    if p == -1.0:
        return logarithmic(a, b)
    if p == 0.0:
        return identric(a, b)
    r = b / a - 1.0
    if r < NEAR_EQUAL:
        return a * (1.0 + r / 2.0 + (p - 1.0) * r * r / 24.0)
    s = math.log1p(r)
    if abs(p) < 0.5:
        # the mean value ((1+r)^(p+1) - 1) / ((p+1) r) written as
        # (1 + w) / (1 + p), both factors O(p) away from 1, so dividing the
        # log by p loses nothing as p -> 0
        w = math.expm1(p * s) / -math.expm1(-s)
        log_base = math.log1p(w) - math.log1p(p)
    else:
        log_base = _log_expm1((p + 1.0) * s) - math.log(abs(p + 1.0) * r)
    return a * math.exp(log_base / p)


@dataclass(frozen=True)
class MeanValues:
    A: float
    G: float
    H: float
    L: float
    I: float  # noqa: E741
    Lp: tuple[float, float] | None = None

    def chain(self) -> tuple[float, float, float, float, float]:
        return self.H, self.G, self.L, self.I, self.A

    def chain_holds(self, strict: bool = False) -> bool:
        values = self.chain()
        if strict:
            return all(lo < hi for lo, hi in zip(values, values[1:]))
        slack = 4.0 * _EPS * self.A
        return all(lo <= hi + slack for lo, hi in zip(values, values[1:]))


def compute_means(a: float, b: float, p: float | None = None) -> MeanValues:
    """All the means of ``a`` and ``b`` (order irrelevant, both > 0).

    >>> m = compute_means(1.0, 2.0)
    >>> round(m.L, 8), round(m.I, 8)
    (1.44269504, 1.47151776)
    """
    a, b = _normalize(a, b)
    lp = None
    if p is not None:
        if p in (-1.0, 0.0):
            raise ValueError(f"p must not be -1 or 0, got {p}")
        lp = (float(p), p_logarithmic(a, b, p))
    return MeanValues(
        A=arithmetic(a, b),
        G=geometric(a, b),
        H=harmonic(a, b),
        L=logarithmic(a, b),
        I=identric(a, b),
        Lp=lp,
    )


def default_p_grid(n: int = 50, lo: float = -5.0, hi: float = 5.0) -> list[float]:
    """``n`` sorted points in ``[lo, hi]`` that include -1 and 0."""
    base = np.linspace(lo, hi, n - 2)
    return sorted({*map(float, base), -1.0, 0.0})


def lp_monotonicity_check(a: float, b: float, p_grid) -> bool:
    """True iff ``L_p(a, b)`` is nondecreasing along the sorted ``p_grid``."""
    a, b = _normalize(a, b)
    values = [p_logarithmic(a, b, p) for p in sorted(p_grid)]
    slack = 1e-12 * b
    return all(lo <= hi + slack for lo, hi in zip(values, values[1:]))


# ---------------------------------------------------------------------------
# Corollaries of the harmonic Hermite-Hadamard inequality


@dataclass(frozen=True)
class PropositionReport:
    which: str
    a: float
    b: float
    p: float | None
    lhs: float
    mid: float
    rhs: float
    holds: bool
    hh_lhs: float
    hh_mid: float
    hh_rhs: float
    agreement: float  # largest scaled difference between the two paths
    agrees: bool


def _generator(which: str, p: float | None) -> str:
    if which == "3.1":
        return "x"
    if which == "3.2":
        return "x^2"
    if which == "3.3":
        return f"x^{p + 2.0!r}"
    return "x^2*ln(x)"


def _members(which: str, a: float, b: float, p: float | None) -> tuple[float, float, float]:
    m = compute_means(a, b)
    if which == "3.1":
        return m.H, m.G**2 / m.L, m.A
    if which == "3.2":
        return m.H**2, m.G**2, arithmetic(a * a, b * b)
    if which == "3.3":
        k = p + 2.0
        return m.H**k, m.G**2 * p_logarithmic(a, b, p) ** p, arithmetic(a**k, b**k)
    return (
        m.H**2 * math.log(m.H),
        m.G**2 * math.log(m.I),
        arithmetic(a * a * math.log(a), b * b * math.log(b)),
    )


def proposition_check(
    which: str,
    a: float,
    b: float,
    p: float | None = None,
    tol: float = DEFAULT_TOL,
    agreement_tol: float = 1e-8,
) -> PropositionReport:
    """Check one of the mean inequalities obtained from the harmonic
    Hermite-Hadamard chain with ``f`` = x, x^2, x^(p+2) or x^2 ln x.

    Members come from the closed-form means and, independently, from
    :func:`hh_triple` on the generating function.  Paths agree when every
    member differs by at most ``agreement_tol * max(1, |member|)``.
    """
    which = str(which)
    if which not in PROPOSITIONS:
        raise ValueError(f"unknown proposition {which!r}; expected one of {PROPOSITIONS}")
    a, b = float(a), float(b)
    if not 0.0 < a < b:
        raise ValueError(f"propositions require 0 < a < b, got ({a}, {b})")
    if which == "3.3":
        if p is None or not p > -1.0 or p == 0.0:
            raise ValueError(f"proposition 3.3 requires p in (-1, inf) minus {{0}}, got {p}")
        p = float(p)
    else:
        p = None
    lhs, mid, rhs = _members(which, a, b, p)
    report = hh_triple(parse(_generator(which, p)), (a, b), tol)
    pairs = ((lhs, report.left), (mid, report.middle), (rhs, report.right))
    agreement = max(abs(u - v) / max(1.0, abs(u)) for u, v in pairs)
    slack = 16.0 * _EPS * max(1.0, abs(lhs), abs(mid), abs(rhs))
    holds = lhs <= mid + slack and mid <= rhs + slack
    return PropositionReport(
        which, a, b, p, lhs, mid, rhs, holds,
        report.left, report.middle, report.right,
        agreement, agreement <= agreement_tol,
    )
