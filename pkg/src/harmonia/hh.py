"""Harmonic Hermite-Hadamard triple, the derivative identity behind the
bound theorems, the power-mean and Hoelder bounds, and their constants."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .convexity import Verdict, check_harmonic_convexity
from .expr import FunctionSpec
from .quad import DEFAULT_TOL, Interval, integrate

__all__ = [
    "HHReport",
    "LemmaReport",
    "LambdaConstants",
    "MuConstants",
    "BoundParams",
    "BoundReport",
    "SERIES_THRESHOLD",
    "hh_triple",
    "lemma_identity_check",
    "lambda_constants",
    "mu_constants",
    "powermean_bound_check",
    "hoelder_bound_check",
]

# Below this relative width (b - a)/a the closed-form constants lose too many
# digits to cancellation and a power series in (b - a)/a is summed instead.
SERIES_THRESHOLD = 0.05
_SERIES_MAX_TERMS = 200
# Quadrature tolerance floor relative to int |integrand|; an absolute 1e-10
# is below round-off once the integrand reaches ~1e5.
REL_TOL = 1e-13
_EPS = 2.220446049250313e-16


def _as_interval(iv) -> Interval:
    return iv if isinstance(iv, Interval) else Interval(*iv)


def _require_positive(iv: Interval, what: str) -> None:
    if not iv.positive:
        raise ValueError(f"{what} is only defined for intervals in (0, inf), got [{iv.a}, {iv.b}]")


def _rounding_slack(*values: float) -> float:
    return 16.0 * _EPS * max(1.0, *(abs(v) for v in values))


# ---------------------------------------------------------------------------
# Hermite-Hadamard triple


@dataclass(frozen=True)
class HHReport:
    left: float
    middle: float
    right: float
    middle_error: float
    verdict_left: bool
    verdict_right: bool
    concave: bool = False

    @property
    def holds(self) -> bool:
        return self.verdict_left and self.verdict_right

    @property
    def gaps(self) -> tuple[float, float]:
        """``(middle - left, right - middle)``."""
        return self.middle - self.left, self.right - self.middle


def _middle(fs: FunctionSpec, iv: Interval, tol: float) -> tuple[float, float]:
    a, b = iv.a, iv.b
    scale = a * b / (b - a)
    f = fs._f
    # u = 1/x turns int_a^b f(x)/x^2 dx into int_{1/b}^{1/a} f(1/u) du,
    # exact for constants and free of the 1/x^2 weight
    r = integrate(lambda u: f(1.0 / u), 1.0 / b, 1.0 / a, tol / scale, rel_tol=REL_TOL)
    return scale * r.value, scale * r.error_estimate


def hh_triple(fs: FunctionSpec, iv, tol: float = DEFAULT_TOL, concave: bool = False) -> HHReport:
    """Evaluate ``f(2ab/(a+b)) <= ab/(b-a) * int_a^b f(x)/x^2 dx <= (f(a)+f(b))/2``.

    ``tol`` bounds the quadrature error of the middle member and is also the
    additive slack of both verdicts.  With ``concave=True`` the reversed chain
    is checked instead.
    """
    iv = _as_interval(iv)
    a, b = iv.a, iv.b
    left = fs(2.0 * a * b / (a + b))
    right = (fs(a) + fs(b)) / 2.0
    middle, middle_error = _middle(fs, iv, tol)
    slack = middle_error + tol + _rounding_slack(left, middle, right)
    if concave:
        verdict_left = middle <= left + slack
        verdict_right = right <= middle + slack
    else:
        verdict_left = left <= middle + slack
        verdict_right = middle <= right + slack
    return HHReport(left, middle, right, middle_error, verdict_left, verdict_right, concave)


# ---------------------------------------------------------------------------
# Identity


@dataclass(frozen=True)
class LemmaReport:
    lhs: float
    rhs: float
    gap: float
    lhs_error: float
    rhs_error: float
    scale: float = 1.0

    def holds(self, gap_tol: float = 1e-8) -> bool:
        """Gap within ``gap_tol`` relative to ``max(1, |f(a)|, |f(b)|)``."""
        return self.gap <= gap_tol * self.scale


def lemma_identity_check(fs: FunctionSpec, iv, tol: float = DEFAULT_TOL) -> LemmaReport:
    """Compare both sides of

        (f(a)+f(b))/2 - ab/(b-a) int_a^b f/x^2
            = ab(b-a)/2 int_0^1 (1-2t)/(tb+(1-t)a)^2 f'(ab/(tb+(1-t)a)) dt.

    The left side integrates ``f`` over ``[a, b]``; the right integrates the
    symbolic ``f'`` over ``[0, 1]``.  The kernel is signed, so it is smooth.
    """
    iv = _as_interval(iv)
    _require_positive(iv, "the derivative identity")
    a, b = iv.a, iv.b
    middle, middle_error = _middle(fs, iv, tol)
    lhs = (fs(a) + fs(b)) / 2.0 - middle

    df = fs._df
    ab = a * b

    def kernel(t: float) -> float:
        d = t * b + (1.0 - t) * a
        return (1.0 - 2.0 * t) / (d * d) * df(ab / d)

    scale = ab * (b - a) / 2.0
    r = integrate(kernel, 0.0, 1.0, tol / scale, rel_tol=REL_TOL)
    rhs = scale * r.value
    return LemmaReport(
        lhs, rhs, abs(lhs - rhs), middle_error, scale * r.error_estimate,
        max(1.0, abs(fs(a)), abs(fs(b))),
    )


# ---------------------------------------------------------------------------
# Constants


@dataclass(frozen=True)
class LambdaConstants:
    """Kernel integrals of the power-mean bound.

    ``lambda1 = int_0^1 |1-2t| / (tb+(1-t)a)^2 dt``, and ``lambda2`` /
    ``lambda3`` carry the extra weights ``t`` / ``1-t``.
    """

    lambda1: float
    lambda2: float
    lambda3: float


@dataclass(frozen=True)
class MuConstants:
    """``mu1 = int_0^1 t (tb+(1-t)a)^(-2q) dt``; ``mu2`` uses ``1-t``."""

    mu1: float
    mu2: float
    q: float


def _abs_kernel_moment(k: int) -> float:
    # int_0^1 |1-2t| t^k dt
    return (k + 0.5**k) / ((k + 1) * (k + 2))


def _lambda_series(a: float, r: float) -> LambdaConstants:
    # 1/(a + t(b-a))^2 = a^-2 sum_k (k+1) (-r t)^k
    s1 = s2 = s3 = 0.0
    m_k = _abs_kernel_moment(0)
    for k in range(_SERIES_MAX_TERMS):
        m_next = _abs_kernel_moment(k + 1)
        c = (k + 1) * (-r) ** k
        t1, t2, t3 = c * m_k, c * m_next, c * (m_k - m_next)
        s1, s2, s3 = s1 + t1, s2 + t2, s3 + t3
        if abs(t1) <= 1e-18 * abs(s1) and k > 2:
            break
        m_k = m_next
    a2 = a * a
    return LambdaConstants(s1 / a2, s2 / a2, s3 / a2)


def lambda_constants(iv) -> LambdaConstants:
    """The three power-mean constants for ``0 < a < b``.

    >>> lc = lambda_constants((1.0, 2.0))
    >>> round(lc.lambda1, 8), round(lc.lambda2, 8), round(lc.lambda3, 8)
    (0.26443393, 0.08891518, 0.17551875)
    """
    iv = _as_interval(iv)
    _require_positive(iv, "lambda constants")
    a, b = iv.a, iv.b
    d = b - a
    if d / a < SERIES_THRESHOLD:
        return _lambda_series(a, d / a)
    # ln((a+b)^2/(4ab)) == ln(1 + (b-a)^2/(4ab))
    log_term = math.log1p(d * d / (4.0 * a * b))
    lambda1 = 1.0 / (a * b) - 2.0 / d**2 * log_term
    lambda2 = -1.0 / (b * d) + (3.0 * a + b) / d**3 * log_term
    lambda3 = 1.0 / (a * d) - (3.0 * b + a) / d**3 * log_term
    return LambdaConstants(lambda1, lambda2, lambda3)


def _mu_series(a: float, r: float, q: float) -> tuple[float, float]:
    # (a + t(b-a))^(-2q) = a^(-2q) sum_k binom(-2q, k) (r t)^k
    s1 = s2 = 0.0
    c = 1.0
    for k in range(_SERIES_MAX_TERMS):
        t1 = c / (k + 2)
        t2 = c / ((k + 1) * (k + 2))
        s1, s2 = s1 + t1, s2 + t2
        if abs(t1) <= 1e-18 * abs(s1) and k > 2:
            break
        c *= (-2.0 * q - k) / (k + 1) * r
    scale = a ** (-2.0 * q)
    return scale * s1, scale * s2


def mu_constants(iv, q: float) -> MuConstants:
    """The two Hoelder-bound constants for ``0 < a < b`` and ``q > 1``.

    >>> mc = mu_constants((1.0, 2.0), 2.0)
    >>> round(mc.mu1 * 12, 12), round(mc.mu2 * 24, 12)
    (1.0, 5.0)
    """
    iv = _as_interval(iv)
    _require_positive(iv, "mu constants")
    q = float(q)
    if not q > 1.0:
        raise ValueError(f"mu constants require q > 1, got {q}")
    a, b = iv.a, iv.b
    d = b - a
    if d / a < SERIES_THRESHOLD:
        return MuConstants(*_mu_series(a, d / a, q), q)
    denom = 2.0 * d**2 * (1.0 - q) * (1.0 - 2.0 * q)
    mu1 = (a ** (2.0 - 2.0 * q) + b ** (1.0 - 2.0 * q) * (d * (1.0 - 2.0 * q) - a)) / denom
    mu2 = (b ** (2.0 - 2.0 * q) - a ** (1.0 - 2.0 * q) * (d * (1.0 - 2.0 * q) + b)) / denom
    return MuConstants(mu1, mu2, q)


# ---------------------------------------------------------------------------
# Bounds


@dataclass(frozen=True)
class BoundParams:
    q: float
    p: float | None = None

    @classmethod
    def powermean(cls, q: float) -> "BoundParams":
        q = float(q)
        if not q >= 1.0:
            raise ValueError(f"power-mean bound requires q >= 1, got {q}")
        return cls(q)

    @classmethod
    def hoelder(cls, q: float) -> "BoundParams":
        q = float(q)
        if not q > 1.0:
            raise ValueError(f"Hoelder bound requires q > 1, got {q}")
        return cls(q, q / (q - 1.0))


@dataclass(frozen=True)
class BoundReport:
    kind: str
    lhs_abs: float
    rhs: float
    slack: float
    params: BoundParams
    constants: dict = field(default_factory=dict)
    hypothesis_checked: bool = False
    hypothesis: Verdict | None = None

    @property
    def verdict(self) -> bool:
        return self.lhs_abs <= self.rhs + self.slack

    @property
    def tightness(self) -> float | None:
        """``lhs_abs / rhs``, or None when the bound is zero."""
        return self.lhs_abs / self.rhs if self.rhs > 0.0 else None


def _hypothesis(fs: FunctionSpec, iv: Interval, q: float, check: bool, seed: int):
    if not check:
        return False, None
    verdict = check_harmonic_convexity(fs.abs_derivative_power(q), iv, seed=seed)
    return True, verdict.harmonically_convex


def _lhs(fs: FunctionSpec, iv: Interval, tol: float) -> tuple[float, float]:
    middle, middle_error = _middle(fs, iv, tol)
    lhs = (fs(iv.a) + fs(iv.b)) / 2.0 - middle
    return abs(lhs), middle_error


def powermean_bound_check(
    fs: FunctionSpec,
    iv,
    q: float,
    tol: float = DEFAULT_TOL,
    check_hypothesis: bool = False,
    seed: int = 42,
) -> BoundReport:
    """Power-mean bound on the right Hermite-Hadamard gap.

    ``rhs = ab(b-a)/2 * lambda1^(1-1/q) * (lambda2 |f'(a)|^q + lambda3 |f'(b)|^q)^(1/q)``.
    The bound presumes ``|f'|^q`` is harmonically convex; that is only
    sampled when ``check_hypothesis`` is set, never enforced.
    """
    iv = _as_interval(iv)
    _require_positive(iv, "the power-mean bound")
    params = BoundParams.powermean(q)
    a, b = iv.a, iv.b
    lc = lambda_constants(iv)
    lhs_abs, middle_error = _lhs(fs, iv, tol)
    fa, fb = abs(fs.prime(a)) ** params.q, abs(fs.prime(b)) ** params.q
    # 0^0 := 1, so q = 1 drops the lambda1 factor entirely
    outer = 1.0 if params.q == 1.0 else lc.lambda1 ** (1.0 - 1.0 / params.q)
    inner = (lc.lambda2 * fa + lc.lambda3 * fb) ** (1.0 / params.q)
    rhs = a * b * (b - a) / 2.0 * outer * inner
    checked, hyp = _hypothesis(fs, iv, params.q, check_hypothesis, seed)
    return BoundReport(
        "powermean",
        lhs_abs,
        rhs,
        middle_error + tol + _rounding_slack(lhs_abs, rhs, fs(a), fs(b)),
        params,
        {"lambda1": lc.lambda1, "lambda2": lc.lambda2, "lambda3": lc.lambda3},
        checked,
        hyp,
    )


def hoelder_bound_check(
    fs: FunctionSpec,
    iv,
    q: float,
    tol: float = DEFAULT_TOL,
    check_hypothesis: bool = False,
    seed: int = 42,
) -> BoundReport:
    """Hoelder bound: ``ab(b-a)/2 * (1/(p+1))^(1/p) * (mu1 |f'(a)|^q + mu2 |f'(b)|^q)^(1/q)``."""
    iv = _as_interval(iv)
    _require_positive(iv, "the Hoelder bound")
    params = BoundParams.hoelder(q)
    a, b = iv.a, iv.b
    mc = mu_constants(iv, params.q)
    lhs_abs, middle_error = _lhs(fs, iv, tol)
    fa, fb = abs(fs.prime(a)) ** params.q, abs(fs.prime(b)) ** params.q
    p = params.p
    rhs = a * b * (b - a) / 2.0 * (1.0 / (p + 1.0)) ** (1.0 / p) * (mc.mu1 * fa + mc.mu2 * fb) ** (1.0 / params.q)
    checked, hyp = _hypothesis(fs, iv, params.q, check_hypothesis, seed)
    return BoundReport(
        "hoelder",
        lhs_abs,
        rhs,
        middle_error + tol + _rounding_slack(lhs_abs, rhs, fs(a), fs(b)),
        params,
        {"mu1": mc.mu1, "mu2": mc.mu2},
        checked,
        hyp,
    )
