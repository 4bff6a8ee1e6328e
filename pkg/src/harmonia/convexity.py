"""Sampling checks for harmonic convexity and the monotone/convex
classification table that relates it to ordinary convexity.

A harmonically convex ``f`` satisfies

    f(xy / (tx + (1-t)y)) <= t f(y) + (1-t) f(x)

for all ``x, y`` in a zero-free interval and ``t`` in ``[0, 1]``.  Sampling
cannot prove this; ``Verdict.HOLDS`` means no violation was found.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .expr import DomainError, FunctionSpec
from .quad import Interval

__all__ = [
    "Verdict",
    "Witness",
    "ConvexityVerdict",
    "FunctionTraits",
    "Implication",
    "DEFAULT_SAMPLES",
    "DEFAULT_TOL",
    "GRID_SHAPE",
    "defect",
    "check_harmonic_convexity",
    "check_via_reciprocal_transform",
    "function_traits",
    "classify_by_proposition",
]

DEFAULT_SAMPLES = 10_000
DEFAULT_TOL = 1e-9
GRID_SHAPE = (33, 33, 17)


class Verdict(str, enum.Enum):
    HOLDS = "holds"  # no violation found; not a proof
    FAILS = "fails"
    INCONCLUSIVE = "inconclusive"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Witness:
    """A triple at which the defining inequality is violated by ``violation``."""

    x: float
    y: float
    t: float
    violation: float


@dataclass(frozen=True)
class ConvexityVerdict:
    harmonically_convex: Verdict
    harmonically_concave: Verdict
    convex_witness: Witness | None = None
    concave_witness: Witness | None = None
    max_defect: float = 0.0
    min_defect: float = 0.0

    @property
    def witness(self) -> Witness | None:
        return self.convex_witness or self.concave_witness


def _as_interval(iv) -> Interval:
    return iv if isinstance(iv, Interval) else Interval(*iv)


def _harmonic_point(x, y, t):
    h = x * y / (t * x + (1.0 - t) * y)
    return np.clip(h, np.minimum(x, y), np.maximum(x, y))


def defect(fs: FunctionSpec, x: float, y: float, t: float) -> float:
    """``f(xy/(tx+(1-t)y)) - (t f(y) + (1-t) f(x))``; positive means a violation.

    Scalar re-evaluation used to certify witnesses independently of the
    vectorised sampler.
    """
    h = x * y / (t * x + (1.0 - t) * y)
    h = min(max(h, min(x, y)), max(x, y))
    return fs(h) - (t * fs(y) + (1.0 - t) * fs(x))


def _threshold(tol: float, *terms: np.ndarray) -> np.ndarray:
    # absolute tol for O(1) values, relative beyond; floating point cannot
    # resolve an absolute 1e-9 on values of size 1e8
    scale = sum(np.abs(term) for term in terms)
    return tol * np.maximum(1.0, scale)


def _triples(iv: Interval, samples: int, seed: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    nx, ny, nt = GRID_SHAPE
    gx = np.linspace(iv.a, iv.b, nx)
    gy = np.linspace(iv.a, iv.b, ny)
    gt = np.linspace(0.0, 1.0, nt)
    X, Y, T = (m.ravel() for m in np.meshgrid(gx, gy, gt, indexing="ij"))
    rng = np.random.default_rng(seed)
    rx = rng.uniform(iv.a, iv.b, samples)
    ry = rng.uniform(iv.a, iv.b, samples)
    rt = rng.uniform(0.0, 1.0, samples)
    return np.concatenate([X, rx]), np.concatenate([Y, ry]), np.concatenate([T, rt])


def _verdicts_from_defects(d, thr, x, y, t, fs, tol, to_witness):
    """Shared tail of both checkers: pick certified worst violations."""
    finite = np.isfinite(d)
    out = []
    for sign in (1.0, -1.0):
        s = sign * d
        over = finite & (s > thr)
        if not finite.all() and not over.any():
            out.append((Verdict.INCONCLUSIVE, None))
            continue
        if not over.any():
            out.append((Verdict.HOLDS, None))
            continue
        witness = None
        idx = np.flatnonzero(over)
        for i in idx[np.argsort(-s[idx], kind="stable")][:16]:
            w = to_witness(x[i], y[i], t[i], sign)
            if w is not None and w.violation > tol:
                witness = w
                break
        out.append((Verdict.FAILS, witness) if witness else (Verdict.HOLDS, None))
    return out


def _witness_from_triple(fs: FunctionSpec):
    def make(x, y, t, sign):
        v = sign * defect(fs, float(x), float(y), float(t))
        return Witness(float(x), float(y), float(t), v)

    return make


def check_harmonic_convexity(
    fs: FunctionSpec,
    iv,
    samples: int = DEFAULT_SAMPLES,
    tol: float = DEFAULT_TOL,
    seed: int = 42,
) -> ConvexityVerdict:
    """Sample the defining inequality on a 33x33x17 lattice plus ``samples``
    seeded random triples, in both the convex and concave directions."""
    iv = _as_interval(iv)
    if samples < 1:
        raise ValueError("samples must be at least 1")
    x, y, t = _triples(iv, samples, seed)
    fx, fy = fs.values(x), fs.values(y)
    fh = fs.values(_harmonic_point(x, y, t))
    combo = t * fy + (1.0 - t) * fx
    d = fh - combo
    thr = _threshold(tol, fh, t * fy, (1.0 - t) * fx)
    (cv, cw), (kv, kw) = _verdicts_from_defects(d, thr, x, y, t, fs, tol, _witness_from_triple(fs))
    return ConvexityVerdict(cv, kv, cw, kw, float(np.max(d)), float(np.min(d)))


def check_via_reciprocal_transform(
    fs: FunctionSpec,
    iv,
    samples: int = DEFAULT_SAMPLES,
    tol: float = DEFAULT_TOL,
    seed: int = 42,
) -> ConvexityVerdict:
    """Midpoint convexity of ``g(u) = f(1/u)`` on the reciprocal interval.

    ``f`` is harmonically convex on ``[a, b]`` exactly when ``g`` is convex
    between ``1/a`` and ``1/b``.  Since ``1/x`` is decreasing on either side
    of zero the image endpoints swap; they are sorted by value before
    sampling in both sign cases.  Failing pairs ``(u, v)`` are reported as
    ``(1/u, 1/v, 1/2)`` and re-certified on ``f`` directly.
    """
    iv = _as_interval(iv)
    if samples < 1:
        raise ValueError("samples must be at least 1")
    lo, hi = sorted((1.0 / iv.a, 1.0 / iv.b))
    n = GRID_SHAPE[0] * 4 + 1
    grid = np.linspace(lo, hi, n)
    U, V = (m.ravel() for m in np.meshgrid(grid, grid, indexing="ij"))
    rng = np.random.default_rng(seed)
    u = np.concatenate([U, rng.uniform(lo, hi, samples)])
    v = np.concatenate([V, rng.uniform(lo, hi, samples)])

    def g(w):
        return fs.values(np.clip(1.0 / w, iv.a, iv.b))

    gu, gv = g(u), g(v)
    gm = g(0.5 * (u + v))
    d = gm - 0.5 * (gu + gv)
    thr = _threshold(tol, gm, 0.5 * gu, 0.5 * gv)
    half = np.full_like(u, 0.5)
    with np.errstate(divide="ignore"):
        x, y = 1.0 / u, 1.0 / v
    (cv, cw), (kv, kw) = _verdicts_from_defects(d, thr, x, y, half, fs, tol, _witness_from_triple(fs))
    return ConvexityVerdict(cv, kv, cw, kw, float(np.max(d)), float(np.min(d)))


# ---------------------------------------------------------------------------
# Classification


@dataclass(frozen=True)
class FunctionTraits:
    convex: Verdict
    nondecreasing: Verdict
    nonincreasing: Verdict
    sign_of_domain: str  # "positive" | "negative"
    harmonically_convex: Verdict = Verdict.INCONCLUSIVE

    def __post_init__(self):
        if self.sign_of_domain not in ("positive", "negative"):
            raise ValueError(f"sign_of_domain must be 'positive' or 'negative', got {self.sign_of_domain!r}")


@dataclass(frozen=True)
class Implication:
    rule: int
    premises: tuple[str, ...]
    conclusion: str


_RULES = (
    Implication(1, ("convex", "nondecreasing", "positive"), "harmonically_convex"),
    Implication(2, ("harmonically_convex", "nonincreasing", "positive"), "convex"),
    Implication(3, ("harmonically_convex", "nondecreasing", "negative"), "convex"),
    Implication(4, ("convex", "nonincreasing", "negative"), "harmonically_convex"),
)


def classify_by_proposition(traits: FunctionTraits) -> tuple[Implication, ...]:
    """Return the applicable one-directional implications.

    Only premises that hold fire; inconclusive traits yield nothing.
    Converses are not implied.
    """
    facts = {traits.sign_of_domain}
    for name in ("convex", "nondecreasing", "nonincreasing", "harmonically_convex"):
        if getattr(traits, name) is Verdict.HOLDS:
            facts.add(name)
    return tuple(rule for rule in _RULES if set(rule.premises) <= facts)


def _monotone_from_values(fx: np.ndarray, tol: float) -> tuple[Verdict, Verdict]:
    steps = np.diff(fx)
    thr = tol * np.maximum(1.0, np.abs(fx[1:]) + np.abs(fx[:-1]))
    up = Verdict.FAILS if (steps < -thr).any() else Verdict.HOLDS
    down = Verdict.FAILS if (steps > thr).any() else Verdict.HOLDS
    return up, down


def function_traits(
    fs: FunctionSpec,
    iv,
    samples: int = DEFAULT_SAMPLES,
    tol: float = DEFAULT_TOL,
    seed: int = 42,
    harmonic: bool = True,
) -> FunctionTraits:
    """Determine traits numerically.

    Monotonicity comes from the sign of ``f'`` on a sample; if the derivative
    cannot be evaluated there, sorted adjacent values of ``f`` are compared
    instead.  Convexity is checked by midpoint sampling of ``f`` itself.
    """
    iv = _as_interval(iv)
    rng = np.random.default_rng(seed)
    xs = np.sort(np.concatenate([np.linspace(iv.a, iv.b, 257), rng.uniform(iv.a, iv.b, samples)]))
    try:
        dfx = fs.derivative_values(xs)
        fx = fs.values(xs)
        thr = tol * np.maximum(1.0, np.abs(fx))
        up = Verdict.FAILS if (dfx < -thr).any() else Verdict.HOLDS
        down = Verdict.FAILS if (dfx > thr).any() else Verdict.HOLDS
    except DomainError:
        up, down = _monotone_from_values(fs.values(xs), tol)

    grid = np.linspace(iv.a, iv.b, 129)
    U, V = (m.ravel() for m in np.meshgrid(grid, grid, indexing="ij"))
    u = np.concatenate([U, rng.uniform(iv.a, iv.b, samples)])
    v = np.concatenate([V, rng.uniform(iv.a, iv.b, samples)])
    fm = fs.values(0.5 * (u + v))
    fu, fv = fs.values(u), fs.values(v)
    d = fm - 0.5 * (fu + fv)
    convex = Verdict.FAILS if (d > _threshold(tol, fm, 0.5 * fu, 0.5 * fv)).any() else Verdict.HOLDS

    hconv = Verdict.INCONCLUSIVE
    if harmonic:
        hconv = check_harmonic_convexity(fs, iv, samples, tol, seed).harmonically_convex
    return FunctionTraits(convex, up, down, "positive" if iv.positive else "negative", hconv)
