"""System-agnostic metric dynamics: verification, refinement, brackets.

Works against a small structural protocol rather than a base class: a
system carries apply/apply_inv, dist, the expanding factor `lam`, the
expansivity threshold `xi`, a `diameter`, an `invertible` flag and
(optionally) bracket/triangle_vertex.  Symbolic systems additionally
expose integer `level` arithmetic, which the verifier uses to keep the
self-similarity check exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

_MODES = ("two_sided", "forward", "backward")


@dataclass(frozen=True)
class DynMode:
    """Orbit window for dynamical metrics: two_sided, forward or backward."""

    kind: str = "two_sided"
    n: int = 0

    def __post_init__(self):
        if self.kind not in _MODES:
            raise ValueError(f"kind must be one of {_MODES}")
        if self.n < 0:
            raise ValueError("window size must be nonnegative")


def dyn_metric(sys, x, y, mode):
    """max of dist over the orbit window selected by `mode`."""
    best = sys.dist(x, y)
    if mode.kind in ("two_sided", "forward"):
        fx, fy = x, y
        for _ in range(mode.n):
            fx, fy = sys.apply(fx), sys.apply(fy)
            best = max(best, sys.dist(fx, fy))
    if mode.kind in ("two_sided", "backward"):
        if not sys.invertible:
            raise ValueError("backward window needs an invertible system")
        bx, by = x, y
        for _ in range(mode.n):
            bx, by = sys.apply_inv(bx), sys.apply_inv(by)
            best = max(best, sys.dist(bx, by))
    return best


@dataclass
class VerifyReport:
    checked: int
    rejected: list
    max_rel_deviation: float
    mean_rel_deviation: float
    worst_pair: int | None
    tol: float
    passed: bool
    exact: bool = False


def verify_self_similar(sys, pairs, tol=None):
    """Check max{dist(f p, f q), dist(f^-1 p, f^-1 q)} = lam * dist(p, q).

    Pairs with dist > xi or dist = 0 are reported as rejected rather
    than silently skipped.  Systems with integer level arithmetic are
    verified exactly; float systems report relative deviations.
    """
    if tol is None:
        tol = getattr(sys, "tol_default", 1e-9)
    exact = hasattr(sys, "level")
    rejected = []
    devs = []
    worst = None
    for idx, (p, q) in enumerate(pairs):
        d = sys.dist(p, q)
        if d == 0.0:
            rejected.append((idx, "coincident pair"))
            continue
        if d > sys.xi:
            rejected.append((idx, "dist above xi"))
            continue
        if exact:
            lev = sys.level(p, q)
            img = min(
                sys.level(sys.apply(p), sys.apply(q)),
                sys.level(sys.apply_inv(p), sys.apply_inv(q)),
            )
            dev = 0.0 if img == lev - 1 else abs(sys.lam ** (lev - 1 - img) - 1.0)
        else:
            grown = max(
                sys.dist(sys.apply(p), sys.apply(q)),
                sys.dist(sys.apply_inv(p), sys.apply_inv(q)),
            )
            dev = abs(grown / (sys.lam * d) - 1.0)
        devs.append(dev)
        if worst is None or dev > devs[worst]:
            worst = len(devs) - 1
    max_dev = max(devs) if devs else 0.0
    mean_dev = sum(devs) / len(devs) if devs else 0.0
    return VerifyReport(
        checked=len(devs),
        rejected=rejected,
        max_rel_deviation=max_dev,
        mean_rel_deviation=mean_dev,
        worst_pair=worst,
        tol=tol,
        passed=bool(devs) and max_dev <= tol and not rejected,
        exact=exact,
    )


class RefinedSystem:
    """Truncated sup-refinement of an adapted base metric.

    dist(x, y) = max over the window |i| <= N of base.dist(f^i x, f^i y)
    divided by lam**|i|; one-sided bases use i >= 0 only.  The window N
    is chosen so the dropped terms are below `tol`, which makes the
    returned values exact whenever the true supremum exceeds
    diameter/lam**N (always the case at the scales the verifier uses).
    """

    def __init__(self, base, lam, tol, one_sided=False):
        if not lam > 1:
            raise ValueError("expanding factor must exceed 1")
        if not tol > 0:
            raise ValueError("tol must be positive")
        if not math.isfinite(base.diameter):
            raise ValueError("base metric must be bounded")
        self.base = base
        self.lam = float(lam)
        self.tol = float(tol)
        self.one_sided = one_sided
        self.window = max(
            0, math.ceil(math.log(base.diameter / tol) / math.log(lam))
        )
        self.xi = base.xi
        self.diameter = base.diameter
        self.invertible = (not one_sided) and base.invertible
        self.has_bracket = getattr(base, "has_bracket", False)
        self.tol_default = max(tol, 1e-12)
        self.space_kind = "wrapped-base-metric"

    def apply(self, x):
        return self.base.apply(x)

    def apply_inv(self, x):
        if self.one_sided:
            raise ValueError("one-sided system has no inverse")
        return self.base.apply_inv(x)

    def dist(self, x, y):
        best = self.base.dist(x, y)
        fx, fy = x, y
        for i in range(1, self.window + 1):
            fx, fy = self.base.apply(fx), self.base.apply(fy)
            best = max(best, self.base.dist(fx, fy) / self.lam ** i)
        if not self.one_sided:
            bx, by = x, y
            for i in range(1, self.window + 1):
                bx, by = self.base.apply_inv(bx), self.base.apply_inv(by)
                best = max(best, self.base.dist(bx, by) / self.lam ** i)
        return best

    def bracket(self, x, y):
        return self.base.bracket(x, y)

    def triangle_vertex(self, x, y):
        return self.base.triangle_vertex(x, y)

    def sample_points(self, count, seed=0):
        return self.base.sample_points(count, seed)


def refine_metric(base, lam, tol, one_sided=False):
    """Sup-refinement returning a self-similar system at factor lam."""
    return RefinedSystem(base, lam, tol, one_sided)


@dataclass
class HolderReport:
    c: float
    alpha: float
    violations: list
    max_ratio_pair: int | None


def holder_check(base_dist, refined_dist, samples, k, lam):
    """Fit the sandwich base <= refined <= c * base**alpha, alpha = log_k lam.

    `violations` lists sample indices breaking the lower bound; c is the
    smallest constant making the upper bound hold on the samples.
    """
    if not samples:
        raise ValueError("need at least one sample pair")
    if not k >= lam:
        raise ValueError("Lipschitz bound k must be at least lam")
    alpha = math.log(lam) / math.log(k)
    violations = []
    c = 0.0
    worst = None
    for idx, (x, y) in enumerate(samples):
        b = base_dist(x, y)
        r = refined_dist(x, y)
        if b == 0.0:
            raise ValueError("coincident sample pair")
        if r < b * (1 - 1e-12):
            violations.append(idx)
        ratio = r / b ** alpha
        if ratio > c:
            c = ratio
            worst = idx
    return HolderReport(c=c, alpha=alpha, violations=violations, max_ratio_pair=worst)


def bracket(sys, x, y):
    """Product-structure intersection point, delegated to the system."""
    if not getattr(sys, "has_bracket", False):
        raise ValueError("system has no bracket structure")
    return sys.bracket(x, y)


@dataclass
class TriangleReport:
    a: float
    b: float
    c0: float
    ratio: float
    scale: float


def triangle_ratio(sys, x, y):
    """Dynamical triangle statistics for a pair below scale xi/(2 lam).

    The third vertex z lies on the unstable set of x and the stable set
    of y; the report compares the hypotenuse dist(x, y) with the longer
    leg.
    """
    c0 = sys.dist(x, y)
    if c0 == 0.0:
        raise ValueError("coincident points give a degenerate triangle")
    if c0 > sys.xi / (2 * sys.lam):
        raise ValueError("pair above the triangle scale xi/(2 lam)")
    z = sys.triangle_vertex(x, y)
    a = sys.dist(x, z)
    b = sys.dist(z, y)
    m = max(a, b)
    if m == 0.0:
        raise ValueError("degenerate triangle: both legs vanish")
    return TriangleReport(a=a, b=b, c0=c0, ratio=c0 / m, scale=c0)


@dataclass
class ContractionReport:
    ratios: list
    max_deviation: float
    precondition_ok: bool
    first_bad_n: int | None


def stable_contraction_check(sys, x, y, side="stable", n_max=10):
    """Exact geometric decay along stable (f) or unstable (f^-1) sets.

    Reports dist(f^{+-n} x, f^{+-n} y) * lam**n / dist(x, y) for
    n = 1..n_max; a pair drifting above xi at some iterate is a
    precondition violation and is flagged with the first bad n.
    """
    d0 = sys.dist(x, y)
    if d0 == 0.0:
        raise ValueError("coincident points")
    if d0 > sys.xi:
        return ContractionReport([], math.inf, False, 0)
    if side == "stable":
        step = sys.apply
    elif side == "unstable":
        step = sys.apply_inv
    else:
        raise ValueError("side must be 'stable' or 'unstable'")
    ratios = []
    first_bad = None
    p, q = x, y
    for n in range(1, n_max + 1):
        p, q = step(p), step(q)
        d = sys.dist(p, q)
        if d > sys.xi:
            first_bad = n
            break
        ratios.append(d * sys.lam ** n / d0)
    max_dev = max((abs(r - 1.0) for r in ratios), default=0.0)
    return ContractionReport(
        ratios=ratios,
        max_deviation=max_dev,
        precondition_ok=first_bad is None,
        first_bad_n=first_bad,
    )


@dataclass
class HolonomyReport:
    observed: float
    bound: float | None
    m: int
    in_range: bool
    within_bound: bool | None
    precondition_ok: bool


def holonomy_deviation(sys, p, q, pp, qq, check_depth=5):
    """Distortion of a stable-set holonomy between two unstable plaques.

    p, q lie on one unstable plaque; pp, qq are their projections along
    stable sets onto another plaque.  With D = max of the two plaque
    distances and m the integer scale xi/lam**(m+1) < D <= xi/lam**m,
    the deviation |dist(pp,qq)/dist(p,q) - 1| is compared against
    2/(lam**(m-1) - 2) whenever lam**(m-1) > 2; smaller m is reported as
    out of range.
    """
    d = sys.dist(p, q)
    d_img = sys.dist(pp, qq)
    if d == 0.0 or d_img == 0.0:
        raise ValueError("coincident plaque pair")
    pre_ok = True
    a, b = p, q
    for _ in range(check_depth):
        a, b = sys.apply_inv(a), sys.apply_inv(b)
        if sys.dist(a, b) > sys.xi:
            pre_ok = False
            break
    for leg in ((p, pp), (q, qq)):
        if sys.dist(*leg) > sys.xi:
            pre_ok = False
        a, b = leg
        for _ in range(check_depth):
            a, b = sys.apply(a), sys.apply(b)
            if sys.dist(a, b) > sys.xi:
                pre_ok = False
                break
    big = max(d, d_img)
    m = int(math.floor(math.log(sys.xi / big) / math.log(sys.lam)))
    while sys.xi / sys.lam ** (m + 1) >= big:
        m += 1
    while sys.xi / sys.lam ** m < big:
        m -= 1
    observed = abs(d_img / d - 1.0)
    in_range = sys.lam ** (m - 1) > 2.0
    bound = 2.0 / (sys.lam ** (m - 1) - 2.0) if in_range else None
    return HolonomyReport(
        observed=observed,
        bound=bound,
        m=m,
        in_range=in_range,
        within_bound=(observed <= bound) if in_range else None,
        precondition_ok=pre_ok,
    )


@dataclass
class TriangleCurve:
    scales: list
    max_deviation: list


def triangle_curve(sys, pair_buckets):
    """Empirical (scale, max |ratio - 1|) curve from bucketed pairs.

    `pair_buckets` maps a scale to a list of pairs whose distance falls
    in that bucket; buckets are processed in decreasing scale order.
    """
    scales = sorted(pair_buckets, reverse=True)
    devs = []
    for s in scales:
        worst = 0.0
        for x, y in pair_buckets[s]:
            rep = triangle_ratio(sys, x, y)
            worst = max(worst, abs(rep.ratio - 1.0))
        devs.append(worst)
    return TriangleCurve(scales=list(scales), max_deviation=devs)
