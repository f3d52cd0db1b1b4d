"""Hausdorff measures on local stable/unstable sets and their product.

For the lam-adic metric any set of diameter below lam**-m sits inside
one cylinder, so the infimum over covers collapses to a dynamic
program over the cylinder tree:

    m(w) = min(diam(w)**d, sum over admissible children m(w a))

with leaves valued diam**d.  Diameters are the true metric diameters:
a cylinder whose continuation is forced for k steps is smaller than
its nominal scale by lam**-k, and a cylinder forced forever is a
single point.  The DP value depends on a cylinder only through its
last state and the remaining depth, which is what makes measures of
unstable windows independent of the plaque they sit on.

The intrinsic (maximal-entropy) measure of a box is the product of
the stable and unstable window measures at d = ent/(2 log lam).  The
paper's product display repeats the stable factor; the construction
requires stable times unstable and that is what is implemented.
Probabilities are normalized by the total mass of all boxes of the
same depth, since no normalization convention is given.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .symbolic import iter_words, parry_measure, spectral_radius


@dataclass(frozen=True)
class UnstableWindow:
    """Points sharing the anchor's coordinates at every i <= edge.

    The window at scale parameter lam**-(edge+1): edge 0 is the
    plaque usually written W^u at one half for lam = 2.
    """

    anchor: object
    edge: int = 0

    def scale(self, sys):
        return sys.lam ** -(self.edge + 1)

    @classmethod
    def at_scale(cls, sys, anchor, scale):
        m = math.ceil(math.log(1.0 / scale) / math.log(sys.lam) - 1e-12)
        return cls(anchor, m - 1)


@dataclass(frozen=True)
class StableWindow:
    """Points sharing the anchor's coordinates at every i >= -edge."""

    anchor: object
    edge: int = 0

    def scale(self, sys):
        return sys.lam ** -(self.edge + 1)

    @classmethod
    def at_scale(cls, sys, anchor, scale):
        m = math.ceil(math.log(1.0 / scale) / math.log(sys.lam) - 1e-12)
        return cls(anchor, m - 1)


def _slack(matrix, state):
    """Forced steps before the walk from `state` branches; None if never."""
    steps = 0
    seen = {state}
    cur = state
    while True:
        succ = matrix.successors[cur]
        if len(succ) > 1:
            return steps
        cur = succ[0]
        steps += 1
        if cur in seen:
            return None
        seen.add(cur)


class _SideDP:
    """Scale-free cylinder DP for one side of the shift.

    g(s, r) is the measure of a window with edge state s, in units of
    lam**(-edge*d); g(s, 0) is the true-diameter leaf value.
    """

    def __init__(self, matrix, lam, d):
        self.matrix = matrix
        self.lam = lam
        self.d = d
        self.shrink = lam ** -d
        g0 = []
        for s in range(matrix.n):
            k = _slack(matrix, s)
            g0.append(0.0 if k is None else lam ** (-k * d))
        self.tables = [g0]

    def g(self, state, depth):
        while len(self.tables) <= depth:
            prev = self.tables[-1]
            g0 = self.tables[0]
            nxt = [
                min(g0[s],
                    self.shrink * sum(prev[c]
                                      for c in self.matrix.successors[s]))
                for s in range(self.matrix.n)
            ]
            self.tables.append(nxt)
        return self.tables[depth][state]


_DP_CACHE = {}


def _dp(matrix, lam, d):
    key = (matrix, lam, d)
    got = _DP_CACHE.get(key)
    if got is None:
        got = _DP_CACHE[key] = _SideDP(matrix, lam, d)
    return got


@dataclass
class MeasureTree:
    """Result of the cylinder DP on one local window."""

    window: object
    d: float
    depth: int
    value: float
    value_deeper: float
    drift: float
    converged: bool
    leaf_diameter: float
    method: str = "cylinder-dp"
    _dp: object = field(repr=False, default=None)
    _root_state: int = field(repr=False, default=0)

    def node_value(self, extension=()):
        """m(w) for the window cylinder extended by `extension`."""
        if len(extension) > self.depth:
            raise ValueError("extension deeper than the DP horizon")
        state = self._root_state
        edge = self.window.edge
        for sym in extension:
            if sym not in self._dp.matrix.successors[state]:
                return 0.0
            state = sym
            edge += 1
        scale = self._dp.lam ** (-edge * self.d)
        return scale * self._dp.g(state, self.depth - len(extension))

    def node_true_diameter(self, extension=()):
        state = self._root_state
        edge = self.window.edge
        for sym in extension:
            if sym not in self._dp.matrix.successors[state]:
                raise ValueError("inadmissible extension")
            state = sym
            edge += 1
        k = _slack(self._dp.matrix, state)
        if k is None:
            return 0.0
        return self._dp.lam ** -(edge + k)

    def to_dict(self):
        return {
            "d": self.d, "depth": self.depth, "value": self.value,
            "value_deeper": self.value_deeper, "drift": self.drift,
            "converged": self.converged,
            "leaf_diameter": self.leaf_diameter, "method": self.method,
        }


def hausdorff_estimate(sys, window, d, depth=12):
    """DP value of mu^d on a stable or unstable window, with a depth
    drift check: the estimate at depth and depth + 2 must agree within
    1% to be flagged converged."""
    if d <= 0:
        raise ValueError("dimension exponent must be positive")
    if sys.space_kind != "symbolic":
        raise ValueError("cylinder DP needs a symbolic system; toral "
                         "measures are closed-form, see toral_measure_summary")
    if not sys.matrix.primitive:
        raise ValueError("hausdorff estimation needs a primitive matrix")
    if depth < 1:
        raise ValueError("depth must be at least 1")
    if isinstance(window, UnstableWindow):
        matrix = sys.matrix
        state = window.anchor.at(window.edge)
    elif isinstance(window, StableWindow):
        matrix = sys.matrix.transpose()
        state = window.anchor.at(-window.edge)
    else:
        raise TypeError("window must be UnstableWindow or StableWindow")
    dp = _dp(matrix, sys.lam, d)
    scale = sys.lam ** (-window.edge * d)
    value = scale * dp.g(state, depth)
    deeper = scale * dp.g(state, depth + 2)
    drift = abs(value - deeper) / value if value > 0 else 0.0
    return MeasureTree(
        window=window, d=d, depth=depth, value=value, value_deeper=deeper,
        drift=drift, converged=drift < 0.01,
        leaf_diameter=sys.lam ** -(window.edge + depth),
        _dp=dp, _root_state=state,
    )


def intrinsic_exponent(sys):
    """d = ent / (2 log lam), the product-measure exponent."""
    if sys.space_kind == "symbolic":
        rho, _ = spectral_radius(sys.matrix)
        return math.log(rho) / math.log(sys.lam)
    if not hasattr(sys, "eig_unstable"):
        raise ValueError("intrinsic exponent needs a self-similar system")
    return math.log(abs(sys.eig_unstable)) / math.log(sys.lam)


# -- boxes -------------------------------------------------------------------


@dataclass(frozen=True)
class Box:
    """Two-sided cylinder: word occupies [start, start + len - 1] and
    must span coordinate 0 so the stable/unstable split is defined."""

    word: tuple
    start: int

    @property
    def end(self):
        return self.start + len(self.word) - 1

    @classmethod
    def from_point(cls, x, past_depth, future_depth):
        return cls(tuple(x.window(-past_depth, future_depth)), -past_depth)


@dataclass
class BoxMeasure:
    stable: float
    unstable: float
    product: float
    plaque_gap: float
    d: float
    depth: int
    admissible: bool = True

    def to_dict(self):
        return {
            "stable": self.stable, "unstable": self.unstable,
            "product": self.product, "plaque_gap": self.plaque_gap,
            "d": self.d, "depth": self.depth, "admissible": self.admissible,
        }


def _anchor_through(sys, word, start):
    """Some admissible point whose [start, end] window equals `word`."""
    left = sys.matrix.cycle_word(word[0])
    tail = sys.matrix.cycle_word(word[-1])
    if left is None or tail is None:
        raise ValueError("box word has no bi-infinite extension")
    right = tail[1:] + tail[:1]
    return sys.point(left, word, right, start)


def box_measure(sys, box, d=None, depth=12):
    """Product of the stable and unstable window measures of the box."""
    if not isinstance(box, Box):
        raise TypeError("box must be a Box")
    if sys.space_kind != "symbolic":
        raise ValueError("boxes are symbolic; toral measures are closed-form")
    if box.start > 0 or box.end < 0:
        raise ValueError("box must span coordinate 0")
    n = sys.matrix.n
    if any(not 0 <= s < n for s in box.word):
        raise ValueError("box word has out-of-range symbols")
    if d is None:
        d = intrinsic_exponent(sys)
    ok = all(sys.matrix.rows[a][b] for a, b in zip(box.word, box.word[1:]))
    if not ok:
        return BoxMeasure(0.0, 0.0, 0.0, 0.0, d, depth, admissible=False)
    a = -box.start
    b = box.end
    anchor = _anchor_through(sys, box.word, box.start)
    unstable = hausdorff_estimate(sys, UnstableWindow(anchor, b), d, depth)
    stable = hausdorff_estimate(sys, StableWindow(anchor, a), d, depth)

    # holonomy independence: recompute the unstable factor from a
    # plaque with a different past whenever the matrix offers one
    gap = 0.0
    tail = sys.matrix.cycle_word(box.word[-1])
    right = tail[1:] + tail[:1]  # phase: starts one step past word[-1]
    for t in sys.matrix.predecessors[box.word[0]]:
        cyc = sys.matrix.cycle_word(t)
        if cyc is None:
            continue
        shifted = sys.point(cyc, (t,) + box.word, right, box.start - 1)
        other = hausdorff_estimate(sys, UnstableWindow(shifted, b), d, depth)
        gap = max(gap, abs(other.value - unstable.value))
    return BoxMeasure(
        stable=stable.value, unstable=unstable.value,
        product=stable.value * unstable.value,
        plaque_gap=gap, d=d, depth=depth,
    )


# -- scaling -----------------------------------------------------------------


@dataclass
class ScalingReport:
    ratio: float
    expected: float
    rel_gap: float
    side: str
    depth: int

    def to_dict(self):
        return {"ratio": self.ratio, "expected": self.expected,
                "rel_gap": self.rel_gap, "side": self.side,
                "depth": self.depth}


def scaling_check(sys, window, d=None, depth=12):
    """mu^d(f(window)) / mu^d(window) against lam**(+-d).

    f shifts an unstable window's edge down by one (measure grows by
    lam**d) and a stable window's edge up by one (shrinks by lam**d).
    """
    if d is None:
        d = intrinsic_exponent(sys)
    before = hausdorff_estimate(sys, window, d, depth).value
    image_anchor = sys.apply(window.anchor)
    if isinstance(window, UnstableWindow):
        image = UnstableWindow(image_anchor, window.edge - 1)
        expected = sys.lam ** d
        side = "unstable"
    else:
        image = StableWindow(image_anchor, window.edge + 1)
        expected = sys.lam ** -d
        side = "stable"
    after = hausdorff_estimate(sys, image, d, depth).value
    ratio = after / before
    return ScalingReport(
        ratio=ratio, expected=expected,
        rel_gap=abs(ratio - expected) / expected, side=side, depth=depth,
    )


# -- homogeneity -------------------------------------------------------------


@dataclass
class HomogeneityReport:
    c_observed: float
    rows: list
    flat_ratio: float
    trend: float
    passed: bool
    delta: float
    eps: float
    d: float
    depth: int

    def to_dict(self):
        return {
            "c_observed": self.c_observed, "rows": self.rows,
            "flat_ratio": self.flat_ratio, "trend": self.trend,
            "passed": self.passed, "delta": self.delta, "eps": self.eps,
            "d": self.d, "depth": self.depth,
        }


def _edge_at(sys, scale):
    return math.ceil(math.log(1.0 / scale) / math.log(sys.lam) - 1e-12) - 1


def homogeneity_check(sys, xs, n_range=(1, 10), delta=None, eps=None,
                      depth=12, flat_tol=1e-9):
    """Ratios of product masses of the forward boxes C^n across points.

    C^n at scale del is the box with stable window at del and unstable
    window at del / lam**n.  The constant c_observed is the largest
    mass ratio across base points; flat in n means homogeneous.
    """
    if sys.space_kind != "symbolic":
        raise ValueError("homogeneity check is symbolic-only; the toral "
                         "intrinsic measure is Lebesgue, hence homogeneous")
    if not xs:
        raise ValueError("need at least one base point")
    if delta is None:
        delta = sys.xi / sys.lam
    if eps is None:
        eps = delta
    if not (delta < sys.xi and eps < sys.xi):
        raise ValueError("box scales must sit below xi")
    d = intrinsic_exponent(sys)
    dp_u = _dp(sys.matrix, sys.lam, d)
    dp_s = _dp(sys.matrix.transpose(), sys.lam, d)
    lam = sys.lam

    def mass(x, scale_s, n):
        e_s = _edge_at(sys, scale_s)
        e_u = _edge_at(sys, scale_s) + n
        v_s = lam ** (-e_s * d) * dp_s.g(x.at(-e_s), depth)
        v_u = lam ** (-e_u * d) * dp_u.g(x.at(e_u), depth)
        return v_s * v_u

    rows = []
    ratios = []
    for n in range(n_range[0], n_range[1] + 1):
        num = [mass(x, delta, n) for x in xs]
        den = [mass(x, eps, n) for x in xs]
        ratio = max(num) / min(den)
        rows.append({"n": n, "max_mass": max(num), "min_mass": min(den),
                     "ratio": ratio})
        ratios.append(ratio)
    c_obs = max(ratios)
    flat = max(ratios) / min(ratios)
    if len(ratios) > 1:
        n0 = n_range[0]
        xs_fit = list(range(n0, n0 + len(ratios)))
        mx = sum(xs_fit) / len(xs_fit)
        my = sum(math.log(r) for r in ratios) / len(ratios)
        trend = sum((x - mx) * (math.log(r) - my)
                    for x, r in zip(xs_fit, ratios))
        trend /= sum((x - mx) ** 2 for x in xs_fit)
    else:
        trend = 0.0
    passed = flat <= 1.0 + flat_tol and math.isfinite(c_obs)
    return HomogeneityReport(
        c_observed=c_obs, rows=rows, flat_ratio=flat, trend=trend,
        passed=passed, delta=delta, eps=eps, d=d, depth=depth,
    )


# -- Parry comparison --------------------------------------------------------


@dataclass
class ParryReport:
    depth: int
    max_rel_gap: float
    total_mass: float
    rows: list = field(repr=False)

    def to_dict(self):
        return {
            "depth": self.depth, "max_rel_gap": self.max_rel_gap,
            "total_mass": self.total_mass,
            "rows": [
                {"word": list(w), "dp": a, "parry": b, "rel_gap": g}
                for w, a, b, g in self.rows
            ],
        }


def parry_compare(sys, depth, dp_depth=32):
    """Normalized depth-k box masses against the Parry measure."""
    if sys.space_kind != "symbolic":
        raise ValueError("parry comparison is symbolic-only")
    if not sys.matrix.primitive:
        raise ValueError("parry comparison needs a mixing (primitive) SFT")
    d = intrinsic_exponent(sys)
    dp_u = _dp(sys.matrix, sys.lam, d)
    dp_s = _dp(sys.matrix.transpose(), sys.lam, d)
    scale = sys.lam ** (-2 * depth * d)
    masses = []
    words = list(iter_words(sys.matrix, 2 * depth + 1))
    for w in words:
        masses.append(scale * dp_s.g(w[0], dp_depth) * dp_u.g(w[-1], dp_depth))
    total = sum(masses)
    rows = []
    worst = 0.0
    for w, m in zip(words, masses):
        p = parry_measure(sys.matrix, w)
        gap = abs(m / total - p) / p
        worst = max(worst, gap)
        rows.append((w, m / total, p, gap))
    return ParryReport(depth=depth, max_rel_gap=worst, total_mass=total,
                       rows=rows)


# -- toral closed form -------------------------------------------------------


def toral_measure_summary(sys):
    """Closed-form intrinsic-measure facts for a toral system.

    The unstable exponent satisfies d * e_u = 1, so the Hausdorff
    measure of an unstable plaque is exactly its eigencoordinate
    length and the intrinsic measure is normalized Lebesgue area; no
    numeric estimator is needed or shipped.
    """
    d = intrinsic_exponent(sys)
    mu = abs(sys.eig_unstable)
    length = 2 * sys.xi ** (1 / sys.e_u)
    return {
        "d": d,
        "plaque_u_length": length,
        "image_u_length": mu * length,
        "scaling_ratio": mu,
        "scaling_expected": sys.lam ** d,
        "scaling_gap": abs(mu - sys.lam ** d),
        "exponent_product": d * sys.e_u,
    }
