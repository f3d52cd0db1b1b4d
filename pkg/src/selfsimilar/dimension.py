"""Covering numbers, capacity, entropy, and the identities tying them.

Symbolic systems get exact integer counts through window algebra, so
the only error in a capacity or entropy fit is the finite-scale
transient.  Toral systems get bracketed counts: a greedy cover from a
dense grid gives an upper bound, a separated packing gives a lower
bound, and fits use the geometric mean of the two.

Entropy follows the two-sided convention: covers refine under
max_{|k| <= n} dist(f^k x, f^k y), which doubles the standard
(one-sided) value.  Reports carry ent, ent+, ent-, and ent/2 so the
convention is never ambiguous.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .symbolic import count_words, exact_cov, spectral_radius


def _lsq(xs, ys):
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    if sxx == 0.0:
        raise ValueError("degenerate fit: all scales equal")
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    slope = sxy / sxx
    inter = my - slope * mx
    rms = math.sqrt(
        sum((y - (slope * x + inter)) ** 2 for x, y in zip(xs, ys)) / n
    )
    return slope, inter, rms


# -- covering counts ------------------------------------------------------


@dataclass(frozen=True)
class CovCount:
    """One covering-number evaluation; exact counts have lower == upper."""

    eps: float
    lower: int
    upper: int
    exact: bool
    method: str
    k: int = 0

    @property
    def value(self):
        return self.lower if self.exact else math.sqrt(self.lower * self.upper)

    def to_dict(self):
        return {
            "eps": self.eps, "lower": self.lower, "upper": self.upper,
            "exact": self.exact, "method": self.method, "k": self.k,
        }


@dataclass
class CoverReport:
    entries: list
    method: str

    def rows(self):
        return [(c.eps, c.lower, c.upper) for c in self.entries]

    def to_dict(self):
        return {"method": self.method,
                "entries": [c.to_dict() for c in self.entries]}


def _symbolic_cov(sys, eps, k):
    """Sets of d_k-diameter < eps are cylinders; count the minimal window.

    A window of radius w has d_k-diameter lam**(k-w), so the smallest
    admissible w solves lam**(k-w) < eps.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if eps > sys.diameter * sys.lam ** k:
        return 1
    w = 0
    while sys.lam ** (k - w) >= eps:
        w += 1
        if w > 100_000:
            raise ArithmeticError("covering window did not close")
    return count_words(sys.matrix, 2 * w + 1)


def _toral_metric_batch(sys, dx, dy, k):
    """Vector of d_k distances for wrapped offset arrays.

    Valid for deciding comparisons at radii well below the injectivity
    scale: the nine-translate minimum after wrapping equals the true
    metric whenever the true value is small, and overestimates
    otherwise, which preserves cover/packing decisions.
    """
    B = sys._B
    mats = {0: ((1, 0), (0, 1))}
    for i in range(1, k + 1):
        (a, b), (c, d) = mats[i - 1]
        (ma, mb), (mc, md) = sys.matrix
        mats[i] = ((ma * a + mb * c, ma * b + mb * d),
                   (mc * a + md * c, mc * b + md * d))
        (a, b), (c, d) = mats[-(i - 1)] if i > 1 else mats[0]
        (ia, ib), (ic, id_) = sys.inverse
        mats[-i] = ((ia * a + ib * c, ia * b + ib * d),
                    (ic * a + id_ * c, ic * b + id_ * d))
    out = None
    for i in range(-k, k + 1):
        (a, b), (c, d) = mats[i]
        vx = a * dx + b * dy
        vy = c * dx + d * dy
        vx -= np.round(vx)
        vy -= np.round(vy)
        best = None
        for wx in (-1.0, 0.0, 1.0):
            for wy in (-1.0, 0.0, 1.0):
                s = B[0][0] * (vx + wx) + B[0][1] * (vy + wy)
                u = B[1][0] * (vx + wx) + B[1][1] * (vy + wy)
                r = np.maximum(np.abs(s) ** sys.e_s, np.abs(u) ** sys.e_u)
                best = r if best is None else np.minimum(best, r)
        out = best if out is None else np.maximum(out, best)
    return out


def _toral_grid(sys, density):
    """Grid whose metric density is at most `density`; returns the bound."""
    beta_s = abs(sys._B[0][0]) + abs(sys._B[0][1])
    beta_u = abs(sys._B[1][0]) + abs(sys._B[1][1])

    def density_of(h):
        return max((beta_s * h / 2) ** sys.e_s, (beta_u * h / 2) ** sys.e_u)

    h = 2 * min(density ** (1 / sys.e_s) / beta_s,
                density ** (1 / sys.e_u) / beta_u)
    n = max(2, math.ceil(1.0 / h))
    while density_of(1.0 / n) > density:
        n += 1
    idx = (np.arange(n) + 0.5) / n
    xs, ys = np.meshgrid(idx, idx, indexing="ij")
    return xs.ravel(), ys.ravel(), density_of(1.0 / n)


def _bin_key_arrays(xs, ys, nb):
    return (np.minimum((xs * nb).astype(int), nb - 1),
            np.minimum((ys * nb).astype(int), nb - 1))


class _NeighborIndex:
    """3x3 wrapped bin lookup sized so a query radius spans one cell."""

    def __init__(self, sys, xs, ys, radius, k):
        ext_s = radius ** (1 / sys.e_s) * abs(sys.eig_unstable) ** (-k)
        ext_u = radius ** (1 / sys.e_u) * abs(sys.eig_unstable) ** (-k)
        vs, vu = sys.v_stable, sys.v_unstable
        bx = ext_s * abs(vs[0]) + ext_u * abs(vu[0])
        by = ext_s * abs(vs[1]) + ext_u * abs(vu[1])
        self.nb = max(1, int(1.0 / max(bx, by, 1e-12)))
        self.nb = min(self.nb, 4096)
        self.xs, self.ys = xs, ys
        bx_i, by_i = _bin_key_arrays(xs, ys, self.nb)
        self.bins = {}
        for i in range(len(xs)):
            self.bins.setdefault((bx_i[i], by_i[i]), []).append(i)
        self.bins = {key: np.array(v) for key, v in self.bins.items()}

    def candidates(self, i):
        nb = self.nb
        bx = min(int(self.xs[i] * nb), nb - 1)
        by = min(int(self.ys[i] * nb), nb - 1)
        chunks = []
        for ox in (-1, 0, 1):
            for oy in (-1, 0, 1):
                key = ((bx + ox) % nb, (by + oy) % nb)
                got = self.bins.get(key)
                if got is not None:
                    chunks.append(got)
        return np.concatenate(chunks) if chunks else np.empty(0, dtype=int)


def _toral_cov_bounds(sys, eps, k=0, density=None):
    if eps <= 0:
        raise ValueError("eps must be positive")
    if eps > sys.diameter * sys.lam ** k:
        return CovCount(eps, 1, 1, False, "greedy-upper/packing-lower", k)
    growth = sys.lam ** k
    if density is None:
        density = eps / (4 * growth)
    if density * growth > eps / 4 * (1 + 1e-12):
        raise ValueError(
            "sample too sparse for this scale: need density <= eps/4"
        )
    xs, ys, delta = _toral_grid(sys, density)
    delta_k = delta * growth

    r_cover = eps - delta_k
    index = _NeighborIndex(sys, xs, ys, eps, k)
    covered = np.zeros(len(xs), dtype=bool)
    upper = 0
    for i in range(len(xs)):
        if covered[i]:
            continue
        upper += 1
        cand = index.candidates(i)
        cand = cand[~covered[cand]]
        d = _toral_metric_batch(sys, xs[cand] - xs[i], ys[cand] - ys[i], k)
        covered[cand[d <= r_cover]] = True
        covered[i] = True

    sep = 2 * eps
    index2 = _NeighborIndex(sys, xs, ys, sep, k)
    kept = np.zeros(len(xs), dtype=bool)
    lower = 0
    for i in range(len(xs)):
        cand = index2.candidates(i)
        cand = cand[kept[cand]]
        if len(cand):
            d = _toral_metric_batch(sys, xs[cand] - xs[i], ys[cand] - ys[i], k)
            if bool(np.any(d <= sep)):
                continue
        kept[i] = True
        lower += 1
    return CovCount(eps, lower, upper, False, "greedy-upper/packing-lower", k)


def cov_eps(sys, eps, k=0, density=None):
    """Covering number at scale eps of the d_k metric (k=0: plain dist).

    Symbolic systems return the exact minimum; toral systems return a
    greedy upper bound and packing lower bound, refusing when the
    sample grid would be too sparse to trust.
    """
    if hasattr(sys, "matrix") and sys.space_kind == "symbolic":
        n = _symbolic_cov(sys, eps, k)
        if k == 0 and eps <= sys.diameter:
            check = exact_cov(sys, eps)
            if check != n:
                raise ArithmeticError(
                    f"window algebra disagrees with exact_cov at eps={eps}"
                )
        return CovCount(eps, n, n, True, "exact-symbolic", k)
    return _toral_cov_bounds(sys, eps, k, density)


# -- capacity --------------------------------------------------------------


@dataclass
class CapacityFit:
    slope: float
    intercept: float
    residual: float
    scales: list
    counts: list
    dropped: int
    method: str

    @property
    def value(self):
        return self.slope

    def to_dict(self):
        return {
            "slope": self.slope, "intercept": self.intercept,
            "residual": self.residual, "scales": list(self.scales),
            "counts": [float(c) for c in self.counts],
            "dropped": self.dropped, "method": self.method,
        }


def default_scales(sys):
    if sys.space_kind == "symbolic":
        return [2.0 ** -j for j in range(4, 15)]
    return [0.16 * 2.0 ** (-j / 2) for j in range(8)]


def capacity(sys, scales=None, drop=2):
    """Least-squares box-dimension fit over a geometric scale grid.

    The `drop` largest scales are excluded as transient; the residual
    of the surviving fit is reported, not hidden.
    """
    if scales is None:
        scales = default_scales(sys)
    if len(scales) < 4:
        raise ValueError("need at least 4 scales")
    scales = sorted(scales, reverse=True)
    entries = [cov_eps(sys, e) for e in scales]
    kept = entries[drop:]
    counts = [c.value for c in kept]
    if len(set(counts)) == 1:
        raise ValueError("degenerate fit: all covering counts equal")
    xs = [math.log(1.0 / c.eps) for c in kept]
    ys = [math.log(v) for v in counts]
    slope, inter, rms = _lsq(xs, ys)
    return CapacityFit(
        slope=slope, intercept=inter, residual=rms,
        scales=[c.eps for c in entries],
        counts=[c.value for c in entries],
        dropped=drop, method=entries[0].method,
    )


# -- entropy ---------------------------------------------------------------


@dataclass
class EntropyReport:
    ent: float
    ent_plus: float
    ent_minus: float
    standard: float
    gap_two_sided: float
    rows: list = field(repr=False)
    method: str = "exact-symbolic"

    def to_dict(self):
        return {
            "ent": self.ent, "ent_plus": self.ent_plus,
            "ent_minus": self.ent_minus, "standard": self.standard,
            "gap_two_sided": self.gap_two_sided, "rows": self.rows,
            "method": self.method,
        }


def _slope_over_n(rows):
    xs = [float(n) for n, _ in rows]
    ys = [v for _, v in rows]
    slope, _, _ = _lsq(xs, ys)
    return slope


def _symbolic_entropy(sys, n_max, n_min):
    # xi = 1/lam, so a d_n-ball of diameter < xi pins window n + 2
    two = [(n, math.log(count_words(sys.matrix, 2 * n + 5)))
           for n in range(n_min, n_max + 1)]
    fwd = [(n, math.log(count_words(sys.matrix, n + 5)))
           for n in range(n_min, n_max + 1)]
    bwd = [(n, math.log(count_words(sys.matrix.transpose(), n + 5)))
           for n in range(n_min, n_max + 1)]
    ent = _slope_over_n(two)
    ep = _slope_over_n(fwd)
    em = _slope_over_n(bwd)
    rows = [
        {"n": n, "two_sided": t, "forward": f, "backward": b}
        for (n, t), (_, f), (_, b) in zip(two, fwd, bwd)
    ]
    return EntropyReport(
        ent=ent, ent_plus=ep, ent_minus=em, standard=ent / 2,
        gap_two_sided=abs(ent - ep - em), rows=rows,
        method="exact-symbolic",
    )


def _toral_entropy(sys, n_max, n_min):
    """Bowen boxes in eigencoordinates: su rectangles with exact decay.

    A d_n-ball of radius xi is the su box with half-extents
    xi**(1/e) * mu**(-n) on each axis (the binding constraint sits at
    the window edge), so counts are bracketed by an area bound from
    below and a strip tiling from above.
    """
    mu = abs(sys.eig_unstable)
    vs, vu = sys.v_stable, sys.v_unstable
    det_v = abs(vs[0] * vu[1] - vs[1] * vu[0])
    w_s = abs(sys._B[0][0]) + abs(sys._B[0][1])
    w_u = abs(sys._B[1][0]) + abs(sys._B[1][1])

    def mean_log_count(h_s, h_u):
        lower = 1.0 / (4 * h_s * h_u * det_v)
        upper = math.ceil(w_s / (2 * h_s)) * math.ceil(w_u / (2 * h_u))
        return 0.5 * (math.log(lower) + math.log(max(upper, 1)))

    base_s = sys.xi ** (1 / sys.e_s)
    base_u = sys.xi ** (1 / sys.e_u)
    two, fwd, bwd = [], [], []
    for n in range(n_min, n_max + 1):
        shrink = mu ** -n
        two.append((n, mean_log_count(base_s * shrink, base_u * shrink)))
        fwd.append((n, mean_log_count(base_s, base_u * shrink)))
        bwd.append((n, mean_log_count(base_s * shrink, base_u)))
    ent = _slope_over_n(two)
    ep = _slope_over_n(fwd)
    em = _slope_over_n(bwd)
    rows = [
        {"n": n, "two_sided": t, "forward": f, "backward": b}
        for (n, t), (_, f), (_, b) in zip(two, fwd, bwd)
    ]
    return EntropyReport(
        ent=ent, ent_plus=ep, ent_minus=em, standard=ent / 2,
        gap_two_sided=abs(ent - ep - em), rows=rows,
        method="su-box-bounds",
    )


def entropy(sys, n_max=12, n_min=2):
    if n_max < 4:
        raise ValueError("n_max must be at least 4")
    if sys.space_kind == "symbolic":
        return _symbolic_entropy(sys, n_max, n_min)
    if not hasattr(sys, "eig_unstable"):
        raise ValueError("entropy needs a self-similar system")
    return _toral_entropy(sys, n_max, n_min)


# -- the fundamental equation ---------------------------------------------


@dataclass
class FundamentalReport:
    capacity: float
    ent: float
    lam: float
    rhs: float
    rel_gap: float
    capacity_fit: CapacityFit
    entropy_report: EntropyReport

    def to_dict(self):
        return {
            "capacity": self.capacity, "ent": self.ent, "lam": self.lam,
            "ent_over_log_lam": self.rhs, "rel_gap": self.rel_gap,
            "capacity_fit": self.capacity_fit.to_dict(),
            "entropy": self.entropy_report.to_dict(),
        }


def check_fundamental(sys, scales=None, n_max=12):
    """capacity == ent / log lam, both sides estimated independently."""
    fit = capacity(sys, scales)
    ent_rep = entropy(sys, n_max=n_max)
    rhs = ent_rep.ent / math.log(sys.lam)
    gap = abs(fit.slope - rhs) / max(abs(rhs), 1e-300)
    return FundamentalReport(
        capacity=fit.slope, ent=ent_rep.ent, lam=sys.lam, rhs=rhs,
        rel_gap=gap, capacity_fit=fit, entropy_report=ent_rep,
    )


# -- covering identity ------------------------------------------------------


@dataclass
class IdentityRow:
    k: int
    lhs: CovCount
    rhs: CovCount
    consistent: bool

    def to_dict(self):
        return {"k": self.k, "lhs": self.lhs.to_dict(),
                "rhs": self.rhs.to_dict(), "consistent": self.consistent}


def cov_identity_check(sys, k_max=6):
    """cov_{xi/lam^k}(dist) vs cov_xi(d_k): exact equality on shifts,
    bracket overlap on toral samples."""
    rows = []
    for k in range(k_max + 1):
        lhs = cov_eps(sys, sys.xi, k=k)
        # the scaled radius sits on a diameter boundary where covers are
        # strict; nudge down so rounding can never cross it from below
        rhs = cov_eps(sys, sys.xi * sys.lam ** -k * (1 - 1e-12))
        if lhs.exact and rhs.exact:
            ok = lhs.lower == rhs.lower
        else:
            ok = lhs.lower <= rhs.upper and rhs.lower <= lhs.upper
        rows.append(IdentityRow(k, lhs, rhs, ok))
    return rows


# -- ideal expanding factor --------------------------------------------------


@dataclass
class IdealFactor:
    lam_ideal: float
    ent: float
    dim: int
    lam: float | None
    bound_ok: bool | None

    def to_dict(self):
        return {"lam_ideal": self.lam_ideal, "ent": self.ent,
                "dim": self.dim, "lam": self.lam, "bound_ok": self.bound_ok}


def ideal_factor(ent, dim, lam=None):
    """e**(ent/dim), the largest factor the dimension bound permits."""
    if dim == 0:
        raise ValueError(
            "dim 0: totally disconnected space, the ideal factor is "
            "unbounded (lam_sup = +inf)"
        )
    if dim < 0:
        raise ValueError("dim must be a positive integer")
    if ent < 0:
        raise ValueError("entropy must be non-negative")
    ideal = math.exp(ent / dim)
    ok = None
    if lam is not None:
        ok = dim * math.log(lam) <= ent + 1e-12
    return IdealFactor(ideal, ent, dim, lam, ok)


# -- local unstable entropy --------------------------------------------------


@dataclass
class LocalEntropy:
    estimate: float
    rows: list
    method: str

    def to_dict(self):
        return {"estimate": self.estimate, "rows": self.rows,
                "method": self.method}


def local_unstable_entropy(sys, x, n_max=16, n_min=3):
    """Growth rate of forward refinements of one local unstable set."""
    if n_max < n_min + 2:
        raise ValueError("n_max too small for a slope")
    if sys.space_kind == "symbolic":
        state = x.at(0)
        ones = [1] * sys.matrix.n
        vec = ones
        counts = []
        for _ in range(n_max):
            vec = [sum(row[j] * vec[j] for j in range(sys.matrix.n))
                   for row in sys.matrix.rows]
            counts.append(vec[state])
        rows = [(n, math.log(counts[n - 1])) for n in range(n_min, n_max + 1)]
        return LocalEntropy(_slope_over_n(rows), rows, "forward-word-counts")
    mu = abs(sys.eig_unstable)
    # arc of u-length L stretches to L * mu**n, cut into unit-L pieces
    rows = [(n, math.log(math.ceil(mu ** n)))
            for n in range(n_min, n_max + 1)]
    return LocalEntropy(_slope_over_n(rows), rows, "unstable-arc-growth")


@dataclass
class LocalEntropySpread:
    estimates: list
    spread_rel: float
    reference: float
    max_rel_gap: float

    def to_dict(self):
        return {"estimates": self.estimates, "spread_rel": self.spread_rel,
                "reference": self.reference, "max_rel_gap": self.max_rel_gap}


def local_entropy_homogeneity(sys, xs, n_max=16):
    """Local unstable entropy across base points against ent/2."""
    ests = [local_unstable_entropy(sys, x, n_max).estimate for x in xs]
    if sys.space_kind == "symbolic":
        rho, _ = spectral_radius(sys.matrix)
        ref = math.log(rho)
    else:
        ref = math.log(abs(sys.eig_unstable))
    spread = (max(ests) - min(ests)) / ref
    gap = max(abs(e - ref) for e in ests) / ref
    return LocalEntropySpread(ests, spread, ref, gap)
