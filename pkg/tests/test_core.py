"""Metric-side checks: the one-step identity, refinement, brackets,
triangles, contraction along invariant sets, and holonomy distortion.

Shift-space cases have exact expected values (the metric is a power of
lam); the wrapped-circle cases below have closed forms worked out by hand:
refining an already adapted metric returns it unchanged, and refining the
clipped arc metric at sqrt(2) lands within a 2**(1/4) band of
sqrt(0.3 * arc), pinning the Holder data.
"""

import math
from random import Random

import pytest

from selfsimilar.core import (
    DynMode,
    bracket,
    dyn_metric,
    holder_check,
    holonomy_deviation,
    refine_metric,
    stable_contraction_check,
    triangle_curve,
    triangle_ratio,
    verify_self_similar,
)
from selfsimilar.torus import CircleDoubling

PHI = (1.0 + math.sqrt(5.0)) / 2.0


class PowerWarp:
    """Shift metric raised to the 0.9 power: deliberately not self-similar."""

    invertible = True
    tol_default = 1e-9

    def __init__(self, base):
        self._base = base
        self.lam = base.lam
        self.xi = base.xi**0.9
        self.diameter = base.diameter**0.9

    def apply(self, x):
        return self._base.apply(x)

    def apply_inv(self, x):
        return self._base.apply_inv(x)

    def dist(self, x, y):
        return self._base.dist(x, y) ** 0.9


class TruncatedArc:
    """Arc metric clipped at 0.3: bounded distortion of the doubling metric
    but not adapted to any expansion rate."""

    space_kind = "wrapped-base-metric"
    invertible = False
    has_bracket = False
    lam = 2.0
    xi = 0.25
    diameter = 0.3

    def __init__(self):
        self._arc = CircleDoubling()

    def apply(self, x):
        return self._arc.apply(x)

    def dist(self, x, y):
        return min(self._arc.dist(x, y), 0.3)


def circle_pairs(seed, per_scale=40, scale_exps=range(2, 14)):
    rng = Random(seed)
    pairs = []
    for e in scale_exps:
        for _ in range(per_scale):
            x = rng.random()
            y = (x + (0.5 + 0.5 * rng.random()) * 2.0**-e) % 1.0
            pairs.append((x, y))
    return pairs


# ----------------------------------------------------------- dyn_metric


def test_mode_validation():
    with pytest.raises(ValueError, match="kind must be one of"):
        DynMode("sideways", 2)
    with pytest.raises(ValueError, match="nonnegative"):
        DynMode("forward", -1)


def test_dynamical_metric_windows(full2):
    x = full2.constant(0)
    y = x.with_value(6, 1)
    base = full2.dist(x, y)
    for n in range(0, 5):
        assert dyn_metric(full2, x, y, DynMode("two_sided", n)) == base * 2.0**n
        assert dyn_metric(full2, x, y, DynMode("forward", n)) == base * 2.0**n
        assert dyn_metric(full2, x, y, DynMode("backward", n)) == base
    z = x.with_value(-6, 1)
    assert dyn_metric(full2, x, z, DynMode("backward", 3)) == full2.dist(x, z) * 8.0


def test_backward_window_needs_invertibility(doubling):
    with pytest.raises(ValueError, match="invertible"):
        dyn_metric(doubling, 0.125, 0.1875, DynMode("backward", 1))
    assert dyn_metric(doubling, 0.125, 0.1875, DynMode("forward", 1)) == 0.125


# ------------------------------------------------------------- verification


def test_verification_is_exact_on_shift_spaces(full2, golden, four):
    for sys in (full2, golden, four):
        rep = verify_self_similar(sys, sys.sample_pairs(400, seed=1))
        assert rep.passed and rep.exact
        assert rep.checked == 400
        assert rep.rejected == []
        assert rep.max_rel_deviation == 0.0
        assert rep.mean_rel_deviation == 0.0
        assert rep.tol == 0.0


def test_verification_reports_unusable_pairs(full2):
    x = full2.constant(0)
    far = x.with_value(0, 1)
    near = x.with_value(4, 1)
    rep = verify_self_similar(full2, [(x, x), (x, far), (x, near)])
    assert [reason for _, reason in rep.rejected] == [
        "coincident pair",
        "dist above xi",
    ]
    assert rep.checked == 1
    assert not rep.passed


def test_verification_accepts_pairs_at_exactly_xi(full2):
    x = full2.constant(0)
    rep = verify_self_similar(full2, [(x, x.with_value(2, 1))])
    assert rep.checked == 1 and rep.passed


def test_verification_flags_a_broken_metric(full2):
    warped = PowerWarp(full2)
    rep = verify_self_similar(warped, full2.sample_pairs(100, seed=4))
    assert not rep.exact
    assert not rep.passed
    # every pair deviates by the same factor lam**-0.1
    assert rep.max_rel_deviation == pytest.approx(1.0 - 2.0**-0.1, rel=1e-9)
    assert rep.worst_pair is not None
    assert rep.tol == 1e-9


def test_verification_of_the_toral_metric(cat):
    pairs = cat.sample_pairs(1500, 0.03, seed=2)
    rep = verify_self_similar(cat, pairs)
    assert rep.passed and not rep.exact
    assert rep.checked == 1500 and not rep.rejected
    assert rep.max_rel_deviation < 1e-9
    assert rep.tol == cat.tol_default == 1e-9


# ---------------------------------------------------------------- refinement


def test_refinement_parameter_validation(euclid):
    with pytest.raises(ValueError, match="must exceed 1"):
        refine_metric(euclid, 1.0, 1e-6)
    with pytest.raises(ValueError, match="tol must be positive"):
        refine_metric(euclid, 1.8, 0.0)

    class Unbounded:
        diameter = math.inf
        invertible = False

        def dist(self, x, y):
            return abs(x - y)

        def apply(self, x):
            return 2 * x

    with pytest.raises(ValueError, match="bounded"):
        refine_metric(Unbounded(), 2.0, 1e-6)


def test_refinement_window_tracks_the_tolerance(euclid, refined_euclid):
    assert refined_euclid.window == 23
    want = math.ceil(math.log(euclid.diameter / 1e-6) / math.log(1.8))
    assert refined_euclid.window == want
    assert refined_euclid.xi == euclid.xi
    assert refined_euclid.diameter == euclid.diameter
    assert refined_euclid.lam == 1.8
    assert refined_euclid.invertible and refined_euclid.has_bracket
    assert refined_euclid.space_kind == "wrapped-base-metric"
    assert refined_euclid.tol_default == 1e-6


def test_refining_an_adapted_metric_changes_nothing(doubling):
    refined = refine_metric(doubling, 2.0, 1e-9, one_sided=True)
    rng = Random(23)
    for _ in range(300):
        x, y = rng.random(), rng.random()
        assert refined.dist(x, y) == doubling.dist(x, y)
    with pytest.raises(ValueError, match="no inverse"):
        refined.apply_inv(0.3)
    assert not refined.invertible


def test_refined_clipped_arc_at_lam_two_stays_below_the_clip(doubling):
    # every term min(2**i a, 0.3) / 2**i is at most a, so the sup is a itself
    trunc = TruncatedArc()
    refined = refine_metric(trunc, 2.0, 1e-9, one_sided=True)
    for x, y in circle_pairs(29):
        assert refined.dist(x, y) == trunc.dist(x, y)
    rep = holder_check(trunc.dist, refined.dist, circle_pairs(29), k=2.0, lam=2.0)
    assert rep.alpha == 1.0
    assert rep.c == 1.0
    assert rep.violations == []


def test_refined_clipped_arc_at_root_two_is_a_square_root(doubling):
    # closed form: the sup sits within 2**(1/4) of sqrt(0.3 * arc), so the
    # Holder exponent against k = 2 is exactly one half
    trunc = TruncatedArc()
    refined = refine_metric(trunc, math.sqrt(2.0), 1e-6, one_sided=True)
    pairs = circle_pairs(31)
    rep = holder_check(trunc.dist, refined.dist, pairs, k=2.0, lam=math.sqrt(2.0))
    assert rep.alpha == pytest.approx(0.5, rel=1e-12)
    assert rep.violations == []
    low = math.sqrt(0.3) * 2.0**-0.25
    high = math.sqrt(0.3) * 2.0**0.25
    assert low * 0.999 <= rep.c <= high * 1.001
    for x, y in pairs:
        r = refined.dist(x, y)
        b = trunc.dist(x, y)
        assert low * 0.999 <= r / math.sqrt(b) <= high * 1.001


def test_refined_euclidean_metric_is_self_similar(euclid, refined_euclid):
    pairs = euclid.sample_pairs(400, 0.001, seed=31)
    rep = verify_self_similar(refined_euclid, pairs, tol=1e-6)
    assert rep.passed
    assert rep.checked == 400 and not rep.rejected
    assert rep.max_rel_deviation < 1e-12


def test_refined_euclidean_metric_holder_sandwich(cat, euclid, refined_euclid):
    pairs = []
    for i, scale in enumerate((0.02, 0.005, 0.001, 2e-4, 5e-5)):
        pairs += euclid.sample_pairs(60, scale, seed=37 + i)
    k = abs(cat.eig_unstable)
    rep = holder_check(euclid.dist, refined_euclid.dist, pairs, k=k, lam=1.8)
    assert rep.alpha == pytest.approx(math.log(1.8) / math.log(k), rel=1e-12)
    assert rep.violations == []
    assert 0.0 < rep.c <= euclid.diameter ** (1.0 - rep.alpha) * (1.0 + 1e-9)


def test_holder_check_validation(doubling):
    with pytest.raises(ValueError, match="at least one sample pair"):
        holder_check(doubling.dist, doubling.dist, [], k=2.0, lam=2.0)
    with pytest.raises(ValueError, match="at least lam"):
        holder_check(doubling.dist, doubling.dist, [(0.0, 0.1)], k=1.5, lam=2.0)
    with pytest.raises(ValueError, match="coincident sample pair"):
        holder_check(doubling.dist, doubling.dist, [(0.2, 0.2)], k=2.0, lam=2.0)


# ------------------------------------------------------------------ brackets


def test_bracket_helper_dispatches(golden, doubling):
    x = golden.constant(0)
    y = golden.point((0,), (0, 0, 1), (0,), -1)
    assert bracket(golden, x, y) == golden.bracket(x, y)
    with pytest.raises(ValueError, match="no bracket structure"):
        bracket(doubling, 0.1, 0.2)


# ----------------------------------------------------------------- triangles


def test_triangles_close_exactly_on_shift_spaces(full2, golden):
    for sys in (full2, golden):
        for x, y in sys.sample_pairs(300, seed=6, levels=(3, 9)):
            rep = triangle_ratio(sys, x, y)
            assert rep.ratio == 1.0
            assert rep.c0 == max(rep.a, rep.b)
            assert rep.scale == rep.c0


def test_triangles_with_both_legs_alive(full2):
    rng = Random(3)
    for _ in range(200):
        x = full2.random_point(rng, window=12)
        j = rng.randint(4, 9)
        k = rng.randint(4, 9)
        y = x.with_value(j, 1 - x.at(j)).with_value(-k, 1 - x.at(-k))
        rep = triangle_ratio(full2, x, y)
        assert rep.ratio == 1.0
        assert rep.a == 2.0 ** -(j - 1)
        assert rep.b == 2.0 ** -(k - 1)
        assert rep.c0 == max(rep.a, rep.b)


def test_triangle_preconditions(full2):
    x = full2.constant(0)
    with pytest.raises(ValueError, match="coincident"):
        triangle_ratio(full2, x, x)
    with pytest.raises(ValueError, match="triangle scale"):
        triangle_ratio(full2, x, x.with_value(3, 1))


def test_triangles_close_on_the_torus(cat):
    pairs = cat.sample_pairs(400, cat.xi / (4.0 * cat.lam), seed=8)
    worst = max(abs(triangle_ratio(cat, x, y).ratio - 1.0) for x, y in pairs)
    assert worst < 1e-9


def test_triangle_curve_shrinks_with_scale(euclid, refined_euclid):
    buckets = {}
    for idx, scale in enumerate((2e-4, 1e-4, 5e-5, 2.5e-5)):
        buckets[scale] = euclid.sample_pairs(80, scale, seed=41 + idx)
    curve = triangle_curve(refined_euclid, buckets)
    assert curve.scales == [2e-4, 1e-4, 5e-5, 2.5e-5]
    assert len(curve.max_deviation) == 4
    for a, b in zip(curve.max_deviation, curve.max_deviation[1:]):
        assert b <= a
    assert curve.max_deviation[-1] < curve.max_deviation[0] / 5.0
    assert curve.max_deviation[0] < 1e-6


# --------------------------------------------------------------- contraction


def test_contraction_is_exact_on_shift_spaces(full2):
    x = full2.constant(0)
    y = x.with_value(5, 1)  # shares the past of x: an unstable-side pair
    rep = stable_contraction_check(full2, x, y, side="unstable", n_max=6)
    assert rep.precondition_ok and rep.first_bad_n is None
    assert rep.ratios == [1.0] * 6
    assert rep.max_deviation == 0.0

    z = x.with_value(-5, 1)  # shares the future: a stable-side pair
    rep = stable_contraction_check(full2, x, z, side="stable", n_max=6)
    assert rep.ratios == [1.0] * 6
    assert rep.max_deviation == 0.0


def test_contraction_across_sampled_pairs(full2, golden):
    for sys in (full2, golden):
        for x, y in sys.sample_pairs(1000, seed=21, levels=(2, 7)):
            lev = int(sys.level(x, y))
            future_flip = x.at(lev + 1) != y.at(lev + 1)
            side = "unstable" if future_flip else "stable"
            rep = stable_contraction_check(sys, x, y, side=side, n_max=6)
            assert rep.precondition_ok
            assert rep.ratios == [1.0] * 6


def test_contraction_flags_pairs_leaving_the_regime(full2):
    x = full2.constant(0)
    y = x.with_value(5, 1)
    # iterating an unstable-side pair forward doubles the distance each step
    rep = stable_contraction_check(full2, x, y, side="stable", n_max=8)
    assert not rep.precondition_ok
    assert rep.first_bad_n == 4
    assert rep.ratios == [4.0, 16.0, 64.0]

    rep = stable_contraction_check(full2, x, x.with_value(0, 1))
    assert rep.ratios == [] and not rep.precondition_ok
    assert rep.first_bad_n == 0
    assert rep.max_deviation == math.inf

    with pytest.raises(ValueError, match="coincident"):
        stable_contraction_check(full2, x, x)
    with pytest.raises(ValueError, match="side must be"):
        stable_contraction_check(full2, x, y, side="middle")


def test_contraction_on_the_torus(cat):
    rng = Random(17)
    vs, vu = cat.v_stable, cat.v_unstable
    for _ in range(200):
        p = (rng.random(), rng.random())
        offs = cat.xi / 3.0 * (0.25 + 0.75 * rng.random()) * rng.choice((-1, 1))
        for vec, side in ((vs, "stable"), (vu, "unstable")):
            q = ((p[0] + offs * vec[0]) % 1.0, (p[1] + offs * vec[1]) % 1.0)
            rep = stable_contraction_check(cat, p, q, side=side, n_max=10)
            assert rep.precondition_ok
            assert len(rep.ratios) == 10
            assert rep.max_deviation < 1e-9


# ------------------------------------------------------------------ holonomy


def test_holonomy_on_shift_plaques(full2):
    x = full2.constant(0)
    for j in (5, 6, 9):
        q = x.with_value(j, 1)
        pp = x.with_value(-3, 1)
        qq = full2.triangle_vertex(pp, q)
        rep = holonomy_deviation(full2, x, q, pp, qq)
        assert rep.precondition_ok
        assert rep.m == j - 2
        assert rep.in_range and rep.within_bound
        assert rep.observed == 0.0
        assert rep.bound == pytest.approx(2.0 / (2.0 ** (j - 3) - 2.0))


def test_holonomy_below_the_scale_threshold(full2):
    # m = 2 gives lam**(m-1) = 2, which the bound cannot absorb
    x = full2.constant(0)
    q = x.with_value(4, 1)
    pp = x.with_value(-3, 1)
    qq = full2.triangle_vertex(pp, q)
    rep = holonomy_deviation(full2, x, q, pp, qq)
    assert rep.m == 2
    assert not rep.in_range
    assert rep.bound is None and rep.within_bound is None


def test_holonomy_preconditions(full2):
    x = full2.constant(0)
    q = x.with_value(5, 1)
    pp = x.with_value(-1, 1)  # leg at distance 1 > xi
    qq = full2.triangle_vertex(pp, q)
    rep = holonomy_deviation(full2, x, q, pp, qq)
    assert not rep.precondition_ok
    with pytest.raises(ValueError, match="coincident plaque pair"):
        holonomy_deviation(full2, x, x, pp, qq)


def test_holonomy_on_toral_plaques(cat):
    rng = Random(19)
    vs, vu = cat.v_stable, cat.v_unstable
    scale = cat.xi / cat.lam**3
    for _ in range(200):
        p = (rng.random(), rng.random())
        t = scale * (0.25 + 0.75 * rng.random()) * rng.choice((-1, 1))
        s = cat.xi / 4.0 * (0.25 + 0.75 * rng.random()) * rng.choice((-1, 1))
        q = ((p[0] + t * vu[0]) % 1.0, (p[1] + t * vu[1]) % 1.0)
        pp = ((p[0] + s * vs[0]) % 1.0, (p[1] + s * vs[1]) % 1.0)
        qq = cat.triangle_vertex(pp, q)
        rep = holonomy_deviation(cat, p, q, pp, qq)
        assert rep.precondition_ok
        assert rep.m >= 3 and rep.in_range
        assert rep.observed <= 1e-12
        assert rep.within_bound
