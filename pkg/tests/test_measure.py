"""Hausdorff measures on stable and unstable windows, box product measures,
scaling, homogeneity, and the Parry comparison.

The cylinder DP is cross-checked against mass_brute below, a direct
recursion over the cylinder tree that shares no code with the library.
Golden-mean expected values follow from the stationary point of the DP:
g(0) = 1, g(1) = 1/phi, so window masses are Perron weights and box
conditionals reproduce the Parry transition probabilities.
"""

import math
from random import Random

import pytest

from selfsimilar.measure import (
    Box,
    StableWindow,
    UnstableWindow,
    box_measure,
    hausdorff_estimate,
    homogeneity_check,
    intrinsic_exponent,
    parry_compare,
    scaling_check,
    toral_measure_summary,
)
from selfsimilar.symbolic import count_words, sft_new

PHI = (1.0 + math.sqrt(5.0)) / 2.0


def slack_brute(matrix, state):
    """Forced steps before the walk from state can branch; None if never."""
    seen, cur, k = {state}, state, 0
    while len(matrix.successors[cur]) == 1:
        cur = matrix.successors[cur][0]
        k += 1
        if cur in seen:
            return None
        seen.add(cur)
    return k


def mass_brute(matrix, lam, d, state, edge, depth):
    """Plain cylinder-tree recursion: min of own diameter^d and child sum."""
    k = slack_brute(matrix, state)
    diam = 0.0 if k is None else lam ** -(edge + k)
    if depth == 0:
        return diam**d
    kids = sum(
        mass_brute(matrix, lam, d, c, edge + 1, depth - 1)
        for c in matrix.successors[state]
    )
    return min(diam**d, kids)


def anchor_at(sys, state, edge):
    """A point whose coordinate `edge` carries the requested state."""
    return sys.point(sys.matrix.cycle_word(state)).shift(-edge)


# ------------------------------------------------------------------- windows


def test_window_scales(full2):
    anchor = full2.constant(0)
    assert UnstableWindow(anchor, 0).scale(full2) == 0.5
    assert UnstableWindow(anchor, 3).scale(full2) == 2.0**-4
    assert StableWindow(anchor, 1).scale(full2) == 0.25


def test_window_at_scale_rounds_inward(full2):
    anchor = full2.constant(0)
    w = UnstableWindow.at_scale(full2, anchor, 0.5)
    assert w.edge == 0 and w.scale(full2) == 0.5
    assert UnstableWindow.at_scale(full2, anchor, 0.3).edge == 1
    assert UnstableWindow.at_scale(full2, anchor, 2.0**-5).edge == 4
    assert StableWindow.at_scale(full2, anchor, 0.25).edge == 1


# ------------------------------------------------------------ window measures


def test_unit_window_mass_on_the_full_shift(full2):
    anchor = full2.constant(0)
    for depth in (1, 2, 5, 12):
        tree = hausdorff_estimate(full2, UnstableWindow(anchor, 0), 1.0, depth)
        assert tree.value == 1.0
        assert tree.drift == 0.0
        assert tree.converged
        assert tree.leaf_diameter == 2.0 ** -depth
        assert tree.method == "cylinder-dp"


def test_oversized_exponent_decays_geometrically(full2):
    # at d = 1.5 the depth-n estimate is 2**(-n/2): correct, and headed to 0
    anchor = full2.constant(0)
    tree = hausdorff_estimate(full2, UnstableWindow(anchor, 0), 1.5, depth=8)
    assert abs(tree.value - 2.0**-4) < 1e-15
    assert not tree.converged


def test_golden_window_masses_are_perron_weights(golden):
    d = intrinsic_exponent(golden)
    for state, want in ((0, 1.0), (1, 1.0 / PHI)):
        for cls in (UnstableWindow, StableWindow):
            anchor = anchor_at(golden, state, 0)
            tree = hausdorff_estimate(golden, cls(anchor, 0), d, depth=12)
            assert tree.value == pytest.approx(want, abs=1e-11)
            assert tree.converged
            assert 0.0 < tree.value < math.inf


def test_golden_window_mass_is_depth_stable(golden):
    d = intrinsic_exponent(golden)
    anchor = golden.constant(0)
    v10 = hausdorff_estimate(golden, UnstableWindow(anchor, 0), d, 10).value
    v14 = hausdorff_estimate(golden, UnstableWindow(anchor, 0), d, 14).value
    assert abs(v10 - v14) / v10 <= 0.03
    assert abs(v10 - v14) / v10 < 1e-9


def test_intrinsic_exponents(full2, golden, four, euclid):
    assert intrinsic_exponent(full2) == 1.0
    got = intrinsic_exponent(golden)
    assert got == pytest.approx(math.log(PHI) / math.log(2.0), rel=1e-11)
    with pytest.raises(ValueError, match="primitive"):
        intrinsic_exponent(four)
    with pytest.raises(ValueError, match="self-similar system"):
        intrinsic_exponent(euclid)


def test_estimate_validation(full2, four, cat):
    anchor = full2.constant(0)
    w = UnstableWindow(anchor, 0)
    with pytest.raises(ValueError, match="dimension exponent must be positive"):
        hausdorff_estimate(full2, w, 0.0)
    with pytest.raises(ValueError, match="depth must be at least 1"):
        hausdorff_estimate(full2, w, 1.0, depth=0)
    with pytest.raises(TypeError, match="window must be"):
        hausdorff_estimate(full2, (anchor, 0), 1.0)
    with pytest.raises(ValueError, match="toral measures are closed-form"):
        hausdorff_estimate(cat, w, 1.0)
    with pytest.raises(ValueError, match="primitive"):
        anchor4 = four.point(four.matrix.cycle_word(0))
        hausdorff_estimate(four, UnstableWindow(anchor4, 0), 1.0)


# -------------------------------------------------------- brute-force oracle


@pytest.mark.parametrize(
    "rows,d_list",
    [
        (((1, 1), (1, 1)), (1.0, 1.5)),
        (((1, 1), (1, 0)), (0.5, 0.6942419136303972, 1.0)),
        (((0, 1, 1), (1, 0, 1), (1, 1, 0)), (0.8, 1.0)),
    ],
)
def test_dp_matches_the_plain_recursion(rows, d_list):
    sys = sft_new(rows)
    for d in d_list:
        for edge in (0, 1, 3):
            for state in range(len(rows)):
                for depth in (1, 4, 7):
                    anchor = anchor_at(sys, state, edge)
                    tree = hausdorff_estimate(
                        sys, UnstableWindow(anchor, edge), d, depth
                    )
                    # the recursion's diameters carry the edge offset already
                    want = mass_brute(sys.matrix, sys.lam, d, state, edge, depth)
                    assert tree.value == pytest.approx(want, rel=1e-12, abs=1e-300)


def test_stable_side_uses_the_transposed_matrix():
    # one-way table: 0 can enter the 1 <-> 2 loop but never return
    rows = ((1, 1, 0), (0, 0, 1), (1, 1, 0))
    sys = sft_new(rows)
    anchor = sys.point(sys.matrix.cycle_word(1)).shift(2)  # at(-2) == 1
    tree = hausdorff_estimate(sys, StableWindow(anchor, 2), 1.0, depth=6)
    want = mass_brute(sys.matrix.transpose(), sys.lam, 1.0, 1, 2, 6)
    assert tree.value == pytest.approx(want, rel=1e-12)


def test_node_values_satisfy_the_dp_recursion(golden):
    d = intrinsic_exponent(golden)
    anchor = golden.constant(0)
    tree = hausdorff_estimate(golden, UnstableWindow(anchor, 1), d, depth=6)

    def walk(ext, state):
        if len(ext) >= 3:
            return
        kids = golden.matrix.successors[state]
        child_sum = sum(tree.node_value(ext + (c,)) for c in kids)
        own = tree.node_true_diameter(ext) ** d
        assert tree.node_value(ext) == pytest.approx(
            min(own, child_sum), rel=1e-12
        )
        for c in kids:
            walk(ext + (c,), c)

    walk((), anchor.at(1))
    assert tree.node_value((1, 1)) == 0.0  # inadmissible extension
    with pytest.raises(ValueError, match="deeper than the DP horizon"):
        tree.node_value((0,) * 7)
    with pytest.raises(ValueError, match="inadmissible extension"):
        tree.node_true_diameter((1, 1))


def test_node_diameters_include_forced_steps():
    # entering state 1 forces one step (its only successor is 2)
    rows = ((1, 1, 0), (0, 0, 1), (1, 1, 0))
    sys = sft_new(rows)
    anchor = sys.point(sys.matrix.cycle_word(0))
    tree = hausdorff_estimate(sys, UnstableWindow(anchor, 0), 1.0, depth=5)
    assert tree.node_true_diameter(()) == 1.0  # state 0 branches at once
    assert tree.node_true_diameter((1,)) == 2.0**-2  # edge 1 plus one forced


# ------------------------------------------------------------------- scaling


def test_scaling_is_exact_on_the_full_shift(full2):
    anchor = full2.constant(0)
    rep = scaling_check(full2, UnstableWindow(anchor, 3))
    assert rep.side == "unstable"
    assert rep.ratio == 2.0 and rep.expected == 2.0
    assert rep.rel_gap == 0.0
    rep = scaling_check(full2, StableWindow(anchor, 3))
    assert rep.side == "stable"
    assert rep.ratio == 0.5 and rep.expected == 0.5
    assert rep.rel_gap == 0.0


def test_scaling_on_the_golden_mean(golden):
    d = intrinsic_exponent(golden)
    anchor = golden.constant(0)
    for window in (UnstableWindow(anchor, 3), StableWindow(anchor, 3)):
        rep = scaling_check(golden, window)
        assert rep.rel_gap < 1e-11
        assert rep.expected == pytest.approx(
            golden.lam**d if rep.side == "unstable" else golden.lam**-d,
            rel=1e-12,
        )


# --------------------------------------------------------------------- boxes


def test_box_measure_on_the_full_shift(full2):
    bm = box_measure(full2, Box((0, 0, 0), -1))
    assert (bm.stable, bm.unstable, bm.product) == (0.5, 0.5, 0.25)
    assert bm.plaque_gap == 0.0
    assert bm.admissible
    assert bm.d == 1.0


def test_box_measure_on_the_golden_mean(golden):
    bm = box_measure(golden, Box((0, 0, 0), -1))
    assert bm.stable == pytest.approx(1.0 / PHI, abs=1e-11)
    assert bm.unstable == pytest.approx(1.0 / PHI, abs=1e-11)
    assert bm.product == pytest.approx(PHI**-2, abs=1e-11)
    assert bm.plaque_gap == 0.0


def test_box_conditionals_are_parry_probabilities(golden):
    # extending the unstable word by one symbol multiplies the mass by the
    # Parry transition probability of the new edge
    u = lambda word: box_measure(golden, Box(word, 0)).unstable
    assert u((0, 0)) / u((0,)) == pytest.approx(1.0 / PHI, abs=1e-11)
    assert u((0, 1)) / u((0,)) == pytest.approx(PHI**-2, abs=1e-11)
    assert u((1, 0)) / u((1,)) == pytest.approx(1.0, abs=1e-11)
    ratio = box_measure(golden, Box((0, 0), 0)).product / box_measure(
        golden, Box((0, 1), 0)
    ).product
    assert ratio == pytest.approx(PHI, abs=1e-11)


def test_inadmissible_boxes_get_zero_mass(golden):
    bm = box_measure(golden, Box((0, 1, 1), -1))
    assert (bm.stable, bm.unstable, bm.product) == (0.0, 0.0, 0.0)
    assert not bm.admissible


def test_box_validation(golden, cat):
    with pytest.raises(TypeError, match="box must be a Box"):
        box_measure(golden, ((0, 0), -1))
    with pytest.raises(ValueError, match="span coordinate 0"):
        box_measure(golden, Box((0, 0), 1))
    with pytest.raises(ValueError, match="span coordinate 0"):
        box_measure(golden, Box((0, 0), -3))
    with pytest.raises(ValueError, match="out-of-range"):
        box_measure(golden, Box((0, 2), 0))
    with pytest.raises(ValueError, match="closed-form"):
        box_measure(cat, Box((0, 0), 0))


def test_box_from_point(golden):
    x = golden.constant(0)
    box = Box.from_point(x, 2, 3)
    assert box == Box((0,) * 6, -2)
    assert box.end == 3


# --------------------------------------------------------------- homogeneity


def test_homogeneity_on_the_full_shift(full2):
    rng = Random(11)
    xs = [full2.constant(0), full2.constant(1)]
    xs += [full2.random_point(rng) for _ in range(8)]
    rep = homogeneity_check(full2, xs)
    assert rep.c_observed == 1.0
    assert rep.flat_ratio == 1.0
    assert rep.trend == 0.0
    assert rep.passed


def test_homogeneity_constant_on_crafted_golden_points(golden):
    # one point pins the Perron-light symbol at both window edges for each n,
    # so every n sees the same extreme mass ratio: exactly flat at phi**2
    pts = [golden.constant(0)]
    for n in range(1, 11):
        word = (1,) + (0,) * (n + 1) + (1,)
        pts.append(golden.point((0,), word, (0,), -1))
    rep = homogeneity_check(golden, pts)
    assert rep.c_observed == pytest.approx(PHI**2, abs=1e-9)
    assert rep.flat_ratio <= 1.0 + 1e-9
    assert abs(rep.trend) < 1e-12
    assert rep.passed
    assert len(rep.rows) == 10
    assert rep.delta == rep.eps == golden.xi / golden.lam


def test_homogeneity_on_random_golden_points(golden):
    rng = Random(13)
    xs = [golden.random_point(rng) for _ in range(20)]
    rep = homogeneity_check(golden, xs)
    # per-n ratios live in [1, phi^2], so the spread is bounded and there
    # is no growth trend; the sign of small trends is seed noise
    assert rep.flat_ratio <= PHI**2 * (1.0 + 1e-9)
    assert rep.trend <= 0.01
    assert 1.0 <= rep.c_observed <= PHI**2 * (1.0 + 1e-9)


def test_homogeneity_validation(golden, four, cat):
    with pytest.raises(ValueError, match="symbolic-only"):
        homogeneity_check(cat, [(0.1, 0.2)])
    with pytest.raises(ValueError, match="at least one base point"):
        homogeneity_check(golden, [])
    with pytest.raises(ValueError, match="below xi"):
        homogeneity_check(golden, [golden.constant(0)], delta=0.5)
    with pytest.raises(ValueError, match="primitive"):
        homogeneity_check(four, [four.point(four.matrix.cycle_word(0))])


# ---------------------------------------------------------- parry comparison


def test_box_masses_match_the_parry_measure(golden):
    rep = parry_compare(golden, 2)
    assert rep.max_rel_gap < 1e-9
    assert len(rep.rows) == count_words(golden.matrix, 5)
    assert sum(r[1] for r in rep.rows) == pytest.approx(1.0, rel=1e-9)
    assert sum(r[2] for r in rep.rows) == pytest.approx(1.0, rel=1e-9)
    assert 1.0 < rep.total_mass < 2.0
    for word, dp_mass, parry_mass, gap in rep.rows:
        assert len(word) == 5
        assert gap == pytest.approx(abs(dp_mass / parry_mass - 1.0), abs=1e-15)
        assert gap <= rep.max_rel_gap

    rep = parry_compare(golden, 8)
    assert rep.max_rel_gap < 1e-9
    assert len(rep.rows) == count_words(golden.matrix, 17)


def test_parry_comparison_validation(four, cat):
    with pytest.raises(ValueError, match="symbolic-only"):
        parry_compare(cat, 2)
    with pytest.raises(ValueError, match="primitive"):
        parry_compare(four, 2)


# ------------------------------------------------------------- toral measure


def test_toral_measure_summary(cat):
    s = toral_measure_summary(cat)
    assert s["d"] == pytest.approx(1.0, rel=1e-12)
    assert s["exponent_product"] == pytest.approx(1.0, rel=1e-12)
    assert s["scaling_gap"] <= 1e-12
    assert s["plaque_u_length"] == pytest.approx(2.0 * cat.xi, rel=1e-12)
    assert s["image_u_length"] == pytest.approx(
        s["plaque_u_length"] * cat.eig_unstable, rel=1e-12
    )
    assert s["scaling_ratio"] == pytest.approx(cat.lam, rel=1e-12)


def test_toral_measure_summary_off_the_adapted_rate():
    from selfsimilar.torus import cat_map

    sys = cat_map(lam=1.8, validate_pairs=500)
    s = toral_measure_summary(sys)
    d = s["d"]
    assert d == pytest.approx(math.log(PHI**2) / math.log(1.8), rel=1e-12)
    assert s["exponent_product"] == pytest.approx(1.0, rel=1e-12)
    assert s["scaling_gap"] <= 1e-12
    assert s["scaling_expected"] == pytest.approx(1.8**d, rel=1e-12)
