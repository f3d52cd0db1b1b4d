"""Dynamical triangles through the bracket, and holonomy along plaques.

For points x, y at a small scale the bracket produces the vertex z that
shares its future with y and its past with x. The two legs x-z and z-y
then have equal length: the triangle ratio is exactly one on shifts and
one up to rounding on the torus. Sliding a short unstable leg along a
stable leg distorts its length by at most 2/(lam^(m-1) - 2).
"""

from random import Random

from selfsimilar.core import holonomy_deviation, triangle_curve, triangle_ratio
from selfsimilar.symbolic import full_shift, golden_mean
from selfsimilar.torus import cat_map, euclidean_base
from selfsimilar.core import refine_metric

full2 = full_shift(2)
golden = golden_mean()
cat = cat_map()

print("== one triangle, spelled out (full 2-shift) ==")
x = full2.constant(0)
y = x.with_value(5, 1).with_value(-4, 1)  # differs on both sides of 0
rep = triangle_ratio(full2, x, y)
print(f"  dist(x, y) = {full2.dist(x, y)}")
print(f"  legs a = {rep.a}, b = {rep.b}, ratio a/b = {rep.ratio}")

print()
print("== sampled triangles are exact on shifts ==")
for sys, name in ((full2, "full 2-shift"), (golden, "golden mean")):
    bad = sum(
        1 for p, q in sys.sample_pairs(800, seed=5, levels=(3, 9))
        if triangle_ratio(sys, p, q).ratio != 1.0
    )
    print(f"  {name:13s} non-unit ratios: {bad} / 800")

worst = max(
    abs(triangle_ratio(cat, p, q).ratio - 1.0)
    for p, q in cat.sample_pairs(400, 1e-3, seed=6)
)
print(f"  cat map       worst |ratio - 1| = {worst:.2e} at scale 1e-3")

print()
print("== the refined metric approaches unit ratio as scale shrinks ==")
euclid = euclidean_base(cat)
refined = refine_metric(euclid, 1.8, 1e-6)
buckets = {s: euclid.sample_pairs(60, s, seed=7) for s in
           (2e-4, 1e-4, 5e-5, 2.5e-5)}
curve = triangle_curve(refined, buckets)
for s, dev in zip(curve.scales, curve.max_deviation):
    print(f"  scale {s:.1e}  max |ratio - 1| = {dev:.2e}")

print()
print("== holonomy on shift plaques ==")
rng = Random(8)
for j in (5, 7, 9):
    q = x.with_value(j, 1)       # unstable leg at scale lam**-(j-1)
    pp = x.with_value(-3, 1)     # stable leg to slide along
    qq = full2.triangle_vertex(pp, q)
    h = holonomy_deviation(full2, x, q, pp, qq)
    print(f"  m = {h.m}: observed {h.observed}  bound {h.bound:.4f}  "
          f"within: {h.within_bound}")

print()
print("== holonomy on the torus ==")
vs, vu = cat.v_stable, cat.v_unstable
scale = cat.xi / cat.lam**3
worst = 0.0
count = 0
for p in cat.sample_points(300, seed=9):
    t = scale * (0.25 + 0.75 * rng.random())
    s = cat.xi / 4 * (0.25 + 0.75 * rng.random())
    q = ((p[0] + t * vu[0]) % 1.0, (p[1] + t * vu[1]) % 1.0)
    pp = ((p[0] + s * vs[0]) % 1.0, (p[1] + s * vs[1]) % 1.0)
    h = holonomy_deviation(cat, p, q, pp, cat.triangle_vertex(pp, q))
    if h.precondition_ok and h.in_range:
        count += 1
        worst = max(worst, h.observed)
print(f"  {count} plaque pairs in range, worst observed {worst:.2e}")
