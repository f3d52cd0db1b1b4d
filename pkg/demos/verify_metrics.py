"""Walk through the one-step identity on every shipped system.

Each metric is built so that for points closer than xi, exactly one of
the two maps (forward or inverse) stretches the distance by lambda and
the other shrinks it. On shift spaces the check is exact integer
exponent arithmetic; on the torus it holds to floating precision.
"""

from selfsimilar.core import verify_self_similar
from selfsimilar.symbolic import four_symbol, full_shift, golden_mean
from selfsimilar.torus import CircleDoubling, cat_map


def show(name, sys, pairs, tol=None):
    rep = verify_self_similar(sys, pairs, tol=tol)
    print(f"{name:14s} lam={sys.lam:.6f} xi={sys.xi:.4f} "
          f"pairs={rep.checked:5d} exact={rep.exact} "
          f"max_rel_dev={rep.max_rel_deviation:.3e} passed={rep.passed}")


print("== symbolic systems: the identity is exact ==")
for name, sys in (("full 2-shift", full_shift(2)),
                  ("golden mean", golden_mean()),
                  ("four symbol", four_symbol())):
    show(name, sys, sys.sample_pairs(2000, seed=1))

print()
print("== one concrete pair on the golden mean ==")
g = golden_mean()
x = g.constant(0)
y = x.with_value(4, 1)  # same past, futures split at coordinate 4
d0 = g.dist(x, y)
print(f"dist(x, y)          = {d0}")
print(f"dist(f x, f y)      = {g.dist(g.apply(x), g.apply(y))}"
      f"   (stretched by lam = {g.dist(g.apply(x), g.apply(y)) / d0})")
print(f"dist(f^-1 x, f^-1 y) = {g.dist(g.apply_inv(x), g.apply_inv(y))}"
      f"  (shrunk by lam)")

print()
print("== toral systems: exact up to rounding ==")
cat = cat_map()
show("cat map", cat, cat.sample_pairs(2000, 0.03, seed=2), tol=1e-9)

doubling = CircleDoubling()
pts = doubling.sample_points(500, seed=3)
worst = 0.0
for p in pts:
    q = (p + 0.001) % 1.0
    d0 = doubling.dist(p, q)
    if 0.0 < d0 <= doubling.xi:
        d1 = doubling.dist(doubling.apply(p), doubling.apply(q))
        worst = max(worst, abs(d1 / (2.0 * d0) - 1.0))
print(f"circle doubling: one-sided identity, max_rel_dev={worst:.3e} "
      "(no inverse branch)")
