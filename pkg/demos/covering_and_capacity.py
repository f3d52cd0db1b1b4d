"""Covering counts, the transport identity, and capacity as an entropy rate.

Covering numbers at scale xi/lam^k under the base metric equal covering
numbers at scale xi under the k-fold dynamical metric. Regressing
log cov against log(1/eps) gives the capacity, and capacity * log(lam)
recovers twice the topological entropy whatever lambda was chosen.
"""

import math

from selfsimilar.dimension import (
    capacity,
    check_fundamental,
    cov_eps,
    cov_identity_check,
    entropy,
)
from selfsimilar.symbolic import full_shift, golden_mean

PHI = (1.0 + math.sqrt(5.0)) / 2.0

full2 = full_shift(2)
golden = golden_mean()

print("== exact covering counts (golden mean) ==")
for k in range(5):
    eps = golden.xi / golden.lam**k
    print(f"  cov({eps:8.6f}) = {cov_eps(golden, eps).lower:5d}")

print()
print("== the same counts through the dynamical metric ==")
for sys, name in ((full2, "full 2-shift"), (golden, "golden mean")):
    rows = cov_identity_check(sys, k_max=6)
    ok = all(r.consistent for r in rows)
    counts = [r.lhs.lower for r in rows]
    print(f"  {name:13s} counts {counts}  all consistent: {ok}")

print()
print("== capacity fits ==")
fit = capacity(golden)
target = 2.0 * math.log(PHI) / math.log(2.0)
print(f"  golden mean  slope {fit.slope:.9f}  closed form {target:.9f}  "
      f"residual {fit.residual:.1e}")
fit2 = capacity(full2)
print(f"  full 2-shift slope {fit2.slope:.9f}  closed form 2.0")

print()
print("== entropy windows and the fundamental relation ==")
er = entropy(golden)
print(f"  golden ent {er.ent:.9f}  (2 log phi = {2 * math.log(PHI):.9f})  "
      f"plus {er.ent_plus:.6f} minus {er.ent_minus:.6f}")
rep = check_fundamental(golden)
print(f"  capacity {rep.capacity:.6f} vs ent/log lam {rep.rhs:.6f}  "
      f"rel gap {rep.rel_gap:.2e}")

print()
print("== rebuilding the full shift at lambda 4 ==")
sys4 = full_shift(2, lam=4.0)
fit4 = capacity(sys4)
print(f"  capacity {fit4.slope:.9f} (was {fit2.slope:.6f} at lambda 2)")
print(f"  capacity * log lam = {fit4.slope * math.log(4.0):.9f}"
      f"  = 2 log 2 = {2 * math.log(2.0):.9f}")
