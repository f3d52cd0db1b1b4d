"""Hyperbolic 2x2 toral automorphisms with an exact-scaling max metric.

The metric measures the stable and unstable eigencoordinates of the
offset between two points, raises them to exponents chosen so one step
of the map scales both by exactly lam, takes the max, and minimizes
over the nine nearest lattice translates.  Everything is double
precision; the one-step identity then holds to roundoff (about 1e-15)
because the eigencoordinates transform exactly by the eigenvalues.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from random import Random

_NINE = tuple((i, j) for i in (-1, 0, 1) for j in (-1, 0, 1))


@dataclass(frozen=True)
class SUCoords:
    """Signed stable/unstable coordinates of an ambient vector."""

    s: float
    u: float


def _eigen_2x2(m):
    """Real eigenvalues and unit eigenvectors of an integer 2x2 matrix."""
    (a, b), (c, d) = m
    tr = a + d
    det = a * d - b * c
    disc = tr * tr - 4 * det
    if disc <= 0:
        raise ValueError("matrix is not hyperbolic (complex or repeated roots)")
    r = math.sqrt(disc)
    roots = ((tr - r) / 2.0, (tr + r) / 2.0)
    if any(abs(abs(mu) - 1.0) < 1e-12 for mu in roots):
        raise ValueError("matrix is not hyperbolic (eigenvalue on unit circle)")
    pairs = []
    for mu in roots:
        v1 = (b, mu - a)
        v2 = (mu - d, c)
        v = v1 if math.hypot(*v1) >= math.hypot(*v2) else v2
        norm = math.hypot(*v)
        v = (v[0] / norm, v[1] / norm)
        if v[0] < 0 or (v[0] == 0 and v[1] < 0):
            v = (-v[0], -v[1])
        pairs.append((mu, v))
    pairs.sort(key=lambda p: abs(p[0]))
    return pairs  # (stable, unstable)


class ToralSystem:
    """Anosov automorphism of the 2-torus under the self-similar metric."""

    space_kind = "toral"
    invertible = True
    has_bracket = True
    tol_default = 1e-9

    def __init__(self, matrix, lam=None, xi=0.05, validate=True,
                 validate_pairs=10_000):
        rows = tuple(tuple(int(v) for v in r) for r in matrix)
        if len(rows) != 2 or any(len(r) != 2 for r in rows):
            raise ValueError("matrix must be 2x2")
        (a, b), (c, d) = rows
        det = a * d - b * c
        if abs(det) != 1:
            raise ValueError("matrix must have determinant +-1")
        self.matrix = rows
        self.det = det
        sgn = 1 if det == 1 else -1
        self.inverse = ((d * sgn, -b * sgn), (-c * sgn, a * sgn))
        (mu_s, v_s), (mu_u, v_u) = _eigen_2x2(rows)
        self.eig_stable = mu_s
        self.eig_unstable = mu_u
        self.v_stable = v_s
        self.v_unstable = v_u
        lam_sup = min(1.0 / abs(mu_s), abs(mu_u))
        if lam is None:
            lam = lam_sup
        if not 1.0 < lam <= lam_sup * (1 + 1e-12):
            raise ValueError(
                f"lam must lie in (1, {lam_sup:.12g}] for this matrix"
            )
        self.lam = float(lam)
        self.e_s = math.log(self.lam) / math.log(1.0 / abs(mu_s))
        self.e_u = math.log(self.lam) / math.log(abs(mu_u))
        # inverse of the eigenbasis matrix, for the su coordinate change
        det_v = v_s[0] * v_u[1] - v_s[1] * v_u[0]
        self._B = (
            (v_u[1] / det_v, -v_u[0] / det_v),
            (-v_s[1] / det_v, v_s[0] / det_v),
        )
        # nine lattice translates are enough only well below the shortest
        # nonzero lattice vector in this metric
        self.injectivity = min(
            self._rho(*self._su(float(i), float(j)))
            for i in range(-2, 3)
            for j in range(-2, 3)
            if (i, j) != (0, 0)
        )
        if not xi <= self.injectivity / 4:
            raise ValueError(
                f"xi={xi} too large: needs xi <= {self.injectivity / 4:.6g}"
            )
        self.xi = float(xi)
        self.diameter = self._max_dist_bound()
        if validate:
            self._validate(validate_pairs)

    # -- coordinates ---------------------------------------------------

    def _su(self, dx, dy):
        B = self._B
        return (B[0][0] * dx + B[0][1] * dy, B[1][0] * dx + B[1][1] * dy)

    def su_split(self, v):
        s, u = self._su(float(v[0]), float(v[1]))
        return SUCoords(s, u)

    def from_su(self, coords):
        vs, vu = self.v_stable, self.v_unstable
        return (
            coords.s * vs[0] + coords.u * vu[0],
            coords.s * vs[1] + coords.u * vu[1],
        )

    def _rho(self, s, u):
        return max(abs(s) ** self.e_s, abs(u) ** self.e_u)

    def _max_dist_bound(self):
        # coarse diameter: max of rho over a grid of fundamental-domain
        # offsets, each reduced over the nine translates
        best = 0.0
        steps = 16
        for i in range(steps):
            for j in range(steps):
                dx, dy = i / steps, j / steps
                best = max(best, self._dist_delta(dx, dy))
        return best

    # -- dynamics --------------------------------------------------------

    def apply(self, x):
        (a, b), (c, d) = self.matrix
        return ((a * x[0] + b * x[1]) % 1.0, (c * x[0] + d * x[1]) % 1.0)

    def apply_inv(self, x):
        (a, b), (c, d) = self.inverse
        return ((a * x[0] + b * x[1]) % 1.0, (c * x[0] + d * x[1]) % 1.0)

    # -- metric ----------------------------------------------------------

    def _dist_delta(self, dx, dy):
        best = math.inf
        for wx, wy in _NINE:
            s, u = self._su(dx + wx, dy + wy)
            r = self._rho(s, u)
            if r < best:
                best = r
        return best

    def dist(self, x, y):
        return self._dist_delta(y[0] - x[0], y[1] - x[1])

    def min_translate(self, x, y):
        """Offset y - x + w with the smallest metric norm."""
        dx, dy = y[0] - x[0], y[1] - x[1]
        best, arg = math.inf, (dx, dy)
        for wx, wy in _NINE:
            s, u = self._su(dx + wx, dy + wy)
            r = self._rho(s, u)
            if r < best:
                best, arg = r, (dx + wx, dy + wy)
        return arg

    # -- product structure -------------------------------------------------

    def bracket(self, x, y):
        """Unique point on the unstable line of x and stable line of y."""
        if self.dist(x, y) >= self.xi:
            raise ValueError("pair outside the bracket domain")
        delta = self.min_translate(x, y)
        _, u = self._su(*delta)
        vu = self.v_unstable
        return ((x[0] + u * vu[0]) % 1.0, (x[1] + u * vu[1]) % 1.0)

    def triangle_vertex(self, x, y):
        return self.bracket(x, y)

    # -- sampling ------------------------------------------------------------

    def sample_points(self, count, seed=0):
        rng = Random(seed)
        return [(rng.random(), rng.random()) for _ in range(count)]

    def sample_pairs(self, count, scale, seed=0):
        """Seeded pairs with dist in [scale/2, scale], stratified in angle.

        The offset direction sweeps the stable/unstable mixture circle in
        jittered strata; the radius is solved exactly, then checked.
        """
        if not scale < self.xi:
            raise ValueError("scale must be below xi")
        if scale <= 0:
            raise ValueError("scale must be positive")
        rng = Random(seed)
        vs, vu = self.v_stable, self.v_unstable
        out = []
        for k in range(count):
            theta = 2 * math.pi * (k + rng.random()) / count
            target = scale * (0.5 + 0.5 * rng.random())
            cs, sn = math.cos(theta), math.sin(theta)
            c_s = (target ** (1.0 / self.e_s) / abs(cs)) if cs else math.inf
            c_u = (target ** (1.0 / self.e_u) / abs(sn)) if sn else math.inf
            c = min(c_s, c_u)
            off = (
                c * (cs * vs[0] + sn * vu[0]),
                c * (cs * vs[1] + sn * vu[1]),
            )
            x = (rng.random(), rng.random())
            y = ((x[0] + off[0]) % 1.0, (x[1] + off[1]) % 1.0)
            d = self.dist(x, y)
            if abs(d - target) > 1e-9 * target:
                raise ArithmeticError("sampled pair missed its target distance")
            out.append((x, y))
        return out

    # -- construction-time check ------------------------------------------

    def _validate(self, pairs):
        """Identity sweep at dist <= xi; fails loudly if xi is too greedy."""
        per = max(pairs // 2, 1)
        worst = 0.0
        for scale, seed in ((self.xi * 0.999, 1), (self.xi / 8, 2)):
            for x, y in self.sample_pairs(per, scale, seed):
                d = self.dist(x, y)
                grown = max(
                    self.dist(self.apply(x), self.apply(y)),
                    self.dist(self.apply_inv(x), self.apply_inv(y)),
                )
                worst = max(worst, abs(grown / (self.lam * d) - 1.0))
        if worst > 1e-9:
            raise ArithmeticError(
                f"xi={self.xi} fails the one-step identity (dev {worst:.3g}); "
                "choose a smaller xi"
            )


def toral_new(matrix, lam=None, xi=0.05, validate=True, validate_pairs=10_000):
    """Hyperbolic toral system; lam defaults to the supremal factor."""
    return ToralSystem(matrix, lam, xi, validate, validate_pairs)


def cat_map(lam=None, validate=True, validate_pairs=10_000):
    return toral_new(((2, 1), (1, 1)), lam, validate=validate,
                     validate_pairs=validate_pairs)


class EuclideanTorus:
    """Euclidean quotient metric on the same automorphism.

    Not self-similar; adapted below its xi for any lam up to
    sqrt((mu^2 + mu^-2)/2), so it serves as the base of a genuinely
    nontrivial sup-refinement.  The bracket delegates to the eigenline
    geometry, which does not depend on the metric.
    """

    space_kind = "toral"
    invertible = True
    has_bracket = True
    tol_default = 1e-9

    def __init__(self, base, xi=0.02):
        self.geometry = base
        self.xi = xi
        self.diameter = math.sqrt(2) / 2
        mu = abs(base.eig_unstable)
        self.lam_sup = math.sqrt((mu * mu + 1.0 / (mu * mu)) / 2.0)

    def apply(self, x):
        return self.geometry.apply(x)

    def apply_inv(self, x):
        return self.geometry.apply_inv(x)

    def dist(self, x, y):
        dx, dy = y[0] - x[0], y[1] - x[1]
        best = math.inf
        for wx, wy in _NINE:
            r = math.hypot(dx + wx, dy + wy)
            if r < best:
                best = r
        return best

    def bracket(self, x, y):
        return self.geometry.bracket(x, y)

    def triangle_vertex(self, x, y):
        return self.geometry.triangle_vertex(x, y)

    def sample_points(self, count, seed=0):
        return self.geometry.sample_points(count, seed)

    def sample_pairs(self, count, scale, seed=0):
        """Pairs at Euclidean distance in [scale/2, scale], random headings."""
        if not 0 < scale < 0.25:
            raise ValueError("scale must sit below the injectivity radius")
        rng = Random(seed)
        out = []
        for _ in range(count):
            theta = 2 * math.pi * rng.random()
            r = scale * (0.5 + 0.5 * rng.random())
            x = (rng.random(), rng.random())
            y = (
                (x[0] + r * math.cos(theta)) % 1.0,
                (x[1] + r * math.sin(theta)) % 1.0,
            )
            out.append((x, y))
        return out


def euclidean_base(toral_sys, xi=0.02):
    return EuclideanTorus(toral_sys, xi)


class CircleDoubling:
    """Angle-doubling map with the arc metric: a one-sided base system."""

    space_kind = "wrapped-base-metric"
    invertible = False
    has_bracket = False
    tol_default = 0.0
    lam = 2.0
    xi = 0.25
    diameter = 0.5

    def apply(self, x):
        return (2.0 * x) % 1.0

    def dist(self, x, y):
        d = abs(x - y) % 1.0
        return min(d, 1.0 - d)

    def sample_points(self, count, seed=0):
        rng = Random(seed)
        return [rng.random() for _ in range(count)]
