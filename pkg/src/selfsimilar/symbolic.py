"""Subshifts of finite type with an exact lambda-adic metric.

Points are bi-infinite admissible sequences with eventually periodic
tails.  Two sequences sit at distance lam**-T where T is the largest n
such that they agree on every coordinate |i| <= n; the distance is
capped at lam when they already disagree at coordinate 0 and is 0 for
equal sequences.  Every distance is therefore an integer power of lam,
so the module works on the integer exponent (the "level") and all
metric arithmetic stays exact.  The shift acts to the left:
(shift a)(n) = a(n+1), which makes sequences sharing a future lie on a
common stable set and sequences sharing a past lie on a common unstable
set.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from functools import cached_property, lru_cache
from math import lcm
from random import Random

INF = math.inf


def _divisors(n):
    out = [d for d in range(1, n + 1) if n % d == 0]
    return out


def _minimal_period(word):
    """Smallest d such that the bi-infinite tiling of `word` has period d."""
    p = len(word)
    for d in _divisors(p):
        if all(word[r] == word[(r + d) % p] for r in range(p)):
            return d
    return p


@dataclass(frozen=True)
class BiSequence:
    """Eventually periodic bi-infinite sequence in canonical form.

    Coordinates below `start` follow the periodic word `left` (phase
    anchored so that a(start-1) = left[-1]), the explicit window `mid`
    occupies [start, start+len(mid)), and everything at or above the
    window end follows `right` (a(end) = right[0]).  Construct through
    `bi_sequence` or a system's `point`; direct construction skips
    canonicalization and breaks equality.
    """

    left: tuple
    mid: tuple
    right: tuple
    start: int

    @property
    def end(self):
        return self.start + len(self.mid)

    def at(self, i):
        if i < self.start:
            return self.left[(i - self.start) % len(self.left)]
        j = i - self.start
        if j < len(self.mid):
            return self.mid[j]
        return self.right[(i - self.end) % len(self.right)]

    def window(self, lo, hi):
        """Tuple of coordinates lo..hi inclusive."""
        return tuple(self.at(i) for i in range(lo, hi + 1))

    def shift(self, k=1):
        """The sequence b with b(n) = a(n+k)."""
        return bi_sequence(self.left, self.mid, self.right, self.start - k)

    def with_value(self, i, sym):
        """Functional single-coordinate update (no admissibility check)."""
        lo = min(i, self.start)
        hi = max(i + 1, self.end)
        p, q = len(self.left), len(self.right)
        left = tuple(self.left[(r + lo - self.start) % p] for r in range(p))
        right = tuple(self.right[(r + hi - self.end) % q] for r in range(q))
        mid = list(self.window(lo, hi - 1))
        mid[i - lo] = sym
        return bi_sequence(left, tuple(mid), right, lo)


def bi_sequence(left, mid=(), right=None, start=0):
    """Canonical BiSequence from tail words, a window and its start index."""
    left = tuple(left)
    mid = tuple(mid)
    right = tuple(right) if right is not None else left
    if not left or not right:
        raise ValueError("tail words must be nonempty")
    for w in (left, mid, right):
        if any(not isinstance(s, int) or s < 0 for s in w):
            raise ValueError("symbols must be nonnegative integers")
    d = _minimal_period(left)
    left = left[len(left) - d:]
    d = _minimal_period(right)
    right = right[:d]
    # left tail absorbs window symbols that already follow its pattern
    while mid and mid[0] == left[0]:
        mid = mid[1:]
        left = left[1:] + left[:1]
        start += 1
    # right tail absorbs from the other end
    while mid and mid[-1] == right[-1]:
        mid = mid[:-1]
        right = right[-1:] + right[:-1]
    if not mid:
        # bare boundary between the two periodic tails: let the left
        # pattern keep eating while it matches; if it never stops the
        # sequence is globally periodic and gets the start=0 normal form
        for _ in range(lcm(len(left), len(right))):
            if left[0] != right[0]:
                break
            left = left[1:] + left[:1]
            right = right[1:] + right[:1]
            start += 1
        else:
            q = len(right)
            word = tuple(right[(j - start) % q] for j in range(q))
            return BiSequence(word, (), word, 0)
    return BiSequence(left, mid, right, start)


def _first_mismatch_right(a, b):
    """Smallest i >= 0 with a(i) != b(i), or None if the futures agree."""
    horizon = max(a.end, b.end, 0)
    stop = horizon + lcm(len(a.right), len(b.right))
    for i in range(stop):
        if a.at(i) != b.at(i):
            return i
    return None


def _first_mismatch_left(a, b):
    """Smallest j >= 1 with a(-j) != b(-j), or None."""
    horizon = max(-a.start, -b.start, 0) + 1
    stop = horizon + lcm(len(a.left), len(b.left))
    for j in range(1, stop):
        if a.at(-j) != b.at(-j):
            return j
    return None


def agreement_level(a, b):
    """Largest n with a(i) = b(i) for all |i| <= n.

    Returns -1 when the sequences disagree at coordinate 0 (the capped
    regime) and math.inf when they are equal.
    """
    r = _first_mismatch_right(a, b)
    j = _first_mismatch_left(a, b)
    if r is None and j is None:
        return INF
    radius = min(v for v in (r, j) if v is not None)
    return radius - 1


@dataclass(frozen=True)
class TransitionMatrix:
    """0/1 transition matrix of a subshift, at most 64 states."""

    rows: tuple

    def __post_init__(self):
        rows = tuple(tuple(int(v) for v in r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        n = len(rows)
        if not 1 <= n <= 64:
            raise ValueError("matrix must have between 1 and 64 states")
        if any(len(r) != n for r in rows):
            raise ValueError("matrix must be square")
        if any(v not in (0, 1) for r in rows for v in r):
            raise ValueError("entries must be 0 or 1")
        if any(not any(r) for r in rows):
            raise ValueError("zero row: every state needs a successor")
        for j in range(n):
            if not any(rows[i][j] for i in range(n)):
                raise ValueError("zero column: every state needs a predecessor")

    @property
    def n(self):
        return len(self.rows)

    @cached_property
    def successors(self):
        return tuple(tuple(j for j, v in enumerate(r) if v) for r in self.rows)

    @cached_property
    def predecessors(self):
        n = self.n
        return tuple(
            tuple(i for i in range(n) if self.rows[i][j]) for j in range(n)
        )

    @cached_property
    def primitive(self):
        """Wielandt test: primitive iff A^((n-1)^2 + 1) is positive."""
        n = self.n
        full = (1 << n) - 1
        power = [sum(1 << j for j in s) for s in self.successors]
        target = (n - 1) ** 2 + 1
        m = 1
        while True:
            if all(r == full for r in power):
                return True
            if m >= target:
                return False
            nxt = []
            for r in power:
                acc = 0
                j = 0
                while r:
                    if r & 1:
                        acc |= power[j]
                    r >>= 1
                    j += 1
                nxt.append(acc)
            power = nxt
            m *= 2

    def transpose(self):
        n = self.n
        return TransitionMatrix(
            tuple(tuple(self.rows[i][j] for i in range(n)) for j in range(n))
        )

    def cycle_word(self, s):
        """Shortest directed cycle through state s, as a word starting at s.

        Tiling the word periodically gives an admissible orbit; None when
        s lies on no cycle.
        """
        parent = {}
        queue = []
        for t in self.successors[s]:
            if t == s:
                return (s,)
            if t not in parent:
                parent[t] = None
                queue.append(t)
        while queue:
            nxt = []
            for u in queue:
                for t in self.successors[u]:
                    if t == s:
                        path = [u]
                        while parent[path[-1]] is not None:
                            path.append(parent[path[-1]])
                        path.reverse()
                        return (s,) + tuple(path)
                    if t not in parent:
                        parent[t] = u
                        nxt.append(t)
            queue = nxt
        return None

    def to_json(self):
        return json.dumps({"rows": [list(r) for r in self.rows]})

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        rows = data["rows"] if isinstance(data, dict) else data
        return cls(tuple(tuple(r) for r in rows))

    @classmethod
    def from_text(cls, text):
        """Plain-text form: one row per line, entries separated by spaces."""
        rows = []
        for line in text.strip().splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            rows.append(tuple(int(v) for v in line.split()))
        return cls(tuple(rows))


def count_words(matrix, length):
    """Number of admissible words of the given length (exact integer)."""
    if length < 0:
        raise ValueError("length must be nonnegative")
    if length == 0:
        return 1
    v = [1] * matrix.n
    for _ in range(length - 1):
        v = [sum(v[j] for j in matrix.successors[i]) for i in range(matrix.n)]
    return sum(v)


def iter_words(matrix, length):
    """All admissible words of the given length, lexicographic order."""
    if length == 0:
        yield ()
        return

    def rec(prefix):
        if len(prefix) == length:
            yield prefix
            return
        for s in matrix.successors[prefix[-1]]:
            yield from rec(prefix + (s,))

    for s in range(matrix.n):
        yield from rec((s,))


def spectral_radius(matrix, tol=1e-12, max_iter=200_000):
    """Perron root and right eigenvector (sup-normalized) by power iteration.

    Requires a primitive matrix; convergence is declared when both the
    eigenvalue estimate and the vector are stable to `tol` relative.
    """
    if not matrix.primitive:
        raise ValueError("spectral data requires a primitive matrix")
    n = matrix.n
    v = [1.0 / n] * n
    est = None
    for _ in range(max_iter):
        w = [sum(v[j] for j in matrix.successors[i]) for i in range(n)]
        s = sum(w)
        w = [x / s for x in w]
        prev, est = est, s
        if prev is not None and abs(est - prev) <= tol * est:
            if max(abs(a - b) for a, b in zip(w, v)) <= tol:
                top = max(w)
                return est, tuple(x / top for x in w)
        v = w
    raise ArithmeticError("power iteration did not converge")


@lru_cache(maxsize=None)
def _parry_data(matrix):
    rho, v = spectral_radius(matrix)
    _, u = spectral_radius(matrix.transpose())
    z = sum(a * b for a, b in zip(u, v))
    pi = tuple(a * b / z for a, b in zip(u, v))
    return rho, v, pi


def parry_measure(matrix, word):
    """Parry (maximal entropy) mass of the cylinder on `word`.

    Inadmissible words get mass 0; the start index of the cylinder is
    irrelevant by shift invariance.
    """
    word = tuple(word)
    if any(not 0 <= s < matrix.n for s in word):
        raise ValueError("symbol out of range")
    if not word:
        return 1.0
    for a, b in zip(word, word[1:]):
        if not matrix.rows[a][b]:
            return 0.0
    rho, v, pi = _parry_data(matrix)
    mass = pi[word[0]]
    for a, b in zip(word, word[1:]):
        mass *= v[b] / (rho * v[a])
    return mass


@dataclass(frozen=True)
class Cylinder:
    """Finite window of pinned coordinates: word occupies [start, start+len)."""

    start: int
    word: tuple

    @property
    def end(self):
        return self.start + len(self.word) - 1

    def nominal_diam(self, lam):
        return lam ** -self.end


def enumerate_unstable_children(sys, cyl):
    """Admissible one-symbol forward refinements of an unstable-side window.

    The input pins coordinates start..m; each child pins start..m+1, and
    its nominal diameter is exactly 1/lam times the parent's.
    """
    if not cyl.word:
        raise ValueError("empty cylinder")
    return tuple(
        Cylinder(cyl.start, cyl.word + (s,))
        for s in sys.matrix.successors[cyl.word[-1]]
    )


@dataclass(frozen=True)
class ShiftSystem:
    """Two-sided subshift with the exact lam**-T metric.

    Conforms to the metric-system protocol used across the package:
    apply/apply_inv, dist, lam, xi, diameter, bracket.
    """

    matrix: TransitionMatrix
    lam: float = 2.0

    def __post_init__(self):
        if not self.lam > 1:
            raise ValueError("expanding factor must exceed 1")

    space_kind = "symbolic"
    invertible = True
    has_bracket = True
    tol_default = 0.0

    @property
    def xi(self):
        return 1.0 / self.lam

    @property
    def diameter(self):
        return self.lam

    @property
    def n_symbols(self):
        return self.matrix.n

    # -- points ------------------------------------------------------

    def point(self, left, mid=(), right=None, start=0):
        seq = bi_sequence(left, mid, right, start)
        if not self.admissible(seq):
            raise ValueError("sequence has a forbidden transition")
        return seq

    def constant(self, s):
        return self.point((s,))

    def admissible(self, seq):
        def edge(a, b):
            return bool(self.matrix.rows[a][b])

        for w in (seq.left, seq.right):
            pairs = list(zip(w, w[1:])) + [(w[-1], w[0])]
            if not all(edge(a, b) for a, b in pairs):
                return False
        chain = (seq.left[-1],) + seq.mid + (seq.right[0],)
        return all(edge(a, b) for a, b in zip(chain, chain[1:]))

    def set_value(self, x, i, sym):
        """Admissible single-coordinate change; raises if forbidden."""
        y = x.with_value(i, sym)
        if not self.admissible(y):
            raise ValueError("forbidden transition")
        return y

    # -- dynamics and metric ------------------------------------------

    def apply(self, x):
        return x.shift(1)

    def apply_inv(self, x):
        return x.shift(-1)

    def level(self, x, y):
        return agreement_level(x, y)

    dist_level = level

    def dist(self, x, y):
        lev = agreement_level(x, y)
        if lev is INF:
            return 0.0
        return self.lam ** (-lev)

    # -- product structure ---------------------------------------------

    def bracket(self, x, y):
        """Splice: future of x, past of y (requires x(0) = y(0)).

        The result is the unique point on the stable set of x and the
        unstable set of y at this scale.
        """
        if x.at(0) != y.at(0):
            raise ValueError("bracket needs agreement at coordinate 0")
        lo = min(y.start, 0)
        hi = max(x.end, 1)
        p, q = len(y.left), len(x.right)
        left = tuple(y.left[(r + lo - y.start) % p] for r in range(p))
        right = tuple(x.right[(r + hi - x.end) % q] for r in range(q))
        mid = tuple(y.at(i) for i in range(lo, 0)) + tuple(
            x.at(i) for i in range(0, hi)
        )
        z = bi_sequence(left, mid, right, lo)
        assert self.admissible(z)
        return z

    def triangle_vertex(self, x, y):
        """Third vertex of the dynamical triangle: past of x, future of y."""
        return self.bracket(y, x)

    # -- sampling -------------------------------------------------------

    def random_point(self, rng, window=6):
        A = self.matrix
        s = rng.randrange(A.n)
        fwd = [s]
        for _ in range(window):
            fwd.append(rng.choice(A.successors[fwd[-1]]))
        back = [s]
        for _ in range(window):
            back.append(rng.choice(A.predecessors[back[-1]]))
        # extend each end until it reaches a state lying on a cycle
        guard = A.n + 1
        while A.cycle_word(back[-1]) is None and guard:
            back.append(rng.choice(A.predecessors[back[-1]]))
            guard -= 1
        guard = A.n + 1
        while A.cycle_word(fwd[-1]) is None and guard:
            fwd.append(rng.choice(A.successors[fwd[-1]]))
            guard -= 1
        head = A.cycle_word(back[-1])
        tail = A.cycle_word(fwd[-1])
        if head is None or tail is None:
            raise ValueError("matrix has a state not reaching any cycle")
        mid = tuple(reversed(back[1:])) + tuple(fwd)
        start = -(len(back) - 1)
        # left tail tiles the cycle so its wrap edge feeds mid[0] = head[0];
        # right tail is the forward cycle rotated one step past mid[-1]
        right = tail[1:] + tail[:1]
        return self.point(head, mid, right, start)

    def sample_pairs(self, count, seed=0, levels=(1, 8)):
        """Seeded pairs at exact agreement levels drawn from `levels`.

        Every pair satisfies 0 < dist <= xi; the level of each pair is
        exact by construction.
        """
        rng = Random(seed)
        lo, hi = levels
        if lo < 1:
            raise ValueError("levels below 1 leave the self-similar regime")
        out = []
        attempts = 0
        while len(out) < count:
            attempts += 1
            if attempts > 50 * count + 100:
                raise ArithmeticError("sampling stalled; matrix too rigid")
            lev = rng.randint(lo, hi)
            x = self.random_point(rng, window=lev + 3)
            y = self._perturb_at_radius(x, lev + 1, rng)
            if y is None:
                continue
            out.append((x, y))
        return out

    def _perturb_at_radius(self, x, r, rng):
        A = self.matrix
        for side in rng.sample((1, -1), 2):
            i = side * r
            cur = x.at(i)
            options = [
                s
                for s in range(A.n)
                if s != cur
                and A.rows[x.at(i - 1)][s]
                and A.rows[s][x.at(i + 1)]
            ]
            if options:
                return x.with_value(i, rng.choice(options))
        return None


def sft_new(rows, lam=2.0):
    """Build a two-sided subshift system from 0/1 transition rows."""
    matrix = rows if isinstance(rows, TransitionMatrix) else TransitionMatrix(
        tuple(tuple(r) for r in rows)
    )
    return ShiftSystem(matrix, float(lam))


def full_shift(n_symbols=2, lam=2.0):
    rows = tuple(tuple(1 for _ in range(n_symbols)) for _ in range(n_symbols))
    return sft_new(rows, lam)


def golden_mean(lam=2.0):
    return sft_new(((1, 1), (1, 0)), lam)


def four_symbol(lam=2.0):
    """Reducible 4-state example: states 2,3 absorb the forward orbit."""
    from importlib import resources

    text = resources.files("selfsimilar.fixtures").joinpath(
        "four_symbol.json"
    ).read_text()
    return sft_new(TransitionMatrix.from_json(text), lam)


def exact_cov(sys, eps):
    """Minimal number of sets of diameter < eps covering the subshift.

    Sets of diameter < lam**-m are exactly the subsets of central
    (2m+1)-cylinders, and those cylinders partition the space, so the
    count is the number of admissible words of length 2m+1 with
    m = min{m >= 0 : lam**-m < eps}.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if eps > sys.diameter:
        return 1
    m = 0
    while sys.lam ** -m >= eps:
        m += 1
        if m > 10_000:
            raise ArithmeticError("eps too small for float exponents")
    return count_words(sys.matrix, 2 * m + 1)
