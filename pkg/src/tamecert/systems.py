"""Concrete dynamical systems with exact point representations.

* SplitCircleSystem - irrational rotation on the circle with a countable set
  of points doubled into one-sided copies (Sturmian phase space when the
  doubled set is the orbit of 0).
* RotationSystem - the plain circle rotation (equicontinuous base).
* CutProjectCoding - binary coding of a rotation orbit through a window that
  is either a finite union of half-open arcs or the complement of a truncated
  family of deleted arcs (fat-Cantor boundary).
* CosSystem - the almost automorphic cascade generated by the cos(1/x)-type
  sampling function, with its exotic fiber over 0.
* SemicocycleCascade - dyadic odometer extension with marked points of
  prescribed finite fiber cardinalities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import BoundaryUndecidable, DepthInsufficient
from .exactarith import GOLDEN, CirclePoint, RotationNumber, orbit_point, point, zero

MINUS, PLAIN, PLUS = -1, 0, 1
SIDE_NAMES = {MINUS: "minus", PLAIN: "plain", PLUS: "plus"}
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SplitPoint:
    """A circle point with a side tag; the carrier of the split-circle order."""

    base: CirclePoint
    side: int

    def __post_init__(self):
        if self.side not in (MINUS, PLAIN, PLUS):
            raise ValueError("side must be -1, 0 or +1")

    def translate(self, n: int) -> "SplitPoint":
        return SplitPoint(self.base.translate(n), self.side)

    def __repr__(self):
        return f"SplitPoint({self.base!r}, {SIDE_NAMES[self.side]})"


def split_order_key(x: SplitPoint, ref: CirclePoint):
    """Sort key for the split order on an arc cut at ``ref``."""
    return ((x.base - ref).as_float(), x.side)


# ---------------------------------------------------------------------------
# certified bulk evaluation of (A0+n)*alpha + B0 mod 1 over an integer range
# ---------------------------------------------------------------------------


class _CircleWalk:
    """Walk n -> (A0+n)*alpha + B0 mod 1 on a common-denominator integer grid.

    Positions carry a certified slack: any test that comes within ``slack``
    grid units of a boundary must be re-decided exactly.  Grid precision is
    chosen so the accumulated convergent error stays far below the slack.
    """

    DIGITS = 26
    SLACK_DIGITS = 20

    def __init__(self, alpha: RotationNumber, a0: int, b0: Fraction, n0: int, n1: int):
        nmax = max(abs(a0 + n0), abs(a0 + n1)) + 2
        k = 1
        while alpha.denominator(k) ** 2 < nmax * 10**self.DIGITS:
            k += 1
        p, q = alpha.numerator(k), alpha.denominator(k)
        db = b0.denominator
        self.alpha = alpha
        self.D = q * db
        self.step = (p * db) % self.D
        self.start = ((a0 + n0) * p * db + b0.numerator * q) % self.D
        self.slack = self.D // 10**self.SLACK_DIGITS + 2
        self.n0, self.n1 = n0, n1

    def boundary(self, pt: CirclePoint) -> int:
        """A boundary value on the grid (error well below slack)."""
        lo, hi = pt.bounds(Fraction(1, 10 ** (self.SLACK_DIGITS + 8)))
        mid = (lo + hi) / 2
        return int(mid * self.D)

    def positions(self) -> Iterable[int]:
        u = self.start
        d, s = self.D, self.step
        for _ in range(self.n0, self.n1 + 1):
            yield u
            u += s
            if u >= d:
                u -= d


# ---------------------------------------------------------------------------
# split circle
# ---------------------------------------------------------------------------


class SplitCircleSystem:
    """Rotation by alpha on the circle with the points of ``split`` doubled.

    ``split`` is ``"orbit"`` (the alpha-orbit of 0; the Sturmian case),
    ``"rationals"`` (the circled rationals) or an explicit tuple of points.
    The coding arc carries symbol 1 and defaults to [0+, alpha-], which
    reproduces the classical coding with complexity L+1.
    """

    kind = "split_circle"

    def __init__(
        self,
        alpha: RotationNumber = GOLDEN,
        split: str | Sequence[CirclePoint] = "orbit",
        arc: tuple[SplitPoint, SplitPoint] | None = None,
        boundary_convention: str | None = "half_open",
    ):
        self.alpha = alpha
        self.boundary_convention = boundary_convention
        if isinstance(split, str):
            if split not in ("orbit", "rationals"):
                raise ValueError("split must be 'orbit', 'rationals' or explicit points")
            self.split = split
            self._explicit: tuple[CirclePoint, ...] = ()
        else:
            self.split = "explicit"
            self._explicit = tuple(split)
        if arc is None:
            arc = (
                SplitPoint(zero(alpha), PLUS if self.splits(zero(alpha)) else PLAIN),
                SplitPoint(point(alpha, 1), MINUS if self.splits(point(alpha, 1)) else PLAIN),
            )
        self.arc = arc
        for end in arc:
            want_split = self.splits(end.base)
            if want_split and end.side == PLAIN:
                raise ValueError("arc endpoint at a split point needs a side tag")
            if not want_split and end.side != PLAIN:
                raise ValueError("arc endpoint side tag on a non-split point")

    # -- membership of the split set --------------------------------------

    def splits(self, y: CirclePoint) -> bool:
        if self.split == "orbit":
            return y.on_orbit
        if self.split == "rationals":
            return y.is_rational
        return any(y.compare(e) == 0 for e in self._explicit)

    def split_fiber(self, y: CirclePoint) -> list[SplitPoint]:
        """The preimage of y under the projection back to the circle."""
        if self.splits(y):
            return [SplitPoint(y, MINUS), SplitPoint(y, PLUS)]
        return [SplitPoint(y, PLAIN)]

    def pt(self, base: CirclePoint, side: int | None = None) -> SplitPoint:
        if self.splits(base):
            if side in (MINUS, PLUS):
                return SplitPoint(base, side)
            raise ValueError("split point needs an explicit side")
        if side not in (None, PLAIN):
            raise ValueError("non-split point cannot carry a side")
        return SplitPoint(base, PLAIN)

    def orbit_pt(self, n: int, side: int) -> SplitPoint:
        return self.pt(orbit_point(self.alpha, n), side)

    # -- dynamics -----------------------------------------------------------

    def step(self, x: SplitPoint, n: int = 1) -> SplitPoint:
        return x.translate(n)

    # -- coding -------------------------------------------------------------

    def in_arc(self, x: SplitPoint) -> bool:
        """Side-aware exact membership in the coding arc.

        Side tags always break boundary ties.  A plain point can only sit on
        an arc endpoint when the endpoint is itself unsplit; the default
        convention includes it at the start and excludes it at the end
        (half-open), and ``boundary_convention=None`` makes such hits raise
        BoundaryUndecidable instead.
        """
        lo, hi = self.arc
        u = x.base - lo.base
        w = hi.base - lo.base
        if u.is_zero:
            if x.side == PLAIN and lo.side == PLAIN and self.boundary_convention is None:
                raise BoundaryUndecidable(f"{x!r} lies exactly on the arc start")
            return x.side >= lo.side
        cw = u.compare(w)
        if cw == 0:
            if x.side == PLAIN and hi.side == PLAIN and self.boundary_convention is None:
                raise BoundaryUndecidable(f"{x!r} lies exactly on the arc end")
            return x.side < hi.side or (x.side == hi.side and hi.side != PLAIN)
        return cw < 0

    def symbol(self, x: SplitPoint) -> int:
        return 1 if self.in_arc(x) else 0

    def coding_word(self, x: SplitPoint, n0: int, n1: int) -> list[int]:
        """Symbols of x, Tx, ... over the window [n0, n1], decided exactly.

        Interior decisions run on a certified integer grid; positions that
        come within the grid slack of an arc endpoint fall back to the exact
        side-aware comparison, so boundary ties are always broken by tags.
        """
        lo, hi = self.arc
        walk = _CircleWalk(self.alpha, x.base.a - lo.base.a, x.base.b - lo.base.b, n0, n1)
        w_num = walk.boundary(hi.base - lo.base)
        sl, d = walk.slack, walk.D
        out = []
        for n, u in zip(range(n0, n1 + 1), walk.positions()):
            if u < sl or u > d - sl or abs(u - w_num) < sl:
                out.append(self.symbol(x.translate(n)))
            else:
                out.append(1 if u < w_num else 0)
        return out

    def word(self, x: SplitPoint, horizon: int) -> np.ndarray:
        """Forward coding word of length ``horizon`` as a uint8 array."""
        return np.asarray(self.coding_word(x, 0, horizon - 1), dtype=np.uint8)

    def describe(self) -> dict:
        return {
            "kind": self.kind,
            "alpha": self.alpha.describe(),
            "split_set": self.split,
        }


class RotationSystem:
    """The plain circle rotation; points are CirclePoints, no splitting."""

    kind = "rotation"

    def __init__(self, alpha: RotationNumber = GOLDEN):
        self.alpha = alpha

    def step(self, x: CirclePoint, n: int = 1) -> CirclePoint:
        return x.translate(n)

    def describe(self) -> dict:
        return {"kind": self.kind, "alpha": self.alpha.describe()}


# ---------------------------------------------------------------------------
# cut-and-project codings
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Arc:
    """Half-open arc [start, start + length) on the circle."""

    start: CirclePoint
    length: Fraction

    def __post_init__(self):
        if not 0 < self.length <= 1:
            raise ValueError("arc length must be in (0, 1]")

    @property
    def full(self) -> bool:
        return self.length == 1

    def covers(self, x: CirclePoint, open_arc: bool = False) -> bool:
        """Exact membership; ``open_arc`` excludes both endpoints."""
        if self.full:
            return True
        off = x - self.start
        if open_arc and off.is_zero:
            return False
        return off.compare(CirclePoint(x.alpha, 0, self.length)) < 0


class CutProjectCoding:
    """Binary coding of the alpha-orbit of ``base_point`` through a window.

    Interval mode: the window is a finite union of half-open arcs with
    endpoints in the subgroup.  Cantor mode: the window is the complement of
    open arcs of length scale*3^-j deleted around the orbit points j*alpha
    (j = 1..generation); its boundary is the truncation of a fat-Cantor set.
    """

    kind = "cut_project"

    def __init__(
        self,
        alpha: RotationNumber = GOLDEN,
        arcs: Sequence[Arc] | None = None,
        cantor_generation: int | None = None,
        cantor_scale: Fraction = Fraction(1, 2),
        base_point: CirclePoint | None = None,
    ):
        self.alpha = alpha
        self.base_point = base_point if base_point is not None else point(alpha, 0, Fraction(1, 7))
        if (arcs is None) == (cantor_generation is None):
            raise ValueError("give exactly one of arcs / cantor_generation")
        self.arcs = tuple(arcs) if arcs is not None else ()
        self.cantor_generation = cantor_generation
        self.cantor_scale = Fraction(cantor_scale)
        self.deleted: tuple[Arc, ...] = ()
        if cantor_generation is not None:
            if cantor_generation < 1:
                raise ValueError("generation must be >= 1")
            deleted = []
            for j in range(1, cantor_generation + 1):
                length = self.cantor_scale * Fraction(1, 3**j)
                center = orbit_point(alpha, j)
                start = center - CirclePoint(alpha, 0, length / 2)
                deleted.append(Arc(start, length))
            self._check_disjoint(deleted)
            self.deleted = tuple(deleted)

    @staticmethod
    def _check_disjoint(arcs: Sequence[Arc]) -> None:
        for i, a in enumerate(arcs):
            for b in arcs[i + 1 :]:
                # overlap iff one start lies inside the other open arc
                for u, v in ((a, b), (b, a)):
                    off = v.start - u.start
                    if not off.is_zero and off.compare(CirclePoint(u.start.alpha, 0, u.length)) < 0:
                        raise ValueError("deleted arcs must be pairwise disjoint")

    # -- membership ----------------------------------------------------------

    def in_window(self, x: CirclePoint) -> bool:
        if self.cantor_generation is None:
            return any(arc.covers(x) for arc in self.arcs)
        return not any(arc.covers(x, open_arc=True) for arc in self.deleted)

    def symbol_at(self, n: int) -> int:
        return 1 if self.in_window(self.base_point.translate(n)) else 0

    def coding_word(self, n0: int, n1: int) -> list[int]:
        """Symbols over the window [n0, n1] along the base-point orbit."""
        return self.word(n1 - n0 + 1, n0=n0).tolist()

    def word(self, horizon: int, n0: int = 0) -> np.ndarray:
        """Coding word over [n0, n0 + horizon), bulk-evaluated with exact fallback."""
        n1 = n0 + horizon - 1
        if self.cantor_generation is None:
            tests = [(arc, "half_open") for arc in self.arcs]
        else:
            tests = [(arc, "open") for arc in self.deleted]
        cols = []
        for arc, mode in tests:
            if arc.full:
                cols.append(np.ones(horizon, dtype=np.uint8))
                continue
            walk = _CircleWalk(
                self.alpha,
                self.base_point.a - arc.start.a,
                self.base_point.b - arc.start.b,
                n0,
                n1,
            )
            w_num = walk.boundary(CirclePoint(self.alpha, 0, arc.length))
            sl, d = walk.slack, walk.D
            hits = np.zeros(horizon, dtype=np.uint8)
            for i, u in enumerate(walk.positions()):
                if u < sl or u > d - sl or abs(u - w_num) < sl:
                    x = self.base_point.translate(n0 + i)
                    hits[i] = 1 if arc.covers(x, open_arc=(mode == "open")) else 0
                else:
                    hits[i] = 1 if 0 < u < w_num else 0
            cols.append(hits)
        stacked = np.logical_or.reduce(cols) if cols else np.zeros(horizon, dtype=bool)
        if self.cantor_generation is None:
            return stacked.astype(np.uint8)
        return (~stacked).astype(np.uint8)

    def describe(self) -> dict:
        d = {"kind": self.kind, "alpha": self.alpha.describe()}
        if self.cantor_generation is not None:
            d["window"] = {
                "cantor_generation": self.cantor_generation,
                "scale": str(self.cantor_scale),
            }
        else:
            d["window"] = [[f"{a.start.a}a{a.start.b:+}", str(a.length)] for a in self.arcs]
        return d


def full_shift_word(window: int) -> np.ndarray:
    """A binary de Bruijn word of order ``window``: every length-``window``
    pattern occurs.  Serves as the full-shift coding at that window size."""
    if window < 1 or window > 24:
        raise ValueError("window must be in 1..24")
    # standard greedy (prefer-one) de Bruijn construction
    seen = bytearray(1 << window)
    word = [0] * window
    state = 0
    seen[0] = 1
    mask = (1 << window) - 1
    for _ in range((1 << window) - 1):
        nxt1 = ((state << 1) | 1) & mask
        nxt0 = (state << 1) & mask
        if not seen[nxt1]:
            seen[nxt1] = 1
            word.append(1)
            state = nxt1
        else:
            seen[nxt0] = 1
            word.append(0)
            state = nxt0
    word.extend(word[:window])  # wrap so cyclic patterns appear linearly
    return np.asarray(word, dtype=np.uint8)


# ---------------------------------------------------------------------------
# the cos(1/x) system
# ---------------------------------------------------------------------------


def sampling_function(theta: CirclePoint) -> float:
    """F(theta): cos(2*pi/theta) on (0,1/2), 2*theta on [1/2,1), 0 at 0.

    The only discontinuity is at 0.  Large arguments of cos are reduced
    exactly through the rational enclosure of 1/theta.
    """
    if theta.is_zero:
        return 0.0
    half = Fraction(1, 2)
    lo, hi = theta.bounds(Fraction(1, 10**40))
    mid = (lo + hi) / 2
    if theta.is_rational:
        in_upper = theta.b >= half
    else:
        in_upper = theta.compare(CirclePoint(theta.alpha, 0, half)) >= 0
    if in_upper:
        return float(2 * mid)
    inv = 1 / mid
    frac = inv - (inv.numerator // inv.denominator)
    return math.cos(TWO_PI * float(frac))


@dataclass(frozen=True)
class CosFiber:
    """Point over the orbit point k*alpha: coordinates follow the sampled
    sequence except at -k, which carries ``value``."""

    k: int
    value: float


@dataclass(frozen=True)
class CosRegular:
    """The unique point over a base that is off the orbit of 0."""

    theta: CirclePoint


CosPointT = CosFiber | CosRegular


class CosSystem:
    """Orbit closure of the cos(1/x)-sampled sequence over the rotation."""

    kind = "cos"

    def __init__(self, alpha: RotationNumber = GOLDEN, horizon: int = 20):
        self.alpha = alpha
        self.horizon = horizon
        self._f_cache: dict[int, float] = {}

    def f(self, n: int) -> float:
        """F(n*alpha), the sampled sequence."""
        if n not in self._f_cache:
            self._f_cache[n] = sampling_function(orbit_point(self.alpha, n))
        return self._f_cache[n]

    def generator_point(self) -> CosFiber:
        """The orbit generator; its 0-coordinate is F(0) = 0."""
        return CosFiber(0, self.f(0))

    def fiber_point(self, k: int, value: float) -> CosFiber:
        if not (value == 2.0 or -1.0 <= value <= 1.0):
            raise ValueError("fiber coordinate must be 2 or in [-1,1]")
        return CosFiber(k, value)

    def regular_point(self, theta: CirclePoint) -> CosRegular:
        if theta.on_orbit:
            raise ValueError("base lies on the orbit; use a fiber point")
        return CosRegular(theta)

    def base(self, x: CosPointT) -> CirclePoint:
        return orbit_point(self.alpha, x.k) if isinstance(x, CosFiber) else x.theta

    def step(self, x: CosPointT, n: int = 1) -> CosPointT:
        if isinstance(x, CosFiber):
            return CosFiber(x.k + n, x.value)
        return CosRegular(x.theta.translate(n))

    def coordinate(self, x: CosPointT, m: int) -> float:
        if isinstance(x, CosFiber):
            return x.value if m == -x.k else self.f(m + x.k)
        return sampling_function(x.theta.translate(m))

    def coding_word(self, x: CosPointT, n0: int, n1: int) -> list[float]:
        return [self.coordinate(x, m) for m in range(n0, n1 + 1)]

    def metric(self, x: CosPointT, y: CosPointT, horizon: int | None = None) -> float:
        """max of the base distance and the weighted sup over coordinates."""
        h = self.horizon if horizon is None else horizon
        bd = self.base(x) - self.base(y)
        v = bd.as_float()
        d = min(v, 1.0 - v) if not bd.is_zero else 0.0
        for m in range(-h, h + 1):
            w = 2.0 ** (-abs(m))
            diff = w * abs(self.coordinate(x, m) - self.coordinate(y, m))
            if diff > d:
                d = diff
        return d

    def describe(self) -> dict:
        return {"kind": self.kind, "alpha": self.alpha.describe(), "horizon": self.horizon}


# ---------------------------------------------------------------------------
# odometer semicocycle cascade
# ---------------------------------------------------------------------------


def _inv_mod_pow2(b: int, bits: int) -> int:
    """Inverse of odd b modulo 2**bits (Newton lift)."""
    x = 1
    for _ in range(bits.bit_length() + 1):
        x = (x * (2 - b * x)) % (1 << bits)
    return x % (1 << bits)


def _dyadic_bits(t: Fraction, bits: int) -> int:
    """The 2-adic expansion of t (odd denominator) truncated to ``bits`` bits."""
    num, den = t.numerator, t.denominator
    if den % 2 == 0:
        raise ValueError("not a 2-adic integer")
    return (num * _inv_mod_pow2(den, bits)) % (1 << bits)


class SemicocycleCascade:
    """Dyadic odometer with marked points y_n and a sampling function whose
    one-sided limit sets at y_n have exactly n values.

    Marked points are the 2-adic rationals y_n = -2^n/(2^(n+1)-1), i.e. the
    digit streams 0^n (1 0^n)^inf: they converge to 0, lie in pairwise
    distinct orbits, and stay off the orbit of the sampling base point
    y0 = -3/7 = (110)^inf.  Around y_n the nested cylinders B(n,k) consist of
    the points agreeing with y_n to depth n+k; the function takes the value
    (k mod n)/n^2 on the shell B(n,k) without B(n,k+1) and 0 elsewhere.
    """

    kind = "semicocycle"

    def __init__(self, n_max: int = 8, depth: int = 24):
        self.n_max = n_max
        self.depth = depth
        self.y0 = Fraction(-3, 7)
        for n in range(1, n_max + 1):
            d = self.marked(n) - self.y0
            if d.denominator == 1:
                raise ValueError("base point shares an orbit with a marked point")
            for m in range(n + 1, n_max + 1):
                if (self.marked(n) - self.marked(m)).denominator == 1:
                    raise ValueError("marked points share an orbit")

    @staticmethod
    def marked(n: int) -> Fraction:
        return Fraction(-(2**n), 2 ** (n + 1) - 1)

    def value(self, t: Fraction) -> Fraction:
        """The sampling value at a 2-adic rational point of the odometer."""
        for n in range(1, self.n_max + 1):
            if t == self.marked(n):
                return Fraction(0)
        bits = self.depth
        while True:
            x = _dyadic_bits(t, bits)
            if x == 0:
                if t == 0:
                    return Fraction(0)
                bits *= 2
                continue
            n = (x & -x).bit_length() - 1  # position of the lowest 1 = first 1 digit
            if n < 1 or n > self.n_max:
                return Fraction(0)  # outside every marked cylinder family
            agree = self._agreement(t, n, bits)
            if agree is None:
                bits *= 2
                continue
            k = agree - n
            if k < 1:
                return Fraction(0)
            return Fraction(k % n, n * n)

    def _agreement(self, t: Fraction, n: int, bits: int) -> int | None:
        """Length of the common digit prefix of t and y_n (None: unresolved)."""
        diff = t - self.marked(n)
        if diff == 0:
            return None
        num, den = diff.numerator, diff.denominator
        if den % 2 == 0:
            raise ValueError("not a 2-adic integer")
        v = 0
        while num % 2 == 0:
            num //= 2
            v += 1
        return v if v < bits else None

    def orbit_value(self, j: int, m: int = 0) -> Fraction:
        """Sampling value at S^(j+m) y0."""
        return self.value(self.y0 + j + m)

    def shell_representative(self, n: int, k: int) -> int:
        """An integer j with S^j y0 in exactly the k-th shell around y_n."""
        bits = n + k + 1
        t = _dyadic_bits(self.marked(n) - self.y0, bits)
        return (t % (1 << (n + k))) ^ (1 << (n + k))  # flip the next digit

    def fiber_traces(self, n: int, depth: int | None = None, window: int = 6):
        """Distinct finite traces over the marked point y_n at the truncation.

        Each shell k = 1..depth-n contributes the trace of an actual orbit
        point entering that shell; traces agree off coordinate 0 and their
        0-values enumerate the n limit values once depth >= 2n.
        """
        depth = self.depth if depth is None else depth
        if depth < n + 2:
            raise DepthInsufficient(f"depth {depth} cannot separate cylinders around y_{n}")
        limit_tail = {m: self.value(self.marked(n) + m) for m in range(-window, window + 1) if m != 0}
        traces = set()
        for k in range(1, depth - n + 1):
            j = self.shell_representative(n, k)
            head = self.orbit_value(j, 0)
            traces.add(head)
            if k == depth - n:  # deepest shell: cross-check the off-0 coordinates
                for m, lim in limit_tail.items():
                    got = self.orbit_value(j, m)
                    if got != lim:
                        raise DepthInsufficient(
                            f"coordinate {m} not settled at depth {depth} over y_{n}"
                        )
        return [tuple([v] + [limit_tail[m] for m in sorted(limit_tail)]) for v in sorted(traces)]

    def fiber_cardinalities(self, k_max: int, depth: int | None = None) -> dict[int, int]:
        """Computed fiber cardinality over each marked point y_k."""
        return {n: len(self.fiber_traces(n, depth)) for n in range(1, k_max + 1)}

    def unmarked_fiber_cardinality(self, j0: int, depth: int | None = None, window: int = 6) -> int:
        """Fiber cardinality over the (unmarked) orbit point S^j0 y0: always 1."""
        depth = self.depth if depth is None else depth
        traces = set()
        for c in (1, 2, 3):
            j = j0 + (c << depth)
            traces.add(tuple(self.orbit_value(j, m) for m in range(-window, window + 1)))
        if len(traces) != 1:
            raise DepthInsufficient(f"approaches to S^{j0} y0 not settled at depth {depth}")
        return 1

    def describe(self) -> dict:
        return {"kind": self.kind, "n_max": self.n_max, "depth": self.depth}


# ---------------------------------------------------------------------------
# asymptotic defect
# ---------------------------------------------------------------------------


def asymptotic_defect(system, x, y, window: tuple[int, int]) -> set[int]:
    """Coordinates in the window where the orbit codings of x and y differ.

    Both points must sit in the same fiber of the structure map (equal bases).
    """
    n0, n1 = window
    if isinstance(system, SplitCircleSystem):
        if x.base.compare(y.base) != 0:
            raise ValueError("points lie over different base points")
        wx = system.coding_word(x, n0, n1)
        wy = system.coding_word(y, n0, n1)
        return {n0 + i for i, (a, b) in enumerate(zip(wx, wy)) if a != b}
    if isinstance(system, CosSystem):
        bx, by = system.base(x), system.base(y)
        if bx.compare(by) != 0:
            raise ValueError("points lie over different base points")
        out = set()
        for m in range(n0, n1 + 1):
            if system.coordinate(x, m) != system.coordinate(y, m):
                out.add(m)
        return out
    raise TypeError(f"no defect rule for {type(system).__name__}")


# ---------------------------------------------------------------------------
# named system specs
# ---------------------------------------------------------------------------


def load_system(spec: dict):
    """Build a system from a spec mapping (documented keys: kind, alpha,
    split_set, partition, window, depth, horizon, scale, generation)."""
    from .exactarith import parse_rotation_number

    kind = spec.get("kind")
    alpha = parse_rotation_number(spec["alpha"]) if "alpha" in spec else GOLDEN
    if kind == "split_circle":
        return SplitCircleSystem(alpha, split=spec.get("split_set", "orbit"))
    if kind == "rotation":
        return RotationSystem(alpha)
    if kind == "cos":
        return CosSystem(alpha, horizon=spec.get("horizon", 20))
    if kind == "cut_project":
        win = spec.get("window", {})
        if "cantor_generation" in win:
            return CutProjectCoding(
                alpha,
                cantor_generation=int(win["cantor_generation"]),
                cantor_scale=Fraction(win.get("scale", "1/2")),
            )
        arcs = tuple(
            Arc(point(alpha, int(a), Fraction(b)), Fraction(ln)) for a, b, ln in win["arcs"]
        )
        return CutProjectCoding(alpha, arcs=arcs)
    if kind == "semicocycle":
        return SemicocycleCascade(n_max=spec.get("n_max", 8), depth=spec.get("depth", 24))
    raise ValueError(f"unknown system kind: {kind!r}")
