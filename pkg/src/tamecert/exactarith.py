"""Exact arithmetic over the rotation subgroup Z*alpha + Q, reduced mod 1.

alpha is an irrational number in (0,1) described by its continued fraction
(finite prefix plus an optional eventually-periodic tail), so every order
decision reduces to refining convergent enclosures until they become
conclusive.  A nonzero element a*alpha + b of the subgroup is never an
integer, hence every comparison terminates; the hard refinement cap only
guards against inconsistent inputs.
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import QuotientsExhausted, RefinementLimit

REFINEMENT_CAP = 10_000

_CF_RE = re.compile(r"^cf:\[0;(?P<body>[^\]]*)\]$")


class RotationNumber:
    """An irrational alpha = [0; a1, a2, ...] in (0,1).

    ``prefix`` holds the leading partial quotients, ``period`` an optional
    repeating tail (quadratic irrationals).  Without a period the quotient
    supply is finite and deep refinements raise QuotientsExhausted.
    """

    def __init__(self, prefix: Sequence[int] = (), period: Sequence[int] | None = None):
        prefix = tuple(int(a) for a in prefix)
        period = tuple(int(a) for a in period) if period is not None else None
        if any(a < 1 for a in prefix):
            raise ValueError("partial quotients must be >= 1")
        if period is not None:
            if not period:
                raise ValueError("declared period must be nonempty")
            if any(a < 1 for a in period):
                raise ValueError("partial quotients must be >= 1")
        if period is None and not prefix:
            raise ValueError("need at least one partial quotient")
        self.prefix = prefix
        self.period = period
        # p_k/q_k with p_0/q_0 = 0/1 and the usual recurrence; p_{-1}/q_{-1} = 1/0.
        # The cache grows under a lock so instances are safe to share across
        # concurrent workers.
        self._p = [0]
        self._q = [1]
        self._lock = threading.Lock()

    # -- partial quotients -------------------------------------------------

    def quotient(self, k: int) -> int:
        """k-th partial quotient a_k, 1-indexed."""
        if k < 1:
            raise ValueError("quotient index is 1-based")
        if k <= len(self.prefix):
            return self.prefix[k - 1]
        if self.period is None:
            raise QuotientsExhausted(
                f"alpha has only {len(self.prefix)} partial quotients, asked for a_{k}"
            )
        return self.period[(k - len(self.prefix) - 1) % len(self.period)]

    def quotients(self, count: int) -> list[int]:
        return [self.quotient(k) for k in range(1, count + 1)]

    # -- convergents --------------------------------------------------------

    def _extend(self, k: int) -> None:
        if len(self._p) > k:
            return
        with self._lock:
            while len(self._p) <= k:
                i = len(self._p)
                a = self.quotient(i)
                pm2 = self._p[i - 2] if i >= 2 else 1
                qm2 = self._q[i - 2] if i >= 2 else 0
                self._p.append(a * self._p[i - 1] + pm2)
                self._q.append(a * self._q[i - 1] + qm2)

    def numerator(self, k: int) -> int:
        self._extend(k)
        return self._p[k]

    def denominator(self, k: int) -> int:
        self._extend(k)
        return self._q[k]

    def convergent(self, k: int) -> Fraction:
        """p_k/q_k (k >= 0; convergent(0) is the trivial 0/1)."""
        self._extend(k)
        return Fraction(self._p[k], self._q[k])

    def convergents(self, count: int) -> list[Fraction]:
        """The first ``count`` nontrivial convergents p_1/q_1 ... p_count/q_count."""
        if count < 1:
            raise ValueError("count must be >= 1")
        return [self.convergent(k) for k in range(1, count + 1)]

    def enclosure(self, level: int) -> tuple[Fraction, Fraction]:
        """Rational (lo, hi) with lo < alpha < hi, from consecutive convergents."""
        c0 = self.convergent(level)
        c1 = self.convergent(level + 1)
        return (c0, c1) if c0 < c1 else (c1, c0)

    def level_for(self, width: Fraction) -> int:
        """Smallest level whose enclosure width 1/(q_k q_{k+1}) is <= width."""
        if width <= 0:
            raise ValueError("width must be positive")
        num, den = width.numerator, width.denominator
        k = 1
        # integer comparison q_k * q_{k+1} * num >= den avoids Fraction churn
        while self.denominator(k) * self.denominator(k + 1) * num < den:
            k += 1
        return k

    def gap_upper(self, k: int) -> Fraction:
        """Certified upper bound 1/q_{k+1} on |q_k*alpha - p_k|."""
        return Fraction(1, self.denominator(k + 1))

    def gap_lower(self, k: int) -> Fraction:
        """Certified lower bound 1/(q_{k+1} + q_k) on |q_k*alpha - p_k|."""
        return Fraction(1, self.denominator(k + 1) + self.denominator(k))

    def approx(self, eps: Fraction) -> Fraction:
        """A rational within eps of alpha."""
        level = 1
        for _ in range(REFINEMENT_CAP):
            lo, hi = self.enclosure(level)
            if hi - lo < eps:
                return (lo + hi) / 2
            level += 1
        raise RefinementLimit("alpha approximation did not converge")

    def frac_multiple(self, n: int, eps: Fraction) -> Fraction:
        """A rational within eps of n*alpha mod 1 (approximation; not for order proofs)."""
        if n == 0:
            return Fraction(0)
        a = self.approx(eps / (2 * abs(n)))
        v = (n * a) % 1
        return v

    # -- misc ----------------------------------------------------------------

    def __float__(self) -> float:
        return float(self.approx(Fraction(1, 10**20)))

    def describe(self) -> str:
        parts = [str(a) for a in self.prefix]
        if self.period is not None:
            if len(self.period) == 1:
                parts += [str(self.period[0]), "..."]
            else:
                parts.append("(" + ",".join(str(a) for a in self.period) + ")")
        return "cf:[0;" + ",".join(parts) + "]"

    def __repr__(self) -> str:
        return f"RotationNumber({self.describe()!r})"

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, RotationNumber):
            return NotImplemented
        return self.prefix == other.prefix and self.period == other.period

    def __hash__(self):
        return hash((self.prefix, self.period))


def parse_rotation_number(text: str) -> RotationNumber:
    """Parse the cf text syntax: ``cf:[0;1,1,1,...]`` or ``cf:[0;2,(1,3)]``.

    A trailing ``...`` repeats the last listed quotient forever; a
    parenthesized group is an explicit period.
    """
    m = _CF_RE.match(text.strip())
    if not m:
        raise ValueError(f"not a continued-fraction literal: {text!r}")
    body = m.group("body").strip()
    if not body:
        raise ValueError("empty continued fraction")
    period: tuple[int, ...] | None = None
    pm = re.search(r"\((?P<per>[0-9,\s]+)\)\s*$", body)
    if pm:
        period = tuple(int(x) for x in pm.group("per").split(","))
        body = body[: pm.start()].rstrip().rstrip(",")
    elif body.endswith("..."):
        body = body[:-3].rstrip().rstrip(",")
        if not body:
            raise ValueError("'...' needs at least one quotient before it")
        last = int(body.split(",")[-1])
        period = (last,)
    prefix = tuple(int(x) for x in body.split(",")) if body else ()
    return RotationNumber(prefix, period)


GOLDEN = RotationNumber((), period=(1,))
SQRT2_MINUS_1 = RotationNumber((), period=(2,))


# ---------------------------------------------------------------------------
# points of the subgroup Z*alpha + Q mod 1
# ---------------------------------------------------------------------------


def _floor_linear(alpha: RotationNumber, a: int, b: Fraction) -> int:
    """floor(a*alpha + b), exact.  Terminates because a*alpha + b is an
    integer only when a == 0 (then b decides directly)."""
    if a == 0:
        return b.numerator // b.denominator
    width = Fraction(1, 4 * abs(a))
    for _ in range(REFINEMENT_CAP):
        lo, hi = alpha.enclosure(alpha.level_for(width))
        vlo, vhi = (a * lo + b, a * hi + b) if a > 0 else (a * hi + b, a * lo + b)
        flo = vlo.numerator // vlo.denominator
        fhi = vhi.numerator // vhi.denominator
        if flo == fhi:
            return flo
        width /= 2**10
    raise RefinementLimit(f"floor({a}*alpha + {b}) did not resolve")


@dataclass(frozen=True)
class CirclePoint:
    """a*alpha + b reduced so the represented value lies in [0,1).

    The representation is unique: for irrational alpha, a*alpha + b is
    rational only when a == 0.
    """

    alpha: RotationNumber
    a: int
    b: Fraction

    def __post_init__(self):
        b = self.b if isinstance(self.b, Fraction) else Fraction(self.b)
        n = _floor_linear(self.alpha, self.a, b)
        object.__setattr__(self, "b", b - n)

    # -- group structure ----------------------------------------------------

    def __add__(self, other: "CirclePoint") -> "CirclePoint":
        self._check_same_alpha(other)
        return CirclePoint(self.alpha, self.a + other.a, self.b + other.b)

    def __sub__(self, other: "CirclePoint") -> "CirclePoint":
        self._check_same_alpha(other)
        return CirclePoint(self.alpha, self.a - other.a, self.b - other.b)

    def __neg__(self) -> "CirclePoint":
        return CirclePoint(self.alpha, -self.a, -self.b)

    def translate(self, n: int) -> "CirclePoint":
        """The point + n*alpha (one rotation step per unit of n)."""
        return CirclePoint(self.alpha, self.a + n, self.b)

    def _check_same_alpha(self, other: "CirclePoint") -> None:
        if self.alpha is not other.alpha and self.alpha != other.alpha:
            raise ValueError("points use different rotation numbers")

    # -- predicates -----------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    @property
    def is_rational(self) -> bool:
        return self.a == 0

    @property
    def on_orbit(self) -> bool:
        """True when the point is n*alpha mod 1 for some integer n (= self.a)."""
        return self.b.denominator == 1

    @property
    def orbit_index(self) -> int:
        if not self.on_orbit:
            raise ValueError("not an orbit point")
        return self.a

    # -- certified value access ----------------------------------------------

    def bounds(self, eps: Fraction) -> tuple[Fraction, Fraction]:
        """Rational (lo, hi) with lo <= value <= hi and hi - lo <= eps."""
        if self.a == 0:
            return (self.b, self.b)
        eps = eps if isinstance(eps, Fraction) else Fraction(eps)
        alo, ahi = self.alpha.enclosure(self.alpha.level_for(eps / abs(self.a)))
        if self.a > 0:
            return self.a * alo + self.b, self.a * ahi + self.b
        return self.a * ahi + self.b, self.a * alo + self.b

    def as_float(self) -> float:
        lo, hi = self.bounds(Fraction(1, 10**22))
        return float((lo + hi) / 2)

    # -- order ------------------------------------------------------------------

    def compare(self, other: "CirclePoint") -> int:
        """-1, 0, +1 comparing the represented values in [0,1)."""
        self._check_same_alpha(other)
        da, db = self.a - other.a, self.b - other.b
        if da == 0:
            if db == 0:
                return 0
            return 1 if db > 0 else -1
        # sign of da*alpha + db, refined until 0 is excluded
        width = Fraction(1, 16 * abs(da))
        for _ in range(REFINEMENT_CAP):
            alo, ahi = self.alpha.enclosure(self.alpha.level_for(width))
            lo, hi = (da * alo + db, da * ahi + db) if da > 0 else (da * ahi + db, da * alo + db)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            width /= 2**10
        raise RefinementLimit("comparison did not separate (inputs inconsistent?)")

    def __lt__(self, other):
        return self.compare(other) < 0

    def __le__(self, other):
        return self.compare(other) <= 0

    def __gt__(self, other):
        return self.compare(other) > 0

    def __ge__(self, other):
        return self.compare(other) >= 0

    def __repr__(self):
        return f"CirclePoint({self.a}*a+{self.b})"


def point(alpha: RotationNumber, a: int, b=0) -> CirclePoint:
    return CirclePoint(alpha, a, Fraction(b))


def zero(alpha: RotationNumber) -> CirclePoint:
    return CirclePoint(alpha, 0, Fraction(0))


def orbit_point(alpha: RotationNumber, n: int) -> CirclePoint:
    return CirclePoint(alpha, n, Fraction(0))


def compare(x: CirclePoint, y: CirclePoint) -> str:
    """Ordering of two points as 'less' | 'equal' | 'greater'."""
    c = x.compare(y)
    return "less" if c < 0 else ("greater" if c > 0 else "equal")


def cyclic_gap(frm: CirclePoint, to: CirclePoint) -> CirclePoint:
    """(to - frm) mod 1 as a point; its value is the forward arc length."""
    return to - frm


def in_half_open_arc(x: CirclePoint, lo: CirclePoint, length: Fraction) -> bool:
    """x in the cyclic arc [lo, lo + length), decided exactly."""
    arc = CirclePoint(x.alpha, 0, length)
    return (x - lo).compare(arc) < 0


# ---------------------------------------------------------------------------
# certified one-sided approach sequences
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ApproachSequence:
    """Times n_i with n_i*alpha mod 1 -> target strictly from one side.

    error_bounds[i] is a certified rational upper bound on the circle
    distance |n_i*alpha - target|; the bounds strictly decrease to 0.
    """

    target: CirclePoint
    side: str  # 'below' | 'above'
    times: tuple[int, ...]
    error_bounds: tuple[Fraction, ...]

    def __post_init__(self):
        if self.side not in ("below", "above"):
            raise ValueError("side must be 'below' or 'above'")

    def gap_point(self, n: int) -> CirclePoint:
        """Signed gap as a point: (target - n*alpha) for 'below', reversed for 'above'."""
        reached = orbit_point(self.target.alpha, n)
        return (self.target - reached) if self.side == "below" else (reached - self.target)

    def verify(self) -> bool:
        """Re-check every term: gap strictly positive and within its bound."""
        prev = None
        for n, bound in zip(self.times, self.error_bounds):
            g = self.gap_point(n)
            if g.is_zero:
                return False
            lo, hi = g.bounds(bound / 4)
            if not (lo > 0 and hi <= bound):
                return False
            if prev is not None and bound >= prev:
                return False
            prev = bound
        return True


def _delta_point(alpha: RotationNumber, k: int) -> CirclePoint:
    """|q_k*alpha - p_k| as an exact point (its value is in (0,1))."""
    p, q = alpha.numerator(k), alpha.denominator(k)
    if k % 2 == 0:  # q_k*alpha - p_k > 0
        return CirclePoint(alpha, q, Fraction(-p))
    return CirclePoint(alpha, -q, Fraction(p))


def one_sided_approach(target: CirclePoint, side: str, depth: int) -> ApproachSequence:
    """Times approaching the target strictly from the declared side.

    Orbit targets get the translated denominator ladder (even-index
    convergents approach from above, odd from below).  Targets with a
    genuine rational part are reached by a greedy walk that subtracts
    exactly-represented convergent errors from the remaining gap, so every
    emitted bound is certified.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if side not in ("below", "above"):
        raise ValueError("side must be 'below' or 'above'")
    alpha = target.alpha

    if target.on_orbit:
        parity = 0 if side == "above" else 1
        times, bounds = [], []
        k = parity
        while len(times) < depth:
            times.append(target.a + alpha.denominator(k))
            bounds.append(alpha.gap_upper(k))
            k += 2
        return ApproachSequence(target, side, tuple(times), tuple(bounds))

    # greedy walk: maintain n and the exact remaining gap on the declared side
    n = target.a
    gap = CirclePoint(alpha, 0, target.b if side == "below" else -target.b)
    parity = 0 if side == "below" else 1  # even k steps move right, odd move left
    times: list[int] = []
    bounds: list[Fraction] = []
    prev_bound: Fraction | None = None
    while len(times) < depth:
        eps = Fraction(1, 10**6)
        for _ in range(REFINEMENT_CAP):
            glo, _ = gap.bounds(eps)
            if glo > 0:
                break
            eps /= 10**6
        else:
            raise RefinementLimit("gap lower bound did not resolve")
        k = parity
        while alpha.gap_upper(k) >= glo:
            k += 2
        n += alpha.denominator(k)
        gap = gap - _delta_point(alpha, k)
        # certify a strictly decreasing rational bound on the new gap
        eps = alpha.gap_upper(k)
        for _ in range(REFINEMENT_CAP):
            lo, hi = gap.bounds(eps)
            if lo > 0 and (prev_bound is None or hi < prev_bound):
                break
            eps /= 16
        else:
            raise RefinementLimit("could not certify decreasing bound")
        times.append(n)
        bounds.append(hi)
        prev_bound = hi
    return ApproachSequence(target, side, tuple(times), tuple(bounds))
