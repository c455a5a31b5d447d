"""Finite-horizon enveloping-semigroup elements and their certificates.

Elements are approximated on finite sample sets: exactly, when the system
exposes a closed-form limit rule for the generator (split-circle one-sided
limits, plain rotations, the upper-region cos limits), or numerically by a
declared stabilization contract (two consecutive generator stages within the
tolerance at every sample point).  On top of the elements sit the
certificates: determining sets, no-countable-basis witnesses, Sorgenfrey
isolation rectangles and rigidity probes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Sequence

from .errors import NoWitness, NotInIdeal, NotStabilized, SampleMismatch
from .exactarith import ApproachSequence, CirclePoint, one_sided_approach, orbit_point
from .systems import (
    MINUS,
    PLAIN,
    PLUS,
    CosFiber,
    CosPointT,
    CosRegular,
    CosSystem,
    RotationSystem,
    SplitCircleSystem,
    SplitPoint,
)

# ---------------------------------------------------------------------------
# samples and metrics
# ---------------------------------------------------------------------------


class CodingMetric:
    """Split-circle sample metric: weighted sup over truncated coding words,
    refined by the base arc distance.

    The word part alone is only a pseudometric at a finite horizon (points in
    one cylinder coincide), and the base part alone carries the unsplit
    topology; their maximum is a genuine metric, faithful to the split
    structure at scales above the truncation."""

    def __init__(self, system: SplitCircleSystem, horizon: int = 8):
        self.system = system
        self.horizon = horizon
        self._words: dict[SplitPoint, list[int]] = {}
        self._pos: dict[SplitPoint, float] = {}

    def word(self, x: SplitPoint) -> list[int]:
        w = self._words.get(x)
        if w is None:
            w = self.system.coding_word(x, -self.horizon, self.horizon)
            self._words[x] = w
        return w

    def position(self, x: SplitPoint) -> float:
        v = self._pos.get(x)
        if v is None:
            v = x.base.as_float()
            self._pos[x] = v
        return v

    def __call__(self, x: SplitPoint, y: SplitPoint) -> float:
        wx, wy = self.word(x), self.word(y)
        h = self.horizon
        base = abs(self.position(x) - self.position(y))
        best = min(base, 1.0 - base) if x.base != y.base else 0.0
        for i, (a, b) in enumerate(zip(wx, wy)):
            if a != b:
                d = 2.0 ** (-abs(i - h))
                if d > best:
                    best = d
        return best


class CircleMetric:
    """Arc-length distance on plain circle points (cached float positions)."""

    def __init__(self):
        self._pos: dict[CirclePoint, float] = {}

    def position(self, x: CirclePoint) -> float:
        v = self._pos.get(x)
        if v is None:
            v = x.as_float()
            self._pos[x] = v
        return v

    def __call__(self, x: CirclePoint, y: CirclePoint) -> float:
        d = abs(self.position(x) - self.position(y))
        return min(d, 1.0 - d)


@dataclass
class SampleSet:
    """A finite stand-in for the phase space: points plus a metric."""

    points: list
    metric: Callable[[Any, Any], float]
    label: str = ""

    def __post_init__(self):
        if not self.points:
            raise ValueError("sample must be nonempty")

    def __len__(self):
        return len(self.points)

    def check_metric_axioms(self, trials: int = 40, seed: int = 0) -> bool:
        """Spot-check symmetry, identity and the triangle inequality."""
        import random

        rng = random.Random(seed)
        pts = self.points
        for _ in range(trials):
            x, y, z = (rng.choice(pts) for _ in range(3))
            dxy, dyx = self.metric(x, y), self.metric(y, x)
            if abs(dxy - dyx) > 1e-12:
                return False
            if x == y and dxy != 0:
                return False
            if x != y and dxy == 0 and type(x) == type(y):
                return False
            if self.metric(x, z) > dxy + self.metric(y, z) + 1e-12:
                return False
        return True


def split_sample(
    system: SplitCircleSystem,
    plain_count: int = 120,
    split_range: int = 12,
    horizon: int = 8,
    extra_bases: Sequence[CirclePoint] = (),
) -> SampleSet:
    """Plain rationals k/denominator plus split pairs over the orbit window.

    ``extra_bases`` admits designated base points (e.g. preimages of split
    points under a one-sided limit under study, so its side tag shows up on
    the sample images).
    """
    pts: list[SplitPoint] = []
    denom = plain_count + 1
    for k in range(1, denom):
        base = CirclePoint(system.alpha, 0, Fraction(k, denom))
        if not system.splits(base):
            pts.append(SplitPoint(base, PLAIN))
    for n in range(-split_range, split_range + 1):
        y = orbit_point(system.alpha, n)
        if system.splits(y):
            pts.append(SplitPoint(y, MINUS))
            pts.append(SplitPoint(y, PLUS))
    for base in extra_bases:
        for x in system.split_fiber(base):
            if x not in pts:
                pts.append(x)
    return SampleSet(pts, CodingMetric(system, horizon), label="split_circle")


def rotation_sample(system: RotationSystem, count: int = 120) -> SampleSet:
    pts = [CirclePoint(system.alpha, 0, Fraction(k, count + 1)) for k in range(count + 1)]
    return SampleSet(pts, CircleMetric(), label="rotation")


def cos_sample(
    system: CosSystem,
    orbit_range: int = 8,
    fiber_values: Sequence[float] = (2.0, -1.0, -0.5, 0.0, 0.5, 1.0),
    regular_denoms: Sequence[int] = (7, 11, 13),
) -> SampleSet:
    pts: list[CosPointT] = []
    for k in range(-orbit_range, orbit_range + 1):
        for v in fiber_values:
            pts.append(CosFiber(k, v))
    for d in regular_denoms:
        pts.append(CosRegular(CirclePoint(system.alpha, 0, Fraction(1, d))))
    return SampleSet(pts, lambda x, y: system.metric(x, y), label="cos")


# ---------------------------------------------------------------------------
# approximated elements
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ElementClass:
    tag: str  # translation | parabolic | loxodromic | one_sided | unresolved
    params: dict = field(default_factory=dict)

    def __repr__(self):
        inner = ", ".join(f"{k}={v!r}" for k, v in self.params.items())
        return f"{self.tag}({inner})"


@dataclass(frozen=True)
class CosElement:
    """Exact image rule v_eps g_gamma of the cos-system minimal ideal."""

    eps: float
    gamma: CirclePoint

    def apply(self, system: CosSystem, x: CosPointT) -> CosPointT:
        nb = system.base(x) + self.gamma
        if nb.on_orbit:
            return CosFiber(nb.orbit_index, self.eps)
        return CosRegular(nb)


@dataclass
class ApproxElement:
    """A sampled enveloping-semigroup element with provenance.

    ``images[i]`` is the image of ``sample.points[i]``.  Exact-backend
    elements also carry ``rule``, a closed-form image map usable off-sample.
    """

    system: Any
    sample: SampleSet
    images: list
    generator: Any  # ApproachSequence | tuple of times
    backend: str  # 'exact' | 'numeric'
    tolerance: float | None
    stabilized: bool
    rule: Callable[[Any], Any] | None = None
    _index: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._index = {p: i for i, p in enumerate(self.sample.points)}

    def image_of(self, x):
        i = self._index.get(x)
        if i is not None:
            return self.images[i]
        if self.rule is not None:
            return self.rule(x)
        raise SampleMismatch(f"{x!r} outside the sampled domain and no exact rule")

    def times(self) -> tuple[int, ...]:
        if isinstance(self.generator, ApproachSequence):
            return tuple(self.generator.times)
        return tuple(self.generator)


def _exact_rule(system, approach: ApproachSequence):
    """Closed-form limit rule for the generator, when the system has one."""
    gamma, side = approach.target, approach.side
    if isinstance(system, SplitCircleSystem):
        tag = MINUS if side == "below" else PLUS

        def rule(x: SplitPoint) -> SplitPoint:
            nb = x.base + gamma
            return SplitPoint(nb, tag if system.splits(nb) else PLAIN)

        return rule
    if isinstance(system, RotationSystem):
        return lambda x: x + gamma
    if isinstance(system, CosSystem) and side == "below":
        # approach through [1/2, 1): the sampled values 2*{h} converge to 2
        return lambda x: CosElement(2.0, gamma).apply(system, x)
    return None


def limit_map(
    system,
    generator,
    sample: SampleSet,
    tolerance: float = 1e-9,
    max_stages: int = 64,
) -> ApproxElement:
    """Limit of T^{n_i} on the sample along the generator times.

    Exact backend whenever the generator is an approach sequence for which
    the system has a closed-form limit rule; otherwise numeric stabilization:
    the images of two consecutive stages must agree within the tolerance at
    every sample point, else NotStabilized.
    """
    if isinstance(generator, ApproachSequence):
        rule = _exact_rule(system, generator)
        if rule is not None:
            return ApproxElement(
                system=system,
                sample=sample,
                images=[rule(x) for x in sample.points],
                generator=generator,
                backend="exact",
                tolerance=None,
                stabilized=True,
                rule=rule,
            )
        times = list(generator.times)
    else:
        times = list(generator)
    if not times:
        raise ValueError("empty generator")
    if any(b < a for a, b in zip(times, times[1:])):
        raise ValueError("generator times must be monotone")
    times = times[:max_stages]
    if len(times) == 1:
        n = times[0]
        images = [system.step(x, n) for x in sample.points]
        return ApproxElement(
            system, sample, images, generator, "exact", None, True,
            rule=lambda x, n=n: system.step(x, n),
        )
    prev = [system.step(x, times[0]) for x in sample.points]
    last_delta = None
    for stage in range(1, len(times)):
        cur = [system.step(x, times[stage]) for x in sample.points]
        last_delta = max(sample.metric(a, b) for a, b in zip(prev, cur))
        if last_delta <= tolerance:
            return ApproxElement(
                system, sample, cur, generator, "numeric", tolerance, True
            )
        prev = cur
    raise NotStabilized(
        f"images still moving by {last_delta} after {len(times)} stages",
        stages=len(times),
        last_delta=last_delta,
    )


def cos_target_times(
    alpha, t: float, stage_scales: Sequence[int] = (1_000_000, 2_000_000, 4_000_000)
) -> list[int]:
    """Times n with {n*alpha} -> 0 through (0, 1/2) and cos-sample value -> t.

    Stage j lands {n*alpha} next to 1/(m_j + c) with c = arccos(t)/2pi, where
    the sampling value equals t exactly; the certified approach bound keeps
    the value error far below 1e-3.  The default scales push the base shift
    below the modulus of continuity of the sampled coordinates, so the
    numeric stabilization contract can close at tolerances around 1e-2.
    """
    import math

    if not -1.0 <= t <= 1.0:
        raise ValueError("target value must lie in [-1, 1]")
    c = math.acos(max(-1.0, min(1.0, t))) / (2.0 * math.pi)
    times: list[int] = []
    prev = 0
    for m in stage_scales:
        r = Fraction(1.0 / (m + c)).limit_denominator(10**15)
        need = Fraction(1, int(2.0e4 * (m + c) ** 2) * 10**2)
        depth = 12
        while True:
            seq = one_sided_approach(CirclePoint(alpha, 0, r), "above", depth)
            if seq.error_bounds[-1] <= need and seq.times[-1] > prev:
                break
            depth += 8
        times.append(seq.times[-1])
        prev = times[-1]
    return times


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------


def _points_equal(a, b) -> bool:
    # canonical representations make structural equality value-correct
    return a == b


def classify(p: ApproxElement) -> ElementClass:
    """Coarse catalog position of a stabilized element on its sample."""
    if not p.stabilized:
        raise ValueError("classify needs a stabilized element")
    pts, imgs = p.sample.points, p.images

    from collections import Counter

    counts = Counter(imgs)
    if len(counts) == 1:
        return ElementClass("parabolic", {"target": imgs[0]})
    if len(counts) == 2:
        (common, _), (rare, n_rare) = counts.most_common()
        if n_rare == 1:
            i = imgs.index(rare)
            if rare == pts[i]:
                return ElementClass("loxodromic", {"attracting": common, "repulsing": pts[i]})

    if isinstance(p.system, SplitCircleSystem) and all(isinstance(x, SplitPoint) for x in pts):
        gamma = imgs[0].base - pts[0].base
        if all(im.base - x.base == gamma for x, im in zip(pts, imgs)):
            preserved = all(im.side == x.side for x, im in zip(pts, imgs))
            if preserved and gamma.on_orbit:
                return ElementClass("translation", {"n": gamma.orbit_index})
            sides = {im.side for im in imgs if im.side != PLAIN}
            if len(sides) == 1:
                side = sides.pop()
                return ElementClass(
                    "one_sided",
                    {"gamma": gamma, "side": "minus" if side == MINUS else "plus"},
                )
    if isinstance(p.system, RotationSystem) and all(isinstance(x, CirclePoint) for x in pts):
        gamma = imgs[0] - pts[0]
        if all(im - x == gamma for x, im in zip(pts, imgs)) and gamma.on_orbit:
            return ElementClass("translation", {"n": gamma.orbit_index})
    return ElementClass("unresolved", {})


# ---------------------------------------------------------------------------
# composition and minimal-ideal decomposition
# ---------------------------------------------------------------------------


def compose(p: ApproxElement, q: ApproxElement) -> ApproxElement:
    """Pointwise composition p after q with concatenated provenance."""
    if p.sample is not q.sample and p.sample.points != q.sample.points:
        raise SampleMismatch("elements sampled on different sets")
    images = [p.image_of(q.image_of(x)) for x in q.sample.points]
    rule = None
    if p.rule is not None and q.rule is not None:
        prule, qrule = p.rule, q.rule
        rule = lambda x: prule(qrule(x))  # noqa: E731
    backend = "exact" if (p.backend == "exact" and q.backend == "exact") else "numeric"
    tol = max(filter(None, [p.tolerance, q.tolerance]), default=None)
    return ApproxElement(
        system=p.system,
        sample=q.sample,
        images=images,
        generator=("compose", tuple(p.times()), tuple(q.times())),
        backend=backend,
        tolerance=tol,
        stabilized=p.stabilized and q.stabilized,
        rule=rule,
    )


@dataclass(frozen=True)
class IdealDecomposition:
    """p = (idempotent coordinate) * (group coordinate) in the minimal ideal."""

    epsilon: Any  # 'minus' | 'plus' for split systems; 2.0 or t in [-1,1] for cos
    gamma: CirclePoint

    def recompose(self, system, sample: SampleSet) -> list:
        if isinstance(system, SplitCircleSystem):
            tag = MINUS if self.epsilon == "minus" else PLUS

            def rule(x):
                nb = x.base + self.gamma
                return SplitPoint(nb, tag if system.splits(nb) else PLAIN)

            return [rule(x) for x in sample.points]
        if isinstance(system, CosSystem):
            el = CosElement(float(self.epsilon), self.gamma)
            return [el.apply(system, x) for x in sample.points]
        raise TypeError("no recomposition rule for this system")


def decompose_minimal(p: ApproxElement, system=None, gamma: CirclePoint | None = None) -> IdealDecomposition:
    """Split a non-translation limit element into idempotent x group parts."""
    system = system or p.system
    if isinstance(system, SplitCircleSystem):
        cls = classify(p)
        if cls.tag == "translation":
            raise NotInIdeal("translations decompose trivially; not in the minimal ideal")
        if cls.tag != "one_sided":
            raise ValueError(f"cannot decompose element classified as {cls.tag}")
        return IdealDecomposition(cls.params["side"], cls.params["gamma"])
    if isinstance(system, CosSystem):
        if gamma is None:
            if isinstance(p.generator, ApproachSequence):
                gamma = p.generator.target
            else:
                raise ValueError("cos decomposition needs a target or approach provenance")
        eps_vals = []
        for x, im in zip(p.sample.points, p.images):
            shifted = system.base(x) + gamma
            if shifted.on_orbit:
                # the idempotent coordinate sits at the defect position of the
                # limit fiber point over shifted = k*alpha
                eps_vals.append(system.coordinate(im, -shifted.orbit_index))
        if not eps_vals:
            raise NotInIdeal("no sampled point lands over the orbit; cannot read the idempotent")
        spread = max(eps_vals) - min(eps_vals)
        if spread > max((p.tolerance or 0.0) * 2, 1e-9):
            raise ValueError(f"inconsistent idempotent coordinates (spread {spread})")
        return IdealDecomposition(eps_vals[0], gamma)
    raise TypeError("no decomposition rule for this system")


# ---------------------------------------------------------------------------
# determining sets
# ---------------------------------------------------------------------------


def _image(element, x):
    if isinstance(element, ApproxElement):
        return element.image_of(x)
    return element(x)


@dataclass(frozen=True)
class DeterminingSet:
    points: tuple
    optimal: bool
    gap: int  # greedy size minus packing lower bound (0 when optimal)


def determining_set(
    family: Sequence, pool: Sequence, p, eq: Callable = _points_equal, exhaustive_limit: int = 20
) -> DeterminingSet:
    """Smallest pool subset on which no other family member matches p.

    Exhaustive below the size limit, greedy set cover with a reported
    optimality gap beyond it.  Precondition (validated): every other member
    disagrees with p somewhere on the pool.
    """
    others = [q for q in family if q is not p]
    disagree: list[set[int]] = []
    for q in others:
        ds = {i for i, c in enumerate(pool) if not eq(_image(q, c), _image(p, c))}
        if not ds:
            raise ValueError("family member indistinguishable from p on the pool")
        disagree.append(ds)
    if not others:
        return DeterminingSet((), True, 0)

    if len(pool) <= exhaustive_limit:
        for size in range(0, len(pool) + 1):
            for cand in itertools.combinations(range(len(pool)), size):
                chosen = set(cand)
                if all(ds & chosen for ds in disagree):
                    return DeterminingSet(tuple(pool[i] for i in cand), True, 0)
    # greedy cover
    uncovered = list(range(len(disagree)))
    chosen: list[int] = []
    while uncovered:
        counts: dict[int, int] = {}
        for qi in uncovered:
            for i in disagree[qi]:
                counts[i] = counts.get(i, 0) + 1
        best = min((i for i, c in counts.items() if c == max(counts.values())))
        chosen.append(best)
        uncovered = [qi for qi in uncovered if best not in disagree[qi]]
    # packing lower bound: greedily collect pairwise-disjoint disagree sets
    packed: list[set[int]] = []
    for ds in sorted(disagree, key=len):
        if all(not (ds & q) for q in packed):
            packed.append(ds)
    return DeterminingSet(tuple(pool[i] for i in sorted(chosen)), False, len(chosen) - len(packed))


def determining_growth(
    family: Sequence, pool: Sequence, p, sizes: Sequence[int], eq: Callable = _points_equal
) -> list[tuple[int, int]]:
    """|C| as the family grows through nested prefixes of the given sizes."""
    out = []
    for m in sizes:
        sub = list(family[:m])
        if p not in sub:
            sub.append(p)
        res = determining_set(sub, pool, p, eq=eq)
        out.append((m, len(res.points)))
    return out


# ---------------------------------------------------------------------------
# no-countable-basis witnesses
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BasisWitness:
    scenario: str
    witness: Any  # the element q
    agrees_on: tuple
    differs_at: Any
    sound: bool


def no_countable_basis_witness(excluded: Sequence, scenario: str) -> BasisWitness:
    """An element agreeing with the scenario's parabolic limit on all of
    ``excluded`` yet differing somewhere: the finite engine behind the
    non-first-countability arguments."""
    if scenario == "projective_p_infty":
        from .linear import PartialLinearMap, line_missing

        pts = [(Fraction(v[0]), Fraction(v[1])) for v in excluded]
        if any(x == 0 and y == 0 for x, y in pts):
            raise ValueError("excluded points must be nonzero")
        direction = line_missing(pts)
        q = PartialLinearMap.line_identity(direction)
        p_inf = lambda v: "inf" if any(v) else (Fraction(0), Fraction(0))  # noqa: E731
        agrees = all(q.apply(v) == "inf" == p_inf(v) for v in pts)
        differs = q.apply(direction) == direction != "inf"
        return BasisWitness(scenario, q, tuple(pts), direction, agrees and differs)
    if scenario == "circle_parabolic":
        target = Fraction(0)
        cset = {Fraction(c) % 1 for c in excluded}
        b = _fresh_circle_point(cset | {target})
        def p_ab(x, a=target, b=b):
            return b if x == b else a
        agrees = all(p_ab(c) == target for c in cset)
        differs = p_ab(b) == b != target
        return BasisWitness(scenario, p_ab, tuple(sorted(cset)), b, agrees and differs)
    raise ValueError(f"unknown scenario {scenario!r}")


def _fresh_circle_point(avoid: set) -> Fraction:
    for level in range(1, 64):
        denom = 2**level
        for num in range(1, denom, 2):
            cand = Fraction(num, denom)
            if cand not in avoid:
                return cand
    raise NoWitness("excluded set exhausts the dyadic grid (defensive)")


# ---------------------------------------------------------------------------
# Sorgenfrey isolation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IsolationReport:
    eps: Fraction
    isolated: tuple[bool, ...]
    conflicts: tuple  # per member: None or (other_index, coordinate)
    all_isolated: bool


def sorgenfrey_isolation(members: Sequence, eps: Fraction = Fraction(1, 4)) -> IsolationReport:
    """Exact isolation check in products of one-sided (Sorgenfrey) circles.

    Each member is a tuple of (gamma, side) coordinates with side +1 for a
    right-half-open basic interval [gamma, gamma+eps) and -1 for the left
    version (gamma-eps, gamma].  A member is isolated when its product
    rectangle contains no other member; order decisions are exact.
    """
    eps = Fraction(eps)
    if not 0 < eps <= Fraction(1, 2):
        raise ValueError("eps must be in (0, 1/2]")
    isolated: list[bool] = []
    conflicts: list = []
    for i, mi in enumerate(members):
        hit = None
        for j, mj in enumerate(members):
            if i == j:
                continue
            inside = True
            for coord, ((gi, si), (gj, _sj)) in enumerate(zip(mi, mj)):
                off = (gj - gi) if si == PLUS else (gi - gj)
                if not off.compare(CirclePoint(off.alpha, 0, eps)) < 0:
                    inside = False
                    break
            if inside:
                hit = (j, None)
                break
        isolated.append(hit is None)
        conflicts.append(hit)
    return IsolationReport(eps, tuple(isolated), tuple(conflicts), all(isolated))


def flipped_diagonal(gammas: Sequence[CirclePoint]) -> list[tuple]:
    """The members (p_g^+, p_{-g}^+) of the discrete diagonal family."""
    return [((g, PLUS), (-g, PLUS)) for g in gammas]


# ---------------------------------------------------------------------------
# rigidity probe
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RigidityReport:
    distances: dict[int, float]  # n -> sup distance over the sample
    minimum: tuple[int, float]

    def floor(self) -> float:
        return self.minimum[1]


def rigidity_probe(system, sample: SampleSet, times: Sequence[int]) -> RigidityReport:
    """sup-distance(T^n, Id) over the sample for each probe time."""
    times = [int(n) for n in times if n != 0]
    if not times:
        raise ValueError("need at least one nonzero probe time")
    if isinstance(system, SplitCircleSystem) and isinstance(sample.metric, CodingMetric):
        dists = _split_rigidity(system, sample, times, sample.metric.horizon)
    else:
        dists = {}
        for n in times:
            dists[n] = max(sample.metric(system.step(x, n), x) for x in sample.points)
    n_star = min(dists, key=lambda n: (dists[n], n))
    return RigidityReport(dists, (n_star, dists[n_star]))


def _split_rigidity(system, sample, times, horizon):
    """Vectorized path: the word of T^n x over [-H, H] is a slice of the word
    of x over [n-H, n+H]; the base part of the metric is the common arc shift."""
    n_max = max(times)
    alpha_f = float(system.alpha.approx(Fraction(1, 10**30)))
    dists = {}
    for n in times:
        shift = (n * alpha_f) % 1.0
        dists[n] = min(shift, 1.0 - shift)
    for x in sample.points:
        long = system.coding_word(x, -horizon, n_max + horizon)
        base = long[: 2 * horizon + 1]
        for n in times:
            shifted = long[n : n + 2 * horizon + 1]
            d = 0.0
            for m in range(2 * horizon + 1):
                if base[m] != shifted[m]:
                    w = 2.0 ** (-abs(m - horizon))
                    if w > d:
                        d = w
            if d > dists[n]:
                dists[n] = d
    return dists
