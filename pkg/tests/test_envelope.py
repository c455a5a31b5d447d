import random
from fractions import Fraction

import pytest

from tamecert.errors import NotInIdeal, NotStabilized, SampleMismatch
from tamecert.exactarith import GOLDEN, SQRT2_MINUS_1, CirclePoint, one_sided_approach, orbit_point, point, zero
from tamecert.systems import (
    MINUS,
    PLAIN,
    PLUS,
    CosFiber,
    CosSystem,
    RotationSystem,
    SplitCircleSystem,
    SplitPoint,
)
from tamecert.envelope import (
    CosElement,
    SampleSet,
    classify,
    compose,
    cos_sample,
    cos_target_times,
    decompose_minimal,
    determining_growth,
    determining_set,
    flipped_diagonal,
    limit_map,
    no_countable_basis_witness,
    rigidity_probe,
    rotation_sample,
    sorgenfrey_isolation,
    split_sample,
)


@pytest.fixture(scope="module")
def sturmian():
    return SplitCircleSystem(GOLDEN)


@pytest.fixture(scope="module")
def sample(sturmian):
    return split_sample(sturmian, plain_count=40, split_range=6)


class TestSampleSet:
    def test_metric_axioms(self, sample):
        assert sample.check_metric_axioms()

    def test_split_gap_is_coordinate_zero(self, sample, sturmian):
        d = sample.metric(sturmian.orbit_pt(0, MINUS), sturmian.orbit_pt(0, PLUS))
        assert d == 1.0  # symbols differ at coordinate 0


class TestLimitMap:
    def test_sturmian_below_gives_minus_element(self, sturmian, sample):
        ap = one_sided_approach(zero(GOLDEN), "below", 10)
        p = limit_map(sturmian, ap, sample)
        assert p.backend == "exact" and p.stabilized
        for x, im in zip(sample.points, p.images):
            assert im.base == x.base  # gamma = 0
            assert im.side == (MINUS if sturmian.splits(x.base) else PLAIN)
        assert classify(p).tag == "one_sided"
        assert classify(p).params["side"] == "minus"

    def test_constant_time_is_translation(self, sturmian, sample):
        p = limit_map(sturmian, [7], sample)
        cls = classify(p)
        assert cls.tag == "translation" and cls.params["n"] == 7
        assert p.image_of(sturmian.orbit_pt(0, PLUS)) == sturmian.orbit_pt(7, PLUS)

    def test_rotation_limit_is_rotation(self):
        rot = RotationSystem(GOLDEN)
        rs = rotation_sample(rot, 30)
        gamma = point(GOLDEN, 0, Fraction(1, 3))
        p = limit_map(rot, one_sided_approach(gamma, "above", 8), rs)
        assert p.backend == "exact"
        for x, im in zip(rs.points, p.images):
            assert im == x + gamma

    def test_numeric_deep_tail_matches_exact(self, sturmian, sample):
        ap = one_sided_approach(zero(GOLDEN), "below", 25)
        exact = limit_map(sturmian, ap, sample)
        numeric = limit_map(sturmian, list(ap.times)[-4:], sample, tolerance=1e-4)
        assert numeric.backend == "numeric" and numeric.stabilized
        # word parts coincide at the tail; the approach error bound caps the
        # residual base drift
        residual = max(sample.metric(a, b) for a, b in zip(exact.images, numeric.images))
        assert residual <= float(ap.error_bounds[-4])

    def test_not_stabilized(self, sturmian, sample):
        # shallow alternating-side times never settle at a tight tolerance
        with pytest.raises(NotStabilized):
            limit_map(sturmian, [1, 2, 3, 4, 5], sample, tolerance=1e-12)

    def test_non_monotone_rejected(self, sturmian, sample):
        with pytest.raises(ValueError):
            limit_map(sturmian, [5, 3, 8], sample)

    def test_rationals_split_rational_target(self):
        # splitting the circled rationals: a rational target keeps the orbit
        # of splits invariant, so one-sided limits classify there as well
        q0 = SplitCircleSystem(GOLDEN, split="rationals")
        gamma = point(GOLDEN, 0, Fraction(1, 3))
        pts = []
        for k in range(1, 12):
            pts.extend(q0.split_fiber(point(GOLDEN, 0, Fraction(k, 12))))
        for k in range(1, 6):
            pts.append(q0.pt(point(GOLDEN, 2, Fraction(k, 7))))
        from tamecert.envelope import CodingMetric

        sample = SampleSet(pts, CodingMetric(q0, 6))
        p = limit_map(q0, one_sided_approach(gamma, "above", 8), sample)
        cls = classify(p)
        assert cls.tag == "one_sided" and cls.params["side"] == "plus"
        assert cls.params["gamma"] == gamma
        # rational splits map onto rational splits, side forced
        for x, im in zip(sample.points, p.images):
            if q0.splits(x.base):
                assert im.side == PLUS

    def test_general_gamma_classified(self, sturmian):
        rng = random.Random(9)
        for _ in range(4):
            gamma = CirclePoint(GOLDEN, rng.randint(-10, 10), Fraction(rng.randint(1, 6), 7))
            side = rng.choice(["below", "above"])
            extra = [(-gamma).translate(k) for k in range(-3, 4)]
            s = split_sample(sturmian, plain_count=24, split_range=4, extra_bases=extra)
            p = limit_map(sturmian, one_sided_approach(gamma, side, 8), s)
            cls = classify(p)
            assert cls.tag == "one_sided"
            assert cls.params["gamma"] == gamma
            assert cls.params["side"] == ("minus" if side == "below" else "plus")


class TestClassify:
    def test_parabolic_and_loxodromic_value_maps(self):
        pool = [Fraction(k, 10) for k in range(10)]
        s = SampleSet(pool, lambda x, y: abs(float(x - y)))
        target = Fraction(1, 2)
        para = limit_map_like(s, {x: target for x in pool})
        assert classify(para).tag == "parabolic"
        assert classify(para).params["target"] == target
        fixedpt = Fraction(7, 10)
        lox = limit_map_like(s, {x: (x if x == fixedpt else target) for x in pool})
        cls = classify(lox)
        assert cls.tag == "loxodromic"
        assert cls.params["attracting"] == target and cls.params["repulsing"] == fixedpt


def limit_map_like(sample, mapping):
    """Package a finite map as a stabilized element (test helper)."""
    from tamecert.envelope import ApproxElement

    return ApproxElement(
        system=None,
        sample=sample,
        images=[mapping[x] for x in sample.points],
        generator=(0,),
        backend="exact",
        tolerance=None,
        stabilized=True,
        rule=lambda x: mapping[x],
    )


class TestCompose:
    def test_translation_group_law(self, sturmian, sample):
        t3 = limit_map(sturmian, [3], sample)
        t4 = limit_map(sturmian, [4], sample)
        both = compose(t3, t4)
        assert classify(both).params["n"] == 7

    def test_one_sided_after_translation(self, sturmian, sample):
        ap = one_sided_approach(zero(GOLDEN), "below", 10)
        p = limit_map(sturmian, ap, sample)
        t5 = limit_map(sturmian, [5], sample)
        comp = compose(p, t5)
        cls = classify(comp)
        assert cls.tag == "one_sided"
        assert cls.params["gamma"] == orbit_point(GOLDEN, 5)
        assert cls.params["side"] == "minus"

    def test_parabolic_idempotent(self):
        pool = [Fraction(k, 8) for k in range(8)]
        s = SampleSet(pool, lambda x, y: abs(float(x - y)))
        para = limit_map_like(s, {x: Fraction(0) for x in pool})
        assert compose(para, para).images == para.images

    def test_associativity_on_exact_elements(self, sturmian, sample):
        ap = one_sided_approach(zero(GOLDEN), "above", 8)
        p = limit_map(sturmian, ap, sample)
        t2 = limit_map(sturmian, [2], sample)
        t9 = limit_map(sturmian, [9], sample)
        left = compose(compose(p, t2), t9)
        right = compose(p, compose(t2, t9))
        assert left.images == right.images

    def test_sample_mismatch(self, sturmian, sample):
        numeric = limit_map(
            sturmian, list(one_sided_approach(zero(GOLDEN), "below", 25).times)[-3:],
            sample, tolerance=1e-9,
        )
        t1 = limit_map(sturmian, [1], sample)
        # numeric element has no rule; composing it after a translation needs
        # off-sample images
        with pytest.raises(SampleMismatch):
            compose(numeric, t1)

    def test_exact_after_numeric(self, sturmian, sample):
        # the exact rule extends off-sample, so exact-after-numeric composes;
        # deep numeric stages agree with the all-exact composition up to the
        # approach error
        ap = one_sided_approach(zero(GOLDEN), "below", 25)
        numeric = limit_map(sturmian, list(ap.times)[-3:], sample, tolerance=1e-4)
        exact = limit_map(sturmian, ap, sample)
        t2 = limit_map(sturmian, [2], sample)
        mixed = compose(t2, numeric)
        assert mixed.backend == "numeric"
        pure = compose(t2, exact)
        agree = max(sample.metric(a, b) for a, b in zip(mixed.images, pure.images))
        assert agree <= float(ap.error_bounds[-3])


class TestDecompose:
    def test_sturmian_sides(self, sturmian, sample):
        for side, name in (("below", "minus"), ("above", "plus")):
            p = limit_map(sturmian, one_sided_approach(orbit_point(GOLDEN, 3), side, 8), sample)
            d = decompose_minimal(p)
            assert d.epsilon == name
            assert d.gamma == orbit_point(GOLDEN, 3)
            assert d.recompose(sturmian, sample) == p.images

    def test_translation_not_in_ideal(self, sturmian, sample):
        with pytest.raises(NotInIdeal):
            decompose_minimal(limit_map(sturmian, [4], sample))

    def test_cos_idempotent_trivial_group_part(self):
        cs = CosSystem(GOLDEN, horizon=6)
        s = cos_sample(cs, orbit_range=2, regular_denoms=())
        v = CosElement(0.25, zero(GOLDEN))
        el = limit_map_like(s, {x: v.apply(cs, x) for x in s.points})
        el.system = cs
        d = decompose_minimal(el, cs, gamma=zero(GOLDEN))
        assert d.epsilon == 0.25 and d.gamma == zero(GOLDEN)

    def test_cos_upper_region_gives_two(self):
        cs = CosSystem(GOLDEN, horizon=6)
        s = cos_sample(cs, orbit_range=2, regular_denoms=())
        ap = one_sided_approach(zero(GOLDEN), "below", 20)
        p = limit_map(cs, ap, s)
        d = decompose_minimal(p, cs)
        assert d.epsilon == 2.0
        assert d.recompose(cs, s) == p.images

    def test_cos_idempotent_law(self):
        cs = CosSystem(GOLDEN, horizon=6)
        s = cos_sample(cs, orbit_range=2, regular_denoms=(7,))
        for eps in (2.0, -1.0, 0.0, 0.5):
            for eta in (2.0, -0.25, 1.0):
                ve, vn = CosElement(eps, zero(GOLDEN)), CosElement(eta, zero(GOLDEN))
                through = [ve.apply(cs, vn.apply(cs, x)) for x in s.points]
                direct = [ve.apply(cs, x) for x in s.points]
                assert through == direct


class TestCosFiberSweep:
    def test_target_landing(self):
        cs = CosSystem(GOLDEN, horizon=6)
        pts = [CosFiber(k, v) for k in range(-2, 3) for v in (2.0, 0.0)]
        s = SampleSet(pts, lambda x, y: cs.metric(x, y))
        for t in (-1.0, 0.1, 1.0):
            times = cos_target_times(GOLDEN, t)
            p = limit_map(cs, times, s, tolerance=0.01, max_stages=5)
            got = cs.coordinate(p.image_of(CosFiber(0, 0.0)), 0)
            assert abs(got - t) < 0.01


class TestProjectiveLimits:
    def test_powers_classify_loxodromic_with_eigen_pair(self):
        """Powers of diag(2, 1/2) on a projective-line sample: loxodromic with
        attracting = top eigendirection, repulsing = bottom (eigen oracle)."""
        import numpy as np

        from tamecert.linear import Direction, projective_power_element

        dirs = [Direction.make(1, Fraction(k, 9)) for k in range(-9, 10)] + [Direction.make(0, 1)]

        def dmetric(u, v):
            a = np.array([float(u.x), float(u.y)])
            b = np.array([float(v.x), float(v.y)])
            a, b = a / np.linalg.norm(a), b / np.linalg.norm(b)
            return float(min(np.linalg.norm(a - b), np.linalg.norm(a + b)))

        for g, att_expect, rep_expect in [
            ([[2, 0], [0, Fraction(1, 2)]], Direction.make(1, 0), Direction.make(0, 1)),
            ([[Fraction(3, 2), Fraction(1, 2)], [Fraction(1, 2), Fraction(3, 2)]],
             Direction.make(1, 1), Direction.make(1, -1)),
        ]:
            images, att, rep = projective_power_element(g, dirs)
            assert att == att_expect and rep == rep_expect
            sample = SampleSet(dirs, dmetric)
            element = limit_map_like(sample, dict(zip(dirs, images)))
            cls = classify(element)
            assert cls.tag == "loxodromic"
            assert cls.params["attracting"] == att_expect
            assert cls.params["repulsing"] == rep_expect


class TestDeterminingSets:
    def test_rotation_family_single_point(self):
        pool = [point(GOLDEN, 0, Fraction(k, 11)) for k in range(11)]
        gammas = [point(GOLDEN, 0, Fraction(k, 7)) for k in range(7)]
        family = [lambda x, g=g: x + g for g in gammas]
        for p in family:
            res = determining_set(family, pool, p)
            assert res.optimal and len(res.points) == 1

    def test_single_element_family_empty(self):
        pool = [Fraction(k, 5) for k in range(5)]
        f = lambda x: x  # noqa: E731
        res = determining_set([f], pool, f)
        assert res.points == ()

    def test_discrete_family_linear_growth(self):
        # each member visible only at its own grid point
        pool = [Fraction(k, 12) for k in range(12)]

        def bump(z):
            return lambda x: Fraction(1, 2) if x == z else Fraction(0)

        zero_map = lambda x: Fraction(0)  # noqa: E731
        family = [bump(z) for z in pool] + [zero_map]
        res = determining_set(family, pool, zero_map)
        assert res.optimal and len(res.points) == 12
        growth = determining_growth(family[:-1], pool, zero_map, sizes=[3, 6, 9, 12])
        assert [n for _, n in growth] == [3, 6, 9, 12]

    def test_indistinguishable_rejected(self):
        pool = [Fraction(k, 5) for k in range(5)]
        f = lambda x: x  # noqa: E731
        g = lambda x: x  # noqa: E731
        with pytest.raises(ValueError):
            determining_set([f, g], pool, f)

    def test_greedy_beyond_limit(self):
        pool = [Fraction(k, 40) for k in range(40)]

        def bump(z):
            return lambda x: Fraction(1) if x == z else Fraction(0)

        zero_map = lambda x: Fraction(0)  # noqa: E731
        family = [bump(z) for z in pool] + [zero_map]
        res = determining_set(family, pool, zero_map, exhaustive_limit=10)
        assert not res.optimal
        assert len(res.points) == 40 and res.gap == 0  # disjoint supports: packing is tight


class TestBasisWitness:
    def test_projective_random_sets(self):
        rng = random.Random(4)
        for _ in range(20):
            pts = [(rng.randint(-9, 9), rng.randint(-9, 9)) for _ in range(10)]
            pts = [p for p in pts if p != (0, 0)] or [(1, 1)]
            w = no_countable_basis_witness(pts, "projective_p_infty")
            assert w.sound
            assert all(w.witness.apply(c) == "inf" for c in w.agrees_on)
            assert w.witness.apply(w.differs_at) == w.differs_at

    def test_circle_empty_and_small(self):
        w = no_countable_basis_witness([], "circle_parabolic")
        assert w.sound
        w2 = no_countable_basis_witness([Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)], "circle_parabolic")
        assert w2.sound
        assert w2.differs_at not in set(w2.agrees_on)
        assert w2.witness(w2.differs_at) == w2.differs_at != Fraction(0)
        assert all(w2.witness(c) == Fraction(0) for c in w2.agrees_on)

    def test_circle_random(self):
        rng = random.Random(17)
        for _ in range(20):
            cset = [Fraction(rng.randint(1, 97), 97) for _ in range(20)]
            w = no_countable_basis_witness(cset, "circle_parabolic")
            assert w.sound


class TestSorgenfrey:
    def test_flipped_diagonal_isolated(self):
        gammas = [point(GOLDEN, k, Fraction(k % 13, 13)) for k in range(40)]
        rep = sorgenfrey_isolation(flipped_diagonal(gammas))
        assert rep.all_isolated

    def test_singleton(self):
        rep = sorgenfrey_isolation(flipped_diagonal([point(GOLDEN, 1)]))
        assert rep.all_isolated

    def test_dense_single_circle_fails(self):
        members = [((point(GOLDEN, 0, Fraction(k, 60)), PLUS),) for k in range(60)]
        rep = sorgenfrey_isolation(members, eps=Fraction(1, 4))
        assert not rep.all_isolated
        assert not any(rep.isolated)
        j, _ = rep.conflicts[0]
        g0 = members[0][0][0]
        gj = members[j][0][0]
        assert (gj - g0).compare(CirclePoint(GOLDEN, 0, Fraction(1, 4))) < 0


class TestRigidity:
    def test_rotation_ladder_decreases(self):
        rot = RotationSystem(SQRT2_MINUS_1)
        rs = rotation_sample(rot, 10)
        times = [SQRT2_MINUS_1.denominator(k) for k in range(1, 26)]
        rep = rigidity_probe(rot, rs, times)
        assert rep.minimum[1] < 1e-6
        floats = [rep.distances[n] for n in times]
        assert all(b < a for a, b in zip(floats, floats[1:]))

    def test_rotation_convergent_bound(self):
        rot = RotationSystem(GOLDEN)
        rs = rotation_sample(rot, 10)
        for k in (5, 10, 15):
            q = GOLDEN.denominator(k)
            rep = rigidity_probe(rot, rs, [q])
            assert rep.distances[q] <= 1.0 / GOLDEN.denominator(k + 1) + 1e-12

    def test_sturmian_floor(self, sturmian):
        s = SampleSet(
            [sturmian.orbit_pt(0, MINUS), sturmian.orbit_pt(0, PLUS)],
            __import__("tamecert.envelope", fromlist=["CodingMetric"]).CodingMetric(sturmian, 6),
        )
        rep = rigidity_probe(sturmian, s, range(1, 2001))
        gap = s.metric(sturmian.orbit_pt(0, MINUS), sturmian.orbit_pt(0, PLUS))
        assert rep.minimum[1] >= gap == 1.0

    def test_zero_time_excluded(self):
        rot = RotationSystem(GOLDEN)
        rs = rotation_sample(rot, 10)
        with pytest.raises(ValueError):
            rigidity_probe(rot, rs, [0])
        rep = rigidity_probe(rot, rs, [0, 1])  # zero filtered, one kept
        assert set(rep.distances) == {1}


class TestCosSampleMetric:
    def test_axioms(self):
        cs = CosSystem(GOLDEN, horizon=5)
        s = cos_sample(cs, orbit_range=2, regular_denoms=(7,))
        assert s.check_metric_axioms(trials=25)
