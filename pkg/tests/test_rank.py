from fractions import Fraction

import numpy as np
import pytest

from tamecert.boundary import ReducedWord, boundary_sample, loxodromic_rank_arrays, power_limit
from tamecert.envelope import limit_map, rotation_sample, split_sample
from tamecert.errors import NotStabilizedAcrossResolutions
from tamecert.exactarith import GOLDEN, one_sided_approach, orbit_point, point, zero
from tamecert.rank import (
    beta_rank,
    build_instance,
    naive_beta_rank,
    oscillation,
    prefix_instance,
    system_rank,
    value_instance,
)
from tamecert.systems import RotationSystem, SplitCircleSystem

F = Fraction


@pytest.fixture(scope="module")
def sturmian():
    return SplitCircleSystem(GOLDEN)


@pytest.fixture(scope="module")
def st_sample(sturmian):
    return split_sample(sturmian, plain_count=2000, split_range=8, horizon=12)


@pytest.fixture(scope="module")
def p_minus(sturmian, st_sample):
    return limit_map(sturmian, one_sided_approach(zero(GOLDEN), "below", 10), st_sample)


class TestOscillation:
    def test_rotation_bounded_by_ball_diameter(self):
        rot = RotationSystem(GOLDEN)
        rs = rotation_sample(rot, 300)
        p = limit_map(rot, one_sided_approach(point(GOLDEN, 0, F(1, 3)), "above", 8), rs)
        for x in rs.points[:10]:
            assert oscillation(p, x, rs.points, 0.01) <= 0.02 + 1e-12

    def test_bump_map_oscillates_half(self):
        pool = [F(k, 100) for k in range(100)]
        from tamecert.envelope import ApproxElement, SampleSet

        z = F(1, 2)
        s = SampleSet(pool, lambda x, y: abs(float(x - y)))
        el = ApproxElement(
            system=None, sample=s,
            images=[F(1, 2) if x == z else F(0) for x in pool],
            generator=(0,), backend="exact", tolerance=None, stabilized=True,
        )
        assert oscillation(el, z, pool, 0.02) == pytest.approx(0.5)

    def test_sturmian_discontinuity_sees_split_gap(self, sturmian, st_sample, p_minus):
        x = sturmian.orbit_pt(0, 1)  # the plus point flips under the minus limit
        val = oscillation(p_minus, x, st_sample.points, 2.0 ** -10)
        assert val >= 1.0  # image words differ at coordinate 0


class TestBetaRank:
    def test_rotation_is_one(self):
        rot = RotationSystem(GOLDEN)
        rs = rotation_sample(rot, 500)
        p = limit_map(rot, one_sided_approach(point(GOLDEN, 0, F(2, 7)), "below", 8), rs)
        t = beta_rank(p, 0.1)
        assert t.beta == 1 and t.stabilized

    def test_sturmian_one_sided_is_two(self, p_minus, st_sample):
        for eps in (0.1, 0.01):
            t = beta_rank(p_minus, eps)
            assert t.beta == 2 and t.stabilized
            assert t.verify_witnesses(build_instance(p_minus))

    def test_translation_is_one(self, sturmian, st_sample):
        for n in (1, 4):
            t = beta_rank(limit_map(sturmian, [n], st_sample), 0.01)
            assert t.beta == 1

    def test_monotone_in_epsilon(self, p_minus):
        betas = [beta_rank(p_minus, eps).beta for eps in (0.01, 0.1, 0.5, 2.1)]
        assert betas == sorted(betas, reverse=True)
        assert betas[-1] == 1  # eps above the metric diameter: nothing oscillates

    def test_matches_naive_oracle_small_samples(self, sturmian):
        small = split_sample(sturmian, plain_count=150, split_range=4, horizon=10)
        for gen in ([2], one_sided_approach(zero(GOLDEN), "below", 10),
                    one_sided_approach(orbit_point(GOLDEN, 1), "above", 10)):
            p = limit_map(sturmian, gen, small)
            for eps in (0.05, 0.2):
                t = beta_rank(p, eps)
                nb, nstages = naive_beta_rank(build_instance(p), eps, t.schedule)
                assert t.beta == nb
                assert t.stage_sizes() == [len(s) for s in nstages]

    def test_bump_map_rank_two(self):
        # mesh must stay below the finest rerun's stage-one radius (eps/32)
        pool = [F(k, 1000) for k in range(1000)]
        vals = [float(x) for x in pool]
        imgs = [[0.5 if x == F(1, 2) else 0.0] for x in pool]
        inst = value_instance(pool, vals, imgs)
        t = beta_rank(inst, 0.1)
        assert t.beta == 2
        nb, _ = naive_beta_rank(inst, 0.1, t.schedule)
        assert nb == 2

    def test_unstable_raises(self):
        # a constant-image instance never oscillates: stable rank 1; force
        # instability with a schedule whose coarse stage is above the diameter
        pool = [F(k, 50) for k in range(50)]
        imgs = [[float(x)] for x in pool]
        inst = value_instance(pool, [float(x) for x in pool], imgs)
        with pytest.raises(NotStabilizedAcrossResolutions):
            # stage-one radius so large that the identity map's window spread
            # exceeds eps at scale 1.0 but not at scale 0.25
            beta_rank(inst, 0.5, r_schedule=(0.35, 1e-4, 1e-5))

    def test_schedule_must_decrease(self, p_minus):
        with pytest.raises(ValueError):
            beta_rank(p_minus, 0.1, r_schedule=(0.1, 0.2))


class TestOtherRotationNumber:
    def test_sqrt2_one_sided_rank_two(self):
        from tamecert.exactarith import SQRT2_MINUS_1 as S2

        sys_ = SplitCircleSystem(S2)
        sample = split_sample(sys_, plain_count=2000, split_range=6, horizon=12)
        p = limit_map(sys_, one_sided_approach(zero(S2), "above", 10), sample)
        assert beta_rank(p, 0.05).beta == 2
        assert beta_rank(limit_map(sys_, [2], sample), 0.05).beta == 1


class TestSystemRank:
    def test_rotation_family_rank_one(self):
        rot = RotationSystem(GOLDEN)
        rs = rotation_sample(rot, 400)
        fam = {
            "R_1/3": limit_map(rot, one_sided_approach(point(GOLDEN, 0, F(1, 3)), "above", 8), rs),
            "R_2/5": limit_map(rot, one_sided_approach(point(GOLDEN, 0, F(2, 5)), "below", 8), rs),
            "T^3": limit_map(rot, [3], rs),
        }
        sr = system_rank(fam, 0.05)
        assert sr.beta == 1

    def test_sturmian_family_rank_two(self, sturmian, st_sample):
        fam = {"T^1": limit_map(sturmian, [1], st_sample)}
        for n, side in ((0, "below"), (0, "above"), (3, "below")):
            fam[f"p_{n}{side}"] = limit_map(
                sturmian, one_sided_approach(orbit_point(GOLDEN, n), side, 10), st_sample
            )
        sr = system_rank(fam, 0.01)
        assert sr.beta == 2
        assert sr.witness.startswith("p_")
        assert sr.traces["T^1"].beta == 1


class TestBoundaryRank:
    def test_loxodromic_rank_two(self):
        lox = power_limit(ReducedWord.parse("ab"), depth=16)
        pts = boundary_sample(16, base_length=5, lox=lox)
        P, I = loxodromic_rank_arrays(lox, pts)
        inst = prefix_instance(pts, P, I)
        for eps in (0.1, 0.01):
            t = beta_rank(inst, eps)
            assert t.beta == 2 and t.stabilized

    def test_parabolic_boundary_rank_one(self):
        # constant map to the attracting word: continuous, rank 1
        lox = power_limit(ReducedWord.parse("ba"), depth=12)
        pts = boundary_sample(12, base_length=4)
        from tamecert.boundary import word_codes

        P = word_codes(pts, 12)
        I = np.tile(word_codes([lox.attracting], 12), (len(pts), 1))
        inst = prefix_instance(pts, P, I)
        assert beta_rank(inst, 0.1).beta == 1

    def test_mixed_boundary_family_rank_two(self):
        # parabolic (rank 1) + loxodromic (rank 2) members: supremum 2
        from tamecert.boundary import word_codes

        lox = power_limit(ReducedWord.parse("ab"), depth=14)
        pts = boundary_sample(14, base_length=4, lox=lox)
        P, I = loxodromic_rank_arrays(lox, pts)
        parab = np.tile(word_codes([lox.attracting], 14), (len(pts), 1))
        fam = {
            "parabolic": prefix_instance(pts, P, parab),
            "loxodromic": prefix_instance(pts, P, I),
        }
        sr = system_rank(fam, 0.05)
        assert sr.beta == 2 and sr.witness == "loxodromic"
        assert sr.traces["parabolic"].beta == 1
