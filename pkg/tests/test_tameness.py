import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import tamecert._kernels as K
from tamecert.errors import BudgetExceeded
from tamecert.exactarith import GOLDEN
from tamecert.systems import CutProjectCoding, SplitCircleSystem, full_shift_word
from tamecert.tameness import (
    FactorCache,
    IndependenceCertificate,
    complexity,
    exhaustive_max_independence,
    factor_masks,
    growth_report,
    mask_to_string,
    max_independence,
    word_digest,
)


@pytest.fixture(scope="module")
def sturmian_word():
    sys_ = SplitCircleSystem(GOLDEN)
    return sys_.word(sys_.orbit_pt(0, 1), 10_000)


class TestComplexity:
    def test_full_shift(self):
        assert complexity(full_shift_word(8), 5)[5] == 32

    def test_sturmian_L_plus_1(self, sturmian_word):
        prof = complexity(sturmian_word, 10)
        assert prof[10] == 11  # classical p(L) = L+1

    def test_periodic(self):
        word = np.tile([1, 0, 0], 400)
        prof = complexity(word, 6)
        for ell in range(3, 7):
            assert prof[ell] == 3

    def test_counts_monotone_and_binary_bounded(self, sturmian_word):
        prof = complexity(sturmian_word, 12)
        for ell in range(1, 12):
            assert prof[ell] <= prof[ell + 1] <= 2 * prof[ell]

    def test_horizon_precondition(self):
        with pytest.raises(ValueError):
            complexity(np.zeros(50, dtype=np.uint8), 10)


class TestIndependence:
    def test_full_shift_all_positions(self):
        cert = max_independence(full_shift_word(10), 10)
        assert cert.positions == tuple(range(10))
        assert len(cert.witnesses) == 2**10
        assert cert.verify(full_shift_word(10))

    def test_sturmian_within_counting_bound(self, sturmian_word):
        import math

        cert = max_independence(sturmian_word, 20)
        assert cert.size <= math.ceil(math.log2(21))
        assert cert.verify(sturmian_word)

    def test_branch_and_bound_equals_exhaustive(self, sturmian_word):
        cantor = CutProjectCoding(GOLDEN, cantor_generation=4).word(20_000)
        rng = np.random.RandomState(0)
        noisy = rng.randint(0, 2, size=4000)
        for word in (sturmian_word, cantor, noisy, np.tile([1, 0, 0], 400)):
            for L in (6, 9, 12):
                bb = max_independence(word, L)
                ex = exhaustive_max_independence(word, L)
                assert bb.positions == ex

    def test_monotone_in_window(self, sturmian_word):
        cantor = CutProjectCoding(GOLDEN, cantor_generation=6).word(100_000)
        prev = 0
        for L in (8, 12, 16, 20):
            size = max_independence(cantor, L).size
            assert size >= prev
            prev = size

    def test_budget_exceeded_carries_best(self):
        with pytest.raises(BudgetExceeded) as exc:
            max_independence(full_shift_word(16), 16, node_budget=5)
        best = exc.value.best
        assert isinstance(best, IndependenceCertificate)
        assert not best.exhausted
        assert best.verify(full_shift_word(16))

    def test_certificate_tamper_detected(self, sturmian_word):
        cert = max_independence(sturmian_word, 8)
        bad = IndependenceCertificate(
            cert.window,
            cert.positions,
            {p: ("1" * 8) for p in cert.witnesses},
            cert.horizon,
            cert.exhausted,
        )
        assert not bad.verify(sturmian_word)


class TestGrowth:
    def test_sturmian_bounded_log(self, sturmian_word):
        rep = growth_report(sturmian_word, [6, 10, 14])
        assert rep.classification == "bounded_log"

    def test_full_shift_growing(self):
        rep = growth_report(full_shift_word(12), [4, 6, 8])
        assert rep.classification == "growing"

    def test_periodic_bounded(self):
        rep = growth_report(np.tile([1, 0, 0], 500), [3, 6, 9])
        assert rep.classification == "bounded_log"
        assert all(row["independence"] <= 2 for row in rep.table.values())


class TestKernelParity:
    """Both kernel backends must agree operation by operation."""

    def test_extract_and_project(self, sturmian_word):
        backends = K.backends()
        if len(backends) < 2:
            pytest.skip("compiled backend not built")
        a, b = (backends[n] for n in sorted(backends))
        for L in (4, 9, 17):
            fa = a.extract_factors(sturmian_word.astype(np.int64), L)
            fb = b.extract_factors(sturmian_word.astype(np.int64), L)
            assert np.array_equal(fa, fb)
            pos = np.asarray([0, 2, L - 1], dtype=np.int64)
            assert a.distinct_projection_count(fa, pos) == b.distinct_projection_count(fb, pos)
            assert np.array_equal(a.project_masks(fa, pos), b.project_masks(fb, pos))

    def test_window_oscillation(self):
        backends = K.backends()
        if len(backends) < 2:
            pytest.skip("compiled backend not built")
        rng = np.random.RandomState(42)
        vals = np.sort(rng.rand(500))
        img = rng.rand(500, 9)
        w = 0.5 ** np.abs(np.arange(9) - 4).astype(float)
        for radius in (0.001, 0.03, 0.5):
            outs = [m.window_oscillation(vals, radius, img, w) for m in backends.values()]
            assert np.allclose(outs[0], outs[1])


@settings(max_examples=30, deadline=None)
@given(data=st.data())
def test_projection_count_matches_bruteforce(data):
    word = data.draw(st.lists(st.integers(0, 1), min_size=64, max_size=200))
    L = data.draw(st.integers(2, 8))
    k = data.draw(st.integers(1, min(4, L)))
    positions = tuple(sorted(data.draw(
        st.sets(st.integers(0, L - 1), min_size=k, max_size=k))))
    factors = factor_masks(np.asarray(word), L)
    brute = {tuple((int(f) >> p) & 1 for p in positions) for f in factors}
    assert K.distinct_projection_count(factors, np.asarray(positions, dtype=np.int64)) == len(brute)


class TestFactorCache:
    def test_round_trip(self, tmp_path, sturmian_word):
        cache = FactorCache(tmp_path)
        first = cache.factors(sturmian_word, 9)
        again = cache.factors(sturmian_word, 9)
        assert np.array_equal(first, again)
        d = word_digest(sturmian_word)
        assert (tmp_path / "factors" / f"{d}-L9-H10000.txt").exists()

    def test_header_mismatch_ignored(self, tmp_path, sturmian_word):
        cache = FactorCache(tmp_path)
        cache.factors(sturmian_word, 7)
        d = word_digest(sturmian_word)
        path = tmp_path / "factors" / f"{d}-L7-H10000.txt"
        path.write_text("# wrong header\n0101010\n")
        fresh = cache.factors(sturmian_word, 7)
        assert np.array_equal(fresh, factor_masks(sturmian_word, 7))

    def test_mask_string_round_trip(self):
        for mask in (0, 1, 0b1011, 0b111111):
            s = mask_to_string(mask, 6)
            assert int(s[::-1], 2) == mask
