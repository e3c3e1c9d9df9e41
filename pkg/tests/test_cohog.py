import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import naive_cosine, naive_entropy
from vprbench.cohog import (
    CohogParams,
    RegionalDescriptorSet,
    cohog_describe,
    cohog_match,
    entropy_map,
    select_rois,
)
from vprbench.errors import EmptyDescriptorSet, GridMismatch, InvalidParam
from vprbench.hog import hog_compare, hog_describe
from vprbench.imaging import GrayImage, Rect


def half_noise(seed=0, size=64):
    rng = np.random.default_rng(seed)
    arr = np.full((size, size), 120, dtype=np.uint8)
    arr[:, : size // 2] = rng.integers(0, 256, (size, size // 2))
    return GrayImage(arr)


class TestEntropyMap:
    def test_constant(self):
        m = entropy_map(GrayImage(np.full((32, 48), 5)), 16)
        assert m.shape == (2, 3)
        assert not m.any()

    def test_shape(self):
        assert entropy_map(GrayImage(np.zeros((32, 32))), 16).shape == (2, 2)

    def test_half_noise_matches_brute_force(self):
        img = half_noise()
        m = entropy_map(img, 16)
        for r in range(4):
            for c in range(4):
                tile = img.data[r * 16:(r + 1) * 16, c * 16:(c + 1) * 16].ravel().tolist()
                assert m[r, c] == pytest.approx(naive_entropy(tile), abs=1e-12)
        # 256 samples from 256 levels: empirical entropy well above 7 bits
        assert np.all(m[:, :2] > 7.0)
        assert np.all(m[:, 2:] == 0)

    def test_grid_mismatch(self):
        with pytest.raises(GridMismatch):
            entropy_map(GrayImage(np.zeros((32, 40))), 16)


class TestSelectRois:
    def test_threshold_zero_selects_all(self):
        m = np.array([[0.0, 0.0], [1.0, 0.0]])
        assert len(select_rois(m, 0.0)) == 4

    def test_forced_fallback(self):
        m = np.array([[0.2, 3.1], [0.9, 5.0]])
        assert select_rois(m, 9.0, 16) == [Rect(16, 16, 16, 16)]

    def test_fallback_tie_takes_first(self):
        assert select_rois(np.zeros((2, 2)), 1.0, 8) == [Rect(0, 0, 8, 8)]

    def test_hand_case(self):
        m = np.array([[0.2, 3.1], [0.9, 5.0]])
        # cells (row 0, col 1) and (row 1, col 1)
        assert select_rois(m, 1.0, 1) == [Rect(1, 0, 1, 1), Rect(1, 1, 1, 1)]

    def test_empty_map(self):
        with pytest.raises(InvalidParam):
            select_rois(np.zeros((0, 0)), 1.0)


class TestDescribe:
    def test_constant_image_fallback(self):
        s = cohog_describe(GrayImage(np.full((32, 32), 9)))
        assert s.count == 1
        assert not s.matrix.any()

    def test_half_noise_keeps_noisy_half(self):
        s = cohog_describe(half_noise(), CohogParams(entropy_threshold=0.5))
        assert s.count == 8
        assert all(r.x < 32 for r in s.rects)

    def test_threshold_zero_keeps_every_cell(self, rng):
        img = GrayImage(rng.integers(0, 256, (48, 32)))
        assert cohog_describe(img, CohogParams(entropy_threshold=0.0)).count == 6

    def test_region_descriptor_is_hog_of_crop(self, rng):
        img = GrayImage(rng.integers(0, 256, (32, 32)))
        s = cohog_describe(img, CohogParams(entropy_threshold=0.0))
        for rect, desc in s.regions:
            crop = GrayImage(img.data[rect.y:rect.y + 16, rect.x:rect.x + 16])
            np.testing.assert_allclose(desc.values, hog_describe(crop).values, atol=1e-12)

    def test_rects_disjoint_and_aligned(self, rng):
        s = cohog_describe(GrayImage(rng.integers(0, 256, (64, 64))))
        for i, a in enumerate(s.rects):
            assert a.x % 16 == 0 and a.y % 16 == 0
            for b in s.rects[i + 1:]:
                assert not a.intersects(b)

    def test_grid_mismatch(self):
        with pytest.raises(GridMismatch):
            cohog_describe(GrayImage(np.zeros((40, 32))))

    @pytest.mark.parametrize("kw", [dict(entropy_threshold=-0.1), dict(entropy_threshold=8.5), dict(region_size=8)])
    def test_invalid_params(self, kw):
        with pytest.raises(InvalidParam):
            CohogParams(**kw)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.floats(0, 8), st.floats(0, 8))
    def test_threshold_monotone(self, seed, t1, t2):
        rng = np.random.default_rng(seed)
        arr = rng.integers(0, 256, (32, 48)) // rng.integers(1, 64, (32, 48))
        img = GrayImage(arr)
        lo, hi = sorted((t1, t2))
        assert cohog_describe(img, CohogParams(entropy_threshold=hi)).count <= cohog_describe(
            img, CohogParams(entropy_threshold=lo)
        ).count


def _set(rows):
    rows = np.asarray(rows, dtype=np.float64)
    return RegionalDescriptorSet([Rect(16 * i, 0, 16, 16) for i in range(len(rows))], rows)


class TestMatch:
    def test_self_match(self, rng):
        s = cohog_describe(GrayImage(rng.integers(0, 256, (64, 64))))
        assert cohog_match(s, s) == pytest.approx(1.0, abs=1e-12)

    def test_single_region_equals_hog_compare(self, rng):
        a, b = rng.normal(size=(2, 36))
        assert cohog_match(_set([a]), _set([b])) == pytest.approx(hog_compare(a, b), abs=1e-12)

    def test_mean_of_maxima(self):
        # query region maxima: 0.8 and 0.6
        q = _set([[1.0, 0.0], [0.0, 1.0]])
        r = _set([[0.8, 0.6], [0.8, -0.6]])
        assert cohog_match(q, r) == pytest.approx(0.7, abs=1e-12)

    def test_empty(self):
        empty = RegionalDescriptorSet([], np.zeros((0, 36)))
        with pytest.raises(EmptyDescriptorSet):
            cohog_match(empty, _set([np.ones(36)]))

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 6), st.integers(1, 6))
    def test_properties(self, seed, nq, nr):
        rng = np.random.default_rng(seed)
        q = rng.normal(size=(nq, 5))
        r = rng.normal(size=(nr, 5))
        score = cohog_match(_set(q), _set(r))
        oracle = np.mean([max(naive_cosine(a, b) for b in r.tolist()) for a in q.tolist()])
        assert score == pytest.approx(oracle, abs=1e-12)
        assert -1 <= score <= 1
        perm = rng.permutation(nr)
        assert cohog_match(_set(q), _set(r[perm])) == pytest.approx(score, abs=1e-12)
        extra = np.vstack([r, rng.normal(size=(1, 5))])
        assert cohog_match(_set(q), _set(extra)) >= score - 1e-12
