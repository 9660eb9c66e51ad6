from itertools import combinations

import numpy as np
import pytest

from tssimp.data import TimeSeries
from tssimp.simplifiers import (ALPHA_GAMMA, AlgorithmId, ComplexityParam,
                                Simplification, bottom_up, normalize_param,
                                optimal_simplify, rdp, reconstruct, simplify,
                                simplify_grid, simplification_objective, vw,
                                _saturation_value)


def series(*vals):
    return TimeSeries(np.array(vals, dtype=float))


def naive_recon(n, idx, vals):
    """Independent piecewise-linear reconstruction with end extension."""
    idx = list(idx)
    out = np.empty(n)
    for x in range(n):
        if x <= idx[0]:
            a, b = idx[0], idx[1]
            ya, yb = vals[0], vals[1]
        elif x >= idx[-1]:
            a, b = idx[-2], idx[-1]
            ya, yb = vals[-2], vals[-1]
        else:
            k = max(j for j in range(len(idx)) if idx[j] <= x)
            a, b = idx[k], idx[k + 1]
            ya, yb = vals[k], vals[k + 1]
        out[x] = ya + (yb - ya) * (x - a) / (b - a)
    for k, i in enumerate(idx):
        out[i] = vals[k]
    return out


class TestSimplification:
    def test_validation(self):
        with pytest.raises(ValueError):
            Simplification(5, (0,), np.array([1.0]))
        with pytest.raises(ValueError):
            Simplification(5, (2, 1), np.array([1.0, 2.0]))
        with pytest.raises(ValueError):
            Simplification(5, (0, 5), np.array([1.0, 2.0]))
        with pytest.raises(ValueError):
            Simplification(5, (0, 4), np.array([1.0]))

    def test_segment_count(self):
        s = Simplification(5, (0, 2, 4), np.array([0.0, 1.0, 0.0]))
        assert s.segment_count == 2

    def test_dict_round_trip(self):
        s = Simplification(6, (0, 3, 5), np.array([0.0, 1.5, 2.0]),
                           AlgorithmId.RDP, 0.25)
        d = s.to_dict()
        assert set(d) == {"n", "kept_indices", "kept_values", "algorithm", "alpha_c"}
        assert d["algorithm"] == "RDP"
        back = Simplification.from_dict(d)
        assert back.kept_indices == s.kept_indices
        assert np.array_equal(back.kept_values, s.kept_values)
        assert back.algorithm is AlgorithmId.RDP
        assert back.alpha_c == 0.25


class TestReconstruct:
    def test_identity(self):
        ts = series(3, 1, 4, 1, 5)
        s = Simplification(5, tuple(range(5)), ts.values)
        assert np.array_equal(reconstruct(s).values, ts.values)

    def test_interpolation(self):
        s = Simplification(5, (0, 4), np.array([0.0, 4.0]))
        assert np.array_equal(reconstruct(s).values, [0, 1, 2, 3, 4])

    def test_extension_both_ends(self):
        # kept {1: 1.0, 3: 3.0}; the unit-slope line extends to indices 0 and 4
        s = Simplification(5, (1, 3), np.array([1.0, 3.0]))
        assert np.array_equal(reconstruct(s).values, [0, 1, 2, 3, 4])

    def test_kept_points_exact(self):
        rng = np.random.default_rng(1)
        v = rng.standard_normal(40)
        s = Simplification(40, (0, 7, 13, 39), v[[0, 7, 13, 39]])
        r = reconstruct(s).values
        for i in (0, 7, 13, 39):
            assert r[i] == v[i]

    def test_matches_naive(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            n = int(rng.integers(5, 30))
            v = rng.standard_normal(n)
            size = int(rng.integers(2, n + 1))
            idx = np.sort(rng.choice(n, size=size, replace=False))
            s = Simplification(n, tuple(idx), v[idx])
            want = naive_recon(n, idx, v[idx])
            assert np.max(np.abs(reconstruct(s).values - want)) < 1e-12


class TestRdp:
    def test_spike(self):
        assert rdp(series(0, 0, 1, 0, 0), 0.5).kept_indices == (0, 2, 4)

    def test_collinear(self):
        assert rdp(series(0, 1, 2, 3, 4), 0.5).kept_indices == (0, 4)

    def test_epsilon_zero_keeps_noisy(self):
        rng = np.random.default_rng(4)
        ts = TimeSeries(rng.standard_normal(30))
        assert rdp(ts, 0.0).kept_indices == tuple(range(30))

    def test_negative_epsilon(self):
        with pytest.raises(ValueError):
            rdp(series(0, 1), -0.1)

    def test_endpoints_always_kept(self):
        rng = np.random.default_rng(5)
        for eps in (0.0, 0.3, 2.0, 100.0):
            s = rdp(TimeSeries(rng.standard_normal(25)), eps)
            assert s.kept_indices[0] == 0 and s.kept_indices[-1] == 24


class TestVw:
    def test_triangle_threshold(self):
        # triangle (0,0),(1,1),(2,0) has area 1; removal needs area <= threshold
        assert vw(series(0, 1, 0), 0.9).kept_indices == (0, 1, 2)
        assert vw(series(0, 1, 0), 1.0).kept_indices == (0, 2)

    def test_collinear_zero_area(self):
        assert vw(series(0, 1, 2, 3), 0.0).kept_indices == (0, 3)

    def test_endpoints_always_kept(self):
        rng = np.random.default_rng(6)
        for t in (0.0, 0.5, 10.0):
            s = vw(TimeSeries(rng.standard_normal(25)), t)
            assert s.kept_indices[0] == 0 and s.kept_indices[-1] == 24


class TestBottomUp:
    def test_constant(self):
        assert bottom_up(series(3, 3, 3, 3, 3), 0.1).kept_indices == (0, 4)

    def test_spike_thresholds(self):
        big = series(0, 0, 5, 0, 0)
        # cheapest non-trivial merge costs 2.5, so t=1 keeps everything
        assert bottom_up(big, 1.0).kept_indices == (0, 1, 2, 3, 4)
        assert bottom_up(big, 2.5).kept_indices == (0, 1, 2, 4)
        assert bottom_up(big, 5.0).kept_indices == (0, 4)

    def test_zero_threshold_keeps_noisy(self):
        rng = np.random.default_rng(7)
        ts = TimeSeries(rng.standard_normal(30))
        assert bottom_up(ts, 0.0).kept_indices == tuple(range(30))

    def test_endpoints_always_kept(self):
        rng = np.random.default_rng(8)
        for t in (0.0, 0.7, 50.0):
            s = bottom_up(TimeSeries(rng.standard_normal(25)), t)
            assert s.kept_indices[0] == 0 and s.kept_indices[-1] == 24


class TestOptimalSimplify:
    def test_alpha_zero_identity(self):
        s = optimal_simplify(series(0, 1, 2, 3), 0.0)
        assert s.kept_indices == (0, 1, 2, 3)

    def test_collinear_tie_prefers_fewer_segments(self):
        # every subset of a line has zero error; one segment must win,
        # with the lexicographically smallest pair
        s = optimal_simplify(series(0, 1, 2, 3), 0.25)
        assert s.segment_count == 1
        assert s.kept_indices == (0, 1)

    def test_huge_alpha_single_segment(self):
        rng = np.random.default_rng(9)
        s = optimal_simplify(TimeSeries(rng.standard_normal(20)), 1e9)
        assert s.segment_count == 1

    def test_matches_exhaustive_oracle(self):
        rng = np.random.default_rng(10)
        for _ in range(25):
            n = int(rng.integers(4, 9))
            v = rng.standard_normal(n)
            ts = TimeSeries(v)
            for alpha in (0.0, 0.1, 1.0, 10.0):
                got = simplification_objective(ts, optimal_simplify(ts, alpha), alpha)
                best = np.inf
                for size in range(2, n + 1):
                    for sub in combinations(range(n), size):
                        r = naive_recon(n, sub, v[list(sub)])
                        c = float(np.sum((v - r) ** 2)) + alpha * (len(sub) - 1)
                        best = min(best, c)
                assert abs(got - best) < 1e-9

    def test_negative_alpha(self):
        with pytest.raises(ValueError):
            optimal_simplify(series(0, 1), -1.0)


class TestNormalizeParam:
    def test_endpoints(self):
        rng = np.random.default_rng(11)
        ts = TimeSeries(rng.standard_normal(32))
        for alg in AlgorithmId:
            M = _saturation_value(alg, ts)
            assert normalize_param(alg, ts, 0.0) == M
            assert normalize_param(alg, ts, 1.0) == 0.0
            mid = normalize_param(alg, ts, 0.5)
            assert abs(mid - M * 0.5 ** ALPHA_GAMMA) < 1e-12

    def test_rdp_saturation_spike(self):
        # full chord of [0,0,1,0,0] is flat; max perpendicular distance is 1
        assert _saturation_value(AlgorithmId.RDP, series(0, 0, 1, 0, 0)) == 1.0

    def test_out_of_range(self):
        ts = series(0, 1, 2)
        with pytest.raises(ValueError):
            normalize_param(AlgorithmId.RDP, ts, 1.5)
        with pytest.raises(ValueError):
            ComplexityParam(-0.1)


class TestSimplifyDispatch:
    @pytest.mark.parametrize("alg", list(AlgorithmId))
    def test_alpha_one_exact(self, alg):
        rng = np.random.default_rng(12)
        for _ in range(5):
            ts = TimeSeries(rng.standard_normal(48))
            s = simplify(alg, ts, ComplexityParam(1.0))
            dev = np.max(np.abs(reconstruct(s).values - ts.values))
            assert dev < 1e-12
            assert s.algorithm is alg and s.alpha_c == 1.0

    @pytest.mark.parametrize("alg", list(AlgorithmId))
    def test_alpha_zero_single_segment(self, alg):
        rng = np.random.default_rng(13)
        for _ in range(5):
            ts = TimeSeries(rng.standard_normal(48))
            s = simplify(alg, ts, ComplexityParam(0.0))
            assert s.segment_count == 1

    @pytest.mark.parametrize("alg", list(AlgorithmId))
    def test_grid_matches_single_calls(self, alg):
        rng = np.random.default_rng(14)
        alphas = [0.0, 0.07, 0.25, 0.5, 0.93, 1.0]
        for _ in range(4):
            ts = TimeSeries(rng.standard_normal(40))
            grid = simplify_grid(alg, ts, alphas)
            for a, s in zip(alphas, grid):
                single = simplify(alg, ts, ComplexityParam(a))
                assert s.kept_indices == single.kept_indices
                assert s.alpha_c == a

    @pytest.mark.parametrize("alg", list(AlgorithmId))
    def test_segments_non_decreasing(self, alg):
        rng = np.random.default_rng(15)
        alphas = [round(i / 20, 2) for i in range(21)]
        for _ in range(4):
            ts = TimeSeries(rng.standard_normal(40))
            segs = [s.segment_count for s in simplify_grid(alg, ts, alphas)]
            assert all(a <= b for a, b in zip(segs, segs[1:]))


class TestAlgorithmId:
    def test_parse(self):
        assert AlgorithmId.parse("rdp") is AlgorithmId.RDP
        assert AlgorithmId.parse(" OS ") is AlgorithmId.OS
        with pytest.raises(ValueError):
            AlgorithmId.parse("spline")
