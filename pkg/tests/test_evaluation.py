from fractions import Fraction

import numpy as np
import pytest

from tssimp.classifiers import Classifier, fit_logreg
from tssimp.data import LabeledInstance, SamplePool, TimeSeries
from tssimp.evaluation import (ALPHA_GRID, AUC_NOTE, CurvePoint,
                               DatasetResult, EvaluationCurve, aggregate, auc,
                               cohen_kappa, complexity_at_loyalty,
                               complexity_of, confusion_matrix,
                               min_alpha_on_curve, sweep, write_curve_csv,
                               write_reports)
from tssimp.simplifiers import AlgorithmId, Simplification


def kappa_rational(m):
    """Independent Cohen's kappa in exact rational arithmetic."""
    m = np.asarray(m, dtype=np.int64)
    total = int(m.sum())
    trace = int(np.trace(m))
    chance = int(m.sum(axis=1) @ m.sum(axis=0))
    if chance == total * total:
        return 1.0 if trace == total else 0.0
    p0 = Fraction(trace, total)
    pe = Fraction(chance, total * total)
    return float((p0 - pe) / (1 - pe))


def curve_of(points, alg=AlgorithmId.RDP):
    return EvaluationCurve("d", alg, "clf", 0, tuple(points))


class TestGrid:
    def test_alpha_grid(self):
        assert len(ALPHA_GRID) == 101
        assert ALPHA_GRID[0] == 0.0 and ALPHA_GRID[-1] == 1.0
        assert ALPHA_GRID[37] == 0.37


class TestComplexity:
    def test_fraction_of_points(self):
        s = Simplification(10, (0, 4, 9), np.array([0.0, 1.0, 0.0]))
        assert complexity_of(s) == 0.3


class TestConfusion:
    def test_counts(self):
        m = confusion_matrix([0, 0, 1, 2], [0, 1, 1, 2])
        assert m.shape == (3, 3)
        assert m[0, 0] == 1 and m[0, 1] == 1 and m[1, 1] == 1 and m[2, 2] == 1

    def test_validation(self):
        with pytest.raises(ValueError):
            confusion_matrix([], [])
        with pytest.raises(ValueError):
            confusion_matrix([0], [0, 1])


class TestKappa:
    def test_hand_value_exact(self):
        assert cohen_kappa([[40, 10], [10, 40]]) == 0.6

    def test_perfect_and_chance(self):
        assert cohen_kappa([[5, 0], [0, 5]]) == 1.0
        assert cohen_kappa([[25, 25], [25, 25]]) == 0.0

    def test_degenerate_single_class(self):
        # both raters always answer class 0: chance == total^2
        assert cohen_kappa([[7]]) == 1.0
        assert cohen_kappa([[0, 7], [0, 0]]) == 0.0

    def test_negative_possible(self):
        assert cohen_kappa([[0, 5], [5, 0]]) < 0.0

    def test_matches_rational_oracle(self):
        rng = np.random.default_rng(40)
        for _ in range(200):
            k = int(rng.integers(2, 7))
            m = rng.integers(0, 51, size=(k, k))
            if m.sum() == 0:
                m[0, 0] = 1
            assert abs(cohen_kappa(m) - kappa_rational(m)) < 1e-12

    def test_validation(self):
        with pytest.raises(ValueError):
            cohen_kappa([[1, 2, 3], [4, 5, 6]])
        with pytest.raises(ValueError):
            cohen_kappa([[0, 0], [0, 0]])


class TestAuc:
    def test_hand_curve(self):
        pts = [CurvePoint(0.0, 0.1, 0.0, 0.0, 1.0),
               CurvePoint(0.5, 0.5, 1.0, 1.0, 2.0),
               CurvePoint(1.0, 1.0, 1.0, 1.0, 3.0)]
        # trapezoid area 0.7 over span 0.9, scaled to [0, 100]
        assert abs(auc(curve_of(pts)) - 700.0 / 9.0) < 1e-9

    def test_negative_kappa_clamped(self):
        pts = [CurvePoint(0.0, 0.5, 0.0, -1.0, 1.0),
               CurvePoint(1.0, 1.0, 1.0, -1.0, 3.0)]
        assert auc(curve_of(pts)) == 0.0

    def test_duplicate_complexity_collapses_by_mean(self):
        pts = [CurvePoint(0.0, 0.5, 0.0, -0.5, 1.0),
               CurvePoint(0.01, 0.5, 0.0, 0.5, 1.0),
               CurvePoint(1.0, 1.0, 1.0, 1.0, 3.0)]
        # the two c=0.5 points average to kappa 0, then trapezoid to 1.0
        assert abs(auc(curve_of(pts)) - 100.0 * 0.25 / 0.5) < 1e-9

    def test_single_point(self):
        pts = [CurvePoint(1.0, 1.0, 1.0, 1.0, 3.0)]
        assert auc(curve_of(pts)) == 100.0


class TestCurveQueries:
    def make(self):
        pts = [CurvePoint(0.0, 0.1, 0.2, 0.1, 1.0),
               CurvePoint(0.5, 0.3, 0.9, 0.8, 3.0),
               CurvePoint(0.8, 0.6, 0.96, 0.9, 5.0),
               CurvePoint(1.0, 1.0, 1.0, 1.0, 9.0)]
        return curve_of(pts)

    def test_complexity_at_loyalty(self):
        c = self.make()
        assert complexity_at_loyalty(c, 0.90) == 0.3
        assert complexity_at_loyalty(c, 0.95) == 0.6
        with pytest.raises(ValueError):
            complexity_at_loyalty(c, 0.0)

    def test_min_alpha_on_curve(self):
        c = self.make()
        alpha, point = min_alpha_on_curve(c, 0.90)
        assert alpha == 0.5 and point.mean_segments == 3.0
        alpha, _ = min_alpha_on_curve(c, 1.0)
        assert alpha == 1.0

    def test_point_at(self):
        c = self.make()
        assert c.point_at(0.8).loyalty == 0.96
        with pytest.raises(KeyError):
            c.point_at(0.33)


def tiny_pool(n_instances=6, n=24, seed=50):
    rng = np.random.default_rng(seed)
    insts = []
    for i in range(n_instances):
        label = i % 2
        base = np.sin(2 * np.pi * np.arange(n) / n) if label else np.zeros(n)
        insts.append(LabeledInstance(
            TimeSeries(base + 0.05 * rng.standard_normal(n)), label,
            instance_id=i))
    return insts


@pytest.fixture(scope="module")
def curve():
    insts = tiny_pool()
    clf = fit_logreg(insts, epochs=120)
    pool = SamplePool(tuple(insts), "test", 42, "tiny")
    return sweep(AlgorithmId.RDP, clf, pool)


class TestSweep:

    def test_shape_and_metadata(self, curve):
        assert len(curve.points) == len(ALPHA_GRID)
        assert curve.dataset == "tiny" and curve.seed == 42
        assert curve.algorithm is AlgorithmId.RDP
        assert curve.classifier == "logreg"

    def test_identity_step_is_loyal(self, curve):
        p = curve.point_at(1.0)
        assert p.loyalty == 1.0 and p.kappa == 1.0 and p.mean_complexity == 1.0

    def test_single_segment_step(self, curve):
        p = curve.point_at(0.0)
        assert p.mean_segments == 1.0
        assert abs(p.mean_complexity - 2.0 / 24.0) < 1e-12

    def test_parallel_matches_serial(self, curve):
        insts = tiny_pool()
        clf = fit_logreg(insts, epochs=120)
        pool = SamplePool(tuple(insts), "test", 42, "tiny")
        par = sweep(AlgorithmId.RDP, clf, pool, jobs=2)
        assert par == curve

    def test_empty_pool(self):
        clf = fit_logreg(tiny_pool(), epochs=10)
        with pytest.raises(ValueError):
            sweep(AlgorithmId.RDP, clf, SamplePool((), "test", 1, "x"))


class TestCurveCsv:
    def test_format(self, tmp_path):
        pts = [CurvePoint(0.0, 2.0 / 24.0, 0.5, 0.25, 1.0),
               CurvePoint(1.0, 1.0, 1.0, 1.0, 23.0)]
        p = tmp_path / "c.csv"
        write_curve_csv(curve_of(pts), p)
        lines = p.read_text().splitlines()
        assert lines[0] == "alpha_c,mean_complexity,loyalty,kappa,mean_segments"
        assert lines[1].startswith("0.00,")
        assert lines[2].startswith("1.00,")
        # values survive a float round-trip exactly (repr formatting)
        assert float(lines[1].split(",")[1]) == 2.0 / 24.0


class TestAggregate:
    def flat_curve(self, alg, kappa=1.0):
        pts = [CurvePoint(0.0, 0.1, 1.0, kappa, 1.0),
               CurvePoint(1.0, 1.0, 1.0, kappa, 9.0)]
        return EvaluationCurve("d", alg, "clf", 0, tuple(pts))

    def result(self, name, n_classes, kappa=1.0):
        curves = {a.value: self.flat_curve(a, kappa) for a in AlgorithmId}
        return DatasetResult(name, n_classes, None, curves)

    def test_auc_by_group_rows(self):
        tables = aggregate([self.result("a", 2), self.result("b", 3)])
        t1 = tables["auc_by_group"]
        assert t1[0][:2] == ["group", "datasets"]
        rows = {r[0]: r for r in t1[1:]}
        assert rows["overall"][1] == "2"
        assert rows["binary"][1] == "1"
        assert rows["multiclass"][1] == "1"
        # no characteristics supplied: grouped rows are empty-marked
        assert rows["stationary"][2] == "-"

    def test_complexity_at_loyalty_rows(self):
        tables = aggregate([self.result("a", 2)])
        t3 = tables["complexity_at_loyalty"]
        assert t3[0] == ["algorithm", "complexity_at_0.80", "complexity_at_0.85",
                         "complexity_at_0.90", "complexity_at_0.95"]
        assert t3[1][0] == "rdp"
        assert float(t3[1][1]) == 0.1

    def test_segments_by_dataset_rows(self):
        tables = aggregate([self.result("a", 2)])
        t5 = tables["segments_by_dataset"]
        assert t5[1][0] == "a"
        assert t5[1][2] == "-"

    def test_write_reports(self, tmp_path):
        write_reports([self.result("a", 2)], tmp_path)
        for name in ("summary.csv", "auc_by_group.csv", "complexity_at_loyalty.csv",
                     "segments_by_dataset.csv"):
            assert (tmp_path / name).is_file()
        head = (tmp_path / "summary.csv").read_text().splitlines()[0]
        assert head == f"# {AUC_NOTE}"

    def test_empty_results(self):
        with pytest.raises(ValueError):
            aggregate([])
