"""One test per primary acceptance criterion; each reports a PASS/FAIL line."""

import filecmp
import time
from itertools import combinations

import numpy as np
import pytest

from tssimp.classifiers import fit_logreg
from tssimp.cli import run
from tssimp.data import TimeSeries, stratified_sample
from tssimp.characterize import acf, adf_test, approx_entropy
from tssimp.evaluation import cohen_kappa, complexity_at_loyalty, sweep
from tssimp.prototypes import kmedoids, pairwise_distances
from tssimp.simplifiers import (AlgorithmId, ComplexityParam, bottom_up,
                                optimal_simplify, rdp, reconstruct, simplify,
                                simplify_grid, simplification_objective, vw)
from tssimp.synthetic import DEFAULT_NAME

from test_characterize import ADF_REFERENCE, acf_direct, ar1, random_walk
from test_evaluation import kappa_rational
from test_simplifiers import naive_recon


def test_os_optimality(criterion):
    """DP objective equals the exhaustive-subset oracle on 200 small series."""
    alphas = (0.0, 0.1, 1.0, 10.0)
    rng = np.random.default_rng(4242)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(4, 11))
        v = rng.standard_normal(n)
        ts = TimeSeries(v)
        # per-subset squared error and segment count, computed once
        table = []
        for size in range(2, n + 1):
            for sub in combinations(range(n), size):
                r = naive_recon(n, sub, v[list(sub)])
                table.append((float(np.sum((v - r) ** 2)), size - 1))
        for alpha in alphas:
            want = min(e + alpha * s for e, s in table)
            got = simplification_objective(ts, optimal_simplify(ts, alpha), alpha)
            worst = max(worst, abs(got - want))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-9 and elapsed < 30.0
    criterion("OS optimality vs exhaustive oracle",
              ok, f"max |diff| {worst:.2e}, {elapsed:.1f}s")


def test_monotonicity(criterion):
    """Segment count never decreases along the alpha_c grid, all algorithms."""
    grid = [round(i / 100, 2) for i in range(101)]
    rng = np.random.default_rng(777)
    violations = 0
    for _ in range(50):
        ts = TimeSeries(rng.standard_normal(64))
        for alg in AlgorithmId:
            segs = [s.segment_count for s in simplify_grid(alg, ts, grid)]
            violations += sum(b < a for a, b in zip(segs, segs[1:]))
    criterion("segment-count monotonicity over alpha_c grid",
              violations == 0, f"{violations} violations")


@pytest.fixture(scope="module")
def e2e(synthetic):
    """Shared end-to-end artifacts: classifier accuracy plus RDP/OS sweeps."""
    t0 = time.perf_counter()
    clf = fit_logreg(list(synthetic.train))
    correct = sum(clf.predict(i.series) == i.label for i in synthetic.test)
    pool = stratified_sample(synthetic.test, 100, seed=42,
                             dataset_name=synthetic.name)
    curves = {alg: sweep(alg, clf, pool)
              for alg in (AlgorithmId.RDP, AlgorithmId.OS)}
    return {"accuracy": correct / len(synthetic.test), "curves": curves,
            "elapsed": time.perf_counter() - t0}


def test_endpoints(criterion, e2e):
    """alpha_c=1 reconstructs exactly and is fully loyal; alpha_c=0 is one
    segment at complexity 2/n."""
    rng = np.random.default_rng(888)
    ok = True
    detail = ""
    for alg in AlgorithmId:
        for _ in range(10):
            ts = TimeSeries(rng.standard_normal(int(rng.integers(16, 65))))
            full = simplify(alg, ts, ComplexityParam(1.0))
            dev = float(np.max(np.abs(reconstruct(full).values - ts.values)))
            single = simplify(alg, ts, ComplexityParam(0.0))
            comp = (single.segment_count + 1) / ts.n
            if dev >= 1e-12 or single.segment_count != 1 or comp != 2.0 / ts.n:
                ok = False
                detail = f"{alg.value}: dev {dev:.2e}, segs {single.segment_count}"
    for curve in e2e["curves"].values():
        top = curve.point_at(1.0)
        bottom = curve.point_at(0.0)
        if not (top.loyalty == 1.0 and top.kappa == 1.0):
            ok = False
            detail = f"{curve.algorithm}: sweep endpoint not loyal"
        if not (bottom.mean_segments == 1.0
                and abs(bottom.mean_complexity - 2.0 / 128.0) < 1e-15):
            ok = False
            detail = f"{curve.algorithm}: alpha_c=0 step off"
    criterion("alpha_c endpoint behaviour", ok, detail or "exact at 0 and 1")


def test_kappa_oracle(criterion):
    rng = np.random.default_rng(1234)
    worst = 0.0
    for _ in range(1000):
        k = int(rng.integers(2, 7))
        m = rng.integers(0, 51, size=(k, k))
        if m.sum() == 0:
            m[0, 0] = 1
        worst = max(worst, abs(cohen_kappa(m) - kappa_rational(m)))
    hand = cohen_kappa([[40, 10], [10, 40]])
    ok = worst < 1e-12 and hand == 0.6
    criterion("Cohen's kappa vs rational-arithmetic oracle",
              ok, f"max |diff| {worst:.2e}, hand case {hand!r}")


def test_acf_and_apen(criterion):
    rng = np.random.default_rng(31337)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(8, 513))
        v = rng.standard_normal(n)
        worst = max(worst, float(np.max(np.abs(
            acf(TimeSeries(v)) - acf_direct(v)))))
    const_ok = approx_entropy(TimeSeries(np.full(64, 3.5))) == 0.0
    inv_worst = 0.0
    for seed in (7, 8, 9):
        v = np.random.default_rng(seed).standard_normal(80)
        base = approx_entropy(TimeSeries(v))
        inv_worst = max(inv_worst,
                        abs(approx_entropy(TimeSeries(5.0 * v - 2.0)) - base))
    ok = worst < 1e-9 and const_ok and inv_worst < 1e-9
    criterion("FFT autocorrelation and ApEn properties",
              ok, f"acf diff {worst:.2e}, apen inv diff {inv_worst:.2e}")


def test_adf_reference_agreement(criterion):
    got = [adf_test(random_walk(i))[1] for i in range(20)]
    got += [adf_test(ar1(i))[1] for i in range(20)]
    agree = sum(a == b for a, b in zip(got, ADF_REFERENCE))
    criterion("stationarity decisions vs frozen reference",
              agree >= 38, f"{agree}/40 agree")


def test_end_to_end(criterion, e2e):
    acc = e2e["accuracy"]
    c_rdp = complexity_at_loyalty(e2e["curves"][AlgorithmId.RDP], 0.95)
    c_os = complexity_at_loyalty(e2e["curves"][AlgorithmId.OS], 0.95)
    elapsed = e2e["elapsed"]
    ok = acc >= 0.95 and c_rdp <= 0.25 and c_os <= 0.25 and elapsed < 120.0
    criterion("synthetic end-to-end regime",
              ok, f"acc {acc:.3f}, c@0.95 rdp {c_rdp:.4f} os {c_os:.4f}, "
                  f"{elapsed:.1f}s")


def test_worker_determinism(criterion, data_dir, tmp_path):
    args = ["evaluate", "--data-dir", str(data_dir), "--dataset", DEFAULT_NAME,
            "--algorithm", "rdp", "--classifier", "logreg",
            "--sample-size", "24", "--skip-characteristics"]
    one = tmp_path / "jobs1"
    eight = tmp_path / "jobs8"
    assert run(args + ["--jobs", "1", "--out", str(one)]) == 0
    assert run(args + ["--jobs", "8", "--out", str(eight)]) == 0
    names = sorted(p.name for p in one.iterdir())
    ok = names == sorted(p.name for p in eight.iterdir())
    for name in names:
        if not filecmp.cmp(one / name, eight / name, shallow=False):
            ok = False
    criterion("1-worker vs 8-worker byte-identical output",
              ok, f"{len(names)} files compared")


def test_performance(criterion):
    rng = np.random.default_rng(2024)
    big = TimeSeries(np.cumsum(rng.standard_normal(10_000)))

    def best_of(fn, repeats=3):
        times = []
        for _ in range(repeats):
            t0 = time.perf_counter()
            fn()
            times.append(time.perf_counter() - t0)
        return min(times)

    t_rdp = best_of(lambda: rdp(big, 5.0))
    t_vw = best_of(lambda: vw(big, 5.0))
    t_bu = best_of(lambda: bottom_up(big, 5.0))
    mid = TimeSeries(np.cumsum(rng.standard_normal(500)))
    t_os = best_of(lambda: optimal_simplify(mid, 1.0), repeats=1)
    ok = t_rdp < 0.1 and t_vw < 0.1 and t_bu < 0.1 and t_os < 10.0
    criterion("simplifier runtime budgets",
              ok, f"rdp {t_rdp * 1e3:.0f}ms vw {t_vw * 1e3:.0f}ms "
                  f"bu {t_bu * 1e3:.0f}ms os(500) {t_os:.2f}s")


def test_kmedoids_oracle(criterion):
    rng = np.random.default_rng(555)
    ok = True
    for trial in range(50):
        count = int(rng.integers(4, 31))
        items = [TimeSeries(rng.standard_normal(12)) for _ in range(count)]
        D = pairwise_distances(items, "dtw")
        want = int(np.argmin(D.sum(axis=1)))
        if kmedoids(items, 1, "dtw", D=D) != [want]:
            ok = False
    descents = True
    for trial in range(10):
        items = [TimeSeries(rng.standard_normal(12)) for _ in range(20)]
        trace: list[float] = []
        kmedoids(items, 3, "dtw", cost_trace=trace)
        if any(b > a for a, b in zip(trace, trace[1:])):
            descents = False
    criterion("k-medoids exhaustive k=1 oracle and swap descent",
              ok and descents, "50 sets, swap costs non-increasing")
