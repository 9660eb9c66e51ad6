"""Loyalty/complexity evaluation protocol.

For one (algorithm, classifier, sample pool): sweep the 101-step alpha_c
grid {0.00, 0.01, ..., 1.00}; at each step simplify every pooled instance,
classify the reconstruction, and compare against the cached prediction on
the original. Each step yields mean complexity, loyalty (fraction of
agreeing predictions), Cohen's kappa of the agreement, and mean segments.

AUC integrates kappa (clamped below at 0) over the mean-complexity axis
from the curve's smallest complexity to 1, scaled to [0, 100].
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .characterize import DatasetCharacteristics
from .classifiers import Classifier, PredictionKey, variant_descriptor
from .data import SamplePool
from .simplifiers import AlgorithmId, Simplification, reconstruct, simplify_grid

ALPHA_GRID: tuple[float, ...] = tuple(round(i / 100.0, 2) for i in range(101))
LOYALTY_TARGETS: tuple[float, ...] = (0.80, 0.85, 0.90, 0.95)

AUC_NOTE = ("AUC integrates chance-corrected agreement (kappa, clamped below at 0) "
            "over mean complexity from the curve minimum to 1, scaled to [0,100]; "
            "percent loyalty is reported alongside but not integrated.")


def complexity_of(s: Simplification) -> float:
    """Fraction of original points kept: (segments + 1)/n."""
    return (s.segment_count + 1) / s.original_length


def confusion_matrix(orig: list[int], simp: list[int]) -> np.ndarray:
    """Square count matrix indexed by (original prediction, simplified prediction)."""
    if len(orig) != len(simp) or not orig:
        raise ValueError("prediction lists must be nonempty and equal-length")
    k = max(max(orig), max(simp)) + 1
    m = np.zeros((k, k), dtype=np.int64)
    for a, b in zip(orig, simp):
        m[a, b] += 1
    return m


def cohen_kappa(counts) -> float:
    """(p0 - pe)/(1 - pe); degenerate marginals (pe = 1) give 1 on perfect
    agreement and 0 otherwise.

    Computed as (total*trace - chance)/(total^2 - chance) over exact integer
    counts, so one correctly rounded division is the only float step."""
    m = np.asarray(counts, dtype=np.int64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("confusion counts must be square")
    total = int(m.sum())
    if total <= 0:
        raise ValueError("empty confusion counts")
    trace = int(np.trace(m))
    chance = int(m.sum(axis=1) @ m.sum(axis=0))
    if chance == total * total:
        return 1.0 if trace == total else 0.0
    return (total * trace - chance) / (total * total - chance)


@dataclass(frozen=True)
class CurvePoint:
    alpha_c: float
    mean_complexity: float
    loyalty: float
    kappa: float
    mean_segments: float


@dataclass(frozen=True)
class EvaluationCurve:
    dataset: str
    algorithm: AlgorithmId
    classifier: str
    seed: int
    points: tuple[CurvePoint, ...]

    def point_at(self, alpha_c: float) -> CurvePoint:
        for p in self.points:
            if p.alpha_c == alpha_c:
                return p
        raise KeyError(f"no curve point at alpha_c={alpha_c}")


# worker state for the process pool; populated once per worker via initializer
_W: dict = {}


def _init_worker(alg, clf, dataset_name, alphas):  # pragma: no cover - subprocess
    _W["alg"] = alg
    _W["clf"] = clf
    _W["dataset"] = dataset_name
    _W["alphas"] = alphas


def _instance_task(args):
    """Predictions and complexity stats for one pooled instance over the grid."""
    inst = args
    alg: AlgorithmId = _W["alg"]
    clf: Classifier = _W["clf"]
    dataset = _W["dataset"]
    alphas = _W["alphas"]
    orig_key = PredictionKey(dataset, inst.instance_id, variant_descriptor())
    orig_pred = clf.predict(inst.series, orig_key)
    preds, comps, segs = [], [], []
    for s in simplify_grid(alg, inst.series, alphas):
        key = PredictionKey(dataset, inst.instance_id,
                            variant_descriptor(alg.value, s.alpha_c))
        preds.append(clf.predict(reconstruct(s), key))
        comps.append(complexity_of(s))
        segs.append(s.segment_count)
    return orig_pred, preds, comps, segs


def sweep(alg: AlgorithmId, clf: Classifier, pool: SamplePool,
          jobs: int = 1) -> EvaluationCurve:
    """Evaluate one algorithm/classifier pair over the alpha_c grid.

    jobs > 1 distributes instances over processes; results are reduced in
    instance order, so worker count never changes the output.
    """
    instances = pool.instances
    if not instances:
        raise ValueError("empty sample pool")
    _init_worker(alg, clf, pool.dataset_name, ALPHA_GRID)
    if jobs > 1 and len(instances) > 1:
        with ProcessPoolExecutor(
                max_workers=jobs,
                initializer=_init_worker,
                initargs=(alg, clf, pool.dataset_name, ALPHA_GRID)) as ex:
            rows = list(ex.map(_instance_task, instances))
    else:
        rows = [_instance_task(inst) for inst in instances]

    points = []
    for step, alpha in enumerate(ALPHA_GRID):
        orig = [r[0] for r in rows]
        simp = [r[1][step] for r in rows]
        comp = sum(r[2][step] for r in rows) / len(rows)
        seg = sum(r[3][step] for r in rows) / len(rows)
        loyalty = sum(a == b for a, b in zip(orig, simp)) / len(rows)
        kappa = cohen_kappa(confusion_matrix(orig, simp))
        points.append(CurvePoint(alpha, comp, loyalty, kappa, seg))
    return EvaluationCurve(pool.dataset_name, alg, clf.name, pool.seed, tuple(points))


def auc(curve: EvaluationCurve) -> float:
    """Area under clamped kappa over mean complexity, as a value in [0, 100].

    Points are sorted by complexity; equal-complexity points collapse to
    their kappa average before clamping; the integral is trapezoidal over
    [c_min, 1] and normalized by the span.
    """
    pts = sorted((p.mean_complexity, p.kappa) for p in curve.points)
    xs: list[float] = []
    ys: list[float] = []
    i = 0
    while i < len(pts):
        j = i
        while j < len(pts) and pts[j][0] == pts[i][0]:
            j += 1
        xs.append(pts[i][0])
        ys.append(max(sum(k for _, k in pts[i:j]) / (j - i), 0.0))
        i = j
    c_min = xs[0]
    if c_min >= 1.0 or len(xs) == 1:
        return 100.0 * ys[-1]
    area = 0.0
    for a in range(1, len(xs)):
        area += (xs[a] - xs[a - 1]) * (ys[a] + ys[a - 1]) / 2.0
    return 100.0 * area / (1.0 - c_min)


def complexity_at_loyalty(curve: EvaluationCurve, target: float) -> float:
    """Smallest mean complexity among points whose loyalty meets the target."""
    if not 0.0 < target <= 1.0:
        raise ValueError("target must be in (0, 1]")
    qualifying = [p.mean_complexity for p in curve.points if p.loyalty >= target]
    if not qualifying:
        raise ValueError(f"no curve point reaches loyalty {target}")
    return min(qualifying)


def min_alpha_on_curve(curve: EvaluationCurve, target: float) -> tuple[float, CurvePoint]:
    """Smallest grid alpha_c whose step reaches the loyalty target."""
    if not 0.0 < target <= 1.0:
        raise ValueError("target must be in (0, 1]")
    for p in curve.points:
        if p.loyalty >= target:
            return p.alpha_c, p
    # alpha_c = 1.00 is the identity simplification: loyalty is 1 there
    raise AssertionError("unreachable: identity step always satisfies the target")


def min_alpha_for_loyalty(alg: AlgorithmId, clf: Classifier, pool: SamplePool,
                          target: float, curve: EvaluationCurve | None = None,
                          jobs: int = 1) -> tuple[float, CurvePoint]:
    """min_alpha_on_curve over a fresh sweep, or over a cached curve."""
    if curve is None:
        curve = sweep(alg, clf, pool, jobs=jobs)
    return min_alpha_on_curve(curve, target)


# ---------------------------------------------------------------------------
# Reports

def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_curve_csv(curve: EvaluationCurve, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("alpha_c,mean_complexity,loyalty,kappa,mean_segments\n")
        for p in curve.points:
            fh.write(f"{p.alpha_c:.2f},{_fmt(p.mean_complexity)},{_fmt(p.loyalty)},"
                     f"{_fmt(p.kappa)},{_fmt(p.mean_segments)}\n")


@dataclass(frozen=True)
class DatasetResult:
    """Everything aggregate() needs about one evaluated dataset."""

    name: str
    n_classes: int
    characteristics: DatasetCharacteristics | None
    curves: dict[str, EvaluationCurve]  # algorithm id -> curve


EMPTY_MARK = "-"


def _mean_or_empty(vals: list[float]) -> str:
    if not vals:
        return EMPTY_MARK
    return _fmt(sum(vals) / len(vals))


def aggregate(results: list[DatasetResult],
              targets: tuple[float, ...] = LOYALTY_TARGETS,
              segment_target: float = 0.90) -> dict[str, list[list[str]]]:
    """Report tables over evaluated datasets.

    auc_by_group: mean AUC per algorithm, overall and grouped by class count,
    stationarity, seasonality, and entropy bin. complexity_at_loyalty: mean
    complexity at each loyalty target per algorithm. segments_by_dataset:
    per-dataset characteristics plus mean segments at the lowest alpha_c
    reaching the segment_target loyalty. Groups with no datasets show an
    explicit empty marker.
    """
    if not results:
        raise ValueError("no results to aggregate")
    algs = [a.value for a in AlgorithmId]

    def groups(r: DatasetResult) -> list[str]:
        g = ["overall", "binary" if r.n_classes == 2 else "multiclass"]
        if r.characteristics is not None:
            c = r.characteristics
            g.append(c.stationarity)
            g.append("seasonal" if c.seasonal else "non_seasonal")
            g.append(f"entropy_{c.entropy_bin}")
        return g

    group_order = ["overall", "binary", "multiclass", "stationary",
                   "partially_stationary", "non_stationary", "seasonal",
                   "non_seasonal", "entropy_low", "entropy_medium", "entropy_high"]
    by_group = [["group", "datasets"] + [f"auc_{a.lower()}" for a in algs]]
    for g in group_order:
        members = [r for r in results if g in groups(r)]
        row = [g, str(len(members))]
        for a in algs:
            vals = [auc(r.curves[a]) for r in members if a in r.curves]
            row.append(_mean_or_empty(vals))
        by_group.append(row)

    at_loyalty = [["algorithm"] + [f"complexity_at_{t:.2f}" for t in targets]]
    for a in algs:
        row = [a.lower()]
        for t in targets:
            vals = [complexity_at_loyalty(r.curves[a], t)
                    for r in results if a in r.curves]
            row.append(_mean_or_empty(vals))
        at_loyalty.append(row)

    per_dataset = [["dataset", "classes", "stationarity", "seasonal", "entropy_bin"]
              + [f"segments_{a.lower()}" for a in algs]]
    for r in results:
        c = r.characteristics
        row = [r.name, str(r.n_classes),
               c.stationarity if c else EMPTY_MARK,
               str(c.seasonal).lower() if c else EMPTY_MARK,
               c.entropy_bin if c else EMPTY_MARK]
        for a in algs:
            if a in r.curves:
                pts = [p for p in r.curves[a].points if p.loyalty >= segment_target]
                best = min(pts, key=lambda p: p.alpha_c)
                row.append(_fmt(best.mean_segments))
            else:
                row.append(EMPTY_MARK)
        per_dataset.append(row)

    return {"auc_by_group": by_group, "complexity_at_loyalty": at_loyalty,
            "segments_by_dataset": per_dataset}


def write_summary_csv(results: list[DatasetResult], path,
                      targets: tuple[float, ...] = LOYALTY_TARGETS) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# {AUC_NOTE}\n")
        cols = ["dataset", "algorithm", "classifier", "seed", "auc"]
        cols += [f"complexity_at_{t:.2f}" for t in targets]
        fh.write(",".join(cols) + "\n")
        for r in results:
            for a in [x.value for x in AlgorithmId]:
                if a not in r.curves:
                    continue
                curve = r.curves[a]
                row = [r.name, a.lower(), curve.classifier, str(curve.seed),
                       _fmt(auc(curve))]
                row += [_fmt(complexity_at_loyalty(curve, t)) for t in targets]
                fh.write(",".join(row) + "\n")


def write_table_csv(rows: list[list[str]], path, note: str | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if note:
            fh.write(f"# {note}\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def write_reports(results: list[DatasetResult], out_dir) -> None:
    tables = aggregate(results)
    write_summary_csv(results, os.path.join(out_dir, "summary.csv"))
    write_table_csv(tables["auc_by_group"],
                    os.path.join(out_dir, "auc_by_group.csv"), AUC_NOTE)
    write_table_csv(tables["complexity_at_loyalty"],
                    os.path.join(out_dir, "complexity_at_loyalty.csv"))
    write_table_csv(tables["segments_by_dataset"],
                    os.path.join(out_dir, "segments_by_dataset.csv"))
