"""Class prototypes via k-medoids over DTW, and teaching-bundle export.

Prototypes are per-class medoids of the training split (always real
instances, never averages). A bundle is a file tree with a classification
prompt, the simplified prototypes of each class, and batches of simplified
test series plus an answer key holding the classifier's predictions on the
original (unsimplified) test series.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .classifiers import METRICS, Classifier, PredictionKey, variant_descriptor
from .data import Dataset, LabeledInstance, TimeSeries
from .errors import ConfigError
from .simplifiers import AlgorithmId, ComplexityParam, Simplification, simplify


def pairwise_distances(items: list[TimeSeries], metric: str = "dtw") -> np.ndarray:
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r} (expected dtw|euclidean)")
    dist = METRICS[metric]
    n = len(items)
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            D[i, j] = D[j, i] = dist(items[i], items[j])
    return D


def _swap_cost(D: np.ndarray, medoids: list[int]) -> float:
    return float(D[:, medoids].min(axis=1).sum())


def kmedoids(items: list[TimeSeries], k: int, metric: str = "dtw",
             seed: int = 0, D: np.ndarray | None = None,
             cost_trace: list | None = None) -> list[int]:
    """PAM-style k-medoids over a precomputed distance matrix.

    Greedy start (first medoid minimizes total distance, the rest are
    farthest-point picks), then repeated best-single-swap until no swap
    strictly lowers the total within-cluster distance. All ties resolve to
    the lowest index, so the result is deterministic; the seed parameter is
    accepted for interface stability but the procedure never draws from it.
    When `cost_trace` is a list, the total cost after init and after every
    accepted swap is appended to it.
    """
    n = len(items)
    if not 1 <= k <= n:
        raise ConfigError(f"k={k} out of range for {n} items")
    if D is None:
        D = pairwise_distances(items, metric)
    medoids = [int(np.argmin(D.sum(axis=1)))]
    while len(medoids) < k:
        nearest = D[:, medoids].min(axis=1)
        nearest[medoids] = -np.inf
        medoids.append(int(np.argmax(nearest)))
    cost = _swap_cost(D, medoids)
    if cost_trace is not None:
        cost_trace.append(cost)
    improved = True
    while improved:
        improved = False
        best_cost = cost
        best_swap = None
        chosen = set(medoids)
        for mi, m in enumerate(medoids):
            for h in range(n):
                if h in chosen:
                    continue
                trial = medoids.copy()
                trial[mi] = h
                c = _swap_cost(D, trial)
                if c < best_cost:
                    best_cost = c
                    best_swap = (mi, h)
        if best_swap is not None:
            medoids[best_swap[0]] = best_swap[1]
            cost = best_cost
            if cost_trace is not None:
                cost_trace.append(cost)
            improved = True
    return sorted(medoids)


@dataclass(frozen=True)
class PrototypeSet:
    """Per-class medoid prototypes drawn from a dataset's training split."""

    dataset: str
    k_per_class: int
    metric: str
    by_class: dict[int, list[LabeledInstance]]

    def all_prototypes(self) -> list[LabeledInstance]:
        out = []
        for label in sorted(self.by_class):
            out.extend(self.by_class[label])
        return out


def class_prototypes(d: Dataset, k_per_class: int = 4, metric: str = "dtw",
                     seed: int = 0) -> PrototypeSet:
    """k-medoids independently within each class's training instances."""
    by_class: dict[int, list[LabeledInstance]] = {}
    for label in d.classes:
        members = [inst for inst in d.train if inst.label == label]
        if len(members) < k_per_class:
            raise ConfigError(
                f"class {label} has {len(members)} training instances, "
                f"needs {k_per_class}")
        idx = kmedoids([m.series for m in members], k_per_class, metric, seed)
        by_class[label] = [members[i] for i in idx]
    return PrototypeSet(d.name, k_per_class, metric, by_class)


# ---------------------------------------------------------------------------
# Teaching-bundle export

PROMPT_TEMPLATE = """You are an expert at classifying time series by their shape.

Below you will find labelled example series for each of the two classes,
given as (x, y) vertex lists of simplified piecewise-linear curves. Study
the shape of each class before answering.

Class 0 examples: {class0_files}
Class 1 examples: {class1_files}

Your task, for every batch directory listed below, is to:
1. Read each unlabeled series in the batch (files are (x, y) vertex lists).
2. Compare its shape against the examples of both classes.
3. Decide which class it resembles more.
4. Answer with one line per file: "<file name>: <class 0 or 1>".
5. Give an answer for every file, even when unsure.

There are {batch_count} batches of {batch_size} unlabeled series each:
{batch_dirs}

Each batch must be answered on its own; every answer line names the file it
refers to.
"""


def _write_points_csv(path, s: Simplification) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("x,y\n")
        for i, v in zip(s.kept_indices, s.kept_values):
            fh.write(f"{int(i)},{float(v)!r}\n")


def export_prompt_bundle(d: Dataset, protos: PrototypeSet, clf: Classifier,
                         alg: AlgorithmId, alpha_c: float, test_count: int = 50,
                         batch: int = 10, out: str = ".") -> dict:
    """Write the prompt, simplified prototypes, simplified test batches, and
    the answer key (classifier predictions on the original test series).

    Returns a manifest of the written paths.
    """
    if len(d.classes) != 2:
        raise ConfigError(f"bundle export needs a binary dataset, "
                          f"{d.name} has {len(d.classes)} classes")
    if len(d.test) < test_count:
        raise ConfigError(f"test split has {len(d.test)} instances, "
                          f"needs {test_count}")
    if batch < 1 or test_count % batch != 0:
        raise ConfigError(f"test_count {test_count} not divisible by batch {batch}")
    param = ComplexityParam(alpha_c)
    os.makedirs(out, exist_ok=True)
    proto_files: dict[int, list[str]] = {0: [], 1: []}
    for label in sorted(protos.by_class):
        cdir = os.path.join(out, "prototypes", f"class_{label}")
        os.makedirs(cdir, exist_ok=True)
        for inst in protos.by_class[label]:
            s = simplify(alg, inst.series, param)
            rel = os.path.join("prototypes", f"class_{label}",
                               f"proto_{inst.instance_id:03d}.csv")
            _write_points_csv(os.path.join(out, rel), s)
            proto_files[label].append(rel)

    chosen = d.test[:test_count]
    batch_count = test_count // batch
    batch_dirs = []
    for b in range(batch_count):
        bdir = f"batch_{b + 1:02d}"
        os.makedirs(os.path.join(out, "batches", bdir), exist_ok=True)
        batch_dirs.append(os.path.join("batches", bdir))
        for inst in chosen[b * batch: (b + 1) * batch]:
            s = simplify(alg, inst.series, param)
            _write_points_csv(
                os.path.join(out, "batches", bdir, f"test_{inst.instance_id:03d}.csv"), s)

    key_path = os.path.join(out, "answer_key.csv")
    with open(key_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("instance_id,label\n")
        for inst in chosen:
            key = PredictionKey(d.name, inst.instance_id, variant_descriptor())
            fh.write(f"{inst.instance_id},{clf.predict(inst.series, key)}\n")

    prompt = PROMPT_TEMPLATE.format(
        class0_files=", ".join(proto_files[0]),
        class1_files=", ".join(proto_files[1]),
        batch_count=batch_count,
        batch_size=batch,
        batch_dirs="\n".join(batch_dirs),
    )
    with open(os.path.join(out, "prompt.txt"), "w", encoding="utf-8") as fh:
        fh.write(prompt)
    return {
        "prompt": "prompt.txt",
        "prototypes": proto_files,
        "batches": batch_dirs,
        "answer_key": "answer_key.csv",
    }
