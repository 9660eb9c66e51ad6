"""Classifier contract for loyalty evaluation.

A classifier maps fixed-length series to class ids and must be deterministic
after fitting. Built-ins: multinomial logistic regression over raw time
points and distance-weighted kNN (DTW or euclidean). An external-prediction
table stands in for models trained elsewhere: it answers lookups keyed by
(dataset, instance id, simplification variant) and never computes anything.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .data import LabeledInstance, TimeSeries
from .errors import ConfigError, DataError

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False


@dataclass(frozen=True)
class PredictionKey:
    """Fingerprint of one series variant for external-prediction lookup."""

    dataset: str
    instance_id: int
    variant: str  # "original" or "alg=<id>;ac=<alpha_c>"


def variant_descriptor(algorithm: str | None = None, alpha_c: float | None = None) -> str:
    if algorithm is None:
        return "original"
    return f"alg={algorithm.lower()};ac={alpha_c:.2f}"


class Classifier:
    """Deterministic mapping from series to class ids.

    predict takes an optional PredictionKey; built-ins ignore it, the
    external table requires it.
    """

    name = "base"
    needs_keys = False

    def fit(self, train: list[LabeledInstance]) -> "Classifier":
        return self

    def predict(self, ts: TimeSeries, key: PredictionKey | None = None) -> int:
        raise NotImplementedError


# ---------------------------------------------------------------------------
# Logistic regression

def _softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def logreg_loss_grad(W: np.ndarray, b: np.ndarray, X: np.ndarray, Y: np.ndarray,
                     l2: float):
    """Mean cross-entropy + l2/2*||W||^2 (bias unpenalized), with gradients."""
    m = X.shape[0]
    P = _softmax(X @ W + b)
    eps = 1e-15
    ce = -np.mean(np.log(np.clip(P[np.arange(m), Y], eps, None)))
    loss = ce + 0.5 * l2 * float(np.sum(W * W))
    G = P.copy()
    G[np.arange(m), Y] -= 1.0
    gW = X.T @ G / m + l2 * W
    gb = G.mean(axis=0)
    return loss, gW, gb


class LogRegClassifier(Classifier):
    name = "logreg"

    def __init__(self, l2: float = 1e-4, epochs: int = 500, lr: float = 0.1,
                 seed: int = 0):
        if l2 < 0:
            raise ValueError("l2 must be >= 0")
        if lr <= 0:
            raise ValueError("lr must be > 0")
        self.l2 = l2
        self.epochs = epochs
        self.lr = lr
        self.seed = seed  # reserved; full-batch training is seed-independent
        self.W: np.ndarray | None = None
        self.b: np.ndarray | None = None
        self.loss_history: list[float] = []

    def fit(self, train: list[LabeledInstance]) -> "LogRegClassifier":
        if not train:
            raise ConfigError("empty training set")
        X = np.stack([inst.series.values for inst in train])
        Y = np.array([inst.label for inst in train], dtype=np.int64)
        k = int(Y.max()) + 1
        if len(np.unique(Y)) < 2:
            raise ConfigError("training set has a single class")
        W = np.zeros((X.shape[1], k))
        b = np.zeros(k)
        self.loss_history = []
        for _ in range(self.epochs):
            loss, gW, gb = logreg_loss_grad(W, b, X, Y, self.l2)
            self.loss_history.append(loss)
            W -= self.lr * gW
            b -= self.lr * gb
        self.W, self.b = W, b
        return self

    def predict(self, ts: TimeSeries, key: PredictionKey | None = None) -> int:
        if self.W is None:
            raise ConfigError("classifier not fitted")
        z = ts.values @ self.W + self.b
        return int(np.argmax(z))  # first max = lowest class id on ties


def fit_logreg(train: list[LabeledInstance], l2: float = 1e-4, epochs: int = 500,
               lr: float = 0.1, seed: int = 0) -> LogRegClassifier:
    return LogRegClassifier(l2=l2, epochs=epochs, lr=lr, seed=seed).fit(train)


# ---------------------------------------------------------------------------
# DTW

def _dtw_python(a, b) -> float:
    n, m = len(a), len(b)
    inf = math.inf
    prev = [inf] * (m + 1)
    prev[0] = 0.0
    cur = [inf] * (m + 1)
    for i in range(1, n + 1):
        ai = a[i - 1]
        cur[0] = inf
        left_up = prev[0]
        for j in range(1, m + 1):
            d = ai - b[j - 1]
            best = prev[j]
            if cur[j - 1] < best:
                best = cur[j - 1]
            if left_up < best:
                best = left_up
            left_up = prev[j]
            cur[j] = d * d + best
        prev, cur = cur, prev
    return prev[m]


if HAVE_NUMBA:
    @njit(cache=True)
    def _dtw_numba(a, b):  # pragma: no cover - compiled
        n, m = a.shape[0], b.shape[0]
        prev = np.full(m + 1, np.inf)
        prev[0] = 0.0
        cur = np.full(m + 1, np.inf)
        for i in range(1, n + 1):
            ai = a[i - 1]
            cur[0] = np.inf
            left_up = prev[0]
            for j in range(1, m + 1):
                d = ai - b[j - 1]
                best = prev[j]
                if cur[j - 1] < best:
                    best = cur[j - 1]
                if left_up < best:
                    best = left_up
                left_up = prev[j]
                cur[j] = d * d + best
            for j in range(m + 1):
                t = prev[j]
                prev[j] = cur[j]
                cur[j] = t
        return prev[m]


def dtw_distance(a: TimeSeries, b: TimeSeries) -> float:
    """DTW with squared local cost and moves {down, right, diagonal};
    returns the square root of the accumulated minimal cost."""
    if HAVE_NUMBA:
        acc = float(_dtw_numba(a.values, b.values))
    else:
        acc = _dtw_python(a.values.tolist(), b.values.tolist())
    return math.sqrt(acc)


def euclidean_distance(a: TimeSeries, b: TimeSeries) -> float:
    return float(np.linalg.norm(a.values - b.values))


METRICS = {"dtw": dtw_distance, "euclidean": euclidean_distance}


# ---------------------------------------------------------------------------
# kNN

class KnnClassifier(Classifier):
    def __init__(self, k: int = 5, metric: str = "dtw"):
        if k < 1:
            raise ValueError("k must be >= 1")
        if metric not in METRICS:
            raise ValueError(f"unknown metric {metric!r} (expected dtw|euclidean)")
        self.k = k
        self.metric = metric
        self.name = f"knn{k}-{metric}"
        self._train: list[LabeledInstance] = []

    def fit(self, train: list[LabeledInstance]) -> "KnnClassifier":
        if not train:
            raise ConfigError("empty training set")
        self._train = list(train)
        return self

    def predict(self, ts: TimeSeries, key: PredictionKey | None = None) -> int:
        if not self._train:
            raise ConfigError("classifier not fitted")
        dist = METRICS[self.metric]
        ds = [(dist(ts, inst.series), i) for i, inst in enumerate(self._train)]
        zeros = [i for d, i in ds if d == 0.0]
        if zeros:
            # exact matches dominate: majority vote among them, ties to the
            # lowest class id
            counts: dict[int, int] = {}
            for i in zeros:
                lab = self._train[i].label
                counts[lab] = counts.get(lab, 0) + 1
            best = max(counts.values())
            return min(lab for lab, c in counts.items() if c == best)
        ds.sort()
        k = min(self.k, len(ds))
        weights: dict[int, float] = {}
        for d, i in ds[:k]:
            lab = self._train[i].label
            weights[lab] = weights.get(lab, 0.0) + 1.0 / (d + 1e-9)
        best = max(weights.values())
        return min(lab for lab, w in weights.items() if w == best)


def fit_knn(train: list[LabeledInstance], k: int = 5, metric: str = "dtw") -> KnnClassifier:
    return KnnClassifier(k=k, metric=metric).fit(train)


# ---------------------------------------------------------------------------
# External predictions

EXTERNAL_HEADER = ["dataset", "instance_id", "variant", "label"]


class ExternalTableClassifier(Classifier):
    name = "external"
    needs_keys = True

    def __init__(self, table: dict[tuple[str, int, str], int], source: str = ""):
        self._table = table
        self.source = source

    def __len__(self) -> int:
        return len(self._table)

    def predict(self, ts: TimeSeries, key: PredictionKey | None = None) -> int:
        if key is None:
            raise ConfigError("external predictions require a fingerprint key")
        k = (key.dataset, key.instance_id, key.variant)
        try:
            return self._table[k]
        except KeyError:
            raise DataError(
                f"no external prediction for dataset={key.dataset!r} "
                f"instance_id={key.instance_id} variant={key.variant!r}") from None


def load_external_predictions(path) -> ExternalTableClassifier:
    """Load the prediction CSV: header dataset,instance_id,variant,label."""
    table: dict[tuple[str, int, str], int] = {}
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read predictions {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != EXTERNAL_HEADER:
            raise DataError(f"{path}: expected header {','.join(EXTERNAL_HEADER)}")
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 4:
                raise DataError(f"{path}:{lineno}: expected 4 fields, got {len(row)}")
            dataset, sid, variant, slabel = (f.strip() for f in row)
            try:
                iid = int(sid)
                label = int(slabel)
            except ValueError:
                raise DataError(f"{path}:{lineno}: non-integer id or label") from None
            k = (dataset, iid, variant)
            if k in table:
                raise DataError(f"{path}:{lineno}: duplicate key {k}")
            table[k] = label
    return ExternalTableClassifier(table, source=str(path))
