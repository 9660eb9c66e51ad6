"""Piecewise-linear simplification algorithms over a shared dispatch surface.

All four algorithms take a series of n points (x_i = i), keep a subset S of
the original points (|S| >= 2) and implicitly replace the rest by the
straight lines through the kept points. A simplification on |S| kept points
has |S|-1 segments.

Algorithms:

* RDP    - recursive split at the point farthest (perpendicular) from the
           current chord, while the distance exceeds a tolerance.
* VW     - iterative removal of the interior point whose triangle with its
           surviving neighbours has minimum effective area.
* BU     - greedy bottom-up merging of adjacent segs by minimum absolute
           chord-fit error; kept points are every seg's start and end.
* OS     - exact dynamic program minimizing squared reconstruction error
           plus alpha per segment, with the first/last segments extended to
           the series ends.

The normalized parameter alpha_c in [0, 1] maps onto each algorithm's raw
threshold so that alpha_c = 0 forces a single segment and alpha_c = 1 the
identity simplification.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .data import TimeSeries

# Exponent of the alpha_c -> raw threshold easing curve. Cubic keeps most of
# the [0,1] range in the low-segment regime where simplifications are legible.
ALPHA_GAMMA = 3.0


class AlgorithmId(str, Enum):
    RDP = "RDP"
    VW = "VW"
    BU = "BU"
    OS = "OS"

    @classmethod
    def parse(cls, text: str) -> "AlgorithmId":
        try:
            return cls[text.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown algorithm {text!r} (expected rdp|vw|bu|os)") from None


@dataclass(frozen=True)
class ComplexityParam:
    alpha_c: float

    def __post_init__(self):
        if not 0.0 <= self.alpha_c <= 1.0:
            raise ValueError(f"alpha_c must be in [0, 1], got {self.alpha_c}")


@dataclass(frozen=True, eq=False)
class Simplification:
    """Kept-index subset of one series plus the values at those indices.

    RDP/VW/BU always keep both endpoints; OS may not, in which case
    reconstruction extends the first/last segment lines to the ends.
    """

    original_length: int
    kept_indices: tuple[int, ...]
    kept_values: np.ndarray
    algorithm: AlgorithmId | None = None
    alpha_c: float | None = None

    def __post_init__(self):
        idx = tuple(int(i) for i in self.kept_indices)
        vals = np.asarray(self.kept_values, dtype=np.float64).copy()
        vals.flags.writeable = False
        if len(idx) < 2:
            raise ValueError("a simplification keeps at least 2 points")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError("kept indices must be strictly increasing")
        if idx[0] < 0 or idx[-1] >= self.original_length:
            raise ValueError("kept indices out of range")
        if len(idx) != vals.shape[0]:
            raise ValueError("kept_indices and kept_values length mismatch")
        object.__setattr__(self, "kept_indices", idx)
        object.__setattr__(self, "kept_values", vals)

    @property
    def segment_count(self) -> int:
        return len(self.kept_indices) - 1

    def to_dict(self) -> dict:
        return {
            "n": self.original_length,
            "kept_indices": list(self.kept_indices),
            "kept_values": [float(v) for v in self.kept_values],
            "algorithm": self.algorithm.value if self.algorithm else None,
            "alpha_c": self.alpha_c,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Simplification":
        alg = AlgorithmId(d["algorithm"]) if d.get("algorithm") else None
        return cls(int(d["n"]), tuple(d["kept_indices"]), np.array(d["kept_values"]),
                   alg, d.get("alpha_c"))


def _subset(ts: TimeSeries, indices, alg=None, alpha_c=None) -> Simplification:
    idx = tuple(int(i) for i in indices)
    return Simplification(ts.n, idx, ts.values[list(idx)], alg, alpha_c)


def reconstruct(s: Simplification) -> TimeSeries:
    """Full-length series implied by a kept subset.

    Kept indices carry their exact values; gaps are linear interpolation;
    indices before the first (after the last) kept index lie on the first
    (last) segment's line extended.
    """
    n = s.original_length
    idx = np.array(s.kept_indices, dtype=np.int64)
    vals = np.asarray(s.kept_values)
    out = np.empty(n, dtype=np.float64)
    for (a, ya), (b, yb) in zip(zip(idx[:-1], vals[:-1]), zip(idx[1:], vals[1:])):
        slope = (yb - ya) / (b - a)
        xs = np.arange(a, b)
        out[a:b] = ya + slope * (xs - a)
    # extensions beyond the kept range reuse the first/last chord
    first_a, first_b = idx[0], idx[1]
    slope = (vals[1] - vals[0]) / (first_b - first_a)
    xs = np.arange(0, first_a)
    out[: first_a] = vals[0] + slope * (xs - first_a)
    last_a, last_b = idx[-2], idx[-1]
    slope = (vals[-1] - vals[-2]) / (last_b - last_a)
    xs = np.arange(last_b, n)
    out[last_b:] = vals[-1] + slope * (xs - last_b)
    out[idx] = vals  # kept points exact
    return TimeSeries(out)


# ---------------------------------------------------------------------------
# RDP

def _chord_distances(v: np.ndarray, a: int, b: int) -> np.ndarray:
    """Perpendicular distances of points a+1..b-1 to the chord (a,v[a])-(b,v[b])."""
    xs = np.arange(a + 1, b, dtype=np.float64)
    dy = v[b] - v[a]
    dx = float(b - a)
    num = np.abs(dy * xs - dx * v[a + 1: b] + dx * v[a] - dy * a)
    return num / np.hypot(dx, dy)


def rdp(ts: TimeSeries, epsilon: float) -> Simplification:
    """Ramer-Douglas-Peucker with strict "distance > epsilon" splitting.

    Ties on the farthest point go to the lowest index.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    v = ts.values
    n = ts.n
    keep = [0, n - 1]
    stack = [(0, n - 1)]
    while stack:
        a, b = stack.pop()
        if b - a < 2:
            continue
        d = _chord_distances(v, a, b)
        j = int(np.argmax(d))
        if d[j] > epsilon:
            split = a + 1 + j
            keep.append(split)
            stack.append((a, split))
            stack.append((split, b))
    keep.sort()
    return _subset(ts, keep)


def _rdp_thresholds(v: np.ndarray) -> np.ndarray:
    """Per-index keep threshold: index i survives rdp at epsilon iff theta[i] > epsilon.

    theta of a split point is the minimum chord distance along its path from
    the root chord; endpoints get +inf. Equivalent to the recursion for every
    epsilon at once.
    """
    n = len(v)
    theta = np.zeros(n)
    theta[0] = theta[-1] = np.inf
    stack = [(0, n - 1, np.inf)]
    while stack:
        a, b, cap = stack.pop()
        if b - a < 2:
            continue
        d = _chord_distances(v, a, b)
        j = int(np.argmax(d))
        split = a + 1 + j
        t = min(cap, float(d[j]))
        theta[split] = t
        stack.append((a, split, t))
        stack.append((split, b, t))
    return theta


# ---------------------------------------------------------------------------
# Visvalingam-Whyatt

def _triangle_area(v, a, b, c) -> float:
    # shoelace with x = index
    return abs(a * (v[b] - v[c]) + b * (v[c] - v[a]) + c * (v[a] - v[b])) / 2.0


def _vw_effective_areas(v: np.ndarray) -> np.ndarray:
    """One run to two points, recording each removal's effective area.

    The effective area of a removed point is max(recomputed triangle area,
    effective area of the previous removal), which makes the removal order a
    single global sequence: a point survives threshold t iff its effective
    area exceeds t. Endpoints are never removed (+inf).
    """
    n = len(v)
    eff = np.full(n, np.inf)
    if n <= 2:
        return eff
    y = v.tolist()  # python-float state: scalar math in the loop is ~4x faster
    prv = list(range(-1, n - 1))
    nxt = list(range(1, n + 1))
    version = [0] * n
    removed = [False] * n
    mid = np.arange(1, n - 1, dtype=np.float64)
    init = np.abs((mid - 1.0) * (v[1:-1] - v[2:]) + mid * (v[2:] - v[:-2])
                  + (mid + 1.0) * (v[:-2] - v[1:-1])) * 0.5
    heap = [(float(a), i, 0) for i, a in enumerate(init, start=1)]
    heapq.heapify(heap)
    last = 0.0
    alive = n
    while alive > 2 and heap:
        area, i, ver = heapq.heappop(heap)
        if removed[i] or ver != version[i]:
            continue
        if area > last:
            last = area
        eff[i] = last
        removed[i] = True
        alive -= 1
        p, q = prv[i], nxt[i]
        nxt[p] = q
        prv[q] = p
        for j in (p, q):
            if 0 < j < n - 1 and not removed[j]:
                version[j] += 1
                a, c = prv[j], nxt[j]
                area_j = abs(a * (y[j] - y[c]) + j * (y[c] - y[a]) + c * (y[a] - y[j])) * 0.5
                heapq.heappush(heap, (area_j, j, version[j]))
    return eff


def vw(ts: TimeSeries, area_threshold: float) -> Simplification:
    """Visvalingam-Whyatt: remove interior points while the minimum effective
    triangle area does not exceed the threshold. Ties go to the lowest index."""
    if area_threshold < 0:
        raise ValueError("area_threshold must be >= 0")
    eff = _vw_effective_areas(ts.values)
    keep = np.flatnonzero(eff > area_threshold)
    return _subset(ts, keep)


# ---------------------------------------------------------------------------
# Bottom-Up

def _bu_merge_profile(v: np.ndarray):
    """Run the greedy merge to a single seg, recording the merge sequence.

    Returns (errors, killed): errors[k] is the k-th merge's error, killed[k]
    the cut (boundary between indices c and c+1) that merge removed. The
    thresholded algorithm is the prefix of this sequence up to the first
    error exceeding the threshold, because the greedy selection never
    depends on the threshold.
    """
    n = len(v)
    errors: list[float] = []
    killed: list[int] = []
    if n < 2:
        return errors, killed
    y = v.tolist()

    def chord_err(s: int, e: int) -> float:
        # sum of |v - line| over the interior of the chord v[s] -> v[e]
        m = e - s
        if m < 2:
            return 0.0
        slope = (y[e] - y[s]) / m
        if m <= 64:  # short ranges: plain floats beat array-call overhead
            ys = y[s]
            acc = 0.0
            for t in range(1, m):
                d = y[s + t] - (ys + slope * t)
                acc += d if d >= 0.0 else -d
            return acc
        xs = np.arange(1, m, dtype=np.float64)
        return float(np.abs(v[s + 1: e] - (v[s] + slope * xs)).sum())

    ncuts = n - 1
    start = list(range(ncuts))     # start index of the seg left of each cut
    end = list(range(1, n))        # end index of the seg right of each cut
    prv = list(range(-1, ncuts - 1))
    nxt = list(range(1, ncuts + 1))
    dead = [False] * ncuts
    version = [0] * ncuts
    heap = [(0.0, c, 0) for c in range(ncuts)]  # trivial-pair merges all cost 0
    while heap:
        err, c, ver = heapq.heappop(heap)
        if dead[c] or ver != version[c]:
            continue
        errors.append(err)
        killed.append(c)
        dead[c] = True
        s, e = start[c], end[c]
        p, q = prv[c], nxt[c]
        if p >= 0:
            nxt[p] = q
            end[p] = e
            version[p] += 1
            heapq.heappush(heap, (chord_err(start[p], e), p, version[p]))
        if q < ncuts:
            prv[q] = p
            start[q] = s
            version[q] += 1
            heapq.heappush(heap, (chord_err(s, end[q]), q, version[q]))
    return errors, killed


def _bu_kept_from_profile(n: int, errors, killed, threshold: float) -> np.ndarray:
    merges = len(errors)
    for k, err in enumerate(errors):
        if err > threshold:
            merges = k
            break
    keep = np.zeros(n, dtype=bool)
    keep[0] = keep[-1] = True
    for c in killed[merges:]:  # surviving cuts bound a seg on each side
        keep[c] = True
        keep[c + 1] = True
    return np.flatnonzero(keep)


def bottom_up(ts: TimeSeries, error_threshold: float) -> Simplification:
    """Bottom-up merging of adjacent segs by minimum absolute chord error.

    A merged seg runs from the first seg's start point to the second's end
    point (both original points); its error is the summed absolute deviation
    of the chord from the original over the covered range. Merging stops
    when the cheapest merge would exceed the threshold; ties pick the
    leftmost pair. Kept indices are every surviving seg's start and end, so
    s gap-separated multi-point segs yield 2s-1 segments.
    """
    if error_threshold < 0:
        raise ValueError("error_threshold must be >= 0")
    errors, killed = _bu_merge_profile(ts.values)
    keep = _bu_kept_from_profile(ts.n, errors, killed, error_threshold)
    return _subset(ts, keep)


# ---------------------------------------------------------------------------
# Optimal simplification (exact DP)

def _os_tables(v: np.ndarray):
    """Chord cost tables for every index pair (j, k), j < k.

    err[j,k]  - squared error of the chord over its interior j+1..k-1
    head[j,k] - squared error of the chord's line extended over 0..j-1
    tail[j,k] - squared error of the chord's line extended over k+1..n-1

    All three come from prefix sums, O(n^2) total.
    """
    n = len(v)
    t = np.arange(n, dtype=np.float64)
    c1 = np.concatenate(([0.0], np.cumsum(np.ones(n))))
    cy = np.concatenate(([0.0], np.cumsum(v)))
    cy2 = np.concatenate(([0.0], np.cumsum(v * v)))
    cty = np.concatenate(([0.0], np.cumsum(t * v)))
    ct = np.concatenate(([0.0], np.cumsum(t)))
    ct2 = np.concatenate(([0.0], np.cumsum(t * t)))

    def seg_cost(b, s, lo, hi):
        # sum over t in [lo, hi) of (v[t] - (b + s*t))^2, vectorized over pairs
        m = c1[hi] - c1[lo]
        A = cy2[hi] - cy2[lo]
        B = cy[hi] - cy[lo]
        C = cty[hi] - cty[lo]
        D = ct[hi] - ct[lo]
        E = ct2[hi] - ct2[lo]
        cost = A - 2.0 * b * B - 2.0 * s * C + b * b * m + 2.0 * b * s * D + s * s * E
        return np.maximum(cost, 0.0)

    err = np.zeros((n, n))
    head = np.zeros((n, n))
    tail = np.zeros((n, n))
    for j in range(n - 1):
        ks = np.arange(j + 1, n)
        s = (v[ks] - v[j]) / (ks - j)
        b = v[j] - s * j
        err[j, j + 1:] = seg_cost(b, s, np.full(n - 1 - j, j + 1), ks)
        head[j, j + 1:] = seg_cost(b, s, np.zeros(n - 1 - j, dtype=np.int64), np.full(n - 1 - j, j))
        tail[j, j + 1:] = seg_cost(b, s, ks + 1, np.full(n - 1 - j, n))
    return err, head, tail


def _os_solve(v: np.ndarray, alpha: float, tables=None):
    """Exact minimizer of sum((v - recon)^2) + alpha * segments.

    cost[j,k] is the best cost of a kept sequence ending with the pair
    (j, k), including the head extension and alpha per segment but not the
    tail. Ties prefer fewer segments, then the earliest predecessor, so the
    output is reproducible. Returns (kept indices, objective).
    """
    n = len(v)
    err, head, tail = tables if tables is not None else _os_tables(v)
    NEG = -2
    cost = np.full((n, n), np.inf)
    segs = np.zeros((n, n), dtype=np.int64)
    prev = np.full((n, n), NEG, dtype=np.int64)
    g_cost = np.full(n, np.inf)
    g_segs = np.zeros(n, dtype=np.int64)
    g_arg = np.full(n, NEG, dtype=np.int64)
    for j in range(n - 1):
        sl = slice(j + 1, n)
        h = head[j, sl]
        start_head = h <= g_cost[j]  # tie -> head (1 segment so far beats >= 2)
        cost[j, sl] = err[j, sl] + alpha + np.where(start_head, h, g_cost[j])
        segs[j, sl] = np.where(start_head, 1, g_segs[j] + 1)
        prev[j, sl] = np.where(start_head, -1, g_arg[j])
        row_c = cost[j, sl]
        row_s = segs[j, sl]
        better = (row_c < g_cost[sl]) | ((row_c == g_cost[sl]) & (row_s < g_segs[sl]))
        g_cost[sl] = np.where(better, row_c, g_cost[sl])
        g_segs[sl] = np.where(better, row_s, g_segs[sl])
        g_arg[sl] = np.where(better, j, g_arg[sl])

    total = cost + tail
    best = total.min()
    mask = total == best
    min_segs = segs[mask].min()
    mask &= segs == min_segs
    flat = int(np.flatnonzero(mask.ravel())[0])  # row-major => lexicographic (j, k)
    j, k = divmod(flat, n)
    kept = [k, j]
    while prev[j, k] != -1:
        j, k = int(prev[j, k]), j
        kept.append(j)
    kept.reverse()
    return kept, float(best)


def _os_best_single(tables, n: int):
    """Lowest-objective single chord (j, k), ties lexicographic."""
    err, head, tail = tables
    one = err + head + tail
    one[np.tril_indices(n)] = np.inf
    flat = int(np.argmin(one))  # row-major argmin = lexicographic tie-break
    j, k = divmod(flat, n)
    return [j, k], float(one[j, k])


def optimal_simplify(ts: TimeSeries, alpha: float) -> Simplification:
    """Optimal piecewise-linear simplification for a segment penalty alpha.

    alpha = 0 returns the identity kept set (an optimal solution; zero
    penalty makes keeping everything free).
    """
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    if alpha == 0.0:
        return _subset(ts, range(ts.n))
    kept, _ = _os_solve(ts.values, alpha)
    return _subset(ts, kept)


def simplification_objective(ts: TimeSeries, s: Simplification, alpha: float) -> float:
    """Squared reconstruction error plus alpha per segment, for any kept set."""
    recon = reconstruct(s).values
    return float(np.sum((ts.values - recon) ** 2)) + alpha * s.segment_count


# ---------------------------------------------------------------------------
# Normalized parameter and dispatch

def _saturation_value(alg: AlgorithmId, ts: TimeSeries) -> float:
    """Smallest raw threshold that forces a 1-segment output."""
    v = ts.values
    if alg is AlgorithmId.RDP:
        if ts.n == 2:
            return 0.0
        return float(_chord_distances(v, 0, ts.n - 1).max())
    if alg is AlgorithmId.VW:
        eff = _vw_effective_areas(v)
        finite = eff[np.isfinite(eff)]
        return float(finite.max()) if finite.size else 0.0
    if alg is AlgorithmId.BU:
        errors, _ = _bu_merge_profile(v)
        return float(max(errors)) if errors else 0.0
    if alg is AlgorithmId.OS:
        err, head, tail = _os_tables(v)
        one_seg = err + head + tail
        iu = np.triu_indices(ts.n, k=1)
        return float(one_seg[iu].min())
    raise ValueError(f"unknown algorithm {alg}")


def normalize_param(alg: AlgorithmId, ts: TimeSeries, alpha_c: float) -> float:
    """Map alpha_c in [0,1] onto the algorithm's raw threshold.

    raw = M * (1 - alpha_c)^3 where M is the instance's saturation value, so
    alpha_c = 0 gives raw = M (one segment) and alpha_c = 1 gives raw = 0
    (maximum segments).
    """
    if not 0.0 <= alpha_c <= 1.0:
        raise ValueError(f"alpha_c must be in [0, 1], got {alpha_c}")
    return _saturation_value(alg, ts) * (1.0 - alpha_c) ** ALPHA_GAMMA


def simplify(alg: AlgorithmId, ts: TimeSeries, param: ComplexityParam) -> Simplification:
    """Run one algorithm at a normalized complexity parameter.

    alpha_c = 0 always yields a 1-segment output and alpha_c = 1 an exact
    reconstruction; for OS those endpoints are resolved directly so that
    float rounding in the cost tables can never flip a tie away from them.
    """
    if alg is AlgorithmId.OS:
        if param.alpha_c == 1.0:
            out = _subset(ts, range(ts.n))
        else:
            tables = _os_tables(ts.values)
            kept, best1 = _os_best_single(tables, ts.n)
            if param.alpha_c > 0.0:
                kept, _ = _os_solve(ts.values, best1 * (1.0 - param.alpha_c) ** ALPHA_GAMMA,
                                    tables)
            out = _subset(ts, kept)
    else:
        raw = normalize_param(alg, ts, param.alpha_c)
        if alg is AlgorithmId.RDP:
            out = rdp(ts, raw)
        elif alg is AlgorithmId.VW:
            out = vw(ts, raw)
        elif alg is AlgorithmId.BU:
            out = bottom_up(ts, raw)
        else:
            raise ValueError(f"unknown algorithm {alg}")
    return Simplification(out.original_length, out.kept_indices, out.kept_values,
                          alg, param.alpha_c)


def simplify_grid(alg: AlgorithmId, ts: TimeSeries, alphas) -> list[Simplification]:
    """simplify() over many alpha_c values, sharing per-series precomputation.

    Bit-identical to calling simplify() per value; the per-point profiles
    (RDP keep thresholds, VW effective areas, BU merge sequence, OS cost
    tables) only need computing once per series.
    """
    alphas = [float(a) for a in alphas]
    v = ts.values
    n = ts.n
    out = []
    if alg is AlgorithmId.RDP:
        M = _saturation_value(alg, ts)
        theta = _rdp_thresholds(v)
        for a in alphas:
            keep = np.flatnonzero(theta > M * (1.0 - a) ** ALPHA_GAMMA)
            out.append(_subset(ts, keep, alg, a))
    elif alg is AlgorithmId.VW:
        eff = _vw_effective_areas(v)
        finite = eff[np.isfinite(eff)]
        M = float(finite.max()) if finite.size else 0.0
        for a in alphas:
            keep = np.flatnonzero(eff > M * (1.0 - a) ** ALPHA_GAMMA)
            out.append(_subset(ts, keep, alg, a))
    elif alg is AlgorithmId.BU:
        errors, killed = _bu_merge_profile(v)
        M = float(max(errors)) if errors else 0.0
        for a in alphas:
            keep = _bu_kept_from_profile(n, errors, killed, M * (1.0 - a) ** ALPHA_GAMMA)
            out.append(_subset(ts, keep, alg, a))
    elif alg is AlgorithmId.OS:
        tables = _os_tables(v)
        single, M = _os_best_single(tables, n)
        for a in alphas:
            if a == 1.0:
                kept = range(n)
            elif a == 0.0:
                kept = single
            else:
                kept, _ = _os_solve(v, M * (1.0 - a) ** ALPHA_GAMMA, tables)
            out.append(_subset(ts, kept, alg, a))
    else:
        raise ValueError(f"unknown algorithm {alg}")
    return out
