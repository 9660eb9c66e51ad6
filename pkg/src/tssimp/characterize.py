"""Per-instance and per-dataset characterization.

Three per-instance statistics drive the dataset labels:

* stationarity via an augmented Dickey-Fuller regression with a constant,
  Schwert-rule lag order, and an embedded 5% critical-value polynomial;
* seasonality via the biased FFT autocorrelation, declared when any lag in
  [2, n/2] exceeds 0.4;
* approximate entropy (m=2, r = 0.2*std, self-matches included).

Dataset labels: stationary when >= 80% of instances are, non_stationary
when <= 50%; entropy bins split at 0.23 and 0.27; seasonal when a strict
majority of instances is.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import Dataset, TimeSeries
from .errors import ConfigError

ADF_ALPHA = 0.05  # decision level; the embedded critical value is its 5% row
SEASONAL_ACF_CUTOFF = 0.4
STATIONARY_MIN_FRACTION = 0.80
NONSTATIONARY_MAX_FRACTION = 0.50
ENTROPY_LOW_MAX = 0.23
ENTROPY_MEDIUM_MAX = 0.27


def mackinnon_crit_5pct(n_eff: int) -> float:
    """Finite-sample 5% critical value for the constant-only ADF t statistic."""
    x = float(n_eff)
    return -2.8621 - 2.738 / x - 8.36 / x**2 - 16.786 / x**3


def schwert_lag(n: int) -> int:
    return min(int(12 * (n / 100.0) ** 0.25), (n - 1) // 3)


def adf_test(ts: TimeSeries) -> tuple[float, bool]:
    """(t statistic of the lagged level, stationary at 5%).

    Fits dy_t = c + rho*y_{t-1} + sum_i phi_i*dy_{t-i} + e by least squares
    with p = schwert_lag(n) lagged differences; stationary when the t ratio
    of rho falls below the critical value. Degenerate regressions (constant
    or perfectly predictable series) count as stationary with a -inf
    sentinel statistic.
    """
    y = ts.values
    n = ts.n
    p = schwert_lag(n)
    n_eff = n - 1 - p
    if n_eff < 10:
        raise ConfigError(f"series too short for ADF: {n} points, lag {p}")
    dy = np.diff(y)
    X = np.empty((n_eff, p + 2))
    X[:, 0] = 1.0
    X[:, 1] = y[p: n - 1]
    for i in range(1, p + 1):
        X[:, 1 + i] = dy[p - i: n - 1 - i]
    b = dy[p:]
    coef, _, rank, _ = np.linalg.lstsq(X, b, rcond=None)
    cols = p + 2
    if rank < cols:
        return -math.inf, True
    resid = b - X @ coef
    rss = float(resid @ resid)
    dof = n_eff - cols
    if dof <= 0 or rss <= 0.0:
        return -math.inf, True
    s2 = rss / dof
    xtx_inv = np.linalg.inv(X.T @ X)
    var_rho = s2 * xtx_inv[1, 1]
    if var_rho <= 0.0:
        return -math.inf, True
    stat = float(coef[1] / math.sqrt(var_rho))
    return stat, stat < mackinnon_crit_5pct(n_eff)


def acf(ts: TimeSeries) -> np.ndarray:
    """Biased sample autocorrelation for lags 0..n-1 via FFT.

    Zero-padded so the circular convolution never wraps; normalized by the
    lag-0 term. Zero-variance input yields [1, 0, 0, ...].
    """
    v = ts.values
    n = ts.n
    x = v - v.mean()
    denom = float(x @ x)
    out = np.zeros(n)
    out[0] = 1.0
    if denom == 0.0:
        return out
    nfft = 1
    while nfft < 2 * n:
        nfft *= 2
    f = np.fft.rfft(x, nfft)
    r = np.fft.irfft(f * np.conj(f), nfft)[:n]
    return r / r[0]


def is_seasonal(ts: TimeSeries) -> bool:
    """True when some autocorrelation at lag 2..n/2 exceeds 0.4."""
    half = ts.n // 2
    if half < 2:
        return False
    a = acf(ts)
    return bool(np.max(a[2: half + 1]) > SEASONAL_ACF_CUTOFF)


def approx_entropy(ts: TimeSeries, m: int = 2, r_factor: float = 0.2) -> float:
    """Approximate entropy Phi_m - Phi_{m+1} with Chebyshev template matching.

    Self-matches are included, so the raw difference can round slightly
    negative only through float error; the result is clamped below at 0.
    """
    v = ts.values
    n = ts.n
    if n < m + 2:
        raise ConfigError(f"series too short for ApEn: {n} points, m={m}")
    r = r_factor * float(v.std())
    if r == 0.0:
        return 0.0
    d0 = np.abs(v[:, None] - v[None, :])

    def phi(mm: int) -> float:
        cnt = n - mm + 1
        c = d0[:cnt, :cnt].copy()
        for o in range(1, mm):
            np.maximum(c, d0[o: o + cnt, o: o + cnt], out=c)
        frac = (c <= r).sum(axis=1) / cnt
        return float(np.mean(np.log(frac)))

    return max(phi(m) - phi(m + 1), 0.0)


@dataclass(frozen=True)
class DatasetCharacteristics:
    name: str
    stationary_fraction: float
    stationarity: str  # stationary | non_stationary | partially_stationary
    seasonal_fraction: float
    seasonal: bool
    mean_entropy: float
    entropy_bin: str  # low | medium | high

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "stationary_fraction": self.stationary_fraction,
            "stationarity": self.stationarity,
            "seasonal_fraction": self.seasonal_fraction,
            "seasonal": self.seasonal,
            "mean_entropy": self.mean_entropy,
            "entropy_bin": self.entropy_bin,
        }


def stationarity_label(fraction: float) -> str:
    if fraction >= STATIONARY_MIN_FRACTION:
        return "stationary"
    if fraction <= NONSTATIONARY_MAX_FRACTION:
        return "non_stationary"
    return "partially_stationary"


def entropy_bin(mean_entropy: float) -> str:
    if mean_entropy <= ENTROPY_LOW_MAX:
        return "low"
    if mean_entropy <= ENTROPY_MEDIUM_MAX:
        return "medium"
    return "high"


def characterize_dataset(d: Dataset) -> DatasetCharacteristics:
    """Aggregate the three per-instance tests over train + test."""
    instances = list(d.train) + list(d.test)
    if not instances:
        raise ConfigError(f"dataset {d.name} has no instances")
    stat_hits = 0
    seas_hits = 0
    entropies = []
    for inst in instances:
        _, stationary = adf_test(inst.series)
        stat_hits += stationary
        seas_hits += is_seasonal(inst.series)
        entropies.append(approx_entropy(inst.series))
    total = len(instances)
    stat_frac = stat_hits / total
    seas_frac = seas_hits / total
    mean_ent = float(np.mean(entropies))
    return DatasetCharacteristics(
        name=d.name,
        stationary_fraction=stat_frac,
        stationarity=stationarity_label(stat_frac),
        seasonal_fraction=seas_frac,
        seasonal=seas_frac > 0.5,
        mean_entropy=mean_ent,
        entropy_bin=entropy_bin(mean_ent),
    )
