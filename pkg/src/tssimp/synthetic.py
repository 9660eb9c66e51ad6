"""Seeded synthetic binary dataset for end-to-end checks.

Class 0 is a centered triangle pulse one quarter of the series wide; class
1 is a flat line with a narrow top-hat bump at the center. Both get i.i.d.
Gaussian noise, sigma = 0.1. The generator is deterministic in the seed and
can emit the standard TRAIN/TEST file pair so the whole pipeline (parsing,
normalization, sampling) runs on it unchanged.
"""

from __future__ import annotations

import os

import numpy as np

from .data import Dataset, LabeledInstance, TimeSeries, write_ucr_tsv

DEFAULT_NAME = "SyntheticShapes"


def _triangle(n: int) -> np.ndarray:
    base = np.zeros(n)
    half = n // 8  # full width n/4
    c = n // 2
    for i in range(c - half, c + half + 1):
        base[i] = 1.0 - abs(i - c) / half
    return base


def _bump(n: int) -> np.ndarray:
    base = np.zeros(n)
    c = n // 2
    base[np.abs(np.arange(n) - c) <= 2] = 1.0
    return base


def make_instances(count_per_class: int, seed: int, n: int = 128,
                   sigma: float = 0.1) -> list[LabeledInstance]:
    rng = np.random.default_rng(seed)
    shapes = (_triangle(n), _bump(n))
    out = []
    iid = 0
    for _ in range(count_per_class):
        for label, shape in enumerate(shapes):
            values = shape + sigma * rng.standard_normal(n)
            out.append(LabeledInstance(TimeSeries(values), label,
                                       raw_label=float(label), instance_id=iid))
            iid += 1
    return out


def make_dataset(seed: int = 42, n: int = 128, train_size: int = 60,
                 test_size: int = 100, sigma: float = 0.1,
                 name: str = DEFAULT_NAME) -> Dataset:
    if train_size % 2 or test_size % 2:
        raise ValueError("split sizes must be even (two balanced classes)")
    train = make_instances(train_size // 2, seed, n, sigma)
    test = make_instances(test_size // 2, seed + 1, n, sigma)
    return Dataset(name, train, test)


def write_ucr_pair(out_dir: str, seed: int = 42, n: int = 128,
                   train_size: int = 60, test_size: int = 100,
                   sigma: float = 0.1, name: str = DEFAULT_NAME) -> tuple[str, str]:
    """Write <name>_TRAIN.tsv / <name>_TEST.tsv and return the two paths."""
    d = make_dataset(seed, n, train_size, test_size, sigma, name)
    os.makedirs(out_dir, exist_ok=True)
    train_path = os.path.join(out_dir, f"{name}_TRAIN.tsv")
    test_path = os.path.join(out_dir, f"{name}_TEST.tsv")
    write_ucr_tsv(d.train, train_path)
    write_ucr_tsv(d.test, test_path)
    return train_path, test_path
