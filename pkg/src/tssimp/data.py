"""Time-series data model, UCR-format ingestion, normalization and sampling.

A time series is an ordered vector of real observations; the time axis is
implicit (x_i = i, 0-based). Datasets are pairs of predefined TRAIN/TEST
splits in the UCR tab-separated layout: one instance per line, the class
label first, then the observations.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataError

DATA_DIR_ENV = "TSS_DATA_DIR"


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Immutable fixed-length series of finite real values (n >= 2)."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 1 or arr.shape[0] < 2:
            raise DataError(f"time series needs >= 2 values, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise DataError("time series contains non-finite values")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other) -> bool:
        return isinstance(other, TimeSeries) and np.array_equal(self.values, other.values)


@dataclass(frozen=True)
class LabeledInstance:
    """A series with its class label.

    `label` is the contiguous 0..k-1 class id; `raw_label` keeps the value
    found in the source file for display; `instance_id` is the 0-based line
    position within the split the instance came from.
    """

    series: TimeSeries
    label: int
    raw_label: float = 0.0
    instance_id: int = -1


@dataclass(frozen=True)
class Dataset:
    name: str
    train: tuple[LabeledInstance, ...]
    test: tuple[LabeledInstance, ...]
    series_length: int = field(default=0)
    classes: tuple[int, ...] = field(default=())

    def __post_init__(self):
        train = tuple(self.train)
        test = tuple(self.test)
        if not train and not test:
            raise DataError(f"dataset {self.name!r} has no instances")
        lengths = {inst.series.n for inst in train + test}
        if len(lengths) != 1:
            raise DataError(f"dataset {self.name!r} has ragged series lengths {sorted(lengths)}")
        labels = tuple(sorted({inst.label for inst in train + test}))
        object.__setattr__(self, "train", train)
        object.__setattr__(self, "test", test)
        object.__setattr__(self, "series_length", lengths.pop())
        object.__setattr__(self, "classes", labels)

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    def split(self, name: str) -> tuple[LabeledInstance, ...]:
        if name == "train":
            return self.train
        if name == "test":
            return self.test
        raise DataError(f"unknown split {name!r} (expected 'train' or 'test')")

    def normalized(self) -> "Dataset":
        """Per-instance z-normalization of every split."""
        def norm(instances):
            return tuple(
                LabeledInstance(znormalize(i.series), i.label, i.raw_label, i.instance_id)
                for i in instances
            )
        return Dataset(self.name, norm(self.train), norm(self.test))


@dataclass(frozen=True)
class SamplePool:
    """Stratified evaluation sample drawn from one split of a dataset."""

    instances: tuple[LabeledInstance, ...]
    source_split: str
    seed: int
    dataset_name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "instances", tuple(self.instances))

    def __len__(self) -> int:
        return len(self.instances)


def znormalize(ts: TimeSeries) -> TimeSeries:
    """Zero-mean unit-std (population) rescaling; all-zeros if variance is 0."""
    v = ts.values
    mean = v.mean()
    std = v.std()
    if std == 0.0:
        return TimeSeries(np.zeros_like(v))
    return TimeSeries((v - mean) / std)


def parse_ucr_tsv(path) -> list[LabeledInstance]:
    """Parse one UCR split file: `label<TAB>v1<TAB>...<TAB>vn` per line.

    Tabs or runs of whitespace both separate tokens. Raw labels are remapped
    to contiguous ids 0..k-1 in ascending raw order (the raw value is kept
    on the instance). All series must share one length.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such file: {path}")
    rows: list[tuple[float, np.ndarray]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            tokens = line.split()
            if len(tokens) < 3:
                raise DataError(f"{path}:{lineno}: expected a label and >= 2 values")
            try:
                numbers = [float(tok) for tok in tokens]
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: non-numeric token ({exc})") from None
            rows.append((numbers[0], np.array(numbers[1:], dtype=np.float64)))
    if not rows:
        raise DataError(f"{path}: empty file")
    lengths = {len(vals) for _, vals in rows}
    if len(lengths) != 1:
        raise DataError(f"{path}: ragged series lengths {sorted(lengths)}")
    label_map = {raw: i for i, raw in enumerate(sorted({raw for raw, _ in rows}))}
    return [
        LabeledInstance(TimeSeries(vals), label_map[raw], raw_label=raw, instance_id=i)
        for i, (raw, vals) in enumerate(rows)
    ]


def write_ucr_tsv(instances, path) -> None:
    """Serialize instances in the same layout `parse_ucr_tsv` reads.

    Values are written with repr precision so parse -> write -> parse
    round-trips exactly.
    """
    with open(path, "w", encoding="utf-8") as fh:
        for inst in instances:
            raw = inst.raw_label
            label_tok = str(int(raw)) if float(raw).is_integer() else repr(float(raw))
            vals = "\t".join(repr(float(v)) for v in inst.series.values)
            fh.write(f"{label_tok}\t{vals}\n")


def resolve_data_dir(explicit=None) -> Path:
    """CLI flag wins, then the TSS_DATA_DIR environment variable."""
    if explicit:
        path = Path(explicit)
    else:
        env = os.environ.get(DATA_DIR_ENV)
        if not env:
            raise DataError(
                f"no data directory given (use --data-dir or ${DATA_DIR_ENV})")
        path = Path(env)
    if not path.is_dir():
        raise DataError(f"data directory not found: {path}")
    return path


def discover_datasets(data_dir) -> list[str]:
    """Names with both <Name>_TRAIN.tsv and <Name>_TEST.tsv present."""
    data_dir = Path(data_dir)
    if not data_dir.is_dir():
        raise DataError(f"data directory not found: {data_dir}")
    names = []
    for f in sorted(data_dir.glob("*_TRAIN.tsv")):
        name = f.name[: -len("_TRAIN.tsv")]
        if (data_dir / f"{name}_TEST.tsv").is_file():
            names.append(name)
    return names


def load_dataset(data_dir, name: str, normalize: bool = True) -> Dataset:
    """Load a TRAIN/TEST pair, remapping labels jointly across both splits.

    Per-file remaps can disagree when one split misses a class, so the final
    ids are recomputed from the union of raw labels.
    """
    data_dir = Path(data_dir)
    train = parse_ucr_tsv(data_dir / f"{name}_TRAIN.tsv")
    test = parse_ucr_tsv(data_dir / f"{name}_TEST.tsv")
    raws = sorted({inst.raw_label for inst in train + test})
    joint = {raw: i for i, raw in enumerate(raws)}
    def remap(instances):
        return tuple(
            LabeledInstance(i.series, joint[i.raw_label], i.raw_label, i.instance_id)
            for i in instances
        )
    ds = Dataset(name, remap(train), remap(test))
    return ds.normalized() if normalize else ds


def stratified_sample(split, size: int, seed: int,
                      dataset_name: str = "", source_split: str = "test") -> SamplePool:
    """Seeded stratified sample preserving class proportions.

    Per-class quotas are the floored proportional shares; leftover slots go
    to the largest classes first (ties by class id). If the split has at
    most `size` instances the whole split is returned.
    """
    split = list(split)
    if size < 1:
        raise ValueError("size must be >= 1")
    if not split:
        raise ValueError("split is empty")
    if len(split) <= size:
        return SamplePool(tuple(split), source_split, seed, dataset_name)

    by_class: dict[int, list[int]] = {}
    for pos, inst in enumerate(split):
        by_class.setdefault(inst.label, []).append(pos)
    total = len(split)
    quotas = {c: (size * len(ps)) // total for c, ps in by_class.items()}
    leftover = size - sum(quotas.values())
    for c in sorted(by_class, key=lambda c: (-len(by_class[c]), c)):
        if leftover == 0:
            break
        quotas[c] += 1
        leftover -= 1

    rng = np.random.default_rng(seed)
    chosen: list[int] = []
    for c in sorted(by_class):
        positions = by_class[c]
        take = quotas[c]
        picked = rng.choice(len(positions), size=take, replace=False)
        chosen.extend(positions[int(i)] for i in sorted(picked))
    chosen.sort()
    return SamplePool(tuple(split[i] for i in chosen), source_split, seed, dataset_name)
