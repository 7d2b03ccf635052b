"""Corpus scanning, stratified splitting, min-max scaling and CSV persistence."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from texpyr.errors import (
    ClassTooSmall,
    DimensionMismatch,
    EmptyCorpus,
    EmptySet,
    SchemaMismatch,
    UnreadableDirectory,
)

IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg"}


@dataclass(frozen=True)
class LabeledCorpus:
    items: tuple[tuple[str, str], ...]  # (path or source id, label)

    @property
    def classes(self) -> list[str]:
        return sorted({label for _, label in self.items})

    @property
    def labels(self) -> list[str]:
        return [label for _, label in self.items]

    def __len__(self) -> int:
        return len(self.items)


@dataclass(frozen=True)
class SplitCorpus:
    train: tuple[tuple[str, str], ...]
    test: tuple[tuple[str, str], ...]
    seed: int
    ratio: float


def _visible(p: Path) -> bool:
    return not p.name.startswith(".")


def scan_corpus(root) -> LabeledCorpus:
    """Collect ``root/<class>/<image>`` files in lexicographic order."""
    root = Path(root)
    try:
        class_dirs = sorted(p for p in root.iterdir() if p.is_dir() and _visible(p))
    except OSError as exc:
        raise UnreadableDirectory(f"cannot list {root}: {exc}") from exc
    items = []
    for cdir in class_dirs:
        try:
            files = sorted(
                f for f in cdir.iterdir()
                if f.is_file() and _visible(f) and f.suffix.lower() in IMAGE_SUFFIXES
            )
        except OSError as exc:
            raise UnreadableDirectory(f"cannot list {cdir}: {exc}") from exc
        items.extend((str(f), cdir.name) for f in files)
    if not items:
        raise EmptyCorpus(f"no images found under {root}")
    return LabeledCorpus(items=tuple(items))


def source_id(path, root) -> str:
    """Stable identifier: the path relative to the corpus root, with forward slashes."""
    return Path(path).relative_to(root).as_posix()


def _check_ratio(ratio: float) -> None:
    if not 0.0 < ratio < 1.0:
        raise ValueError(f"ratio must lie strictly between 0 and 1, got {ratio}")


def _by_class(labels: Sequence[str]) -> dict[str, list[int]]:
    groups: dict[str, list[int]] = {}
    for k, label in enumerate(labels):
        groups.setdefault(label, []).append(k)
    return dict(sorted(groups.items()))


def split_indices(labels: Sequence[str], ratio: float = 0.7, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Stratified shuffle split; returns sorted train and test index arrays.

    Each class contributes ``round(ratio * n)`` training items, kept within
    ``[1, n - 1]`` so both sides are non-empty.
    """
    _check_ratio(ratio)
    rng = np.random.default_rng(seed)
    train, test = [], []
    for label, idx in _by_class(labels).items():
        n = len(idx)
        if n < 2:
            raise ClassTooSmall(f"class {label!r} has {n} item(s); need at least 2 to split")
        n_train = min(max(int(math.floor(ratio * n + 0.5)), 1), n - 1)
        order = rng.permutation(n)
        train.extend(idx[k] for k in order[:n_train])
        test.extend(idx[k] for k in order[n_train:])
    return np.array(sorted(train), dtype=np.int64), np.array(sorted(test), dtype=np.int64)


def split(corpus: LabeledCorpus, ratio: float = 0.7, seed: int = 0) -> SplitCorpus:
    tr, te = split_indices(corpus.labels, ratio, seed)
    return SplitCorpus(
        train=tuple(corpus.items[k] for k in tr),
        test=tuple(corpus.items[k] for k in te),
        seed=seed,
        ratio=ratio,
    )


def stratified_folds(labels: Sequence[str], k: int, seed: int = 0) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Yield ``(train_idx, test_idx)`` for k stratified folds."""
    if k < 2:
        raise ValueError("k must be at least 2")
    rng = np.random.default_rng(seed)
    fold_of = np.empty(len(labels), dtype=np.int64)
    for label, idx in _by_class(labels).items():
        if len(idx) < k:
            raise ClassTooSmall(f"class {label!r} has {len(idx)} items, fewer than k={k}")
        order = rng.permutation(len(idx))
        for pos, j in enumerate(order):
            fold_of[idx[j]] = pos % k
    for f in range(k):
        yield np.flatnonzero(fold_of != f), np.flatnonzero(fold_of == f)


@dataclass(frozen=True)
class MinMaxStats:
    mins: np.ndarray
    maxs: np.ndarray
    names: tuple[str, ...] = ()


def fit_minmax(train_vectors, names: Sequence[str] = ()) -> MinMaxStats:
    x = np.asarray(train_vectors, dtype=np.float64)
    if x.ndim == 1:
        x = x[None, :]
    if x.shape[0] == 0:
        raise EmptySet("min-max statistics need at least one training vector")
    return MinMaxStats(mins=x.min(axis=0).copy(), maxs=x.max(axis=0).copy(), names=tuple(names))


def apply_minmax(v, stats: MinMaxStats) -> np.ndarray:
    """Scale by the training range. Constant columns map to 0; nothing is clipped."""
    v = np.asarray(v, dtype=np.float64)
    if v.shape[-1] != stats.mins.shape[0]:
        raise DimensionMismatch(f"vector has {v.shape[-1]} dims, stats have {stats.mins.shape[0]}")
    span = stats.maxs - stats.mins
    flat = span == 0
    out = (v - stats.mins) / np.where(flat, 1.0, span)
    return np.where(flat, 0.0, out)


# --- CSV persistence -------------------------------------------------------


@dataclass
class FeatureTable:
    source_ids: list[str]
    labels: list[str]
    columns: list[str]
    values: np.ndarray  # (n_rows, n_columns)

    def subset(self, rows) -> "FeatureTable":
        rows = np.asarray(rows, dtype=np.int64)
        return FeatureTable(
            source_ids=[self.source_ids[k] for k in rows],
            labels=[self.labels[k] for k in rows],
            columns=list(self.columns),
            values=self.values[rows],
        )

    def select_columns(self, sl: slice) -> "FeatureTable":
        return FeatureTable(self.source_ids, self.labels, self.columns[sl], self.values[:, sl])


def write_features_csv(path, table: FeatureTable) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["source_id", "label", *table.columns])
        for sid, label, row in zip(table.source_ids, table.labels, table.values):
            w.writerow([sid, label, *(repr(float(x)) for x in row)])


def read_features_csv(path, expected_columns: Sequence[str] | None = None) -> FeatureTable:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaMismatch(f"{path} is empty") from None
        if header[:2] != ["source_id", "label"]:
            raise SchemaMismatch("feature CSV must start with source_id,label")
        columns = header[2:]
        if expected_columns is not None and list(expected_columns) != columns:
            raise SchemaMismatch("feature columns do not match the expected schema")
        sids, labels, rows = [], [], []
        for lineno, rec in enumerate(reader, start=2):
            if len(rec) != len(header):
                raise SchemaMismatch(f"line {lineno}: {len(rec)} fields, header has {len(header)}")
            sids.append(rec[0])
            labels.append(rec[1])
            try:
                rows.append([float(x) for x in rec[2:]])
            except ValueError as exc:
                raise SchemaMismatch(f"line {lineno}: {exc}") from exc
    values = np.array(rows, dtype=np.float64).reshape(len(rows), len(columns))
    return FeatureTable(sids, labels, columns, values)


def write_stats_csv(path, stats: MinMaxStats) -> None:
    names = stats.names or tuple(f"d{k}" for k in range(stats.mins.size))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["dim_name", "min", "max"])
        for name, lo, hi in zip(names, stats.mins, stats.maxs):
            w.writerow([name, repr(float(lo)), repr(float(hi))])


def read_stats_csv(path) -> MinMaxStats:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["dim_name", "min", "max"]:
        raise SchemaMismatch("stats CSV must have header dim_name,min,max")
    body = rows[1:]
    return MinMaxStats(
        mins=np.array([float(r[1]) for r in body]),
        maxs=np.array([float(r[2]) for r in body]),
        names=tuple(r[0] for r in body),
    )
