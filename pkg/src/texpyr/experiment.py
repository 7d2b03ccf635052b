"""Holdout / k-fold train-evaluate runs over a feature table."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from texpyr.classify import EvalReport, evaluate, knn_fit, lda_fit
from texpyr.dataset import FeatureTable, apply_minmax, fit_minmax, split_indices, stratified_folds
from texpyr.pipeline import FAMILIES, feature_schema

SUBSETS = ("tio",) + FAMILIES
SUBSET_TITLES = {"tio": "TiO", "bit": "BiT", "glcm": "GLCM", "haralick": "Haralick", "info": "Info"}
CLASSIFIERS = ("lda", "knn")


def subset_slice(subset: str, pyramid_levels: int = 3) -> slice:
    if subset == "tio":
        return slice(0, feature_schema(pyramid_levels).total_dims)
    if subset not in FAMILIES:
        raise ValueError(f"unknown descriptor subset {subset!r}")
    return feature_schema(pyramid_levels).family_slice(subset)


def _fit(classifier: str, x, y, shrinkage: float, k: int):
    if classifier == "lda":
        return lda_fit(x, y, shrinkage=shrinkage)
    if classifier == "knn":
        return knn_fit(x, y, k=k)
    raise ValueError(f"unknown classifier {classifier!r}")


def train_eval_indices(
    table: FeatureTable,
    train_idx,
    test_idx,
    classifier: str = "lda",
    shrinkage: float = 0.01,
    k: int = 1,
    split_info: dict | None = None,
) -> EvalReport:
    """Fit min-max on the training rows only, scale both sides, fit, evaluate."""
    y = np.asarray(table.labels, dtype=object)
    x_train = table.values[train_idx]
    stats = fit_minmax(x_train)
    model = _fit(classifier, apply_minmax(x_train, stats), y[train_idx], shrinkage, k)
    return evaluate(model, apply_minmax(table.values[test_idx], stats), y[test_idx], split=split_info)


def holdout(
    table: FeatureTable,
    ratio: float = 0.7,
    seed: int = 0,
    classifier: str = "lda",
    shrinkage: float = 0.01,
    k: int = 1,
    subset: str = "tio",
    pyramid_levels: int = 3,
) -> EvalReport:
    sub = table.select_columns(subset_slice(subset, pyramid_levels))
    tr, te = split_indices(sub.labels, ratio, seed)
    info = {"kind": "holdout", "ratio": ratio, "seed": seed, "n_train": int(tr.size), "n_test": int(te.size)}
    return train_eval_indices(sub, tr, te, classifier, shrinkage, k, info)


def kfold(
    table: FeatureTable,
    folds: int,
    seed: int = 0,
    classifier: str = "lda",
    shrinkage: float = 0.01,
    k: int = 1,
    subset: str = "tio",
    pyramid_levels: int = 3,
) -> list[EvalReport]:
    sub = table.select_columns(subset_slice(subset, pyramid_levels))
    reports = []
    for f, (tr, te) in enumerate(stratified_folds(sub.labels, folds, seed)):
        info = {"kind": "kfold", "folds": folds, "fold": f, "seed": seed}
        reports.append(train_eval_indices(sub, tr, te, classifier, shrinkage, k, info))
    return reports


@dataclass
class AblationRow:
    subset: str
    classifier: str
    dims: int
    accuracies: list[float]

    @property
    def mean(self) -> float:
        return float(np.mean(self.accuracies))


def ablation(
    table: FeatureTable,
    classifiers=("lda",),
    seeds=(0,),
    ratio: float = 0.7,
    shrinkage: float = 0.01,
    k: int = 1,
    pyramid_levels: int = 3,
) -> list[AblationRow]:
    rows = []
    for subset in SUBSETS:
        sl = subset_slice(subset, pyramid_levels)
        for clf in classifiers:
            accs = [
                holdout(table, ratio, s, clf, shrinkage, k, subset, pyramid_levels).accuracy for s in seeds
            ]
            rows.append(AblationRow(subset, clf, sl.stop - sl.start, accs))
    return rows


def ablation_markdown(rows: list[AblationRow]) -> str:
    """Descriptor x classifier table of mean accuracy (%)."""
    classifiers = list(dict.fromkeys(r.classifier for r in rows))
    by_key = {(r.subset, r.classifier): r for r in rows}
    subsets = list(dict.fromkeys(r.subset for r in rows))
    head = "| Descriptors | Dims | " + " | ".join(c.upper() for c in classifiers) + " |"
    sep = "|---|---:|" + "---:|" * len(classifiers)
    lines = [head, sep]
    for s in subsets:
        dims = next(r.dims for r in rows if r.subset == s)
        cells = [f"{100 * by_key[(s, c)].mean:.2f}" for c in classifiers]
        lines.append(f"| {SUBSET_TITLES[s]} | {dims} | " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"
