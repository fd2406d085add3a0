"""Model fitting: seeded splits, a small hyper-parameter grid with
early stopping on the validation set, a k-fold cross-check, and grouped
gain importance for the report.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from sklearn.ensemble import GradientBoostingClassifier
from sklearn.metrics import accuracy_score, precision_score, recall_score
from sklearn.model_selection import StratifiedKFold

from . import features
from .dataset import InsufficientData
from .export import export_model

SPLIT_RATIOS = (0.7, 0.2, 0.1)  # train / validation / test

DEFAULT_GRID = {
    "max_depth": (4, 6, 8),
    "n_estimators": (100, 200),
    "learning_rate": (0.1, 0.3),
}

CROSS_CHECK_FOLDS = 5


@dataclass
class TrainReport:
    task: str
    n_examples: int
    class_labels: list
    best_params: dict
    best_iteration: int
    val_accuracy: float
    test_accuracy: float
    test_precision: float
    test_recall: float
    majority_baseline: float
    fold_accuracies: list = field(default_factory=list)
    top_importances: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "task": self.task,
            "n_examples": self.n_examples,
            "class_labels": list(self.class_labels),
            "best_params": dict(self.best_params),
            "best_iteration": self.best_iteration,
            "val_accuracy": self.val_accuracy,
            "test_accuracy": self.test_accuracy,
            "test_precision": self.test_precision,
            "test_recall": self.test_recall,
            "majority_baseline": self.majority_baseline,
            "fold_accuracies": list(self.fold_accuracies),
            "top_importances": [list(t) for t in self.top_importances],
        }


def split_indices(n: int, seed: int, ratios=SPLIT_RATIOS):
    """Deterministic 3-way shuffle split over ``range(n)``."""
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    n_train = round(n * ratios[0])
    n_val = round(n * ratios[1])
    return (order[:n_train], order[n_train:n_train + n_val],
            order[n_train + n_val:])


def build_matrix(examples, layout, dim, log1p_counts=True):
    x = np.array(
        [features.vectorise(e, layout, dim, log1p_counts) for e in examples],
        dtype=float,
    )
    y = np.array([e["label"] for e in examples])
    return x, y


def _best_iteration(booster, x_val, y_val) -> tuple[int, float]:
    """Scan staged validation accuracy; returns (n_trees, accuracy)."""
    classes = booster.classes_
    best_n, best_acc = booster.n_estimators_, -1.0
    for n, margins in enumerate(booster.staged_decision_function(x_val), 1):
        if margins.ndim == 1 or margins.shape[1] == 1:
            pred = classes[(np.ravel(margins) > 0).astype(int)]
        else:
            pred = classes[np.argmax(margins, axis=1)]
        acc = accuracy_score(y_val, pred)
        if acc > best_acc + 1e-12:
            best_n, best_acc = n, acc
    return best_n, best_acc


def _trim(booster, n: int):
    """Drop boosting stages beyond ``n`` (early stopping by truncation)."""
    booster.estimators_ = booster.estimators_[:n]
    booster.n_estimators_ = n
    if hasattr(booster, "train_score_"):
        booster.train_score_ = booster.train_score_[:n]
    return booster


def grid_search(x, y, seed: int, grid=None):
    """Fit every grid cell on train, pick the best by validation accuracy
    after early stopping. Returns (booster, params, best_iter, val_acc,
    split index arrays)."""
    grid = grid or DEFAULT_GRID
    idx_train, idx_val, idx_test = split_indices(len(x), seed)
    x_tr, y_tr = x[idx_train], y[idx_train]
    x_val, y_val = x[idx_val], y[idx_val]

    best = None
    for depth in grid["max_depth"]:
        for n_estimators in grid["n_estimators"]:
            for lr in grid["learning_rate"]:
                booster = GradientBoostingClassifier(
                    max_depth=depth, n_estimators=n_estimators,
                    learning_rate=lr, random_state=seed,
                )
                booster.fit(x_tr, y_tr)
                n_best, acc = _best_iteration(booster, x_val, y_val)
                params = {"max_depth": depth, "n_estimators": n_estimators,
                          "learning_rate": lr}
                # ties break toward the earlier (simpler) grid cell
                if best is None or acc > best[3] + 1e-12:
                    best = (booster, params, n_best, acc)
    booster, params, n_best, val_acc = best
    _trim(booster, n_best)
    return booster, params, n_best, val_acc, (idx_train, idx_val, idx_test)


def cross_check(x, y, params: dict, seed: int,
                folds: int = CROSS_CHECK_FOLDS) -> list[float]:
    """Refit the chosen configuration across stratified folds as a sanity
    check that the grid winner is not a split artefact."""
    splitter = StratifiedKFold(n_splits=folds, shuffle=True,
                               random_state=seed)
    accuracies = []
    for fold_train, fold_test in splitter.split(x, y):
        booster = GradientBoostingClassifier(random_state=seed, **params)
        booster.fit(x[fold_train], y[fold_train])
        accuracies.append(
            float(accuracy_score(y[fold_test],
                                 booster.predict(x[fold_test]))))
    return accuracies


def grouped_importances(booster, layout, top: int = 10) -> list[tuple]:
    groups = features.importance_groups(layout)
    totals: dict[str, float] = {}
    for name, gain in zip(layout, booster.feature_importances_):
        group = groups[name]
        totals[group] = totals.get(group, 0.0) + float(gain)
    ranked = sorted(totals.items(), key=lambda kv: (-kv[1], kv[0]))
    return ranked[:top]


def train_task(examples, task: str, seed: int, *, dim=features.DEFAULT_DIM,
               grid=None, cross_check_folds=CROSS_CHECK_FOLDS):
    """Full run for one task: vectorise, search, evaluate, export.

    Returns (model_dict, TrainReport).
    """
    layout = features.build_feature_layout(dim)
    x, y = build_matrix(examples, layout, dim)
    classes = sorted({str(v) for v in y} if y.dtype.kind in "US"
                     else {int(v) for v in y})
    if len(classes) < 2:
        raise InsufficientData(2, f"{task} has a single class")

    booster, params, n_best, val_acc, (idx_train, idx_val, idx_test) = \
        grid_search(x, y, seed, grid)

    x_test, y_test = x[idx_test], y[idx_test]
    pred = booster.predict(x_test)
    test_acc = float(accuracy_score(y_test, pred))
    precision = float(precision_score(y_test, pred, average="weighted",
                                      zero_division=0))
    recall = float(recall_score(y_test, pred, average="weighted",
                                zero_division=0))
    values, counts = np.unique(y_test, return_counts=True)
    majority = float(counts.max() / counts.sum()) if len(values) else 0.0

    folds = []
    if cross_check_folds and cross_check_folds >= 2:
        folds = cross_check(x, y, params, seed, cross_check_folds)

    # significance models are scalar and carry no label list
    class_labels = [str(c) for c in booster.classes_] \
        if task == "category" else []
    probe_rows = x[idx_val[:16]] if len(idx_val) >= 2 else x[:16]
    model_dict = export_model(
        booster, task, layout, class_labels=class_labels,
        embedder_id=features.EMBEDDER_ID, embedding_dim=dim,
        languages=features.MODEL_LANGUAGES, probe_rows=probe_rows,
    )
    model_dict["metadata"]["hyperparameters"] = {
        **params, "best_iteration": n_best, "seed": seed,
    }

    report = TrainReport(
        task=task, n_examples=len(examples), class_labels=class_labels,
        best_params=params, best_iteration=n_best, val_accuracy=val_acc,
        test_accuracy=test_acc, test_precision=precision,
        test_recall=recall, majority_baseline=majority,
        fold_accuracies=folds,
        top_importances=grouped_importances(booster, layout),
    )
    return model_dict, report


def export_parity_fixtures(model_dict: dict, rows, path,
                           minimum: int = 50) -> int:
    """Write replay fixtures: feature vector plus the trainer-side
    prediction, for the consumer to verify against its own evaluator."""
    from .export import predict_proba, predict_significance

    rows = np.asarray(rows, dtype=float)
    task = model_dict["task"]
    written = 0
    with open(path, "w", encoding="utf-8") as fh:
        for x in rows:
            if task == "category":
                expected = [float(p) for p in predict_proba(model_dict, x)]
            else:
                expected = predict_significance(model_dict, x)
            fh.write(json.dumps({
                "task": task,
                "vector": [float(v) for v in x],
                "expected": expected,
            }) + "\n")
            written += 1
    if written < minimum:
        import warnings
        warnings.warn(
            f"only {written} parity fixtures written (wanted {minimum})",
            stacklevel=2)
    return written
