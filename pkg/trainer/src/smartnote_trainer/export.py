"""Export fitted sklearn gradient-boosted ensembles to the portable JSON
interchange format.

Interchange semantics: a sample goes left when x[feature] <= threshold
(sklearn's own rule), leaves carry one value per class, margins are the
base score plus the per-class sums over all trees. Rather than trusting
any library documentation for the intercept, the base score is derived
empirically: margins from ``decision_function`` on a probe set minus the
summed tree contributions must be a constant vector, and the export
refuses to proceed if it is not.
"""

from __future__ import annotations

import json

import numpy as np

FORMAT_VERSION = 1

BASE_SCORE_TOLERANCE = 1e-9


def _tree_nodes(tree, scale: float, n_classes: int, class_index: int) -> list[dict]:
    """Flatten one sklearn regression tree; leaf values land in the slot
    for ``class_index`` scaled by the learning rate."""
    t = tree.tree_
    nodes = []
    for i in range(t.node_count):
        if t.children_left[i] == -1:  # leaf
            leaf = [0.0] * n_classes
            leaf[class_index] = float(t.value[i][0][0]) * scale
            nodes.append({"leaf": leaf})
        else:
            nodes.append({
                "feature": int(t.feature[i]),
                "threshold": float(t.threshold[i]),
                "left": int(t.children_left[i]),
                "right": int(t.children_right[i]),
            })
    return nodes


def _evaluate_nodes(nodes, x) -> list[float]:
    i = 0
    while "leaf" not in nodes[i]:
        node = nodes[i]
        i = node["left"] if x[node["feature"]] <= node["threshold"] \
            else node["right"]
    return nodes[i]["leaf"]


def _tree_sums(trees, x, n_classes: int) -> np.ndarray:
    total = np.zeros(n_classes)
    for nodes in trees:
        total += np.array(_evaluate_nodes(nodes["nodes"], x))
    return total


def export_model(booster, task: str, layout, *, class_labels=(),
                 embedder_id: str, embedding_dim: int, languages,
                 log1p_counts: bool = True, probe_rows,
                 trainer_version: str = "smartnote-trainer/0.1.0") -> dict:
    """Fitted sklearn GradientBoosting* -> interchange dict.

    ``probe_rows`` must hold at least two real feature rows; they anchor
    the empirical base-score derivation and the round-trip margin check.
    """
    probe = np.asarray(probe_rows, dtype=float)
    if probe.ndim != 2 or len(probe) < 2:
        raise ValueError("need at least two probe rows")

    margins = booster.decision_function(probe)
    if margins.ndim == 1:
        # binary model: sklearn emits the positive-class margin only
        if task == "category":
            margins = np.column_stack([np.zeros(len(probe)), margins])
        else:
            margins = margins.reshape(-1, 1)
    n_classes = margins.shape[1]

    lr = booster.learning_rate
    trees = []
    estimators = np.asarray(booster.estimators_)
    for stage in estimators:
        stage = np.atleast_1d(stage)
        if len(stage) == 1:
            # single tree per stage: binary classifier or regressor
            index = 1 if (task == "category" and n_classes == 2) else 0
            trees.append({"nodes": _tree_nodes(stage[0], lr, n_classes, index)})
        else:
            for k, est in enumerate(stage):
                trees.append({"nodes": _tree_nodes(est, lr, n_classes, k)})

    sums = np.stack([_tree_sums(trees, x, n_classes) for x in probe])
    residual = margins - sums
    spread = residual.max(axis=0) - residual.min(axis=0)
    if float(spread.max()) > BASE_SCORE_TOLERANCE:
        raise AssertionError(
            f"tree sums do not differ from margins by a constant "
            f"(spread {spread.max():.3e}); export semantics are wrong"
        )
    base_score = residual.mean(axis=0)

    return {
        "format_version": FORMAT_VERSION,
        "task": task,
        "feature_layout": list(layout),
        "class_labels": list(class_labels),
        "base_score": [float(b) for b in base_score],
        "metadata": {
            "embedder_id": embedder_id,
            "embedding_dim": int(embedding_dim),
            "languages": list(languages),
            "log1p_counts": bool(log1p_counts),
            "trainer_version": trainer_version,
        },
        "trees": trees,
    }


def save_model(model_dict: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_dict, fh, indent=1, sort_keys=True)
        fh.write("\n")


# --- local inference over the interchange dict -------------------------
# Used for self-consistency checks and fixture export; deliberately a
# second, independent implementation of the format.


def predict_margins(model_dict: dict, x) -> np.ndarray:
    n_classes = max(len(model_dict["class_labels"]), 1)
    margins = np.array(model_dict["base_score"], dtype=float)
    assert len(margins) == n_classes
    return margins + _tree_sums(model_dict["trees"], x, n_classes)


def predict_proba(model_dict: dict, x) -> np.ndarray:
    margins = predict_margins(model_dict, x)
    shifted = np.exp(margins - margins.max())
    return shifted / shifted.sum()


def predict_significance(model_dict: dict, x) -> float:
    margin = predict_margins(model_dict, x)[0]
    return float(1.0 / (1.0 + np.exp(-margin)))
