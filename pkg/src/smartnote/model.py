"""Portable gradient-boosted tree ensembles.

The interchange format is versioned JSON so the trainer (a separate
package, possibly a separate language) and this inference path can be
checked against each other bit for bit. Inference is pure: the same
vector and model always produce the same prediction.

Node semantics: a sample goes left when ``x[feature] <= threshold``.
Leaves carry one value per class (a single value for the significance
task); class margins are the per-class sums over all trees plus the
stored base score. Category probabilities are a softmax over margins,
significance is a sigmoid.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import InvariantViolation, ParseError, TaskMismatch

FORMAT_VERSION = 1

CATEGORY_LABELS = [
    "feat", "fix", "docs", "style", "refactor", "perf",
    "test", "build", "ci", "chore", "revert",
]

FALLBACK_CATEGORY = "chore"
FALLBACK_SIGNIFICANCE = 0.05


@dataclass(frozen=True)
class TreeNode:
    # interior node: feature/threshold/left/right; leaf: values only
    feature: int = -1
    threshold: float = 0.0
    left: int = -1
    right: int = -1
    leaf: tuple[float, ...] | None = None

    @property
    def is_leaf(self) -> bool:
        return self.leaf is not None


@dataclass(frozen=True)
class Tree:
    nodes: tuple[TreeNode, ...]

    def evaluate(self, x) -> tuple[float, ...]:
        node = self.nodes[0]
        while not node.is_leaf:
            node = self.nodes[node.left if x[node.feature] <= node.threshold
                              else node.right]
        return node.leaf


@dataclass(frozen=True)
class TreeModel:
    task: str  # "category" | "significance"
    feature_layout: tuple[str, ...]
    class_labels: tuple[str, ...]
    trees: tuple[Tree, ...]
    embedder_id: str
    embedding_dim: int
    languages: tuple[str, ...]
    log1p_counts: bool = True
    base_score: tuple[float, ...] = (0.0,)
    trainer_version: str = ""

    @property
    def n_classes(self) -> int:
        return len(self.class_labels) if self.task == "category" else 1


@dataclass(frozen=True)
class CommitAnalysis:
    sha: str
    category: str
    category_confidence: float
    significance: float
    flagged: bool = False


def _node_from_dict(d) -> TreeNode:
    if "leaf" in d:
        leaf = d["leaf"]
        if not isinstance(leaf, list):
            leaf = [leaf]
        return TreeNode(leaf=tuple(float(v) for v in leaf))
    return TreeNode(
        feature=int(d["feature"]),
        threshold=float(d["threshold"]),
        left=int(d["left"]),
        right=int(d["right"]),
    )


def _validate_tree(tree: Tree, n_features: int, n_classes: int) -> None:
    n = len(tree.nodes)
    if n == 0:
        raise InvariantViolation("tree has no nodes")
    # every path from the root must reach a leaf without revisiting a node
    states = [0] * n  # 0 unvisited, 1 on stack, 2 done

    def visit(i: int) -> None:
        if i < 0 or i >= n:
            raise InvariantViolation(f"child index out of range: {i}")
        if states[i] == 1:
            raise InvariantViolation("cycle detected in tree")
        if states[i] == 2:
            return
        states[i] = 1
        node = tree.nodes[i]
        if node.is_leaf:
            if len(node.leaf) != n_classes:
                raise InvariantViolation(
                    f"leaf has {len(node.leaf)} values, expected {n_classes}"
                )
        else:
            if not 0 <= node.feature < n_features:
                raise InvariantViolation(
                    f"feature_index {node.feature} out of range "
                    f"(layout length {n_features})"
                )
            visit(node.left)
            visit(node.right)
        states[i] = 2

    visit(0)


def model_from_dict(data: dict) -> TreeModel:
    try:
        task = data["task"]
        layout = tuple(data["feature_layout"])
        labels = tuple(data.get("class_labels", []))
        meta = data.get("metadata", {})
        trees = tuple(
            Tree(nodes=tuple(_node_from_dict(nd) for nd in t["nodes"]))
            for t in data["trees"]
        )
        base = data.get("base_score", 0.0)
        if not isinstance(base, list):
            base = [base]
        model = TreeModel(
            task=task,
            feature_layout=layout,
            class_labels=labels,
            trees=trees,
            embedder_id=meta.get("embedder_id", data.get("embedder_id", "")),
            embedding_dim=int(meta.get("embedding_dim", data.get("embedding_dim", 0))),
            languages=tuple(meta.get("languages", data.get("languages", []))),
            log1p_counts=bool(meta.get("log1p_counts", data.get("log1p_counts", True))),
            base_score=tuple(float(b) for b in base),
            trainer_version=meta.get("trainer_version", data.get("trainer_version", "")),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed model file: {exc}") from exc

    if model.task not in ("category", "significance"):
        raise InvariantViolation(f"unknown task {model.task!r}")
    if model.task == "category" and not model.class_labels:
        raise InvariantViolation("category model must declare class_labels")
    if model.task == "significance" and model.class_labels:
        raise InvariantViolation("significance model must not declare class_labels")
    unknown = set(model.class_labels) - set(CATEGORY_LABELS)
    if unknown:
        raise InvariantViolation(f"labels outside the canonical set: {sorted(unknown)}")
    if len(model.base_score) != model.n_classes:
        raise InvariantViolation(
            f"base_score has {len(model.base_score)} values, "
            f"expected {model.n_classes}"
        )
    for tree in model.trees:
        _validate_tree(tree, len(model.feature_layout), model.n_classes)
    return model


def load_model(path) -> TreeModel:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read model file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ParseError(f"model file {path} is not a JSON object")
    return model_from_dict(data)


def model_to_dict(model: TreeModel) -> dict:
    def node_dict(n: TreeNode):
        if n.is_leaf:
            return {"leaf": list(n.leaf)}
        return {"feature": n.feature, "threshold": n.threshold,
                "left": n.left, "right": n.right}

    return {
        "format_version": FORMAT_VERSION,
        "task": model.task,
        "feature_layout": list(model.feature_layout),
        "class_labels": list(model.class_labels),
        "base_score": list(model.base_score),
        "metadata": {
            "embedder_id": model.embedder_id,
            "embedding_dim": model.embedding_dim,
            "languages": list(model.languages),
            "log1p_counts": model.log1p_counts,
            "trainer_version": model.trainer_version,
        },
        "trees": [
            {"nodes": [node_dict(n) for n in t.nodes]} for t in model.trees
        ],
    }


def save_model(model: TreeModel, path) -> None:
    Path(path).write_text(
        json.dumps(model_to_dict(model), indent=1, sort_keys=True) + "\n",
        encoding="utf-8",
    )


def _margins(fv, model: TreeModel) -> list[float]:
    margins = list(model.base_score)
    for tree in model.trees:
        leaf = tree.evaluate(fv)
        for k, v in enumerate(leaf):
            margins[k] += v
    return margins


def softmax(values) -> list[float]:
    top = max(values)
    exps = [math.exp(v - top) for v in values]
    total = sum(exps)
    return [e / total for e in exps]


def predict_category(fv, model: TreeModel) -> tuple[str, float]:
    if model.task != "category":
        raise TaskMismatch(f"expected a category model, got {model.task!r}")
    probs = softmax(_margins(fv, model))
    best = 0
    for i in range(1, len(probs)):
        if probs[i] > probs[best]:  # ties keep the earlier label
            best = i
    return model.class_labels[best], probs[best]


def predict_significance(fv, model: TreeModel) -> float:
    if model.task != "significance":
        raise TaskMismatch(f"expected a significance model, got {model.task!r}")
    margin = _margins(fv, model)[0]
    return 1.0 / (1.0 + math.exp(-margin))
