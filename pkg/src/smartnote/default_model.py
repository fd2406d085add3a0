"""Built-in fallback models.

When no trained model file is supplied, generation runs on a pair of
hand-built keyword ensembles over the hashed embedding space. They are
deliberately simple — stumps keyed to conventional-commit vocabulary and
change size — but they exercise exactly the same inference path and
interchange structures as trainer-produced models.
"""

from __future__ import annotations

import math

from .features import (
    DEFAULT_EMBEDDING_DIM,
    HASHED_EMBEDDER_ID,
    build_feature_layout,
    hash_bucket,
)
from .languages import DEFAULT_MODEL_LANGUAGES
from .model import CATEGORY_LABELS, Tree, TreeModel, TreeNode

# token -> conventional commit category evidence
_CATEGORY_KEYWORDS = {
    "feat": "feat", "feature": "feat", "add": "feat", "added": "feat",
    "implement": "feat", "support": "feat",
    "fix": "fix", "fixed": "fix", "fixes": "fix", "bug": "fix",
    "resolve": "fix", "crash": "fix",
    "docs": "docs", "doc": "docs", "documentation": "docs",
    "readme": "docs", "typo": "docs",
    "style": "style", "format": "style", "lint": "style",
    "refactor": "refactor", "cleanup": "refactor", "rework": "refactor",
    "perf": "perf", "performance": "perf", "optimize": "perf",
    "test": "test", "tests": "test", "testing": "test",
    "build": "build", "deps": "build", "dependency": "build",
    "bump": "build", "upgrade": "build",
    "ci": "ci", "workflow": "ci", "pipeline": "ci",
    "chore": "chore",
    "revert": "revert",
}

# token -> additive significance evidence (applied when the token occurs)
_SIGNIFICANCE_KEYWORDS = {
    "feat": 0.6, "feature": 0.6, "fix": 0.5, "crash": 0.4,
    "security": 0.8, "breaking": 0.8,
    "typo": -1.5, "chore": -0.8, "bump": -0.6, "lint": -0.8,
    "whitespace": -1.0, "formatting": -0.8,
}

_KEYWORD_WEIGHT = 3.0
_CHORE_PRIOR = 0.25
_SIGNIFICANCE_BASE = -1.2


def _stump(feature: int, threshold: float, left_leaf, right_leaf) -> Tree:
    return Tree(nodes=(
        TreeNode(feature=feature, threshold=threshold, left=1, right=2),
        TreeNode(leaf=tuple(left_leaf)),
        TreeNode(leaf=tuple(right_leaf)),
    ))


def _presence_stump(feature: int, n_classes: int, class_index: int,
                    weight: float) -> Tree:
    right = [0.0] * n_classes
    right[class_index] = weight
    return _stump(feature, 0.0, [0.0] * n_classes, right)


def build_default_category_model(dim: int = DEFAULT_EMBEDDING_DIM) -> TreeModel:
    layout = build_feature_layout(dim, DEFAULT_MODEL_LANGUAGES)
    index = {name: i for i, name in enumerate(layout)}
    n = len(CATEGORY_LABELS)
    label_index = {label: i for i, label in enumerate(CATEGORY_LABELS)}

    trees = []
    for token, label in sorted(_CATEGORY_KEYWORDS.items()):
        feature = index[f"emb_{hash_bucket(token, dim)}"]
        trees.append(_presence_stump(feature, n, label_index[label],
                                     _KEYWORD_WEIGHT))
    # documentation-language evidence
    for lang in ("markdown", "restructuredtext"):
        trees.append(_presence_stump(index[f"lang_{lang}"], n,
                                     label_index["docs"], 1.0))

    base = [0.0] * n
    base[label_index["chore"]] = _CHORE_PRIOR  # unmatched messages fall to chore
    return TreeModel(
        task="category",
        feature_layout=tuple(layout),
        class_labels=tuple(CATEGORY_LABELS),
        trees=tuple(trees),
        embedder_id=HASHED_EMBEDDER_ID,
        embedding_dim=dim,
        languages=tuple(DEFAULT_MODEL_LANGUAGES),
        log1p_counts=True,
        base_score=tuple(base),
        trainer_version="builtin-keyword-v1",
    )


def build_default_significance_model(dim: int = DEFAULT_EMBEDDING_DIM) -> TreeModel:
    layout = build_feature_layout(dim, DEFAULT_MODEL_LANGUAGES)
    index = {name: i for i, name in enumerate(layout)}

    trees = []
    # change-size evidence (features are log1p-transformed counts)
    added = index["added_lines"]
    deleted = index["deleted_lines"]
    trees.append(_stump(added, math.log1p(5), [-0.4], [0.9]))
    trees.append(_stump(added, math.log1p(50), [0.0], [0.7]))
    trees.append(_stump(added, math.log1p(500), [0.0], [0.4]))
    trees.append(_stump(deleted, math.log1p(50), [0.0], [0.3]))
    # vocabulary evidence
    for token, weight in sorted(_SIGNIFICANCE_KEYWORDS.items()):
        feature = index[f"emb_{hash_bucket(token, dim)}"]
        trees.append(_stump(feature, 0.0, [0.0], [weight]))
    # documentation-only churn is rarely noteworthy
    for lang in ("markdown", "restructuredtext"):
        trees.append(_stump(index[f"lang_{lang}"], 0.0, [0.0], [-0.8]))

    return TreeModel(
        task="significance",
        feature_layout=tuple(layout),
        class_labels=(),
        trees=tuple(trees),
        embedder_id=HASHED_EMBEDDER_ID,
        embedding_dim=dim,
        languages=tuple(DEFAULT_MODEL_LANGUAGES),
        log1p_counts=True,
        base_score=(_SIGNIFICANCE_BASE,),
        trainer_version="builtin-keyword-v1",
    )


def build_default_models(dim: int = DEFAULT_EMBEDDING_DIM):
    """(category_model, significance_model) pair."""
    return build_default_category_model(dim), build_default_significance_model(dim)
