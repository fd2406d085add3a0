import numpy as np
import pytest
from sklearn.ensemble import GradientBoostingClassifier

from smartnote_trainer.export import (export_model, predict_proba,
                                      predict_significance, save_model)


def _fit(n_classes, seed=0, n=240, d=6):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(n, d))
    y = (x[:, 0] * 2 + x[:, 1]).round().astype(int) % n_classes
    booster = GradientBoostingClassifier(
        max_depth=3, n_estimators=20, learning_rate=0.3, random_state=seed)
    booster.fit(x, y)
    return booster, x


LAYOUT6 = [f"f{i}" for i in range(6)]


def _export(booster, x, task, labels):
    return export_model(
        booster, task, LAYOUT6, class_labels=labels,
        embedder_id="hashed-bow-v1", embedding_dim=0, languages=[],
        probe_rows=x[:8])


def test_multiclass_round_trip_matches_sklearn():
    booster, x = _fit(3)
    model = _export(booster, x, "category", ["docs", "feat", "fix"])
    theirs = booster.predict_proba(x[:50])
    mine = np.array([predict_proba(model, row) for row in x[:50]])
    assert np.abs(mine - theirs).max() < 1e-9


def test_binary_category_round_trip():
    booster, x = _fit(2, seed=3)
    model = _export(booster, x, "category", ["feat", "fix"])
    theirs = booster.predict_proba(x[:50])
    mine = np.array([predict_proba(model, row) for row in x[:50]])
    assert np.abs(mine - theirs).max() < 1e-9


def test_significance_round_trip():
    booster, x = _fit(2, seed=5)
    model = _export(booster, x, "significance", [])
    theirs = booster.predict_proba(x[:50])[:, 1]
    mine = np.array([predict_significance(model, row) for row in x[:50]])
    assert np.abs(mine - theirs).max() < 1e-9


def test_tree_count_is_stages_times_classes():
    booster, x = _fit(3)
    model = _export(booster, x, "category", ["docs", "feat", "fix"])
    assert len(model["trees"]) == 20 * 3
    assert len(model["base_score"]) == 3


def test_leaf_vectors_are_one_hot():
    booster, x = _fit(3)
    model = _export(booster, x, "category", ["docs", "feat", "fix"])
    for k, tree in enumerate(model["trees"]):
        hot = k % 3
        for node in tree["nodes"]:
            if "leaf" in node:
                cold = [v for i, v in enumerate(node["leaf"]) if i != hot]
                assert cold == [0.0] * 2


def test_probe_rows_required():
    booster, x = _fit(2)
    with pytest.raises(ValueError):
        export_model(booster, "significance", LAYOUT6, class_labels=[],
                     embedder_id="e", embedding_dim=0, languages=[],
                     probe_rows=x[:1])


def test_metadata_fields():
    booster, x = _fit(2, seed=9)
    model = _export(booster, x, "significance", [])
    meta = model["metadata"]
    assert meta["embedder_id"] == "hashed-bow-v1"
    assert meta["log1p_counts"] is True
    assert meta["trainer_version"].startswith("smartnote-trainer/")
    assert model["format_version"] == 1


def test_save_model_ends_with_newline(tmp_path):
    booster, x = _fit(2, seed=9)
    model = _export(booster, x, "significance", [])
    path = tmp_path / "model.json"
    save_model(model, path)
    text = path.read_text()
    assert text.endswith("\n")
    assert '"task": "significance"' in text
