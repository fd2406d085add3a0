import json

from _synth import synthetic_corpus
from smartnote_trainer import dataset
from smartnote_trainer.cli import main


def test_train_command_end_to_end(tmp_path):
    data = tmp_path / "data.jsonl"
    dataset.write_jsonl(synthetic_corpus(250, seed=4), data)
    out = tmp_path / "model.json"
    fixtures = tmp_path / "fixtures.jsonl"
    report = tmp_path / "report.json"
    code = main([
        "train", "--task", "category", "--data", str(data),
        "--out", str(out), "--fixtures", str(fixtures),
        "--report", str(report), "--seed", "7", "--dim", "32",
        "--min-examples", "200",
    ])
    assert code == 0
    model = json.loads(out.read_text())
    assert model["task"] == "category"
    assert set(model["class_labels"]) == {"feat", "fix", "docs"}
    assert len(fixtures.read_text().splitlines()) == 200
    rep = json.loads(report.read_text())
    assert rep["n_examples"] == 250


def test_train_command_insufficient_data(tmp_path):
    data = tmp_path / "tiny.jsonl"
    dataset.write_jsonl(synthetic_corpus(20, seed=4), data)
    out = tmp_path / "model.json"
    code = main(["train", "--task", "category", "--data", str(data),
                 "--out", str(out)])
    assert code == 2
    assert not out.exists()


def test_bad_flags_exit_code():
    assert main(["train", "--task", "nonsense"]) == 4


def test_mine_command(tmp_path, monkeypatch):
    # reuse the repo builder from the dataset tests via a real git repo
    import subprocess
    repo = tmp_path / "repo"
    repo.mkdir()
    env_keys = {"GIT_AUTHOR_NAME": "A", "GIT_AUTHOR_EMAIL": "a@e",
                "GIT_COMMITTER_NAME": "A", "GIT_COMMITTER_EMAIL": "a@e"}
    for k, v in env_keys.items():
        monkeypatch.setenv(k, v)
    subprocess.run(["git", "-C", str(repo), "init", "-q"], check=True)
    for i, msg in enumerate(["feat: one", "fix: two", "feat: three"]):
        (repo / f"f{i}.py").write_text("pass\n")
        subprocess.run(["git", "-C", str(repo), "add", "."], check=True)
        subprocess.run(["git", "-C", str(repo), "commit", "-qm", msg],
                       check=True)
    out = tmp_path / "mined.jsonl"
    code = main(["mine", str(repo), "--out", str(out)])
    assert code == 0
    examples = dataset.read_jsonl(out)
    assert sorted(e["label"] for e in examples) == ["feat", "feat", "fix"]
