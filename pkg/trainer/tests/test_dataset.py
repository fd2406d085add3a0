import os
import subprocess

import pytest

from smartnote_trainer import dataset


def test_conventional_label():
    assert dataset.conventional_label("feat: add parser") == "feat"
    assert dataset.conventional_label("fix(core)!: breaking") == "fix"
    assert dataset.conventional_label("Add parser") is None
    assert dataset.conventional_label("feat:missing space") is None


def test_conventional_fraction():
    msgs = ["feat: a", "fix: b", "whatever"]
    assert dataset.conventional_fraction(msgs) == pytest.approx(2 / 3)
    assert dataset.conventional_fraction([]) == 0.0


def _rec(sha, msg, pr=None):
    return dataset.CommitRecord(sha=sha, message=msg, pr_number=pr)


def test_category_filter_drops_unconventional_repo():
    good = [_rec("a" * 40, "feat: a"), _rec("b" * 40, "fix: b"),
            _rec("c" * 40, "unstructured")]
    bad = [_rec("d" * 40, "feat: d"), _rec("e" * 40, "one"),
           _rec("f" * 40, "two")]
    examples = dataset.category_examples([good, bad])
    # the bad repo (1/3 conventional) contributes nothing; the good repo
    # contributes only its labelled commits
    assert [e["label"] for e in examples] == ["feat", "fix"]


def test_category_filter_boundary_exactly_two_thirds():
    repo = [_rec("a" * 40, "feat: a"), _rec("b" * 40, "fix: b"),
            _rec("c" * 40, "noise")]
    assert len(dataset.category_examples([repo])) == 2


def test_significance_filter_requires_strictly_more_links():
    records = [_rec(f"{i}{'0' * 39}"[:40], f"commit {i}", pr=i)
               for i in range(1, 7)]
    three_links = ["Notes mention #1, #2 and #3 only."]
    four_links = ["Notes mention #1, #2, #3 and #4."]
    assert dataset.significance_examples([(records, three_links)]) == []
    examples = dataset.significance_examples([(records, four_links)])
    assert [e["label"] for e in examples] == [1, 1, 1, 1, 0, 0]


def test_note_link_count_matches_sha_prefixes():
    records = [_rec("abc1234" + "0" * 33, "x"),
               _rec("def5678" + "0" * 33, "y")]
    notes = ["Fixed in abc1234 and elsewhere."]
    assert dataset.note_link_count(notes, records) == 1


def test_require_minimum_and_single_class():
    examples = [{"label": "feat"}] * 250
    with pytest.raises(dataset.InsufficientData):
        dataset.require(examples, task="category")  # single class
    mixed = [{"label": "feat"}] * 100 + [{"label": "fix"}] * 99
    with pytest.raises(dataset.InsufficientData):
        dataset.require(mixed, minimum=200, task="category")
    ok = mixed + [{"label": "fix"}]
    assert dataset.require(ok, minimum=200, task="category") is ok


def test_jsonl_round_trip(tmp_path):
    examples = [{"message": "feat: x", "label": "feat", "added_lines": 3}]
    path = tmp_path / "data.jsonl"
    dataset.write_jsonl(examples, path)
    assert dataset.read_jsonl(path) == examples


def test_mine_repo(tmp_path):
    repo = tmp_path / "repo"
    repo.mkdir()
    env = dict(os.environ, GIT_AUTHOR_NAME="A", GIT_AUTHOR_EMAIL="a@e",
               GIT_COMMITTER_NAME="A", GIT_COMMITTER_EMAIL="a@e",
               GIT_AUTHOR_DATE="2024-01-01T00:00:00 +0000",
               GIT_COMMITTER_DATE="2024-01-01T00:00:00 +0000")

    def git(*args):
        subprocess.run(["git", "-C", str(repo), *args], check=True,
                       env=env, stdout=subprocess.DEVNULL)

    git("init", "-q")
    (repo / "a.py").write_text("x = 1\ny = 2\n")
    git("add", ".")
    git("commit", "-qm", "feat: add module (#12)")
    (repo / "b.md").write_text("docs\n")
    git("add", ".")
    git("commit", "-qm", "docs: explain")

    records = dataset.mine_repo(repo)
    assert len(records) == 2
    newest = records[0]
    assert newest.message == "docs: explain"
    assert newest.languages == ["Markdown"]
    oldest = records[1]
    assert oldest.pr_number == 12
    assert oldest.added_lines == 2
    assert len(oldest.sha) == 40
