"""Dataset construction: mine local clones, apply the corpus filters,
and attach labels.

Category labels come from conventional-commit prefixes. Significance
labels are binary: a commit is positive when a published release note
references it by sha prefix or linked PR number.
"""

from __future__ import annotations

import json
import re
import subprocess
from dataclasses import dataclass, field
from pathlib import Path


class InsufficientData(Exception):
    def __init__(self, threshold, detail=""):
        self.threshold = threshold
        super().__init__(f"dataset below threshold {threshold}"
                         + (f": {detail}" if detail else ""))


CONVENTIONAL_RE = re.compile(
    r"^(feat|fix|docs|style|refactor|perf|test|build|ci|chore|revert)"
    r"(\([\w./-]+\))?!?:\s"
)

CONVENTIONAL_FRACTION = 2 / 3
MIN_NOTE_LINKS = 3  # strictly more than this many commit links required
MIN_EXAMPLES = 200

_SHA_RE = re.compile(r"\b[0-9a-f]{7,40}\b")
_PR_RE = re.compile(r"#(\d+)")
_TRAILER_PR = re.compile(r"\(#(\d+)\)\s*$", re.MULTILINE)


def conventional_label(message: str) -> str | None:
    m = CONVENTIONAL_RE.match(message)
    return m.group(1) if m else None


def conventional_fraction(messages) -> float:
    messages = list(messages)
    if not messages:
        return 0.0
    return sum(1 for m in messages if conventional_label(m)) / len(messages)


@dataclass
class CommitRecord:
    sha: str
    message: str
    added_lines: int = 0
    deleted_lines: int = 0
    languages: list = field(default_factory=list)
    pr_number: int | None = None
    extras: dict = field(default_factory=dict)

    def to_example(self, label) -> dict:
        example = {
            "message": self.message,
            "added_lines": self.added_lines,
            "deleted_lines": self.deleted_lines,
            "languages": list(self.languages),
            "label": label,
        }
        example.update(self.extras)
        return example


_EXT_LANG = {
    ".py": "Python", ".js": "JavaScript", ".ts": "TypeScript",
    ".java": "Java", ".c": "C", ".cpp": "C++", ".cs": "C#", ".go": "Go",
    ".rs": "Rust", ".rb": "Ruby", ".php": "PHP", ".sh": "Shell",
    ".html": "HTML", ".css": "CSS", ".md": "Markdown",
    ".rst": "reStructuredText", ".json": "JSON", ".yaml": "YAML",
    ".yml": "YAML", ".toml": "TOML", ".txt": "Text",
}


def mine_repo(path) -> list[CommitRecord]:
    """Flat per-commit records for one local clone (whole history)."""
    raw = subprocess.run(
        ["git", "-C", str(path), "log", "--pretty=%x1e%H%x1f%B%x1f",
         "--numstat"],
        check=True, stdout=subprocess.PIPE,
    ).stdout.decode("utf-8", errors="replace")
    records = []
    for chunk in raw.split("\x1e"):
        if "\x1f" not in chunk:
            continue
        sha, message, stats = chunk.split("\x1f", 2)
        added = deleted = 0
        languages = set()
        for line in stats.strip().splitlines():
            parts = line.split("\t")
            if len(parts) != 3:
                continue
            a, d, fname = parts
            added += int(a) if a.isdigit() else 0
            deleted += int(d) if d.isdigit() else 0
            dot = fname.rfind(".")
            if dot >= 0 and fname[dot:] in _EXT_LANG:
                languages.add(_EXT_LANG[fname[dot:]])
        m = _TRAILER_PR.search(message.splitlines()[0] if message else "")
        records.append(CommitRecord(
            sha=sha.strip(), message=message.strip("\n"),
            added_lines=added, deleted_lines=deleted,
            languages=sorted(languages),
            pr_number=int(m.group(1)) if m else None,
        ))
    return records


def note_link_count(note_texts, records) -> int:
    """How many of the repo's commits its release notes reference."""
    text = "\n".join(note_texts).lower()
    mentioned_prefixes = set(_SHA_RE.findall(text))
    mentioned_prs = {int(n) for n in _PR_RE.findall(text)}
    hits = 0
    for r in records:
        if any(r.sha.startswith(p) for p in mentioned_prefixes):
            hits += 1
        elif r.pr_number in mentioned_prs:
            hits += 1
    return hits


def category_examples(repos, min_fraction=CONVENTIONAL_FRACTION) -> list[dict]:
    """Per-repo filter: keep only repos where at least ``min_fraction`` of
    commits follow the conventional format, then label by prefix."""
    examples = []
    for records in repos:
        records = list(records)
        if conventional_fraction(r.message for r in records) < min_fraction:
            continue
        for r in records:
            label = conventional_label(r.message)
            if label is not None:
                examples.append(r.to_example(label))
    return examples


def significance_examples(repos_with_notes,
                          min_links=MIN_NOTE_LINKS) -> list[dict]:
    """Per-repo filter: the repo's notes must reference strictly more than
    ``min_links`` commits; positives are the referenced commits."""
    examples = []
    for records, note_texts in repos_with_notes:
        records = list(records)
        if note_link_count(note_texts, records) <= min_links:
            continue
        text = "\n".join(note_texts).lower()
        prefixes = set(_SHA_RE.findall(text))
        prs = {int(n) for n in _PR_RE.findall(text)}
        for r in records:
            mentioned = (
                any(r.sha.startswith(p) for p in prefixes)
                or (r.pr_number is not None and r.pr_number in prs)
            )
            examples.append(r.to_example(1 if mentioned else 0))
    return examples


def require(examples, minimum=MIN_EXAMPLES, task="") -> list[dict]:
    if len(examples) < minimum:
        raise InsufficientData(minimum,
                               f"{task} has {len(examples)} examples")
    labels = {e["label"] for e in examples}
    if len(labels) < 2:
        raise InsufficientData(minimum, f"{task} has a single class")
    return examples


def write_jsonl(examples, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for example in examples:
            fh.write(json.dumps(example, sort_keys=True) + "\n")


def read_jsonl(path) -> list[dict]:
    examples = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line:
            examples.append(json.loads(line))
    return examples
