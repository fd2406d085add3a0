"""Feature construction for training.

The hashed embedding and the feature layout are intentionally duplicated
from the generator package, bit for bit: the contract between the two
sides is the model file (which records the embedder id, dimension, and
full layout), not shared code. Changing anything here is a format change
and needs a new embedder id.
"""

from __future__ import annotations

import hashlib
import math
import re

EMBEDDER_ID = "hashed-bow-v1"
DEFAULT_DIM = 768

_WORD_RE = re.compile(r"[a-z0-9]+")

CATEGORY_LABELS = [
    "feat", "fix", "docs", "style", "refactor", "perf",
    "test", "build", "ci", "chore", "revert",
]

MODEL_LANGUAGES = [
    "Python", "JavaScript", "TypeScript", "Java", "C", "C++", "C#", "Go",
    "Rust", "Ruby", "PHP", "Shell", "HTML", "CSS", "Markdown",
    "reStructuredText", "JSON", "YAML", "TOML", "Text",
]

RELEASE_TYPES = ["major", "minor", "patch", "unknown"]
DOMAINS = [
    "application_software", "system_software",
    "libraries_and_frameworks", "software_tools",
]

COUNT_FEATURES = frozenset({
    "added_lines", "deleted_lines", "release_commits", "release_authors",
    "commit_total", "contributor_count", "star_count", "issue_count",
    "pr_count", "comment_count",
})

SCALAR_DEFAULTS = {
    "added_lines": 0.0, "deleted_lines": 0.0,
    "release_commits": 1.0, "release_authors": 1.0,
    "avg_changeset": 1.0, "avg_codechurn": 0.0,
    "avg_history_complexity": 0.0,
    "commit_total": 0.0, "contributor_count": 0.0, "star_count": 0.0,
    "issue_count": 0.0, "pr_count": 0.0, "comment_count": 0.0,
}


def slugify(name: str) -> str:
    return re.sub(r"[^a-z0-9]+", "_", name.lower()).strip("_")


def build_feature_layout(dim: int = DEFAULT_DIM,
                         languages=tuple(MODEL_LANGUAGES)) -> list[str]:
    layout = [f"emb_{i}" for i in range(dim)]
    layout += ["added_lines", "deleted_lines"]
    layout += [f"lang_{slugify(lang)}" for lang in languages]
    layout += ["lang_other"]
    layout += [f"release_type_{s}" for s in RELEASE_TYPES]
    layout += [
        "release_commits", "release_authors", "avg_changeset",
        "avg_codechurn", "avg_history_complexity",
        "commit_total", "contributor_count", "star_count",
        "issue_count", "pr_count", "comment_count",
    ]
    layout += [f"domain_{s}" for s in DOMAINS]
    return layout


def hash_bucket(token: str, dim: int) -> int:
    digest = hashlib.md5(token.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little") % dim


def embed_message(message: str, dim: int = DEFAULT_DIM) -> list[float]:
    """Hashed bag of lowercase unigrams and bigrams, L2-normalised."""
    vec = [0.0] * dim
    words = _WORD_RE.findall(message.lower())
    for gram in words + [f"{a} {b}" for a, b in zip(words, words[1:])]:
        vec[hash_bucket(gram, dim)] += 1.0
    norm = math.sqrt(sum(v * v for v in vec))
    if norm > 0:
        vec = [v / norm for v in vec]
    return vec


def vectorise(record: dict, layout: list[str], dim: int,
              log1p_counts: bool = True) -> list[float]:
    """One mined commit record to one feature row, matching ``layout``.

    A record is the flat dict documented in the dataset schema: message,
    line counts, languages, release-scale numbers, project numbers, the
    domain label, and the release type. Missing numerics take neutral
    defaults so partially mined corpora still vectorise.
    """
    embedding = embed_message(record.get("message", ""), dim)
    langs = {f"lang_{slugify(l)}" for l in record.get("languages", [])}
    known = {f"lang_{slugify(l)}" for l in MODEL_LANGUAGES}
    other = 1.0 if langs - known else 0.0
    release_slot = "release_type_" + str(
        record.get("release_type", "unknown")).lower()
    domain_slot = "domain_" + slugify(str(
        record.get("domain", "software_tools")))

    row = []
    for name in layout:
        if name.startswith("emb_"):
            value = embedding[int(name[4:])]
        elif name == "lang_other":
            value = other
        elif name.startswith("lang_"):
            value = 1.0 if name in (langs & known) else 0.0
        elif name.startswith("release_type_"):
            value = 1.0 if name == release_slot else 0.0
        elif name.startswith("domain_"):
            value = 1.0 if name == domain_slot else 0.0
        else:
            value = float(record.get(name, SCALAR_DEFAULTS[name]))
            if log1p_counts and name in COUNT_FEATURES:
                value = math.log1p(value)
        row.append(value)
    return row


def importance_groups(layout: list[str]) -> dict[str, str]:
    """Feature name -> reporting group (embedding slots collapse)."""
    groups = {}
    for name in layout:
        if name.startswith("emb_"):
            groups[name] = "message_embedding"
        elif name.startswith("lang_"):
            groups[name] = "languages"
        else:
            groups[name] = name
    return groups
