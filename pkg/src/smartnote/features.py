"""Feature vector assembly for the tree models.

The built-in embedder is a feature-hashed bag of lowercased word unigrams
and bigrams (md5-bucketed, L2-normalised); a sidecar file of precomputed
embeddings keyed by sha can stand in for the trainer's neural embedder.
The hashing scheme is versioned as ``hashed-bow-v1`` and must match the
trainer's bit for bit.
"""

from __future__ import annotations

import hashlib
import math
import re
from pathlib import Path

from .errors import (
    DimensionMismatch,
    LayoutMismatch,
    MissingPrecomputedEmbedding,
)
from .miner import ReleaseType
from .settings import ProjectDomain

HASHED_EMBEDDER_ID = "hashed-bow-v1"
DEFAULT_EMBEDDING_DIM = 768

_WORD_RE = re.compile(r"[a-z0-9]+")

RELEASE_TYPE_SLOTS = ["major", "minor", "patch", "unknown"]
DOMAIN_SLOTS = [
    "application_software",
    "system_software",
    "libraries_and_frameworks",
    "software_tools",
]
_DOMAIN_KEY = {
    ProjectDomain.APPLICATION_SOFTWARE: "application_software",
    ProjectDomain.SYSTEM_SOFTWARE: "system_software",
    ProjectDomain.LIBRARIES_AND_FRAMEWORKS: "libraries_and_frameworks",
    ProjectDomain.SOFTWARE_TOOLS: "software_tools",
}

# features transformed with log1p when the model metadata asks for it
COUNT_FEATURES = frozenset({
    "added_lines", "deleted_lines", "release_commits", "release_authors",
    "commit_total", "contributor_count", "star_count", "issue_count",
    "pr_count", "comment_count",
})


def slugify(name: str) -> str:
    return re.sub(r"[^a-z0-9]+", "_", name.lower()).strip("_")


def build_feature_layout(dim: int, languages) -> list[str]:
    """Canonical feature ordering shared with the trainer."""
    layout = [f"emb_{i}" for i in range(dim)]
    layout += ["added_lines", "deleted_lines"]
    layout += [f"lang_{slugify(lang)}" for lang in languages]
    layout += ["lang_other"]
    layout += [f"release_type_{s}" for s in RELEASE_TYPE_SLOTS]
    layout += [
        "release_commits", "release_authors", "avg_changeset",
        "avg_codechurn", "avg_history_complexity",
        "commit_total", "contributor_count", "star_count",
        "issue_count", "pr_count", "comment_count",
    ]
    layout += [f"domain_{s}" for s in DOMAIN_SLOTS]
    return layout


def hash_bucket(token: str, dim: int) -> int:
    digest = hashlib.md5(token.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little") % dim


def embed_message(message: str, embedder_id: str = HASHED_EMBEDDER_ID,
                  dim: int = DEFAULT_EMBEDDING_DIM) -> list[float]:
    """Hashed bag-of-words sentence embedding (unigrams + bigrams)."""
    if embedder_id != HASHED_EMBEDDER_ID:
        raise DimensionMismatch(
            f"unknown embedder {embedder_id!r}; use a sidecar for "
            f"externally computed embeddings"
        )
    if dim <= 0:
        raise DimensionMismatch(f"embedding dimension must be positive: {dim}")
    vec = [0.0] * dim
    words = _WORD_RE.findall(message.lower())
    grams = words + [f"{a} {b}" for a, b in zip(words, words[1:])]
    for gram in grams:
        vec[hash_bucket(gram, dim)] += 1.0
    norm = math.sqrt(sum(v * v for v in vec))
    if norm > 0:
        vec = [v / norm for v in vec]
    return vec


class HashedEmbedder:
    def __init__(self, dim: int = DEFAULT_EMBEDDING_DIM):
        self.id = HASHED_EMBEDDER_ID
        self.dim = dim

    def embed(self, message: str, sha: str | None = None) -> list[float]:
        return embed_message(message, self.id, self.dim)


class SidecarEmbedder:
    """Reads precomputed embeddings (one ``sha f1 f2 ...`` record per line),
    for parity with a trainer that used a neural embedder."""

    def __init__(self, path, embedder_id: str, dim: int):
        self.id = embedder_id
        self.dim = dim
        self._table: dict[str, list[float]] = {}
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if not line:
                continue
            sha, *values = line.split()
            if len(values) != dim:
                raise DimensionMismatch(
                    f"sidecar row for {sha} has {len(values)} values, expected {dim}"
                )
            self._table[sha] = [float(v) for v in values]

    def embed(self, message: str, sha: str | None = None) -> list[float]:
        if sha is None or sha not in self._table:
            raise MissingPrecomputedEmbedding(sha)
        return self._table[sha]


def assemble_features(commit, release, project, model, embedder=None) -> list[float]:
    """Lay out one commit's features exactly per the model's layout.

    Unknown languages fold into the ``lang_other`` flag; missing remote
    counts are plain zeros, so a degraded ProjectContext still yields a
    valid vector.
    """
    if embedder is None:
        embedder = HashedEmbedder(model.embedding_dim)
    if embedder.id != model.embedder_id:
        raise DimensionMismatch(
            f"model was trained with embedder {model.embedder_id!r}, "
            f"got {embedder.id!r}"
        )
    embedding = embedder.embed(commit.message, sha=commit.sha)
    if len(embedding) != model.embedding_dim:
        raise DimensionMismatch(
            f"embedding has dimension {len(embedding)}, "
            f"model expects {model.embedding_dim}"
        )

    model_langs = {f"lang_{slugify(lang)}" for lang in model.languages}
    commit_lang_slots = set()
    other_flag = 0.0
    for lang in commit.languages:
        slot = f"lang_{slugify(lang)}"
        if slot in model_langs:
            commit_lang_slots.add(slot)
        else:
            other_flag = 1.0

    domain = project.domain if project.domain is not None else ProjectDomain.SOFTWARE_TOOLS
    release_slot = f"release_type_{release.release_type.value.lower()}"
    domain_slot = f"domain_{_DOMAIN_KEY[domain]}"

    scalars = {
        "added_lines": float(commit.added_lines),
        "deleted_lines": float(commit.deleted_lines),
        "release_commits": float(release.commit_count),
        "release_authors": float(release.author_count),
        "avg_changeset": release.avg_changeset,
        "avg_codechurn": release.avg_codechurn,
        "avg_history_complexity": release.avg_history_complexity,
        "commit_total": float(project.commit_total),
        "contributor_count": float(project.contributor_count),
        "star_count": float(project.star_count),
        "issue_count": float(project.issue_count),
        "pr_count": float(project.pr_count),
        "comment_count": float(project.comment_count),
    }

    vector = []
    for name in model.feature_layout:
        if name.startswith("emb_"):
            value = embedding[int(name[4:])]
        elif name == "lang_other":
            value = other_flag
        elif name.startswith("lang_"):
            value = 1.0 if name in commit_lang_slots else 0.0
        elif name.startswith("release_type_"):
            value = 1.0 if name == release_slot else 0.0
        elif name.startswith("domain_"):
            value = 1.0 if name == domain_slot else 0.0
        elif name in scalars:
            value = scalars[name]
            if model.log1p_counts and name in COUNT_FEATURES:
                value = math.log1p(value)
        else:
            raise LayoutMismatch(f"unknown feature name in model layout: {name}")
        if math.isnan(value) or math.isinf(value):
            raise LayoutMismatch(f"non-finite value for feature {name}")
        vector.append(value)
    return vector
