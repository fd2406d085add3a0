"""Git repository mining: tag-range resolution, commit extraction, PR
linkage detection, and release-level context features.

All mining shells out to the ``git`` CLI against an existing checkout;
nothing is cloned or fetched. Mining is single-threaded per repository,
but the produced Commit values are frozen and safe to share.
"""

from __future__ import annotations

import math
import re
import subprocess
from collections import Counter
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path

from .errors import EmptyRange, NotARepository, TagNotFound
from .languages import OTHER_LANGUAGE, language_for_path


class MergeKind(Enum):
    NONE = "none"
    SQUASH = "squash"
    REBASE = "rebase"
    MERGE_COMMIT = "merge-commit"


class ReleaseType(Enum):
    MAJOR = "Major"
    MINOR = "Minor"
    PATCH = "Patch"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class FilePatch:
    path: str
    diff_text: str
    extension: str
    language: str | None
    added_lines: int = 0
    deleted_lines: int = 0

    def __post_init__(self):
        if not self.path:
            raise ValueError("FilePatch.path must be non-empty")


@dataclass(frozen=True)
class Commit:
    sha: str
    author: str
    committer: str
    timestamp: datetime
    message: str
    patches: tuple[FilePatch, ...]
    added_lines: int
    deleted_lines: int
    languages: frozenset[str]
    parents: tuple[str, ...] = ()
    pr_number: int | None = None
    merge_kind: MergeKind = MergeKind.NONE

    def __post_init__(self):
        if not re.fullmatch(r"[0-9a-f]{40}", self.sha):
            raise ValueError(f"invalid commit sha: {self.sha!r}")

    @property
    def title(self) -> str:
        return self.message.splitlines()[0] if self.message else ""


@dataclass(frozen=True)
class ReleaseContext:
    release_type: ReleaseType
    commit_count: int
    author_count: int
    committer_count: int
    avg_changeset: float
    avg_codechurn: float
    avg_history_complexity: float


def _git(repo_path, *args, check=True) -> str:
    proc = subprocess.run(
        ["git", "-C", str(repo_path), *args],
        stdout=subprocess.PIPE, stderr=subprocess.PIPE,
    )
    if check and proc.returncode != 0:
        raise subprocess.CalledProcessError(
            proc.returncode, proc.args, proc.stdout, proc.stderr
        )
    # decode manually: text mode would normalise \r\n inside diffs
    return proc.stdout.decode("utf-8", errors="replace")


def _ensure_repo(repo_path) -> None:
    if not Path(repo_path).is_dir():
        raise NotARepository(repo_path)
    try:
        _git(repo_path, "rev-parse", "--git-dir")
    except (subprocess.CalledProcessError, FileNotFoundError):
        raise NotARepository(repo_path) from None


def _resolve_tag(repo_path, tag: str) -> str:
    try:
        return _git(repo_path, "rev-parse", "--verify", f"{tag}^{{commit}}").strip()
    except subprocess.CalledProcessError:
        raise TagNotFound(tag) from None


_DIFF_HEADER_RE = re.compile(r"^diff --git a/(.*) b/(.*)$")


def _parse_patches(patch_text: str) -> tuple[FilePatch, ...]:
    patches = []
    blocks = re.split(r"(?m)^(?=diff --git )", patch_text)
    for block in blocks:
        if not block.startswith("diff --git "):
            continue
        header = block.split("\n", 1)[0]
        m = _DIFF_HEADER_RE.match(header)
        if not m:
            continue
        path = m.group(2)  # post-image path; covers renames with -M
        added = deleted = 0
        for line in block.splitlines():
            if line.startswith("+") and not line.startswith("+++"):
                added += 1
            elif line.startswith("-") and not line.startswith("---"):
                deleted += 1
        dot = path.rfind(".")
        extension = path[dot:] if dot > path.rfind("/") else ""
        patches.append(FilePatch(
            path=path,
            diff_text=block,
            extension=extension,
            language=language_for_path(path),
            added_lines=added,
            deleted_lines=deleted,
        ))
    return tuple(patches)


def _read_commit(repo_path, sha: str) -> Commit:
    meta = _git(
        repo_path, "show", "-s",
        "--format=%H%x1f%an%x1f%cn%x1f%at%x1f%P%x1f%B", sha,
    )
    full_sha, author, committer, at, parents, message = meta.split("\x1f", 5)
    patch_text = _git(
        repo_path, "show", "--format=", "--patch", "--no-color", "-M50%", sha,
    )
    patches = _parse_patches(patch_text)
    return Commit(
        sha=full_sha.strip(),
        author=author,
        committer=committer,
        timestamp=datetime.fromtimestamp(int(at), tz=timezone.utc),
        message=message.rstrip("\n"),
        patches=patches,
        added_lines=sum(p.added_lines for p in patches),
        deleted_lines=sum(p.deleted_lines for p in patches),
        languages=frozenset(p.language for p in patches if p.language),
        parents=tuple(parents.split()) if parents.strip() else (),
    )


def resolve_range(repo_path, from_tag: str, to_tag: str) -> list[Commit]:
    """Commits reachable from ``to_tag`` and not from ``from_tag``, oldest
    first.

    Tags pointing at orphan or off-tree commits are handled by plain
    reachability: the orphan lineage is simply everything reachable from
    the target that the previous release does not contain.
    """
    _ensure_repo(repo_path)
    from_sha = _resolve_tag(repo_path, from_tag)
    to_sha = _resolve_tag(repo_path, to_tag)
    if from_sha == to_sha:
        raise EmptyRange(f"tags {from_tag} and {to_tag} point to the same commit")
    shas = _git(
        repo_path, "rev-list", "--reverse", f"{from_sha}..{to_sha}"
    ).split()
    if not shas:
        raise EmptyRange(f"no commits between {from_tag} and {to_tag}")
    return [_read_commit(repo_path, sha) for sha in shas]


_SQUASH_RE = re.compile(r"\(#(\d+)\)\s*$")
_MERGE_PR_RE = re.compile(r"^Merge pull request #(\d+)\b")


def detect_pr_links(commits: list[Commit]) -> list[Commit]:
    """Fill pr_number/merge_kind from message patterns and merge topology.

    Idempotent: linkage is a pure function of messages and parent edges.
    Commits whose titles carry a trailing "(#N)" are squash merges; runs of
    two or more sharing the same N are treated as a rebase-merge group. A
    "Merge pull request #N" commit flags its second-parent lineage.
    """
    by_sha = {c.sha: c for c in commits}
    pr_of: dict[str, int] = {}
    kind_of: dict[str, MergeKind] = {}

    trailer_groups: dict[int, list[str]] = {}
    for c in commits:
        m = _SQUASH_RE.search(c.title)
        if m:
            trailer_groups.setdefault(int(m.group(1)), []).append(c.sha)
    for number, shas in trailer_groups.items():
        kind = MergeKind.REBASE if len(shas) > 1 else MergeKind.SQUASH
        for sha in shas:
            pr_of[sha] = number
            kind_of[sha] = kind

    in_range = set(by_sha)
    for c in commits:
        m = _MERGE_PR_RE.match(c.title)
        if not (m and len(c.parents) >= 2):
            continue
        number = int(m.group(1))

        def _reachable(start: str) -> set[str]:
            seen, stack = set(), [start]
            while stack:
                sha = stack.pop()
                if sha in seen or sha not in in_range:
                    continue
                seen.add(sha)
                stack.extend(by_sha[sha].parents)
            return seen

        lineage = _reachable(c.parents[1]) - _reachable(c.parents[0])
        for sha in [c.sha, *sorted(lineage)]:
            if sha not in pr_of:  # an explicit trailer wins
                pr_of[sha] = number
                kind_of[sha] = MergeKind.MERGE_COMMIT

    return [
        replace(c, pr_number=pr_of.get(c.sha), merge_kind=kind_of.get(c.sha, MergeKind.NONE))
        if c.sha in pr_of else c
        for c in commits
    ]


_SEMVER_RE = re.compile(r"^(\d+)\.(\d+)\.(\d+)(?:[-+].*)?$")


def parse_semver(version: str):
    """(major, minor, patch) tuple, or None for non-semver strings."""
    m = _SEMVER_RE.match(version[1:] if version[:1] in ("v", "V") else version)
    if not m:
        return None
    return tuple(int(g) for g in m.groups())


def classify_release_type(previous_version: str, new_version: str) -> ReleaseType:
    prev = parse_semver(previous_version)
    new = parse_semver(new_version)
    if prev is None or new is None:
        return ReleaseType.UNKNOWN
    if new[0] != prev[0]:
        return ReleaseType.MAJOR
    if new[1] != prev[1]:
        return ReleaseType.MINOR
    if new[2] != prev[2]:
        return ReleaseType.PATCH
    return ReleaseType.UNKNOWN


def history_complexity(commits) -> float:
    """Base-2 Shannon entropy of modification counts across files.

    Zero when every change lands in one file; log2(n) when modifications
    spread evenly over n files.
    """
    counts = Counter()
    for c in commits:
        for p in c.patches:
            counts[p.path] += 1
    total = sum(counts.values())
    if total == 0:
        return 0.0
    return -sum(
        (n / total) * math.log2(n / total) for n in counts.values()
    )


def compute_release_context(commits, previous_version: str,
                            new_version: str) -> ReleaseContext:
    if not commits:
        raise EmptyRange("cannot compute release context for an empty range")
    n = len(commits)
    churn_per_commit = [
        (c.added_lines + c.deleted_lines) / len(c.patches) if c.patches else 0.0
        for c in commits
    ]
    return ReleaseContext(
        release_type=classify_release_type(previous_version, new_version),
        commit_count=n,
        author_count=len({c.author for c in commits}),
        committer_count=len({c.committer for c in commits}),
        avg_changeset=sum(len(c.patches) for c in commits) / n,
        avg_codechurn=sum(churn_per_commit) / n,
        avg_history_complexity=history_complexity(commits),
    )


_DEF_RE = re.compile(r"\b(?:def|fn|function|class)\s+([A-Za-z_]\w*)")


def extract_rename_pairs(commits) -> dict[str, str]:
    """Identifier rename pairs mined from the range's patches.

    A patch that removes exactly one definition and adds exactly one other
    is treated as a rename. Chains are collapsed so every old name maps to
    the final name in the range.
    """
    pairs: list[tuple[str, str]] = []
    for c in commits:
        for p in c.patches:
            removed, added = set(), set()
            for line in p.diff_text.splitlines():
                if line.startswith("-") and not line.startswith("---"):
                    removed.update(_DEF_RE.findall(line))
                elif line.startswith("+") and not line.startswith("+++"):
                    added.update(_DEF_RE.findall(line))
            gone = removed - added
            new = added - removed
            if len(gone) == 1 and len(new) == 1:
                pairs.append((gone.pop(), new.pop()))

    final: dict[str, str] = {}
    for old, new in pairs:
        # collapse earlier chains ending at `old`
        for k, v in list(final.items()):
            if v == old:
                final[k] = new
        final[old] = new
    return {k: v for k, v in final.items() if k != v}
