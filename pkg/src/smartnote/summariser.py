"""Changeset packing and per-changeset summarisation."""

from __future__ import annotations

import logging
import re
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .errors import ProviderError
from .llm import align_decimals, render_prompt
from .llm.budget import DEFAULT_DIFF_BUDGET, BudgetReport, budget_diff
from .llm.providers import CompletionParams
from .settings import WritingStyle

logger = logging.getLogger(__name__)

DEFAULT_PARALLELISM = 4
MAX_SUMMARY_WORDS = 60

STYLE_HINTS = {
    WritingStyle.DESCRIPTIVE: (
        "Rephrase the change plainly so a reader unfamiliar with the "
        "codebase understands what changed."
    ),
    WritingStyle.PERSUASIVE: (
        "Briefly state what changed, then the rationale or impact for the "
        "user (why it matters)."
    ),
}


@dataclass(frozen=True)
class Changeset:
    timestamp: object
    author: str
    message: str
    significance: float
    change_type: str
    diff_text: str
    budget: BudgetReport
    member_shas: tuple[str, ...]
    pr_number: int | None = None

    def __post_init__(self):
        if not self.member_shas:
            raise ValueError("changeset needs at least one member sha")


@dataclass(frozen=True)
class ReleaseNoteEntry:
    summary: str
    member_shas: tuple[str, ...]
    pr_number: int | None
    author: str
    date: object
    significance: float
    category: str

    def __post_init__(self):
        if not self.summary:
            raise ValueError("entry summary must be non-empty")


def _modal_category(members) -> str:
    """Most common category; ties go to the most significant member."""
    counts = Counter(a.category for _, a in members)
    top = max(counts.values())
    candidates = {c for c, n in counts.items() if n == top}
    best = max(
        (m for m in members if m[1].category in candidates),
        key=lambda m: m[1].significance,
    )
    return best[1].category


def pack_changesets(analyses, commits, group: bool,
                    max_diff_tokens: int = DEFAULT_DIFF_BUDGET) -> list[Changeset]:
    """Pair commits with their analyses and pack them into changesets.

    With grouping on, commits sharing a PR number collapse into a single
    changeset: significance is the max over members, the change type is
    the modal category, and the concatenated patches are re-budgeted.
    """
    by_sha = {a.sha: a for a in analyses}

    groups: list[list] = []
    group_index: dict[int, int] = {}
    for commit in commits:
        analysis = by_sha[commit.sha]
        if group and commit.pr_number is not None:
            if commit.pr_number in group_index:
                groups[group_index[commit.pr_number]].append((commit, analysis))
                continue
            group_index[commit.pr_number] = len(groups)
        groups.append([(commit, analysis)])

    changesets = []
    for members in groups:
        commitsets = [c for c, _ in members]
        first, last = commitsets[0], commitsets[-1]
        patches = [p for c in commitsets for p in c.patches]
        diff_text, budget = budget_diff(patches, max_diff_tokens, first.sha)
        if len(members) == 1:
            analysis = members[0][1]
            message = first.message
            significance = analysis.significance
            change_type = analysis.category
        else:
            message = "\n\n".join(c.message for c in commitsets)
            significance = max(a.significance for _, a in members)
            change_type = _modal_category(members)
        changesets.append(Changeset(
            timestamp=last.timestamp,
            author=first.author,
            message=message,
            significance=significance,
            change_type=change_type,
            diff_text=diff_text,
            budget=budget,
            member_shas=tuple(c.sha for c in commitsets),
            pr_number=first.pr_number,
        ))
    return changesets


_SENTENCE_END = re.compile(r"(?<=[.!?])\s+")


def _cap_words(text: str, limit: int = MAX_SUMMARY_WORDS) -> str:
    if len(text.split()) <= limit:
        return text
    kept = []
    used = 0
    for sentence in _SENTENCE_END.split(text):
        words = len(sentence.split())
        if kept and used + words > limit:
            break
        kept.append(sentence)
        used += words
        if used >= limit:
            break
    capped = " ".join(kept)
    words = capped.split()
    if len(words) > limit:
        capped = " ".join(words[:limit])
    logger.info("summary exceeded %d words; truncated at sentence boundary", limit)
    return capped


def summarise_changeset(cs: Changeset, style: WritingStyle, provider,
                        templates, params: CompletionParams | None = None) -> ReleaseNoteEntry:
    """One changeset in, one release note entry out.

    Expository style copies the commit title verbatim and never touches
    the provider; the other styles run the summarisation prompt.
    """
    if style is WritingStyle.EXPOSITORY:
        summary = cs.message.splitlines()[0]
    else:
        prompt = render_prompt(templates["commit-summary"], {
            "style_hint": STYLE_HINTS[style],
            "author": cs.author,
            "date": str(cs.timestamp),
            "change_type": cs.change_type,
            "significance": align_decimals(f"{cs.significance:.2f}"),
            "message": cs.message,
            "diff": cs.diff_text,
        })
        try:
            summary = provider.complete(prompt, params or CompletionParams(),
                                        template_id="commit-summary").strip()
        except ProviderError as exc:
            exc.context = f"changeset {cs.member_shas[0][:7]}"
            raise
        summary = _cap_words(summary)
    return ReleaseNoteEntry(
        summary=summary,
        member_shas=cs.member_shas,
        pr_number=cs.pr_number,
        author=cs.author,
        date=cs.timestamp,
        significance=cs.significance,
        category=cs.change_type,
    )


def summarise_all(changesets, style: WritingStyle, provider, templates,
                  params: CompletionParams | None = None,
                  parallelism: int = DEFAULT_PARALLELISM) -> list[ReleaseNoteEntry]:
    """Summarise every changeset, preserving the original order."""
    if style is WritingStyle.EXPOSITORY or parallelism <= 1:
        return [summarise_changeset(cs, style, provider, templates, params)
                for cs in changesets]
    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        return list(pool.map(
            lambda cs: summarise_changeset(cs, style, provider, templates, params),
            changesets,
        ))
