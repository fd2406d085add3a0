"""Context-size budgeting for commit diffs."""

from __future__ import annotations

import logging
from dataclasses import dataclass

from ..tokens import count_tokens

logger = logging.getLogger(__name__)

DEFAULT_DIFF_BUDGET = 6000  # approximate tokens per commit diff
MIN_DIFF_BUDGET = 64


@dataclass(frozen=True)
class BudgetReport:
    commit_sha: str
    original_tokens: int
    retained_tokens: int
    truncated: bool


def budget_diff(patches, max_tokens: int, commit_sha: str = ""):
    """Trim a commit's patches to fit an approximate token budget.

    Whole files are dropped, largest diff first, until the remainder fits.
    Returns the retained diff text plus a report; truncation logs a warning
    once (this function is called once per commit).
    """
    if max_tokens < MIN_DIFF_BUDGET:
        raise ValueError(f"max_tokens must be >= {MIN_DIFF_BUDGET}")
    kept = list(patches)

    def joined(items):
        return "\n".join(p.diff_text for p in items)

    original = count_tokens(joined(kept))
    while kept and count_tokens(joined(kept)) > max_tokens:
        # drop the largest remaining diff; ties go to the later file
        largest = max(
            range(len(kept)),
            key=lambda i: (count_tokens(kept[i].diff_text), i),
        )
        del kept[largest]

    text = joined(kept)
    retained = count_tokens(text)
    truncated = retained < original
    if truncated:
        logger.warning(
            "diff for commit %s exceeds %d tokens; dropped %d of %d files",
            commit_sha[:7] or "<unknown>", max_tokens,
            len(list(patches)) - len(kept), len(list(patches)),
        )
    return text, BudgetReport(
        commit_sha=commit_sha,
        original_tokens=original,
        retained_tokens=retained,
        truncated=truncated,
    )
