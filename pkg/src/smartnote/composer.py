"""Release note composition: organisation, merging, entity updates,
personalisation, category ordering, and markdown rendering."""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field, replace
from importlib import resources

from .errors import NoEntries, ProviderError, ProviderTimeout
from .llm import render_prompt
from .llm.providers import CompletionParams
from .settings import ProjectDomain, Structure

logger = logging.getLogger(__name__)

CATEGORY_HEADINGS = {
    "feat": "Features",
    "fix": "Bug Fixes",
    "docs": "Documentation",
    "style": "Code Style",
    "refactor": "Refactoring",
    "perf": "Performance",
    "test": "Tests",
    "build": "Build",
    "ci": "Continuous Integration",
    "chore": "Chores",
    "revert": "Reverts",
}

# fixed top-to-bottom section order; headings not listed here slot in at
# the UNKNOWN_RANK position (between Tests and Build)
SECTION_ORDER = [
    "Breaking Changes",
    "Features",
    "Bug Fixes",
    "Reverts",
    "Performance",
    "Refactoring",
    "Code Style",
    "Tests",
    # unknown headings rank here
    "Build",
    "Continuous Integration",
    "Documentation",
    "Dependencies",
    "Chores",
]
UNKNOWN_RANK = SECTION_ORDER.index("Build") - 0.5

MERGE_SIMILARITY = 0.5
PRIORITY_HEADING = "Changes"
MODULE_FALLBACK_HEADING = "other"

_STOPWORDS = frozenset(
    "a an and are as at be by for from in into is it of on or that the this "
    "to was were with".split()
)


@dataclass
class Section:
    heading: str
    entries: list


@dataclass
class ReleaseNote:
    title: str
    sections: list
    metadata: dict = field(default_factory=dict)


def _load_domain_priorities() -> dict:
    raw = json.loads(
        resources.files("smartnote")
        .joinpath("data/domain_priorities.json")
        .read_text(encoding="utf-8")
    )
    return {ProjectDomain(k): v for k, v in raw.items()}


def organise(entries, structure: Structure, commits_by_sha=None) -> list[Section]:
    """Group entries into sections per the configured structure."""
    if not entries:
        raise NoEntries("cannot organise an empty entry list")
    if structure is Structure.CHANGE_PRIORITY:
        ordered = sorted(
            range(len(entries)),
            key=lambda i: (-entries[i].significance, i),
        )
        return [Section(PRIORITY_HEADING, [entries[i] for i in ordered])]
    if structure is Structure.AFFECTED_MODULE:
        sections: dict[str, Section] = {}
        for entry in entries:
            prefix = _module_prefix(entry, commits_by_sha or {})
            sections.setdefault(prefix, Section(prefix, [])).entries.append(entry)
        return list(sections.values())
    # ChangeType
    sections = {}
    for entry in entries:
        heading = CATEGORY_HEADINGS.get(entry.category, entry.category.title())
        sections.setdefault(heading, Section(heading, [])).entries.append(entry)
    return list(sections.values())


def _module_prefix(entry, commits_by_sha) -> str:
    counts: dict[str, int] = {}
    for sha in entry.member_shas:
        commit = commits_by_sha.get(sha)
        if commit is None:
            continue
        for patch in commit.patches:
            top = patch.path.split("/", 1)[0] if "/" in patch.path else patch.path
            counts[top] = counts.get(top, 0) + 1
    if not counts:
        return MODULE_FALLBACK_HEADING
    return max(sorted(counts), key=lambda k: counts[k])


def _content_words(text: str) -> frozenset[str]:
    return frozenset(
        w for w in re.findall(r"[a-z0-9]+", text.lower()) if w not in _STOPWORDS
    )


def _clusters(entries) -> list[list[int]]:
    """Union-find over pairwise Jaccard similarity of summary words."""
    n = len(entries)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    words = [_content_words(e.summary) for e in entries]
    for i in range(n):
        for j in range(i + 1, n):
            if not words[i] or not words[j]:
                continue
            inter = len(words[i] & words[j])
            union = len(words[i] | words[j])
            if union and inter / union >= MERGE_SIMILARITY:
                parent[find(j)] = find(i)

    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return [groups[k] for k in sorted(groups, key=lambda k: min(groups[k]))]


def _merge_cluster(members, provider, templates, params) -> object:
    prompt = render_prompt(templates["merge-entries"], {
        "heading": "",
        "entries": "\n".join(f"<entry>{e.summary}</entry>" for e in members),
    })
    summary = provider.complete(prompt, params or CompletionParams(),
                                template_id="merge-entries").strip()
    shas = tuple(s for e in members for s in e.member_shas)
    best = max(members, key=lambda e: e.significance)
    prs = {e.pr_number for e in members}
    return replace(
        members[0],
        summary=summary or "; ".join(e.summary for e in members),
        member_shas=shas,
        pr_number=prs.pop() if len(prs) == 1 else None,
        significance=best.significance,
        date=max(e.date for e in members),
    )


def merge_related(sections, structure: Structure, provider, templates,
                  params: CompletionParams | None = None) -> list[Section]:
    """Collapse near-duplicate entries within each section.

    Candidate clusters come from token-overlap similarity; the provider
    writes the merged text. Skipped entirely for the Change Priority
    structure, and a failing provider leaves the section unmerged.
    """
    if structure is Structure.CHANGE_PRIORITY:
        return sections
    merged_sections = []
    for section in sections:
        clusters = _clusters(section.entries)
        if all(len(c) == 1 for c in clusters):
            merged_sections.append(section)
            continue
        try:
            new_entries = []
            for cluster in clusters:
                members = [section.entries[i] for i in cluster]
                if len(members) == 1:
                    new_entries.append(members[0])
                else:
                    new_entries.append(
                        _merge_cluster(members, provider, templates, params)
                    )
            merged_sections.append(Section(section.heading, new_entries))
        except (ProviderError, ProviderTimeout) as exc:
            logger.warning("merge failed for section %r; left unmerged: %s",
                           section.heading, exc)
            merged_sections.append(section)
    return merged_sections


def update_entity_mentions(sections, rename_pairs: dict) -> list[Section]:
    """Rewrite superseded identifiers to their final names.

    Deterministic word-boundary substitution over the rename pairs mined
    from the range's patches; a note with no renames passes through
    unchanged.
    """
    if not rename_pairs:
        return sections
    patterns = [
        (re.compile(r"\b" + re.escape(old) + r"\b"), new)
        for old, new in rename_pairs.items()
    ]

    def rewrite(text: str) -> str:
        for pattern, new in patterns:
            text = pattern.sub(new, text)
        return text

    return [
        Section(s.heading, [replace(e, summary=rewrite(e.summary))
                            for e in s.entries])
        for s in sections
    ]


def personalise(sections, settings, domain_priorities=None, metadata=None):
    """Apply the significance threshold, then the domain's content trims.

    Entries scoring below the MST are dropped (count recorded in the
    metadata). Categories the domain deprioritises are capped at a few
    top entries. If filtering empties the note, the single most
    significant entry is retained instead.
    """
    if domain_priorities is None:
        domain_priorities = _load_domain_priorities()
    metadata = metadata if metadata is not None else {}
    profile = domain_priorities.get(settings.domain, {})
    demoted = set(profile.get("demote", []))
    cap = int(profile.get("max_demoted_entries", 3))

    dropped = 0
    kept_sections = []
    for section in sections:
        entries = [e for e in section.entries if e.significance >= settings.mst]
        dropped += len(section.entries) - len(entries)
        if section.heading in demoted and len(entries) > cap:
            entries = sorted(entries, key=lambda e: -e.significance)[:cap]
            dropped += len([e for e in section.entries
                            if e.significance >= settings.mst]) - cap
        if entries:
            kept_sections.append(Section(section.heading, entries))

    if not kept_sections:
        best_section, best = max(
            ((s, e) for s in sections for e in s.entries),
            key=lambda pair: pair[1].significance,
        )
        logger.warning("all entries fell below mst=%.2f; retaining the most "
                       "significant one", settings.mst)
        metadata.setdefault("warnings", []).append(
            f"all entries below mst={settings.mst:.2f}; retained the most significant"
        )
        dropped = sum(len(s.entries) for s in sections) - 1
        kept_sections = [Section(best_section.heading, [best])]

    metadata["dropped_entries"] = dropped
    return kept_sections


def reorder_sections(sections) -> list[Section]:
    """Stable-sort sections by the documented priority table."""
    rank = {heading: i for i, heading in enumerate(SECTION_ORDER)}
    return sorted(sections, key=lambda s: rank.get(s.heading, UNKNOWN_RANK))


def _attribution(entry) -> str:
    if entry.pr_number is not None:
        return f" (#{entry.pr_number})"
    return f" ({entry.member_shas[0][:7]})"


def render_markdown(note: ReleaseNote) -> str:
    """Render the note as UTF-8 markdown, byte-stable for equal inputs."""
    lines = []
    if note.title:
        lines += [f"# {note.title}", ""]
    for section in note.sections:
        lines.append(f"## {section.heading}")
        for entry in section.entries:
            lines.append(f"- {entry.summary}{_attribution(entry)}")
        lines.append("")
    comment = _metadata_comment(note.metadata)
    if comment:
        lines += [comment, ""]
    return "\n".join(lines).rstrip("\n") + "\n"


def _metadata_comment(metadata: dict) -> str:
    if not metadata:
        return ""
    parts = []
    for key in sorted(metadata):
        if key == "generated_at":
            continue  # timestamps would break byte-stable output
        value = metadata[key]
        if isinstance(value, (list, tuple)):
            value = "; ".join(str(v) for v in value)
        parts.append(f"{key}={value}")
    return "<!-- smartnote " + " | ".join(parts) + " -->"
