from datetime import datetime, timezone

import pytest

from smartnote.composer import (
    SECTION_ORDER,
    ReleaseNote,
    Section,
    merge_related,
    organise,
    personalise,
    render_markdown,
    reorder_sections,
    update_entity_mentions,
)
from smartnote.errors import NoEntries, ProviderError
from smartnote.llm import CompletionParams, MockProvider, load_templates
from smartnote.llm.providers import merge_handler
from smartnote.settings import ProjectDomain, Settings, Structure
from smartnote.summariser import ReleaseNoteEntry

TEMPLATES = load_templates()
PARAMS = CompletionParams()
T0 = datetime(2024, 3, 1, tzinfo=timezone.utc)


def _entry(summary, category="feat", significance=0.5, sha="a", pr=None):
    return ReleaseNoteEntry(
        summary=summary, member_shas=(sha * 40,), pr_number=pr,
        author="dev", date=T0, significance=significance, category=category,
    )


def _settings(**kw):
    kw.setdefault("domain", ProjectDomain.SOFTWARE_TOOLS)
    kw.setdefault("mst", 0.1)
    return Settings(**kw)


def test_organise_by_change_type():
    entries = [_entry("a", "feat"), _entry("b", "fix"), _entry("c", "feat")]
    sections = organise(entries, Structure.CHANGE_TYPE)
    by_heading = {s.heading: [e.summary for e in s.entries] for s in sections}
    assert by_heading == {"Features": ["a", "c"], "Bug Fixes": ["b"]}


def test_organise_by_priority_sorts_and_single_section():
    entries = [_entry("low", significance=0.1), _entry("high", significance=0.9),
               _entry("mid", significance=0.5)]
    sections = organise(entries, Structure.CHANGE_PRIORITY)
    assert len(sections) == 1
    assert sections[0].heading == "Changes"
    assert [e.summary for e in sections[0].entries] == ["high", "mid", "low"]


def test_organise_by_module_uses_top_path_prefix(fixture_repo):
    from smartnote.miner import detect_pr_links, resolve_range

    commits = detect_pr_links(resolve_range(fixture_repo, "v1.0.0", "v1.1.0"))
    by_sha = {c.sha: c for c in commits}
    entries = [
        ReleaseNoteEntry(summary=c.title, member_shas=(c.sha,),
                         pr_number=c.pr_number, author=c.author,
                         date=c.timestamp, significance=0.5,
                         category="feat")
        for c in commits
    ]
    sections = organise(entries, Structure.AFFECTED_MODULE, by_sha)
    headings = {s.heading for s in sections}
    assert "confcheck" in headings
    assert "docs" in headings


def test_organise_empty_raises():
    with pytest.raises(NoEntries):
        organise([], Structure.CHANGE_TYPE)


def test_merge_collapses_near_duplicates_and_keeps_sha_union():
    entries = [
        _entry("Fixed crash when resizing panes", sha="a"),
        _entry("Fixed crash when resizing panes on Linux", sha="b"),
        _entry("Added keyboard navigation", sha="c"),
    ]
    provider = MockProvider(handlers={"merge-entries": merge_handler})
    sections = merge_related([Section("Features", entries)],
                             Structure.CHANGE_TYPE, provider, TEMPLATES, PARAMS)
    assert len(sections[0].entries) == 2
    merged = sections[0].entries[0]
    assert set(merged.member_shas) == {"a" * 40, "b" * 40}
    assert "resizing panes" in merged.summary
    # information from both inputs is retained
    assert "Linux" in merged.summary


def test_merge_skipped_for_priority_structure():
    entries = [_entry("same words here", sha="a"),
               _entry("same words here too", sha="b")]
    provider = MockProvider(handlers={"merge-entries": merge_handler})
    sections = merge_related([Section("Changes", entries)],
                             Structure.CHANGE_PRIORITY, provider, TEMPLATES,
                             PARAMS)
    assert len(sections[0].entries) == 2
    assert provider.call_count == 0


def test_merge_failure_leaves_section_unmerged():
    class Boom:
        def complete(self, *a, **k):
            raise ProviderError(500, "nope")

    entries = [_entry("identical text", sha="a"), _entry("identical text", sha="b")]
    sections = merge_related([Section("Features", entries)],
                             Structure.CHANGE_TYPE, Boom(), TEMPLATES, PARAMS)
    assert [e.summary for e in sections[0].entries] == [
        "identical text", "identical text"]


def test_dissimilar_entries_never_touch_the_provider():
    entries = [_entry("completely different thing", sha="a"),
               _entry("unrelated work elsewhere", sha="b")]
    provider = MockProvider(handlers={"merge-entries": merge_handler})
    merge_related([Section("Features", entries)], Structure.CHANGE_TYPE,
                  provider, TEMPLATES, PARAMS)
    assert provider.call_count == 0


def test_entity_mentions_rewritten_with_word_boundaries():
    sections = [Section("Features", [
        _entry("Reworked parse for speed; parser unchanged"),
    ])]
    out = update_entity_mentions(sections, {"parse": "load_config"})
    assert out[0].entries[0].summary == \
        "Reworked load_config for speed; parser unchanged"


def test_personalise_filters_by_mst_and_counts_drops():
    sections = [Section("Features", [
        _entry("keep", significance=0.5),
        _entry("drop", significance=0.05),
    ])]
    metadata = {}
    out = personalise(sections, _settings(mst=0.1), metadata=metadata)
    assert [e.summary for e in out[0].entries] == ["keep"]
    assert metadata["dropped_entries"] == 1


def test_personalise_caps_demoted_sections():
    chores = [_entry(f"chore {i}", "chore", significance=0.5 + i / 100)
              for i in range(6)]
    sections = [Section("Chores", chores)]
    out = personalise(sections, _settings(), metadata={})
    assert len(out[0].entries) == 3
    # the cap keeps the most significant ones
    assert out[0].entries[0].summary == "chore 5"


def test_personalise_empty_note_guard_keeps_single_best():
    sections = [
        Section("Features", [_entry("big", significance=0.4)]),
        Section("Chores", [_entry("small", significance=0.2)]),
    ]
    metadata = {}
    out = personalise(sections, _settings(mst=0.9), metadata=metadata)
    assert len(out) == 1
    assert [e.summary for e in out[0].entries] == ["big"]
    assert metadata["warnings"]
    assert metadata["dropped_entries"] == 1


def test_reorder_matches_documented_table_and_is_idempotent():
    headings = ["Chores", "Bug Fixes", "Features", "Documentation", "Tests"]
    sections = [Section(h, [_entry("x")]) for h in headings]
    ordered = reorder_sections(sections)
    assert [s.heading for s in ordered] == [
        "Features", "Bug Fixes", "Tests", "Documentation", "Chores"]
    assert [s.heading for s in reorder_sections(ordered)] == \
        [s.heading for s in ordered]


def test_unknown_headings_rank_between_tests_and_build():
    sections = [Section(h, [_entry("x")])
                for h in ["Build", "confcheck", "Tests"]]
    ordered = reorder_sections(sections)
    assert [s.heading for s in ordered] == ["Tests", "confcheck", "Build"]


def test_reorder_is_stable_for_equal_ranks():
    sections = [Section(h, [_entry("x")]) for h in ["zmod", "amod"]]
    assert [s.heading for s in reorder_sections(sections)] == ["zmod", "amod"]


def test_render_attribution_prefers_pr_number():
    note = ReleaseNote("proj v2", [Section("Features", [
        _entry("With PR", pr=42, sha="a"),
        _entry("Without PR", sha="b"),
    ])])
    md = render_markdown(note)
    assert "- With PR (#42)" in md
    assert f"- Without PR ({'b' * 7})" in md


def test_render_excludes_timestamp_from_metadata_comment():
    note = ReleaseNote("t", [Section("Features", [_entry("x")])],
                       metadata={"mst": "0.12", "generated_at": "now-ish"})
    md = render_markdown(note)
    assert "mst=0.12" in md
    assert "now-ish" not in md


def test_render_is_byte_stable():
    note = ReleaseNote("t", [Section("Features", [_entry("x")])],
                       metadata={"b": 1, "a": 2})
    assert render_markdown(note) == render_markdown(note)
    assert render_markdown(note).endswith("\n")


def test_section_order_covers_all_category_headings():
    from smartnote.composer import CATEGORY_HEADINGS

    missing = set(CATEGORY_HEADINGS.values()) - set(SECTION_ORDER)
    assert not missing
