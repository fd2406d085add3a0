import json
from pathlib import Path

import pytest

from smartnote.cli import main
from smartnote.metrics import commit_coverage
from smartnote.pipeline import (
    GenerationOptions,
    build_mock_provider,
    generate_release_note,
    load_model_bundle,
)
from smartnote.settings import Structure, WritingStyle

DATA = Path(__file__).parent / "data"


def _options(repo, **kw):
    kw.setdefault("from_tag", "v1.0.0")
    kw.setdefault("to_tag", "v1.1.0")
    return GenerationOptions(repo=str(repo), **kw)


def test_matches_golden_note(fixture_repo):
    result = generate_release_note(_options(fixture_repo))
    golden = (DATA / "golden_note.md").read_text(encoding="utf-8")
    assert result.markdown == golden


def test_consecutive_runs_are_byte_identical(fixture_repo):
    first = generate_release_note(_options(fixture_repo)).markdown
    second = generate_release_note(_options(fixture_repo)).markdown
    assert first.encode("utf-8") == second.encode("utf-8")


def test_mock_generation_opens_no_sockets(fixture_repo, no_network):
    result = generate_release_note(_options(fixture_repo))
    assert result.markdown  # completed fully offline


def test_self_coverage_is_total_with_zero_mst(all_repos, no_network):
    for repo, from_tag, to_tag in all_repos:
        result = generate_release_note(GenerationOptions(
            repo=str(repo), from_tag=from_tag, to_tag=to_tag,
            mst=0.0, group=False,
        ))
        assert commit_coverage(result.markdown, result.commits) == 1.0, repo


def test_mst_filtering_is_nested_descending(fixture_repo):
    def kept(mst):
        result = generate_release_note(_options(fixture_repo, mst=mst))
        return {
            sha
            for section in result.note.sections
            for entry in section.entries
            for sha in entry.member_shas
        }

    sets = [kept(m) for m in (0.05, 0.10, 0.15, 0.20)]
    for bigger, smaller in zip(sets, sets[1:]):
        assert smaller <= bigger


def test_settings_provenance_lands_in_metadata(fixture_repo):
    result = generate_release_note(_options(fixture_repo, mst=0.07))
    sources = result.note.metadata["sources"]
    assert "mst:cli" in sources
    assert "domain:inferred" in sources
    assert result.settings.mst == 0.07


def test_config_file_between_cli_and_inference(fixture_repo, tmp_path):
    config = tmp_path / "conf"
    config.write_text("mst=0.18\nstructure=change-priority\n",
                      encoding="utf-8")
    result = generate_release_note(
        _options(fixture_repo, mst=0.07, config_path=str(config)))
    # cli beats config for mst; config beats default for structure
    assert result.settings.mst == 0.07
    assert result.settings.structure == Structure.CHANGE_PRIORITY
    assert result.settings.provenance["structure"] == "config"
    assert result.note.sections[0].heading == "Changes"


def test_high_mst_triggers_single_entry_guard(fixture_repo):
    result = generate_release_note(_options(fixture_repo, mst=0.9))
    entries = [e for s in result.note.sections for e in s.entries]
    assert len(entries) == 1
    assert result.note.metadata["warnings"]


def test_expository_style_makes_zero_llm_calls(fixture_repo):
    provider = build_mock_provider()
    result = generate_release_note(_options(
        fixture_repo, style=WritingStyle.EXPOSITORY, provider=provider,
        domain=None,
    ))
    summary_calls = [c for c in provider.calls if c == "commit-summary"]
    assert summary_calls == []
    # entries are verbatim commit titles
    flat = result.markdown
    assert "feat: add config file parser" in flat


def test_raw_llm_ablation_skips_structure(fixture_repo):
    result = generate_release_note(_options(fixture_repo, raw_llm=True))
    assert "##" not in result.markdown
    assert result.note is None
    assert "feat: add config file parser" in result.markdown


def test_no_composer_ablation_is_flat(fixture_repo):
    result = generate_release_note(_options(fixture_repo, no_composer=True))
    assert "## " not in result.markdown
    assert result.markdown.count("- ") >= 4


def test_random_context_is_seeded(fixture_repo):
    one = generate_release_note(_options(fixture_repo, random_context=True,
                                         seed=11))
    two = generate_release_note(_options(fixture_repo, random_context=True,
                                         seed=11))
    other = generate_release_note(_options(fixture_repo, random_context=True,
                                           seed=12))
    assert one.settings.domain == two.settings.domain
    assert one.settings.provenance["domain"] == "random"
    # a different seed may or may not land elsewhere; the markdown stays valid
    assert other.markdown.startswith("# ")


def test_three_ablations_are_structurally_distinct(fixture_repo):
    base = generate_release_note(_options(fixture_repo)).markdown
    raw = generate_release_note(_options(fixture_repo, raw_llm=True)).markdown
    flat = generate_release_note(_options(fixture_repo, no_composer=True)).markdown
    assert len({base, raw, flat}) == 3
    assert "## " in base and "## " not in raw and "## " not in flat


def test_grouping_toggle_changes_entry_count(fixture_repo):
    grouped = generate_release_note(_options(fixture_repo, mst=0.0))
    ungrouped = generate_release_note(_options(fixture_repo, mst=0.0,
                                               group=False))
    n = lambda r: sum(len(s.entries) for s in r.note.sections)
    assert n(ungrouped) > n(grouped)


# --- model bundle loading ---


def test_bundle_accepts_single_model(tmp_path):
    from smartnote.default_model import build_default_models
    from smartnote.model import model_to_dict

    cat, _ = build_default_models(dim=8)
    path = tmp_path / "cat.json"
    path.write_text(json.dumps(model_to_dict(cat)), encoding="utf-8")
    bundle = load_model_bundle(path)
    assert set(bundle) == {"category"}


def test_bundle_accepts_pair(tmp_path):
    from smartnote.default_model import build_default_models
    from smartnote.model import model_to_dict

    cat, sig = build_default_models(dim=8)
    path = tmp_path / "pair.json"
    path.write_text(json.dumps({
        "category": model_to_dict(cat),
        "significance": model_to_dict(sig),
    }), encoding="utf-8")
    bundle = load_model_bundle(path)
    assert set(bundle) == {"category", "significance"}


def test_bundle_rejects_garbage(tmp_path):
    from smartnote.errors import ParseError

    path = tmp_path / "junk.json"
    path.write_text("[1, 2, 3]", encoding="utf-8")
    with pytest.raises(ParseError):
        load_model_bundle(path)


# --- CLI surface ---


def test_cli_generate_matches_golden(fixture_repo, tmp_path, capsys):
    out = tmp_path / "note.md"
    code = main(["generate", "--repo", str(fixture_repo),
                 "--from", "v1.0.0", "--to", "v1.1.0",
                 "--output", str(out)])
    assert code == 0
    golden = (DATA / "golden_note.md").read_text(encoding="utf-8")
    assert out.read_text(encoding="utf-8") == golden


def test_cli_exit_codes(fixture_repo, tmp_path):
    # empty range
    assert main(["generate", "--repo", str(fixture_repo),
                 "--from", "v1.0.0", "--to", "v1.0.0"]) == 2
    # bad flags
    assert main(["generate", "--repo", str(fixture_repo),
                 "--from", "v1.0.0"]) == 4
    assert main(["generate", "--repo", str(fixture_repo),
                 "--from", "v1.0.0", "--to", "v1.1.0", "--mst", "3"]) == 4
    assert main(["generate", "--repo", str(fixture_repo),
                 "--from", "v1.0.0", "--to", "nope"]) == 4
    assert main(["no-such-command"]) == 4


def test_cli_provider_failure_exits_three(fixture_repo, monkeypatch):
    from smartnote import pipeline
    from smartnote.errors import ProviderError

    class Boom:
        def complete(self, *a, **k):
            raise ProviderError(500, "persistent failure")

    monkeypatch.setattr(pipeline, "build_mock_provider", Boom)
    assert main(["generate", "--repo", str(fixture_repo),
                 "--from", "v1.0.0", "--to", "v1.1.0"]) == 3


def test_cli_evaluate_golden_fixture(capsys):
    code = main(["evaluate", str(DATA / "golden_note.md"),
                 str(DATA / "golden_commits.txt"), "--json"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    report = payload[str(DATA / "golden_note.md")]
    assert report["success"] is True
    assert 0.0 < report["commit_coverage"] <= 1.0


def test_cli_evaluate_unreadable_input_exits_four(tmp_path):
    assert main(["evaluate", str(tmp_path / "missing.md"),
                 str(tmp_path / "missing.txt")]) == 4


def test_cli_analyze_table(fixture_repo, capsys):
    code = main(["analyze", "--repo", str(fixture_repo),
                 "--from", "v1.0.0", "--to", "v1.1.0", "--json"])
    assert code == 0
    rows = json.loads(capsys.readouterr().out)
    assert len(rows) == 7
    assert {"sha", "category", "confidence", "significance", "flagged"} \
        <= set(rows[0])


def test_cli_analyze_missing_model_exits_four(fixture_repo, tmp_path, capsys):
    missing = tmp_path / "absent.json"
    code = main(["analyze", "--repo", str(fixture_repo),
                 "--from", "v1.0.0", "--to", "v1.1.0",
                 "--model", str(missing)])
    assert code == 4
    assert str(missing) in capsys.readouterr().err
