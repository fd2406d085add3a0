"""Command-line entry points: generate, evaluate, analyze.

Exit codes: 0 success, 2 empty tag range, 3 provider hard failure,
4 bad flags or unreadable inputs, 1 anything else.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from pathlib import Path

import click

from .errors import (
    EmptyRange,
    NotARepository,
    ParseError,
    ProviderError,
    ProviderTimeout,
    SmartNoteError,
    TagNotFound,
)
from .metrics import evaluate_note
from .model import predict_significance
from .pipeline import (
    GenerationOptions,
    _parse_enum,
    generate_release_note,
    load_model_bundle,
)
from .settings import ProjectDomain, Structure, WritingStyle

EXIT_OK = 0
EXIT_GENERIC = 1
EXIT_EMPTY_RANGE = 2
EXIT_PROVIDER = 3
EXIT_USAGE = 4


@click.group()
def cli():
    """Generate and evaluate release notes mined from git history."""


@cli.command()
@click.option("--repo", default=".", show_default=True,
              help="Path to the git checkout.")
@click.option("--from", "from_tag", required=True,
              help="Previous release tag.")
@click.option("--to", "to_tag", required=True, help="New release tag.")
@click.option("--domain", default=None,
              help="Project domain (overrides inference).")
@click.option("--style", default=None,
              help="Writing style: expository, descriptive, or persuasive.")
@click.option("--structure", default=None,
              help="Note structure: change-type, affected-module, or "
                   "change-priority.")
@click.option("--mst", type=float, default=None,
              help="Minimum significance threshold in [0,1].")
@click.option("--group/--no-group", "group", default=None,
              help="Collapse commits sharing a pull request.")
@click.option("--provider", "provider_kind",
              type=click.Choice(["live", "mock"]), default=None,
              help="Completion provider.")
@click.option("--model", "model_path", default=None,
              help="Path to a model file or category/significance bundle.")
@click.option("--output", "-o", default=None,
              help="Write the note here instead of stdout.")
@click.option("--config", "config_path", default=None,
              help="Config file (defaults to .smartnote in the repo).")
@click.option("--seed", type=int, default=None,
              help="Seed for all sampled decisions (default 42).")
@click.option("--raw-llm", is_flag=True,
              help="Ablation: one naive prompt over the raw messages.")
@click.option("--no-composer", is_flag=True,
              help="Ablation: emit the flat entry list, skip composition.")
@click.option("--random-context", is_flag=True,
              help="Ablation: seeded random domain, unknown release type.")
def generate(repo, from_tag, to_tag, domain, style, structure, mst, group,
             provider_kind, model_path, output, config_path, seed, raw_llm,
             no_composer, random_context):
    """Generate a release note for the range FROM..TO."""
    if mst is not None and not 0.0 <= mst <= 1.0:
        raise click.UsageError(f"--mst must be in [0,1], got {mst}")
    options = GenerationOptions(
        repo=repo,
        from_tag=from_tag,
        to_tag=to_tag,
        domain=_parse_enum(ProjectDomain, domain) if domain else None,
        style=_parse_enum(WritingStyle, style) if style else None,
        structure=_parse_enum(Structure, structure) if structure else None,
        mst=mst,
        group=group,
        provider_kind=provider_kind,
        model_path=model_path,
        seed=seed,
        raw_llm=raw_llm,
        no_composer=no_composer,
        random_context=random_context,
        config_path=config_path,
    )
    result = generate_release_note(options)
    if output:
        Path(output).write_text(result.markdown, encoding="utf-8")
    else:
        click.echo(result.markdown, nl=False)


@dataclass(frozen=True)
class _CommitRef:
    sha: str
    pr_number: int | None


def _read_commit_list(path) -> list[_CommitRef]:
    refs = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        sha, _, pr = line.partition(",")
        refs.append(_CommitRef(sha.strip(), int(pr) if pr.strip() else None))
    if not refs:
        raise click.UsageError(f"no commits listed in {path}")
    return refs


def _report_rows(report) -> list[tuple[str, str]]:
    return [
        ("commit coverage", f"{report.commit_coverage:.3f}"),
        ("token count", str(report.token_count)),
        ("information entropy", f"{report.information_entropy:.4f} bits"),
        ("ARI", f"{report.ari:.2f}"),
        ("Dale-Chall", f"{report.dale_chall:.2f}"),
        ("entity percentage", f"{report.entity_percentage:.3f}"),
        ("success", "yes" if report.success else "no"),
    ]


@cli.command()
@click.argument("note", type=click.Path())
@click.argument("commit_list", type=click.Path())
@click.option("--compare", default=None,
              help="Second note to evaluate side by side.")
@click.option("--json", "as_json", is_flag=True, help="Emit JSON only.")
def evaluate(note, commit_list, compare, as_json):
    """Score NOTE against the commits listed in COMMIT_LIST (sha[,pr] lines)."""
    try:
        markdown = Path(note).read_text(encoding="utf-8")
        refs = _read_commit_list(commit_list)
        others = []
        if compare:
            others.append((compare, Path(compare).read_text(encoding="utf-8")))
    except OSError as exc:
        raise click.UsageError(str(exc)) from exc

    reports = [(note, evaluate_note(markdown, refs))]
    reports += [(name, evaluate_note(text, refs)) for name, text in others]

    if as_json:
        payload = {name: r.to_dict() for name, r in reports}
        click.echo(json.dumps(payload, indent=2, sort_keys=True))
        return
    click.echo(json.dumps({name: r.to_dict() for name, r in reports},
                          sort_keys=True))
    width = max(len(label) for label, _ in _report_rows(reports[0][1]))
    header = " | ".join(name for name, _ in reports)
    click.echo(f"{'metric'.ljust(width)} | {header}")
    for i, (label, _) in enumerate(_report_rows(reports[0][1])):
        cells = " | ".join(_report_rows(r)[i][1] for _, r in reports)
        click.echo(f"{label.ljust(width)} | {cells}")


@cli.command()
@click.option("--repo", default=".", show_default=True)
@click.option("--from", "from_tag", default=None)
@click.option("--to", "to_tag", default=None)
@click.option("--model", "model_path", default=None,
              help="Model file or bundle; defaults to the built-in models.")
@click.option("--json", "as_json", is_flag=True)
@click.option("--replay", default=None,
              help="Replay a JSONL fixture of (vector, prediction) pairs "
                   "and print the maximum deviation.")
def analyze(repo, from_tag, to_tag, model_path, as_json, replay):
    """Print per-commit model outputs, or replay prediction fixtures."""
    if replay:
        if not model_path:
            raise click.UsageError("--replay requires --model")
        bundle = _load_bundle_usage(model_path)
        deviation = replay_fixtures(replay, bundle)
        click.echo(f"max deviation: {deviation:.9f}")
        return
    if not (from_tag and to_tag):
        raise click.UsageError("--from and --to are required without --replay")

    from . import miner
    from .github import degraded_context
    from .pipeline import _complete_bundle, analyse_commits

    bundle = _load_bundle_usage(model_path) if model_path else {}
    category_model, significance_model = _complete_bundle(bundle)
    commits = miner.resolve_range(repo, from_tag, to_tag)
    commits = miner.detect_pr_links(commits)
    release = miner.compute_release_context(commits, from_tag, to_tag)
    project = degraded_context(Path(repo).resolve().name, from_tag, to_tag)
    analyses = analyse_commits(commits, release, project,
                               category_model, significance_model)
    if as_json:
        click.echo(json.dumps([{
            "sha": a.sha, "category": a.category,
            "confidence": a.category_confidence,
            "significance": a.significance, "flagged": a.flagged,
        } for a in analyses], indent=2))
        return
    click.echo(f"{'sha':7}  {'category':10}  {'conf':>6}  {'signif':>6}")
    for a in analyses:
        flag = "  !" if a.flagged else ""
        click.echo(f"{a.sha[:7]}  {a.category:10}  "
                   f"{a.category_confidence:6.3f}  {a.significance:6.3f}{flag}")


def _load_bundle_usage(model_path):
    try:
        return load_model_bundle(model_path)
    except (ParseError, SmartNoteError) as exc:
        raise click.UsageError(str(exc)) from exc


def replay_fixtures(path, bundle) -> float:
    """Max absolute deviation between stored and recomputed predictions."""
    worst = 0.0
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line:
            continue
        record = json.loads(line)
        task = record["task"]
        vector = record["vector"]
        expected = record["expected"]
        model = bundle.get(task)
        if model is None:
            raise click.UsageError(f"fixture needs a {task} model")
        if task == "category":
            from .model import _margins, softmax

            probs = softmax(_margins(vector, model))
            worst = max(worst, max(abs(p - e)
                                   for p, e in zip(probs, expected)))
        else:
            worst = max(worst, abs(predict_significance(vector, model)
                                   - expected))
    return worst


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return EXIT_USAGE
    except click.ClickException as exc:
        exc.show()
        return EXIT_USAGE
    except click.Abort:
        return EXIT_GENERIC
    except EmptyRange as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_EMPTY_RANGE
    except (ProviderError, ProviderTimeout) as exc:
        click.echo(f"error: provider failure: {exc}", err=True)
        return EXIT_PROVIDER
    except (NotARepository, TagNotFound, ParseError) as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_USAGE
    except SmartNoteError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_GENERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
