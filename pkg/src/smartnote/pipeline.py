"""End-to-end release note generation.

Wires the five stages together: mining, settings, per-commit analysis,
summarisation, and composition. Also hosts the ablation variants (raw
prompt, composer bypass, randomised context) so the CLI stays thin.
"""

from __future__ import annotations

import json
import logging
import random
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from . import composer, miner, summariser
from .default_model import build_default_models
from .errors import ParseError, SmartNoteError
from .features import assemble_features
from .github import degraded_context, fetch_remote_context
from .llm import (
    CompletionParams,
    HttpProvider,
    MockProvider,
    load_templates,
    merge_handler,
    render_prompt,
)
from .llm.budget import DEFAULT_DIFF_BUDGET
from .model import (
    FALLBACK_CATEGORY,
    FALLBACK_SIGNIFICANCE,
    CommitAnalysis,
    model_from_dict,
    predict_category,
    predict_significance,
)
from .settings import (
    DEFAULT_MST,
    ProjectDomain,
    Settings,
    Structure,
    WritingStyle,
    assess_commit_message_quality,
    classify_project_domain,
    load_config_file,
    parse_config_file,
    select_writing_style,
    tune_mst,
)
from .summariser import DEFAULT_PARALLELISM
from .tokens import count_tokens

logger = logging.getLogger(__name__)

DEFAULT_SEED = 42
TOKENIZER_LABEL = "approx-bytes-v1"


@dataclass
class GenerationOptions:
    repo: str
    from_tag: str
    to_tag: str
    domain: ProjectDomain | None = None
    style: WritingStyle | None = None
    structure: Structure | None = None
    mst: float | None = None
    group: bool | None = None
    provider_kind: str | None = None  # "mock" | "live"
    model_path: str | None = None
    seed: int | None = None
    raw_llm: bool = False
    no_composer: bool = False
    random_context: bool = False
    max_diff_tokens: int = DEFAULT_DIFF_BUDGET
    parallelism: int = DEFAULT_PARALLELISM
    provider: object = None  # injected provider wins over provider_kind
    base_url: str | None = None
    config_path: str | None = None


@dataclass
class GenerationResult:
    markdown: str
    note: composer.ReleaseNote | None
    commits: list
    analyses: list
    settings: Settings
    project: object


# --- deterministic mock behaviour -------------------------------------

_MESSAGE_LINE = re.compile(r"^Message: (.*)$", re.MULTILINE)
_MESSAGE_TAG = re.compile(r"<message>\s*(.*?)\s*</message>", re.DOTALL)


def _summary_handler(prompt: str) -> str:
    m = _MESSAGE_LINE.search(prompt)
    if not m:
        return "Minor internal changes."
    title = m.group(1).strip()
    # strip the conventional-commit prefix and any PR trailer so the
    # entry reads as prose (attribution re-adds the reference)
    title = re.sub(r"^\w+(\([\w./-]+\))?!?:\s*", "", title)
    title = re.sub(r"\s*\(#\d+\)\s*$", "", title)
    return (title[:1].upper() + title[1:]).rstrip(".") + "."


def _quality_handler(prompt: str) -> str:
    m = _MESSAGE_TAG.search(prompt)
    message = m.group(1) if m else ""
    first = message.splitlines()[0] if message else ""
    return "good" if len(first.split()) >= 3 else "poor"


def _domain_handler(prompt: str) -> str:
    from .settings import heuristic_domain

    body = prompt.split("<project>", 1)[-1]
    return heuristic_domain(body).value


def _raw_note_handler(prompt: str) -> str:
    _, _, tail = prompt.partition("commit messages:")
    lines = [ln.strip() for ln in tail.splitlines() if ln.strip()]
    return "\n".join(f"- {ln.lstrip('- ')}" for ln in lines)


def build_mock_provider() -> MockProvider:
    """Mock wired with handlers mirroring each template's intent."""
    return MockProvider(handlers={
        "commit-summary": _summary_handler,
        "merge-entries": merge_handler,
        "commit-quality": _quality_handler,
        "domain-classification": _domain_handler,
        "raw-release-note": _raw_note_handler,
    })


# --- settings resolution ----------------------------------------------


def _parse_enum(enum_cls, text: str):
    for member in enum_cls:
        if text.strip().lower() in (member.value.lower(), member.name.lower()):
            return member
    raise SmartNoteError(
        f"invalid {enum_cls.__name__} value {text!r}; "
        f"expected one of {[m.value for m in enum_cls]}"
    )


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise SmartNoteError(f"invalid boolean value {text!r}")


def _resolve(name, cli_value, config, parse):
    """One field through the precedence chain: cli > config > nothing."""
    if cli_value is not None:
        return cli_value, "cli"
    if name in config:
        return parse(config[name]), "config"
    return None, None


def load_model_bundle(path) -> dict:
    """Read a model file holding either one model or a category +
    significance pair; missing halves fall back to the built-in models."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read model file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ParseError(f"model file {path} is not a JSON object")
    if "task" in data:
        model = model_from_dict(data)
        return {model.task: model}
    bundle = {}
    for task in ("category", "significance"):
        if task in data:
            bundle[task] = model_from_dict(data[task])
    if not bundle:
        raise ParseError(
            f"model file {path} holds neither a model nor a category/"
            f"significance bundle"
        )
    return bundle


def _complete_bundle(bundle: dict) -> tuple:
    default_cat, default_sig = None, None
    if "category" not in bundle or "significance" not in bundle:
        default_cat, default_sig = build_default_models()
    return (bundle.get("category", default_cat),
            bundle.get("significance", default_sig))


def analyse_commits(commits, release, project, category_model,
                    significance_model) -> list[CommitAnalysis]:
    """Run both classifiers over every commit.

    A commit whose feature assembly or inference fails is flagged and
    given the conservative fallback (chore, barely significant) rather
    than aborting the whole range.
    """
    analyses = []
    for commit in commits:
        try:
            fv_cat = assemble_features(commit, release, project, category_model)
            category, confidence = predict_category(fv_cat, category_model)
            fv_sig = assemble_features(commit, release, project, significance_model)
            significance = predict_significance(fv_sig, significance_model)
            analyses.append(CommitAnalysis(
                sha=commit.sha, category=category,
                category_confidence=confidence, significance=significance,
            ))
        except SmartNoteError as exc:
            logger.warning("analysis failed for %s; using fallback: %s",
                           commit.sha[:7], exc)
            analyses.append(CommitAnalysis(
                sha=commit.sha, category=FALLBACK_CATEGORY,
                category_confidence=0.0, significance=FALLBACK_SIGNIFICANCE,
                flagged=True,
            ))
    return analyses


def _local_readme(repo_path) -> str:
    for name in ("README.md", "README.rst", "README.txt", "README"):
        path = Path(repo_path) / name
        if path.is_file():
            return path.read_text(encoding="utf-8", errors="replace")
    return ""


def _project_context(options, config):
    """Remote project facts, or a degraded stand-in when offline.

    Mock-mode runs never touch the network; they read the local README
    so domain inference still has something to chew on.
    """
    repo_name = Path(options.repo).resolve().name
    readme = _local_readme(options.repo)
    kind = options.provider_kind or config.get("provider") or "mock"
    if kind != "live":
        return degraded_context(repo_name, options.from_tag, options.to_tag,
                                readme=readme)
    remote = ""
    try:
        remote = miner._git(options.repo, "config", "--get",
                            "remote.origin.url", check=False).strip()
    except OSError:
        pass
    if not remote:
        return degraded_context(repo_name, options.from_tag, options.to_tag,
                                readme=readme)
    try:
        context = fetch_remote_context(remote, options.from_tag, options.to_tag)
    except SmartNoteError as exc:
        logger.warning("remote context unavailable (%s); degraded mode", exc)
        return degraded_context(repo_name, options.from_tag, options.to_tag,
                                readme=readme)
    if context.degraded and not context.readme:
        return degraded_context(context.name, options.from_tag, options.to_tag,
                                readme=readme)
    return context


def _resolve_provider(options, config):
    if options.provider is not None:
        return options.provider, "cli"
    kind, source = _resolve("provider", options.provider_kind, config, str)
    kind = kind or "mock"
    source = source or "default"
    if kind == "live":
        return HttpProvider(**({"base_url": options.base_url}
                               if options.base_url else {})), source
    if kind != "mock":
        raise SmartNoteError(f"unknown provider kind {kind!r}")
    return build_mock_provider(), source


def resolve_settings(options: GenerationOptions, config: dict, commits,
                     project, provider, templates,
                     params: CompletionParams) -> Settings:
    """Fill every setting through cli > config > inferred > default."""
    provenance = {}

    seed, seed_src = _resolve("seed", options.seed, config, int)
    if seed is None:
        seed, seed_src = DEFAULT_SEED, "default"
    provenance["seed"] = seed_src

    rng = random.Random(seed)

    domain, domain_src = _resolve(
        "domain", options.domain, config,
        lambda t: _parse_enum(ProjectDomain, t),
    )
    if options.random_context:
        domain = rng.choice(list(ProjectDomain))
        domain_src = "random"
    elif domain is None:
        domain, domain_src = classify_project_domain(project, provider,
                                                     templates, params)
    provenance["domain"] = domain_src

    style, style_src = _resolve(
        "style", options.style, config,
        lambda t: _parse_enum(WritingStyle, t),
    )
    quality = assess_commit_message_quality(commits, provider, templates,
                                            params, seed=seed)
    resolved_style = select_writing_style(domain, quality, style)
    if style is None:
        style_src = "inferred"
    elif resolved_style is not style:
        style_src += "+quality-fallback"
    provenance["style"] = style_src

    structure, structure_src = _resolve(
        "structure", options.structure, config,
        lambda t: _parse_enum(Structure, t),
    )
    if structure is None:
        structure, structure_src = Structure.CHANGE_TYPE, "default"
    provenance["structure"] = structure_src

    mst, mst_src = _resolve("mst", options.mst, config, float)
    if mst is None:
        mst, mst_src = DEFAULT_MST, "default"  # tuned later
    provenance["mst"] = mst_src

    group, group_src = _resolve("group", options.group, config, _parse_bool)
    if group is None:
        group, group_src = True, "default"
    provenance["group"] = group_src

    return Settings(
        domain=domain, writing_style=resolved_style, structure=structure,
        mst=mst, group_commits=group, seed=seed, provenance=provenance,
    )


def _render_raw(project_name, version, commits, provider, templates,
                params) -> str:
    prompt = render_prompt(templates["raw-release-note"], {
        "project": project_name,
        "version": version,
        "commit_messages": "\n".join(c.title for c in commits),
    })
    body = provider.complete(prompt, params, template_id="raw-release-note")
    return body.rstrip("\n") + "\n"


def _render_flat(title, entries) -> str:
    lines = [f"# {title}", ""]
    for entry in entries:
        lines.append(f"- {entry.summary}{composer._attribution(entry)}")
    return "\n".join(lines) + "\n"


def generate_release_note(options: GenerationOptions) -> GenerationResult:
    commits = miner.resolve_range(options.repo, options.from_tag, options.to_tag)
    commits = miner.detect_pr_links(commits)

    if options.config_path:
        config = parse_config_file(options.config_path)
    else:
        config = load_config_file(options.repo)
    templates = load_templates()
    params = CompletionParams()
    provider, provider_src = _resolve_provider(options, config)
    project = _project_context(options, config)

    release = miner.compute_release_context(
        commits, options.from_tag, options.to_tag
    )
    settings = resolve_settings(options, config, commits, project, provider,
                                templates, params)
    settings.provenance["provider"] = provider_src
    project = _with_domain(project, settings.domain)
    if options.random_context:
        release = _unknown_release(release)

    if options.raw_llm:
        markdown = _render_raw(project.name, options.to_tag, commits,
                               provider, templates, params)
        return GenerationResult(markdown, None, commits, [], settings, project)

    model_path, _ = _resolve("model", options.model_path, config, str)
    if model_path:
        bundle = load_model_bundle(model_path)
    else:
        bundle = {}
    category_model, significance_model = _complete_bundle(bundle)

    analyses = analyse_commits(commits, release, project,
                               category_model, significance_model)

    changesets = summariser.pack_changesets(
        analyses, commits, settings.group_commits, options.max_diff_tokens
    )

    if settings.provenance["mst"] == "default":
        sigs = [cs.significance for cs in changesets]
        settings.mst = tune_mst(lambda t: sum(1 for s in sigs if s >= t))
        settings.provenance["mst"] = "inferred"

    entries = summariser.summarise_all(
        changesets, settings.writing_style, provider, templates, params,
        parallelism=options.parallelism,
    )

    title = f"{project.name} {options.to_tag}"
    metadata = {
        "domain": settings.domain.value,
        "style": settings.writing_style.value,
        "structure": settings.structure.value,
        "mst": f"{settings.mst:.2f}",
        "group": str(settings.group_commits).lower(),
        "seed": settings.seed,
        "tokenizer": TOKENIZER_LABEL,
        "sources": ",".join(f"{k}:{v}" for k, v in
                            sorted(settings.provenance.items())),
        "generated_at": datetime.now(timezone.utc).isoformat(),
    }

    if options.no_composer:
        markdown = _render_flat(title, entries)
        note = composer.ReleaseNote(title, [], metadata)
        return GenerationResult(markdown, note, commits, analyses,
                                settings, project)

    commits_by_sha = {c.sha: c for c in commits}
    sections = composer.organise(entries, settings.structure, commits_by_sha)
    sections = composer.merge_related(sections, settings.structure, provider,
                                      templates, params)
    sections = composer.update_entity_mentions(
        sections, miner.extract_rename_pairs(commits)
    )
    sections = composer.personalise(sections, settings, metadata=metadata)
    sections = composer.reorder_sections(sections)

    note = composer.ReleaseNote(title, sections, metadata)
    markdown = composer.render_markdown(note)
    return GenerationResult(markdown, note, commits, analyses, settings,
                            project)


def _with_domain(project, domain):
    from dataclasses import replace

    return replace(project, domain=domain)


def _unknown_release(release):
    from dataclasses import replace

    return replace(release, release_type=miner.ReleaseType.UNKNOWN)
