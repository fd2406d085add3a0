"""Context-aware default settings: project domain, writing style,
structure, significance threshold, and commit grouping."""

from __future__ import annotations

import logging
import random
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .errors import NoLabelFound, ProviderError, ProviderTimeout, SmartNoteError
from .llm import parse_classification, render_prompt
from .llm.providers import CompletionParams

logger = logging.getLogger(__name__)


class ProjectDomain(Enum):
    APPLICATION_SOFTWARE = "Application Software"
    SYSTEM_SOFTWARE = "System Software"
    LIBRARIES_AND_FRAMEWORKS = "Libraries & Frameworks"
    SOFTWARE_TOOLS = "Software Tools"


class WritingStyle(Enum):
    EXPOSITORY = "expository"
    DESCRIPTIVE = "descriptive"
    PERSUASIVE = "persuasive"


class Structure(Enum):
    CHANGE_TYPE = "change-type"
    AFFECTED_MODULE = "affected-module"
    CHANGE_PRIORITY = "change-priority"


class MessageQuality(Enum):
    GOOD = "good"
    POOR = "poor"


DEFAULT_MST = 0.12
MST_FLOOR = 0.05
MST_CEILING = 0.20
MST_STEP = 0.01
MIN_ENTRIES = 3
MAX_ENTRIES = 40

QUALITY_SAMPLE_SIZE = 30

# The domain -> style association: persuasive adds rationale and impact,
# which suits user-facing domains where breaking changes matter most;
# library and tool consumers get rephrased summaries.
DOMAIN_STYLE = {
    ProjectDomain.LIBRARIES_AND_FRAMEWORKS: WritingStyle.DESCRIPTIVE,
    ProjectDomain.SOFTWARE_TOOLS: WritingStyle.DESCRIPTIVE,
    ProjectDomain.APPLICATION_SOFTWARE: WritingStyle.PERSUASIVE,
    ProjectDomain.SYSTEM_SOFTWARE: WritingStyle.PERSUASIVE,
}

# keyword fallback used when no provider is available or classification fails
DOMAIN_KEYWORDS = {
    ProjectDomain.LIBRARIES_AND_FRAMEWORKS: (
        "library", "libraries", "framework", "sdk", "toolkit", "package",
        "crate", "middleware", "bindings",
    ),
    ProjectDomain.SYSTEM_SOFTWARE: (
        "kernel", "driver", "operating system", "database", "runtime",
        "firmware", "hypervisor", "filesystem", "scheduler", "daemon",
    ),
    ProjectDomain.APPLICATION_SOFTWARE: (
        "application", "desktop", "mobile", "gui", "game", "editor",
        "browser", "player", "chat", "client app",
    ),
    ProjectDomain.SOFTWARE_TOOLS: (
        "command-line", "cli", "tool", "utility", "linter", "formatter",
        "compiler", "analyzer", "generator", "build system",
    ),
}


@dataclass
class Settings:
    domain: ProjectDomain = ProjectDomain.SOFTWARE_TOOLS
    writing_style: WritingStyle = WritingStyle.DESCRIPTIVE
    structure: Structure = Structure.CHANGE_TYPE
    mst: float = DEFAULT_MST
    group_commits: bool = True
    seed: int = 42
    # per-field provenance: cli / config / inferred / default
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0.0 <= self.mst <= 1.0:
            raise ValueError(f"mst out of range: {self.mst}")


def heuristic_domain(text: str) -> ProjectDomain:
    """Keyword-count fallback classifier. Ties resolve in the table's
    declaration order; no hits default to Software Tools."""
    lowered = text.lower()
    best, best_hits = ProjectDomain.SOFTWARE_TOOLS, 0
    for domain, keywords in DOMAIN_KEYWORDS.items():
        hits = sum(
            len(re.findall(r"(?<!\w)" + re.escape(k) + r"(?!\w)", lowered))
            for k in keywords
        )
        if hits > best_hits:
            best, best_hits = domain, hits
    return best


def classify_project_domain(project, provider, templates,
                            params: CompletionParams | None = None):
    """Infer the project domain. Never raises; returns (domain, provenance).

    Uses the few-shot classification prompt when a provider is available,
    falling back to the keyword heuristic on any failure and to the plain
    default when there is no text to classify.
    """
    text = f"{project.description}\n{project.readme}".strip()
    if not text:
        return ProjectDomain.SOFTWARE_TOOLS, "default"
    if provider is not None:
        try:
            prompt = render_prompt(templates["domain-classification"], {
                "description": project.description or "(none)",
                "readme": project.readme[:4000] or "(none)",
            })
            raw = provider.complete(prompt, params or CompletionParams(),
                                    template_id="domain-classification")
            label = parse_classification(raw, [d.value for d in ProjectDomain])
            return ProjectDomain(label), "inferred"
        except (NoLabelFound, ProviderError, ProviderTimeout) as exc:
            logger.warning("domain classification fell back to heuristic: %s", exc)
    return heuristic_domain(text), "inferred"


def assess_commit_message_quality(commits, provider, templates,
                                  params: CompletionParams | None = None,
                                  seed: int = 42) -> MessageQuality:
    """Classify overall commit message quality as good or poor.

    Samples up to 30 messages (seeded, so the verdict is reproducible) and
    requires a two-thirds good majority. Provider failure gives the
    conservative answer: poor.
    """
    if not commits:
        raise ValueError("need at least one commit")
    messages = [c.message for c in commits]
    rng = random.Random(seed)
    sample = (messages if len(messages) <= QUALITY_SAMPLE_SIZE
              else rng.sample(messages, QUALITY_SAMPLE_SIZE))
    good = 0
    for message in sample:
        try:
            prompt = render_prompt(templates["commit-quality"],
                                   {"message": message})
            raw = provider.complete(prompt, params or CompletionParams(),
                                    template_id="commit-quality")
            label = parse_classification(raw, ["good", "poor"])
        except (NoLabelFound, ProviderError, ProviderTimeout):
            label = "poor"
        if label == "good":
            good += 1
    return (MessageQuality.GOOD if 3 * good >= 2 * len(sample)
            else MessageQuality.POOR)


def select_writing_style(domain: ProjectDomain, quality: MessageQuality,
                         user_choice: WritingStyle | None = None) -> WritingStyle:
    style = user_choice or DOMAIN_STYLE[domain]
    if style is WritingStyle.EXPOSITORY and quality is MessageQuality.POOR:
        logger.info(
            "commit messages are unsuitable for the expository style; "
            "switching to persuasive"
        )
        return WritingStyle.PERSUASIVE
    return style


def tune_mst(entries_passing, default: float = DEFAULT_MST,
             floor: float = MST_FLOOR, ceiling: float = MST_CEILING,
             min_entries: int = MIN_ENTRIES, max_entries: int = MAX_ENTRIES) -> float:
    """Adapt the significance threshold so the note is neither sparse nor
    verbose.

    ``entries_passing`` maps a threshold to the number of surviving
    entries and must be non-increasing. Starting from the default, the
    threshold is lowered (sparse note) or raised (verbose note) in 0.01
    steps; the first value whose count falls inside the band wins, else
    the boundary.
    """
    def in_band(count):
        return min_entries <= count <= max_entries

    count = entries_passing(default)
    if in_band(count):
        return default
    if count < min_entries:
        t = default
        while t - MST_STEP >= floor - 1e-9:
            t = round(t - MST_STEP, 2)
            if in_band(entries_passing(t)):
                return t
        return floor
    t = default
    while t + MST_STEP <= ceiling + 1e-9:
        t = round(t + MST_STEP, 2)
        if in_band(entries_passing(t)):
            return t
    return ceiling


# --- project config file ---

CONFIG_FILENAME = ".smartnote"
CONFIG_KEYS = {"domain", "style", "structure", "mst", "group", "provider",
               "model", "seed"}


def load_config_file(repo_path) -> dict:
    """Parse the flat key=value ``.smartnote`` file in the repo root."""
    return parse_config_file(Path(repo_path) / CONFIG_FILENAME)


def parse_config_file(path) -> dict:
    path = Path(path)
    if not path.is_file():
        return {}
    values = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or key not in CONFIG_KEYS:
            raise SmartNoteError(
                f"{path}:{lineno}: bad config line {line!r}"
            )
        values[key] = value.strip()
    return values
