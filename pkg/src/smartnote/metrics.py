"""Automatic quality metrics for rendered release notes.

All functions are pure: the same markdown in gives the same numbers out.
Token counts come from the shared approximate counter so that metric
reports and prompt budgeting agree with each other.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, asdict
from importlib import resources

from .errors import EmptyText, NoCommits
from .tokens import count_tokens

ARI_CHARS = 4.71
ARI_WORDS = 0.5
ARI_OFFSET = -21.43

DALE_CHALL_DIFFICULT = 0.1579
DALE_CHALL_LENGTH = 0.0496
DALE_CHALL_PENALTY = 3.6365
DIFFICULT_PCT_THRESHOLD = 5.0

# Trailing-period tokens that do not end a sentence.
_ABBREVIATIONS = frozenset((
    "e.g", "i.e", "etc", "vs", "cf", "al", "approx", "dr", "mr", "mrs",
    "ms", "no", "st", "v", "ver", "rev", "fig", "sec",
))

_SENTENCE_SPLIT = re.compile(r"(?<=[.!?])\s+(?=[A-Z0-9])")
_WORD_CHARS = re.compile(r"[A-Za-z0-9]")

_HEADING = re.compile(r"^(#{2,3})\s+(.*)$")
_BULLET = re.compile(r"^[-*+]\s+(.*)$")

_HEX_RUN = re.compile(r"\b[0-9a-f]{7,40}\b")
_PR_REF = re.compile(r"#(\d+)\b")

# Markdown elements stripped before prose-level analysis.
_CODE_BLOCK = re.compile(r"```.*?```", re.DOTALL)
_CODE_SPAN = re.compile(r"`[^`]*`")
_LINK = re.compile(r"\[([^\]]*)\]\([^)]*\)")
_HTML_COMMENT = re.compile(r"<!--.*?-->", re.DOTALL)
_MD_MARKUP = re.compile(r"^[#>\-*+\s]+", re.MULTILINE)

_CAMEL_CASE = re.compile(r"\b[a-z]+[A-Z]\w*\b|\b[A-Z][a-z]+[A-Z]\w*\b")
_SNAKE_CASE = re.compile(r"\b\w+_\w+\b")
_DOTTED_PATH = re.compile(r"\b[A-Za-z_]\w*(?:\.[A-Za-z_]\w+)+\b")

_INFLECTIONS = ("ies", "ied", "es", "ed", "ing", "er", "est", "s", "ly")


@dataclass
class MetricReport:
    commit_coverage: float
    token_count: int
    information_entropy: float
    ari: float
    dale_chall: float
    entity_percentage: float
    success: bool

    def to_dict(self) -> dict:
        return asdict(self)


def _load_familiar_words() -> frozenset[str]:
    text = (
        resources.files("smartnote")
        .joinpath("data/familiar_words.txt")
        .read_text(encoding="utf-8")
    )
    return frozenset(
        line.strip().lower()
        for line in text.splitlines()
        if line.strip() and not line.startswith("#")
    )


def _load_entity_lexicon() -> frozenset[str]:
    text = (
        resources.files("smartnote")
        .joinpath("data/entity_lexicon.txt")
        .read_text(encoding="utf-8")
    )
    return frozenset(
        line.strip().lower()
        for line in text.splitlines()
        if line.strip() and not line.startswith("#")
    )


_FAMILIAR = _load_familiar_words()
_LEXICON = _load_entity_lexicon()


def strip_markdown(markdown: str) -> str:
    """Reduce markdown to plain prose for the readability formulas."""
    text = _CODE_BLOCK.sub(" ", markdown)
    text = _HTML_COMMENT.sub(" ", text)
    text = _CODE_SPAN.sub(" ", text)
    text = _LINK.sub(r"\1", text)
    text = _MD_MARKUP.sub("", text)
    text = text.replace("**", "").replace("__", "")
    return text


def split_sentences(text: str) -> list[str]:
    """Terminator-then-capital splitting with an abbreviation guard."""
    pieces = []
    for candidate in _SENTENCE_SPLIT.split(text):
        candidate = candidate.strip()
        if not candidate:
            continue
        if pieces:
            prev = pieces[-1]
            last_word = prev.rstrip(".!?").rsplit(None, 1)[-1].lower() if prev.strip(".!?") else ""
            if prev.endswith(".") and last_word in _ABBREVIATIONS:
                pieces[-1] = prev + " " + candidate
                continue
        pieces.append(candidate)
    return pieces


def commit_coverage(note_markdown: str, commits) -> float:
    """Fraction of the range's commits referenced in the note.

    A commit counts as mentioned when a hex prefix of its sha (at least
    seven characters) appears in the text, or when "#N" appears and N is
    the pull request linked to it.
    """
    commits = list(commits)
    if not commits:
        raise NoCommits("coverage needs at least one commit")
    prefixes = set(_HEX_RUN.findall(note_markdown.lower()))
    prs = {int(n) for n in _PR_REF.findall(note_markdown)}
    mentioned = 0
    for commit in commits:
        if any(commit.sha.startswith(p) for p in prefixes):
            mentioned += 1
        elif commit.pr_number is not None and commit.pr_number in prs:
            mentioned += 1
    return mentioned / len(commits)


def _section_counts(note_markdown: str) -> list[int]:
    counts: list[int] = []
    in_section = False
    for line in note_markdown.splitlines():
        if _HEADING.match(line):
            counts.append(0)
            in_section = True
        elif in_section and _BULLET.match(line):
            counts[-1] += 1
    return [c for c in counts if c > 0]


def information_entropy(note_markdown: str) -> float:
    """Shannon entropy (bits) of the entry distribution across sections."""
    counts = _section_counts(note_markdown)
    total = sum(counts)
    if total == 0 or len(counts) < 2:
        return 0.0
    entropy = 0.0
    for count in counts:
        p = count / total
        entropy -= p * math.log2(p)
    return entropy


def _is_familiar(word: str) -> bool:
    word = word.lower()
    if word in _FAMILIAR or word.isdigit():
        return True
    for suffix in _INFLECTIONS:
        if word.endswith(suffix) and len(word) - len(suffix) >= 2:
            stem = word[: -len(suffix)]
            if stem in _FAMILIAR:
                return True
            # doubled final consonant (running -> run) and dropped e
            # (making -> make)
            if len(stem) >= 2 and stem[-1] == stem[-2] and stem[:-1] in _FAMILIAR:
                return True
            if stem + "e" in _FAMILIAR:
                return True
            if suffix in ("ies", "ied") and stem + "y" in _FAMILIAR:
                return True
    return False


def readability(note_text: str) -> tuple[float, float]:
    """Automated Readability Index and Dale-Chall score for the prose."""
    prose = strip_markdown(note_text).strip()
    if not prose:
        raise EmptyText("readability needs non-empty prose")
    sentences = split_sentences(prose) or [prose]
    words = re.findall(r"[A-Za-z0-9]+(?:['-][A-Za-z0-9]+)*", prose)
    if not words:
        raise EmptyText("readability needs at least one word")
    chars = sum(len(_WORD_CHARS.findall(w)) for w in words)

    ari = (
        ARI_CHARS * (chars / len(words))
        + ARI_WORDS * (len(words) / len(sentences))
        + ARI_OFFSET
    )

    difficult = sum(1 for w in words if not _is_familiar(w))
    pct_difficult = 100.0 * difficult / len(words)
    dale_chall = (
        DALE_CHALL_DIFFICULT * pct_difficult
        + DALE_CHALL_LENGTH * (len(words) / len(sentences))
    )
    if pct_difficult > DIFFICULT_PCT_THRESHOLD:
        dale_chall += DALE_CHALL_PENALTY
    return ari, dale_chall


def entity_percentage(note_text: str) -> float:
    """Density of software-entity tokens in the note text.

    Entities are matched against the bundled lexicon of OS, library, and
    tool names, plus code-identifier shapes: CamelCase, snake_case,
    dotted paths, and backticked spans.
    """
    without_comments = _HTML_COMMENT.sub(" ", note_text)
    tokens = without_comments.split()
    if not tokens:
        return 0.0
    backticked = set(_CODE_SPAN.findall(without_comments))
    entities = 0
    for token in tokens:
        bare = token.strip(".,;:!?()[]{}\"'")
        if not bare:
            continue
        if token in backticked or (token.startswith("`") and token.endswith("`")):
            entities += 1
        elif bare.lower().strip("`") in _LEXICON:
            entities += 1
        elif (
            _CAMEL_CASE.fullmatch(bare)
            or _SNAKE_CASE.fullmatch(bare)
            or _DOTTED_PATH.fullmatch(bare)
        ):
            entities += 1
    return entities / len(tokens)


def success(note_markdown: str) -> bool:
    """True when the note has at least one bullet with real text."""
    for line in note_markdown.splitlines():
        match = _BULLET.match(line.strip())
        if match and match.group(1).strip():
            return True
    return False


def evaluate_note(note_markdown: str, commits) -> MetricReport:
    """Compute the full report for one rendered note."""
    try:
        ari, dale_chall = readability(note_markdown)
    except EmptyText:
        ari, dale_chall = 0.0, 0.0
    return MetricReport(
        commit_coverage=commit_coverage(note_markdown, commits),
        token_count=count_tokens(note_markdown),
        information_entropy=information_entropy(note_markdown),
        ari=ari,
        dale_chall=dale_chall,
        entity_percentage=entity_percentage(note_markdown),
        success=success(note_markdown),
    )
