"""Prompt templates.

Templates live as asset files under ``smartnote/templates``; each file has a
small ``key: value`` header, a ``---`` separator, and the body with
``{placeholder}`` slots. Template text is data, not code, so prompts can be
iterated on without touching the package.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources

from ..errors import MissingBinding, UnbalancedDelimiters

PLACEHOLDER_RE = re.compile(r"\{([a-z][a-z0-9_]*)\}")
_TAG_RE = re.compile(r"</?([A-Za-z][\w-]*)>")

TACTICS = frozenset({
    "delimiters",
    "chain_of_thought",
    "one_shot",
    "few_shot",
    "intent_classification",
    "length_specification",
})


@dataclass(frozen=True)
class PromptTemplate:
    id: str
    body: str
    placeholders: frozenset[str]
    tactic_tags: frozenset[str]
    max_output_tokens: int


def _check_delimiters(body: str) -> None:
    """XML-style tags in the template body must nest properly."""
    stack = []
    for m in _TAG_RE.finditer(body):
        tag = m.group(1)
        if m.group(0).startswith("</"):
            if not stack or stack[-1] != tag:
                raise UnbalancedDelimiters(f"unexpected closing tag </{tag}>")
            stack.pop()
        else:
            stack.append(tag)
    if stack:
        raise UnbalancedDelimiters(f"unclosed tag <{stack[-1]}>")


def parse_template(text: str) -> PromptTemplate:
    header, sep, body = text.partition("\n---\n")
    if not sep:
        raise ValueError("template file missing '---' separator")
    fields = {}
    for line in header.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition(":")
        fields[key.strip()] = value.strip()
    tactics = frozenset(
        t.strip() for t in fields.get("tactics", "").split(",") if t.strip()
    )
    unknown = tactics - TACTICS
    if unknown:
        raise ValueError(f"unknown tactic tags: {sorted(unknown)}")
    body = body.lstrip("\n")
    _check_delimiters(body)
    return PromptTemplate(
        id=fields["id"],
        body=body,
        placeholders=frozenset(PLACEHOLDER_RE.findall(body)),
        tactic_tags=tactics,
        max_output_tokens=int(fields.get("max-output-tokens", 512)),
    )


def load_template(template_id: str) -> PromptTemplate:
    text = (
        resources.files("smartnote")
        .joinpath(f"templates/{template_id}.tmpl")
        .read_text(encoding="utf-8")
    )
    return parse_template(text)


def load_templates() -> dict[str, PromptTemplate]:
    """Load every bundled template, keyed by id."""
    out = {}
    for entry in resources.files("smartnote").joinpath("templates").iterdir():
        if entry.name.endswith(".tmpl"):
            tpl = parse_template(entry.read_text(encoding="utf-8"))
            out[tpl.id] = tpl
    return out


def render_prompt(template: PromptTemplate, bindings: dict[str, str]) -> str:
    """Substitute placeholders verbatim.

    Substitution is single-pass, so payload text containing brace syntax is
    never re-expanded and diff bytes pass through untouched.
    """
    missing = template.placeholders - bindings.keys()
    if missing:
        raise MissingBinding(sorted(missing)[0])

    def _sub(m: re.Match) -> str:
        return str(bindings[m.group(1)])

    return PLACEHOLDER_RE.sub(_sub, template.body)


_NUMBER_RE = re.compile(r"\d+(?:\.\d+)+")


def align_decimals(text: str) -> str:
    """Rewrite decimal literals so the fraction has exactly two digits.

    Tokeniser-friendly number formatting: ``9.1`` becomes ``9.10`` and
    ``3.14159`` becomes ``3.14``. Numbers with two or more dots (semver
    triples and the like) are left alone, as are plain integers.
    """

    def _fix(m: re.Match) -> str:
        parts = m.group(0).split(".")
        if len(parts) != 2:
            return m.group(0)
        whole, frac = parts
        frac = frac[:2] if len(frac) >= 2 else frac.ljust(2, "0")
        return f"{whole}.{frac}"

    return _NUMBER_RE.sub(_fix, text)
