"""Completion providers: a live OpenAI-compatible HTTP client and a
deterministic mock for tests and offline runs."""

from __future__ import annotations

import hashlib
import json
import os
import re
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

import requests

from ..errors import NoLabelFound, ProviderError, ProviderTimeout

API_KEY_ENV = "SMARTNOTE_LLM_KEY"

DEFAULT_TEMPERATURE = 0.0
DEFAULT_TOP_P = 0.1


@dataclass(frozen=True)
class CompletionParams:
    temperature: float = DEFAULT_TEMPERATURE
    top_p: float = DEFAULT_TOP_P
    model_id: str = "default"

    def __post_init__(self):
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError(f"temperature out of range: {self.temperature}")
        if not 0.0 < self.top_p <= 1.0:
            raise ValueError(f"top_p out of range: {self.top_p}")


class MockProvider:
    """Deterministic provider for tests and network-free runs.

    Responses are resolved in order: scripted text keyed by template id,
    a registered handler (a callable receiving the prompt), then a stable
    hash of the prompt. Every call is recorded so tests can assert on call
    counts (e.g. expository mode makes zero calls).
    """

    def __init__(self, scripted: dict[str, str] | None = None,
                 handlers: dict | None = None):
        self.scripted = dict(scripted or {})
        self.handlers = dict(handlers or {})
        self.calls: list[str] = []
        self._lock = threading.Lock()

    @classmethod
    def from_file(cls, path) -> "MockProvider":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(scripted=data)

    def complete(self, prompt: str, params: CompletionParams,
                 template_id: str | None = None) -> str:
        with self._lock:
            self.calls.append(template_id or "")
        if template_id in self.scripted:
            return self.scripted[template_id]
        if template_id in self.handlers:
            return self.handlers[template_id](prompt)
        digest = hashlib.sha256(prompt.encode("utf-8")).hexdigest()[:12]
        return f"mock:{digest}"

    @property
    def call_count(self) -> int:
        return len(self.calls)


# joined-summary behaviour for the entry-merge template: echo the entries
# between <entry> tags back as one line
_ENTRY_RE = re.compile(r"<entry>(.*?)</entry>", re.DOTALL)


def merge_handler(prompt: str) -> str:
    entries = [e.strip() for e in _ENTRY_RE.findall(prompt)]
    return "; ".join(e for e in entries if e)


class HttpProvider:
    """OpenAI-compatible chat-completions client.

    The base URL is overridable for self-hosted endpoints; the API key is
    read from the SMARTNOTE_LLM_KEY environment variable unless passed
    explicitly. Transient statuses are retried with exponential backoff.
    """

    RETRYABLE = {429, 500, 502, 503, 504}

    def __init__(self, base_url="https://api.openai.com/v1", api_key=None,
                 session=None, max_retries=3, timeout=60.0, backoff=0.5):
        self.base_url = base_url.rstrip("/")
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV, "")
        self.session = session or requests.Session()
        self.max_retries = max_retries
        self.timeout = timeout
        self.backoff = backoff

    def complete(self, prompt: str, params: CompletionParams,
                 template_id: str | None = None) -> str:
        payload = {
            "model": params.model_id,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": params.temperature,
            "top_p": params.top_p,
        }
        headers = {"Authorization": f"Bearer {self.api_key}"}
        last_error = None
        for attempt in range(self.max_retries):
            if attempt:
                time.sleep(self.backoff * 2 ** (attempt - 1))
            try:
                resp = self.session.post(
                    f"{self.base_url}/chat/completions",
                    json=payload, headers=headers, timeout=self.timeout,
                )
            except requests.Timeout as exc:
                last_error = ProviderTimeout(str(exc))
                continue
            except requests.RequestException as exc:
                raise ProviderError(0, str(exc)) from exc
            if resp.status_code == 200:
                data = resp.json()
                return data["choices"][0]["message"]["content"]
            retry_after = resp.headers.get("Retry-After")
            last_error = ProviderError(
                resp.status_code, resp.text,
                retry_after=float(retry_after) if retry_after else None,
            )
            if resp.status_code not in self.RETRYABLE:
                break
        raise last_error


def _singularise(phrase: str) -> str:
    words = []
    for w in phrase.split():
        if w.endswith("ies") and len(w) > 4:
            words.append(w[:-3] + "y")
        elif w.endswith("s") and not w.endswith("ss") and len(w) > 3:
            words.append(w[:-1])
        else:
            words.append(w)
    return " ".join(words)


def _label_aliases(label: str) -> set[str]:
    variants = {label.lower()}
    for v in list(variants):
        if "&" in v:
            variants.add(v.replace("&", "and"))
        elif " and " in v:
            variants.add(v.replace(" and ", " & "))
    for v in list(variants):
        variants.add(_singularise(v))
    return variants


def parse_classification(raw: str, allowed_labels) -> str:
    """Extract the first allowed label appearing in ``raw``.

    Matching is case-insensitive and word-bounded, and tolerates common
    aliases (ampersand versus "and", singular forms). Ties at the same
    position go to the longest alias.
    """
    if not allowed_labels:
        raise ValueError("allowed_labels must be non-empty")
    best = None  # (position, -alias_len, label)
    for label in allowed_labels:
        for alias in _label_aliases(label):
            pattern = re.compile(
                r"(?<!\w)" + re.escape(alias).replace(r"\ ", r"\s+") + r"(?!\w)",
                re.IGNORECASE,
            )
            m = pattern.search(raw)
            if m:
                key = (m.start(), -len(alias), label)
                if best is None or key < best:
                    best = key
    if best is None:
        raise NoLabelFound(raw)
    return best[2]
