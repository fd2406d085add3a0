"""Remote project context via the GitHub REST v3 API.

Degraded offline mode is first-class: any network failure yields a
ProjectContext with zeroed counts and the ``degraded`` flag set, so
generation never hard-fails for lack of connectivity.
"""

from __future__ import annotations

import base64
import logging
import os
import re
from dataclasses import dataclass, field

import requests

from .errors import AuthFailure, RateLimited

logger = logging.getLogger(__name__)

TOKEN_ENV = "SMARTNOTE_GITHUB_TOKEN"

_REMOTE_RE = re.compile(
    r"(?:github\.com[:/])([\w.-]+)/([\w.-]+?)(?:\.git)?/?$"
)


@dataclass(frozen=True)
class ProjectContext:
    name: str
    description: str
    readme: str
    previous_version: str
    new_version: str
    commit_total: int = 0
    contributor_count: int = 0
    star_count: int = 0
    issue_count: int = 0
    pr_count: int = 0
    comment_count: int = 0
    domain: object = None  # resolved later by the settings generator
    degraded: bool = False

    def __post_init__(self):
        if self.previous_version == self.new_version:
            raise ValueError("previous_version must differ from new_version")


def degraded_context(name, previous_version, new_version,
                     description="", readme="") -> ProjectContext:
    """Neutral context used when no remote data is available."""
    return ProjectContext(
        name=name, description=description, readme=readme,
        previous_version=previous_version, new_version=new_version,
        degraded=True,
    )


def parse_remote_url(remote_url: str):
    m = _REMOTE_RE.search(remote_url)
    if not m:
        return None
    return m.group(1), m.group(2)


class GitHubClient:
    """Minimal GitHub REST client. Other forges can implement the same
    ``fetch_remote_context`` surface."""

    def __init__(self, base_url="https://api.github.com", token=None,
                 session=None, timeout=30.0):
        self.base_url = base_url.rstrip("/")
        self.token = token if token is not None else os.environ.get(TOKEN_ENV, "")
        self.session = session or requests.Session()
        self.timeout = timeout

    def _get(self, path: str):
        headers = {"Accept": "application/vnd.github+json"}
        if self.token:
            headers["Authorization"] = f"Bearer {self.token}"
        resp = self.session.get(
            f"{self.base_url}{path}", headers=headers, timeout=self.timeout
        )
        if resp.status_code == 401:
            raise AuthFailure("GitHub API rejected the token (401)")
        if resp.status_code in (403, 429):
            retry_after = resp.headers.get("Retry-After")
            raise RateLimited(float(retry_after) if retry_after else None)
        resp.raise_for_status()
        return resp.json()

    def fetch_remote_context(self, remote_url: str, previous_version: str,
                             new_version: str) -> ProjectContext:
        parsed = parse_remote_url(remote_url)
        if parsed is None:
            logger.warning("unrecognised remote url %r; degraded mode", remote_url)
            return degraded_context(remote_url, previous_version, new_version)
        owner, repo = parsed
        try:
            data = self._get(f"/repos/{owner}/{repo}")
            readme = ""
            try:
                payload = self._get(f"/repos/{owner}/{repo}/readme")
                readme = base64.b64decode(payload.get("content", "")).decode(
                    "utf-8", errors="replace"
                )
            except (AuthFailure, RateLimited):
                raise
            except requests.RequestException:
                pass
        except (AuthFailure, RateLimited):
            raise
        except requests.RequestException as exc:
            logger.warning("GitHub API unreachable (%s); degraded mode", exc)
            return degraded_context(repo, previous_version, new_version)
        return ProjectContext(
            name=data.get("name", repo),
            description=data.get("description") or "",
            readme=readme,
            previous_version=previous_version,
            new_version=new_version,
            commit_total=int(data.get("commit_count", 0)),
            contributor_count=int(data.get("contributor_count", 0)),
            star_count=int(data.get("stargazers_count", 0)),
            issue_count=int(data.get("open_issues_count", 0)),
            pr_count=int(data.get("pull_request_count", 0)),
            comment_count=int(data.get("comment_count", 0)),
        )


def fetch_remote_context(remote_url: str, previous_version: str,
                         new_version: str, **client_kwargs) -> ProjectContext:
    return GitHubClient(**client_kwargs).fetch_remote_context(
        remote_url, previous_version, new_version
    )
