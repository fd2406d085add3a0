import socket
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from _repos import BUILDERS  # noqa: E402

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def fixture_repo(tmp_path_factory):
    repo = tmp_path_factory.mktemp("repos") / "main"
    BUILDERS["main"][0](repo)
    return repo


@pytest.fixture(scope="session")
def merge_repo(tmp_path_factory):
    repo = tmp_path_factory.mktemp("repos") / "merge"
    BUILDERS["merge"][0](repo)
    return repo


@pytest.fixture(scope="session")
def orphan_repo(tmp_path_factory):
    repo = tmp_path_factory.mktemp("repos") / "orphan"
    BUILDERS["orphan"][0](repo)
    return repo


@pytest.fixture(scope="session")
def all_repos(fixture_repo, merge_repo, orphan_repo):
    return [
        (fixture_repo, "v1.0.0", "v1.1.0"),
        (merge_repo, "v0.1.0", "v0.2.0"),
        (orphan_repo, "v1", "v2"),
    ]


class _NetworkBlocked(RuntimeError):
    pass


@pytest.fixture
def no_network(monkeypatch):
    """Any socket connection attempt inside the test raises."""

    def _blocked(*args, **kwargs):
        raise _NetworkBlocked("network access attempted during an offline test")

    monkeypatch.setattr(socket.socket, "connect", _blocked)
    monkeypatch.setattr(socket, "create_connection", _blocked)
    return _NetworkBlocked
