"""Exception hierarchy shared across the pipeline."""


class SmartNoteError(Exception):
    """Base class for all smartnote errors."""


# --- repository mining ---

class NotARepository(SmartNoteError):
    def __init__(self, path):
        super().__init__(f"not a git repository: {path}")
        self.path = path


class TagNotFound(SmartNoteError):
    def __init__(self, tag):
        super().__init__(f"tag not found: {tag}")
        self.tag = tag


class EmptyRange(SmartNoteError):
    def __init__(self, detail="no commits between the given tags"):
        super().__init__(detail)


# --- remote hosting API ---

class AuthFailure(SmartNoteError):
    pass


class RateLimited(SmartNoteError):
    def __init__(self, retry_after=None):
        super().__init__(
            "rate limited" + (f", retry after {retry_after}s" if retry_after else "")
        )
        self.retry_after = retry_after


# --- LLM module ---

class MissingBinding(SmartNoteError):
    def __init__(self, name):
        super().__init__(f"template placeholder has no binding: {name}")
        self.name = name


class UnbalancedDelimiters(SmartNoteError):
    pass


class ProviderError(SmartNoteError):
    def __init__(self, status, body="", retry_after=None, context=None):
        detail = f"provider returned status {status}"
        if context:
            detail = f"{context}: {detail}"
        super().__init__(detail)
        self.status = status
        self.body = body
        self.retry_after = retry_after
        self.context = context


class ProviderTimeout(SmartNoteError):
    pass


class NoLabelFound(SmartNoteError):
    def __init__(self, raw):
        super().__init__(f"no allowed label found in: {raw!r}")
        self.raw = raw


# --- model inference ---

class ParseError(SmartNoteError):
    pass


class InvariantViolation(SmartNoteError):
    pass


class TaskMismatch(SmartNoteError):
    pass


class DimensionMismatch(SmartNoteError):
    pass


class LayoutMismatch(SmartNoteError):
    pass


class MissingPrecomputedEmbedding(SmartNoteError):
    def __init__(self, sha):
        super().__init__(f"no precomputed embedding for commit {sha}")
        self.sha = sha


# --- composition & metrics ---

class NoEntries(SmartNoteError):
    pass


class NoCommits(SmartNoteError):
    pass


class EmptyText(SmartNoteError):
    pass
