"""Release note generation from git history, tree-model commit analysis,
and a pluggable LLM summarisation layer."""

from .errors import SmartNoteError
from .pipeline import GenerationOptions, GenerationResult, generate_release_note

__version__ = "0.1.0"

__all__ = [
    "SmartNoteError",
    "GenerationOptions",
    "GenerationResult",
    "generate_release_note",
    "__version__",
]
