"""File extension to language mapping.

A static lookup covering the popular languages; anything unrecognised maps
to the OTHER_LANGUAGE sentinel.
"""

OTHER_LANGUAGE = "Other"

EXTENSION_LANGUAGES = {
    ".py": "Python",
    ".pyi": "Python",
    ".js": "JavaScript",
    ".mjs": "JavaScript",
    ".cjs": "JavaScript",
    ".jsx": "JavaScript",
    ".ts": "TypeScript",
    ".tsx": "TypeScript",
    ".java": "Java",
    ".c": "C",
    ".h": "C",
    ".cpp": "C++",
    ".cc": "C++",
    ".cxx": "C++",
    ".hpp": "C++",
    ".hh": "C++",
    ".cs": "C#",
    ".go": "Go",
    ".rs": "Rust",
    ".rb": "Ruby",
    ".php": "PHP",
    ".swift": "Swift",
    ".kt": "Kotlin",
    ".kts": "Kotlin",
    ".m": "Objective-C",
    ".scala": "Scala",
    ".sh": "Shell",
    ".bash": "Shell",
    ".zsh": "Shell",
    ".ps1": "PowerShell",
    ".pl": "Perl",
    ".lua": "Lua",
    ".dart": "Dart",
    ".ex": "Elixir",
    ".exs": "Elixir",
    ".erl": "Erlang",
    ".hs": "Haskell",
    ".r": "R",
    ".jl": "Julia",
    ".vue": "Vue",
    ".svelte": "Svelte",
    ".html": "HTML",
    ".htm": "HTML",
    ".css": "CSS",
    ".scss": "SCSS",
    ".less": "CSS",
    ".md": "Markdown",
    ".markdown": "Markdown",
    ".rst": "reStructuredText",
    ".json": "JSON",
    ".yaml": "YAML",
    ".yml": "YAML",
    ".toml": "TOML",
    ".xml": "XML",
    ".sql": "SQL",
    ".ipynb": "Jupyter Notebook",
    ".txt": "Text",
    ".tex": "TeX",
    ".proto": "Protocol Buffer",
    ".cmake": "CMake",
    ".dockerfile": "Dockerfile",
    ".gradle": "Gradle",
    ".zig": "Zig",
    ".nim": "Nim",
}

# language flag list baked into the shipped default models; trainer-produced
# models carry their own list in the model metadata
DEFAULT_MODEL_LANGUAGES = [
    "Python",
    "JavaScript",
    "TypeScript",
    "Java",
    "C",
    "C++",
    "C#",
    "Go",
    "Rust",
    "Ruby",
    "PHP",
    "Shell",
    "HTML",
    "CSS",
    "Markdown",
    "reStructuredText",
    "JSON",
    "YAML",
    "TOML",
    "Text",
]


def language_for_path(path: str) -> str:
    """Best-effort language tag for a file path."""
    name = path.rsplit("/", 1)[-1].lower()
    if name in ("dockerfile", "makefile", "cmakelists.txt"):
        return {"dockerfile": "Dockerfile", "makefile": "Makefile",
                "cmakelists.txt": "CMake"}[name]
    dot = name.rfind(".")
    if dot < 0:
        return OTHER_LANGUAGE
    return EXTENSION_LANGUAGES.get(name[dot:], OTHER_LANGUAGE)
