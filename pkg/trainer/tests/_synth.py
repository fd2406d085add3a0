"""Shared synthetic corpus for the trainer tests."""

import random

VERBS = {
    "feat": ["add", "introduce", "implement", "support"],
    "fix": ["fix", "repair", "correct", "resolve"],
    "docs": ["document", "describe", "explain", "clarify"],
}
NOUNS = ["parser", "cache", "login", "api", "config", "index", "queue",
         "worker", "scheduler", "exporter"]

SMALL_GRID = {"max_depth": (3,), "n_estimators": (25,),
              "learning_rate": (0.2,)}


def synthetic_corpus(n, seed=0):
    """Separable conventional-commit corpus with a known label signal."""
    rng = random.Random(seed)
    examples = []
    for _ in range(n):
        label = rng.choice(list(VERBS))
        message = (f"{label}: {rng.choice(VERBS[label])} the "
                   f"{rng.choice(NOUNS)} {rng.choice(NOUNS)}")
        examples.append({
            "message": message,
            "added_lines": rng.randint(1, 80),
            "deleted_lines": rng.randint(0, 30),
            "languages": [rng.choice(["Python", "Go", "Rust"])],
            "label": label,
        })
    return examples
