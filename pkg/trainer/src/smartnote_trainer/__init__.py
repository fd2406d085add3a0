"""Training side of the release-note toolchain.

This package talks to the generator only through files: the versioned
model JSON, the parity fixture JSONL, and the embedding sidecar format.
It deliberately shares no code with the generator package.
"""

__version__ = "0.1.0"
