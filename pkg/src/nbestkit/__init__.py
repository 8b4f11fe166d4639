"""nbestkit: tooling for n-best ASR hypothesis corpora.

Ingest structured n-best corpora, score them with word-level edit
alignment, compute novelty statistics, build instruction prompt corpora,
and assemble result tables. See the README for the CLI.
"""

__version__ = "0.1.0"
