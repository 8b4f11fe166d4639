"""nbtrainer: fine-tuning harness for n-best correction prompt corpora.

Consumes corpus files emitted by the companion toolkit (JSON lines with
{id, subset, input, output}) and produces prediction files ({id,
prediction}) its report command can score. Supports full fine-tuning and
low-rank adapters over any local or hub seq2seq checkpoint, plus a
self-contained tiny checkpoint factory for offline smoke runs.
"""

__version__ = "0.1.0"
