"""Linear warmup / linear decay learning-rate schedule."""

from __future__ import annotations


def warmup_steps_for(total_steps: int, warmup_fraction: float) -> int:
    """Warmup length: 10% of total by default, at least 1, below total."""
    warmup = max(1, round(total_steps * warmup_fraction))
    return min(warmup, max(total_steps - 1, 1))


def linear_warmup_decay(total_steps: int, warmup_fraction: float = 0.10):
    """Multiplier for optimizer step ``s`` (0-based, counts completed steps).

    Rises linearly from 0 to 1 over the warmup, peaks exactly at the
    warmup boundary, then falls linearly to 0 at ``total_steps``.
    """
    if total_steps < 1:
        raise ValueError("total_steps must be >= 1")
    if total_steps == 1:
        # degenerate run: one full-rate step instead of a wasted zero-rate one
        return lambda step: 1.0 if step == 0 else 0.0
    warmup = warmup_steps_for(total_steps, warmup_fraction)

    def factor(step: int) -> float:
        if step < warmup:
            return step / warmup
        if step >= total_steps:
            return 0.0
        return (total_steps - step) / (total_steps - warmup)

    return factor
