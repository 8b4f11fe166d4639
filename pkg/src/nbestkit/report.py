"""Score prediction files and assemble WER result tables.

Values are computed on unrounded numbers and rounded only for display
(half-up, matching publication convention). The average row is the
unweighted arithmetic mean over subsets.
"""

from __future__ import annotations

import csv
import io
import json
import multiprocessing
import statistics
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Literal, Mapping, Sequence

from .corpus import NormConfig, Subset, normalize
from .scoring import WerReport, pair_errors

# Row order used by the multi-domain n-best benchmark; unknown subset
# names sort after these, in first-seen order.
HYPORADISE_ORDER = ("WSJ", "ATIS", "CHiME-4", "Tedlium-3",
                    "CV-accent", "SwitchBoard", "LRS2", "CORAAL")

MissingPolicy = Literal["deletions", "skip"]


@dataclass(frozen=True)
class SubsetResult:
    subset: str
    system: str
    wer: WerReport
    n_scored: int
    n_missing: int

    def as_dict(self) -> dict:
        return {"subset": self.subset, "system": self.system,
                "wer": self.wer.as_dict(),
                "n_scored": self.n_scored, "n_missing": self.n_missing}


@dataclass(frozen=True)
class ReportTable:
    subsets: tuple[str, ...]
    systems: tuple[str, ...]
    rows: Mapping[str, Mapping[str, float]]   # subset -> system -> WER percent
    average_row: Mapping[str, float]          # system -> mean over subsets


@dataclass(frozen=True)
class DeltaStats:
    mean_delta: float
    std_delta: float   # sample standard deviation (n-1 denominator)
    n: int


def round_half_up(value: float, decimals: int) -> float:
    """Round for display the way published tables do (0.5 goes up)."""
    quantum = Decimal(1).scaleb(-decimals)
    return float(Decimal(repr(value)).quantize(quantum, rounding=ROUND_HALF_UP))


def load_predictions(path: str | Path) -> dict[str, str]:
    """Read a line-delimited predictions file of {id, prediction} records."""
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ValueError(f"cannot read predictions {path}: {exc}") from exc
    predictions: dict[str, str] = {}
    for lineno, line in enumerate(raw.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
        if "id" not in record or "prediction" not in record:
            raise ValueError(f"{path}:{lineno}: record needs 'id' and 'prediction'")
        sample_id = str(record["id"])
        if sample_id in predictions:
            raise ValueError(f"{path}:{lineno}: duplicate prediction id {sample_id!r}")
        predictions[sample_id] = str(record["prediction"])
    return predictions


def _pair_errors_star(pair) -> int:
    return pair_errors(*pair)


def score_outputs(predictions: str | Path, subset: Subset, config: NormConfig,
                  system: str, missing: MissingPolicy = "deletions",
                  jobs: int = 1) -> SubsetResult:
    """Pooled WER of a predictions file against one test subset.

    Test ids without a prediction are counted in ``n_missing``; under the
    default policy they score as fully deleted references, under "skip"
    they are left out of the pool. Prediction ids not in the subset are
    ignored. ``jobs`` > 1 scores pairs in a process pool; the result is
    independent of the degree.
    """
    if missing not in ("deletions", "skip"):
        raise ValueError(f"unknown missing-prediction policy {missing!r}")
    by_id = load_predictions(predictions)

    pairs = []
    n_scored = n_missing = 0
    for sample in subset.samples:
        ref = normalize(sample.reference, config)
        if sample.id in by_id:
            pairs.append((ref, normalize(by_id[sample.id], config)))
            n_scored += 1
        else:
            n_missing += 1
            if missing == "deletions":
                pairs.append((ref, ()))
    if n_scored == 0:
        raise ValueError(f"no prediction ids match subset {subset.name!r}")

    if jobs > 1 and len(pairs) > 1:
        with multiprocessing.Pool(jobs) as pool:
            errors = sum(pool.map(_pair_errors_star, pairs, chunksize=64))
    else:
        errors = sum(pair_errors(ref, hyp) for ref, hyp in pairs)
    total_words = sum(len(ref) for ref, _ in pairs)
    return SubsetResult(subset=subset.name, system=system,
                        wer=WerReport(errors, total_words),
                        n_scored=n_scored, n_missing=n_missing)


def results_from_percents(system: str,
                          percents: Mapping[str, float]) -> list[SubsetResult]:
    """Wrap already-computed WER percentages as results.

    For table arithmetic over published numbers: the synthetic denominator
    (10000 reference words) reproduces any value with <= 2 decimals.
    """
    return [SubsetResult(subset=subset, system=system,
                         wer=WerReport(round(p * 100), 10000),
                         n_scored=0, n_missing=0)
            for subset, p in percents.items()]


def _subset_sort_key(order: Sequence[str]):
    known = {name: i for i, name in enumerate(HYPORADISE_ORDER)}
    first_seen = {name: i for i, name in enumerate(order)}
    return lambda name: (0, known[name]) if name in known else (1, first_seen[name])


def build_table(results: Sequence[SubsetResult]) -> ReportTable:
    """Arrange per-subset results into a table with an average row.

    Every system must cover the same subset set. Averages are computed on
    unrounded values; rounding happens at render time.
    """
    if not results:
        raise ValueError("no results")
    systems: list[str] = []
    by_system: dict[str, dict[str, float]] = {}
    seen_order: list[str] = []
    for result in results:
        if result.system not in by_system:
            systems.append(result.system)
            by_system[result.system] = {}
        if result.subset in by_system[result.system]:
            raise ValueError(
                f"duplicate result for ({result.subset!r}, {result.system!r})")
        by_system[result.system][result.subset] = result.wer.wer_percent
        if result.subset not in seen_order:
            seen_order.append(result.subset)

    coverage = {frozenset(row) for row in by_system.values()}
    if len(coverage) != 1:
        raise ValueError("systems cover different subset sets")

    subsets = tuple(sorted(seen_order, key=_subset_sort_key(seen_order)))
    rows = {subset: {system: by_system[system][subset] for system in systems}
            for subset in subsets}
    average = {system: statistics.mean(by_system[system].values())
               for system in systems}
    return ReportTable(subsets=subsets, systems=tuple(systems),
                       rows=rows, average_row=average)


def paired_delta(system_a: Sequence[SubsetResult],
                 system_b: Sequence[SubsetResult]) -> DeltaStats:
    """Mean and sample std of per-subset (WER_A - WER_B)."""
    a = {r.subset: r.wer.wer_percent for r in system_a}
    b = {r.subset: r.wer.wer_percent for r in system_b}
    if set(a) != set(b):
        raise ValueError("paired_delta needs the same subsets on both sides")
    if len(a) < 2:
        raise ValueError("paired_delta needs at least 2 subsets")
    deltas = [a[subset] - b[subset] for subset in sorted(a)]
    return DeltaStats(mean_delta=statistics.mean(deltas),
                      std_delta=statistics.stdev(deltas), n=len(deltas))


def render_table_text(table: ReportTable, decimals: int = 1,
                      meta: Mapping[str, object] | None = None) -> str:
    """Aligned plain-text table; per-row best value marked with '*'."""
    header = ["Subset", *table.systems]
    body: list[list[str]] = []
    for subset in table.subsets:
        row = table.rows[subset]
        best = min(row.values())
        cells = [subset]
        for system in table.systems:
            value = row[system]
            mark = "*" if value == best else ""
            cells.append(f"{round_half_up(value, decimals):.{decimals}f}{mark}")
        body.append(cells)
    body.append(["Average"] + [
        f"{round_half_up(table.average_row[s], decimals):.{decimals}f}"
        for s in table.systems])

    widths = [max(len(r[i]) for r in [header, *body]) for i in range(len(header))]
    lines = []
    if meta:
        lines.extend(f"# {key}: {value}" for key, value in meta.items())
    lines.append("  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip())
    lines.append("  ".join("-" * w for w in widths))
    for cells in body:
        lines.append("  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip())
    return "\n".join(lines) + "\n"


def render_table_csv(table: ReportTable, decimals: int = 2,
                     meta: Mapping[str, object] | None = None) -> str:
    buf = io.StringIO()
    if meta:
        for key, value in meta.items():
            buf.write(f"# {key}: {value}\r\n")
    writer = csv.writer(buf)
    writer.writerow(["subset", *table.systems])
    for subset in table.subsets:
        writer.writerow([subset] + [round_half_up(table.rows[subset][s], decimals)
                                    for s in table.systems])
    writer.writerow(["Average"] + [round_half_up(table.average_row[s], decimals)
                                   for s in table.systems])
    return buf.getvalue()


def table_records(table: ReportTable,
                  meta: Mapping[str, object] | None = None) -> dict:
    """Machine-readable table payload (unrounded values)."""
    return {
        "meta": dict(meta or {}),
        "subsets": list(table.subsets),
        "systems": list(table.systems),
        "rows": {subset: dict(table.rows[subset]) for subset in table.subsets},
        "average": dict(table.average_row),
    }
