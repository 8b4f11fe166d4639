"""Command-line entry point.

Subcommands: validate, stats, score, oracle, build-prompts, report.
Every command takes its data layout from a declarative config file; flags
override config values. All randomness flows from explicit seeds, and a
run manifest (config snapshot + input digests) is written next to every
output artifact.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Sequence

from . import __version__, corpus, promptgen, report, scoring, stats
from .config import RunConfig, load_config


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with path.open("rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(artifact: Path, command: str, config_snapshot: dict,
                   inputs: Iterable[Path]) -> Path:
    """Record how an artifact was produced: ``<artifact>.manifest.json``.

    Identical inputs and config yield identical digests; only the
    timestamp varies between runs.
    """
    manifest = {
        "command": command,
        "config": config_snapshot,
        "inputs": [{"path": str(p), "sha256": _sha256(p)} for p in sorted(inputs)],
        "version": __version__,
        "created_utc": datetime.now(timezone.utc).isoformat(),
    }
    path = artifact.with_name(artifact.name + ".manifest.json")
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")
    return path


def _load(cfg: RunConfig, name: str, split: str) -> corpus.Subset:
    path = cfg.subset(name).path_for(split)
    return corpus.load_subset(path, cfg.schema, name, split)


def _selected_subsets(cfg: RunConfig, names: str | None) -> list[str]:
    if not names:
        return [entry.name for entry in cfg.subsets]
    selected = [n.strip() for n in names.split(",") if n.strip()]
    for name in selected:
        cfg.subset(name)  # raises for unknown names
    return selected


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# --- validate ---------------------------------------------------------------

def cmd_validate(args) -> int:
    cfg = load_config(args.config)
    n_issues = 0
    for name in _selected_subsets(cfg, args.subsets):
        entry = cfg.subset(name)
        for split in ("train", "test"):
            if getattr(entry, split) is None:
                continue
            subset = _load(cfg, name, split)
            issues = corpus.validate_subset(subset)
            n_issues += len(issues)
            status = "ok" if not issues else f"{len(issues)} issue(s)"
            print(f"{name}/{split}: {len(subset)} samples, {status}")
            for issue in issues:
                print(f"  [{issue.kind}] {issue.message}")
    return 0 if n_issues == 0 else 1


# --- stats ------------------------------------------------------------------

_STAT_COLS = ("avg_nt", "pct_nt", "pct_ns")


def _stats_rows(cfg: RunConfig, names: Sequence[str],
                subset_mean: bool) -> list[dict]:
    loaded: dict[str, dict[str, corpus.Subset]] = {}
    for name in names:
        entry = cfg.subset(name)
        loaded[name] = {}
        for split in ("train", "test"):
            if getattr(entry, split) is not None:
                loaded[name][split] = _load(cfg, name, split)

    rows = []
    for name in names:
        row: dict = {"subset": name}
        for split, subset in loaded[name].items():
            row[split] = stats.subset_novelty_stats(subset, cfg.norm).as_dict()
        rows.append(row)

    overall: dict = {"subset": "Overall"}
    for split in ("train", "test"):
        group = [loaded[n][split] for n in names if split in loaded[n]]
        if group:
            overall[split] = stats.overall_novelty(
                group, cfg.norm, subset_mean=subset_mean).as_dict()
    rows.append(overall)
    return rows


def _render_stats_text(rows: list[dict], meta: dict) -> str:
    header = ["Subset"]
    for split in ("train", "test"):
        header += [f"{split} Avg NT", f"{split} %NT", f"{split} %NS"]
    table = []
    for row in rows:
        cells = [row["subset"]]
        for split in ("train", "test"):
            if split in row:
                cells += [f"{report.round_half_up(row[split][c], 2):.2f}"
                          for c in _STAT_COLS]
            else:
                cells += ["-", "-", "-"]
        table.append(cells)
    widths = [max(len(r[i]) for r in [header, *table]) for i in range(len(header))]
    lines = [f"# {k}: {v}" for k, v in meta.items()]
    lines.append("  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip())
    lines.append("  ".join("-" * w for w in widths))
    for cells in table:
        lines.append("  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip())
    return "\n".join(lines) + "\n"


def cmd_stats(args) -> int:
    cfg = load_config(args.config)
    names = _selected_subsets(cfg, args.subsets)
    rows = _stats_rows(cfg, names, args.subset_mean)
    meta = {"norm": cfg.norm.as_dict(), "subset_mean": args.subset_mean,
            "version": __version__}
    if args.format == "json":
        text = json.dumps({"meta": meta, "rows": rows}, indent=2) + "\n"
    else:
        text = _render_stats_text(rows, meta)
    _emit(text, args.out)
    if args.out:
        inputs = [cfg.subset(n).path_for(s) for n in names
                  for s in ("train", "test")
                  if getattr(cfg.subset(n), s) is not None]
        write_manifest(Path(args.out), "stats", cfg.snapshot(), inputs)
    return 0


# --- score ------------------------------------------------------------------

def cmd_score(args) -> int:
    cfg = load_config(args.config)
    subset = _load(cfg, args.subset, args.split)
    result = report.score_outputs(args.predictions, subset, cfg.norm,
                                  system=args.system, missing=args.missing,
                                  jobs=args.jobs)
    payload = result.as_dict()
    payload["meta"] = {"norm": cfg.norm.as_dict(), "missing_policy": args.missing,
                       "version": __version__}
    text = json.dumps(payload, indent=2) + "\n"
    _emit(text, args.out)
    if not args.out:
        wer = result.wer
        print(f"{args.subset}/{args.split} {args.system}: "
              f"WER {wer.wer_percent:.2f}% "
              f"({wer.total_errors} errors / {wer.total_ref_words} words, "
              f"{result.n_scored} scored, {result.n_missing} missing)",
              file=sys.stderr)
    else:
        write_manifest(Path(args.out), "score", cfg.snapshot(),
                       [Path(args.predictions),
                        cfg.subset(args.subset).path_for(args.split)])
    return 0


# --- oracle -----------------------------------------------------------------

def cmd_oracle(args) -> int:
    cfg = load_config(args.config)
    for name in _selected_subsets(cfg, args.subsets):
        subset = _load(cfg, name, args.split)
        max_rank = max(len(s.hypotheses) for s in subset.samples)
        oracle = scoring.oracle_wer(subset.samples, cfg.norm)
        ranks = []
        for k in range(1, max_rank + 1):
            wer = scoring.rank_k_wer(subset.samples, cfg.norm, rank=k)
            ranks.append(f"rank-{k} {wer.wer_percent:.2f}%")
        print(f"{name}/{args.split}: oracle {oracle.wer_percent:.2f}%  "
              + "  ".join(ranks))
    return 0


# --- build-prompts ----------------------------------------------------------

def _emit_with_manifest(records, out_path: Path, cfg: RunConfig,
                        inputs: list[Path]) -> None:
    count = promptgen.emit_corpus(records, out_path)
    write_manifest(out_path, "build-prompts", cfg.snapshot(), inputs)
    print(f"wrote {count} records to {out_path}")


def cmd_build_prompts(args) -> int:
    cfg = load_config(args.config)
    names = _selected_subsets(cfg, args.subsets)
    n = args.n if args.n is not None else cfg.prompt_n
    seed = args.seed if args.seed is not None else cfg.shuffle_seed
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    def load_split(name: str) -> list[tuple[corpus.Subset, Path]]:
        """(subset, source path) pairs for the requested split; train is
        carved into train+valid first."""
        entry = cfg.subset(name)
        src = entry.path_for(args.split)
        subset = _load(cfg, name, args.split)
        if args.split == "train":
            train, valid = corpus.split_train_valid(
                subset, args.valid_fraction, args.split_seed)
            return [(train, src), (valid, src)]
        return [(subset, src)]

    if args.regime == "sd":
        for name in names:
            for subset, src in load_split(name):
                spec = promptgen.CorpusSpec(regime="SD", subsets=(name,),
                                            n=n, shuffle_seed=seed)
                records = promptgen.build_sd_corpus(subset, spec)
                out = out_dir / f"sd_{name}_{subset.split}.jsonl"
                _emit_with_manifest(records, out, cfg, [src])
    else:
        spec = promptgen.CorpusSpec(regime="CD", subsets=tuple(names),
                                    n=n, shuffle_seed=seed)
        by_split: dict[str, list[corpus.Subset]] = {}
        sources = []
        for name in names:
            for subset, src in load_split(name):
                by_split.setdefault(subset.split, []).append(subset)
                sources.append(src)
        for split, subsets in by_split.items():
            records = promptgen.build_cd_corpus(subsets, spec)
            out = out_dir / f"cd_{split}.jsonl"
            _emit_with_manifest(records, out, cfg, sources)
    return 0


# --- report -----------------------------------------------------------------

def _read_result(path: Path) -> tuple[report.SubsetResult, dict]:
    raw = json.loads(path.read_text(encoding="utf-8"))
    wer = raw["wer"]
    result = report.SubsetResult(
        subset=raw["subset"], system=raw["system"],
        wer=scoring.WerReport(wer["total_errors"], wer["total_ref_words"]),
        n_scored=raw["n_scored"], n_missing=raw["n_missing"])
    return result, raw.get("meta", {})


def _merged_meta(metas: Sequence[dict]) -> dict:
    """Stamp shared by all result files, or 'mixed' where they disagree."""
    merged: dict = {"version": __version__}
    for key in ("norm", "missing_policy"):
        values = [m[key] for m in metas if key in m]
        if values:
            merged[key] = values[0] if all(v == values[0] for v in values) \
                else "mixed"
    return merged


def cmd_report(args) -> int:
    loaded = [_read_result(Path(p)) for p in args.results]
    results = [r for r, _ in loaded]
    table = report.build_table(results)
    meta = _merged_meta([m for _, m in loaded])
    delta_payload = None
    if args.delta:
        label_a, _, label_b = args.delta.partition(",")
        if not label_b:
            raise ValueError("--delta needs two system labels: A,B")
        side_a = [r for r in results if r.system == label_a.strip()]
        side_b = [r for r in results if r.system == label_b.strip()]
        if not side_a or not side_b:
            raise ValueError(f"--delta labels not found in results: {args.delta}")
        delta = report.paired_delta(side_a, side_b)
        delta_payload = {"a": label_a.strip(), "b": label_b.strip(),
                         "mean_delta": delta.mean_delta,
                         "std_delta": delta.std_delta, "n": delta.n}

    if args.format == "json":
        payload = report.table_records(table, meta)
        if delta_payload:
            payload["delta"] = delta_payload
        text = json.dumps(payload, indent=2) + "\n"
    elif args.format == "csv":
        text = report.render_table_csv(table, meta=meta)
    else:
        text = report.render_table_text(table, meta=meta)
        if delta_payload:
            text += (f"delta {delta_payload['a']} - {delta_payload['b']}: "
                     f"mean {report.round_half_up(delta_payload['mean_delta'], 2):.2f} "
                     f"std {report.round_half_up(delta_payload['std_delta'], 2):.2f} "
                     f"(n={delta_payload['n']})\n")
    _emit(text, args.out)
    if args.out:
        write_manifest(Path(args.out), "report", {"results": list(args.results)},
                       [Path(p) for p in args.results])
    return 0


# --- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nbestkit",
        description="n-best corpus toolkit: validate, stats, score, oracle, "
                    "build-prompts, report")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        return p

    p = add("validate", cmd_validate, "check configured subsets for defects")
    p.add_argument("--config", required=True)
    p.add_argument("--subsets", help="comma-separated subset names (default: all)")

    p = add("stats", cmd_stats, "novelty statistics per subset and overall")
    p.add_argument("--config", required=True)
    p.add_argument("--subsets")
    p.add_argument("--subset-mean", action="store_true",
                   help="aggregate the Overall row as an unweighted mean over "
                        "subsets instead of pooling utterances")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out")

    p = add("score", cmd_score, "score a predictions file against a subset")
    p.add_argument("--config", required=True)
    p.add_argument("--subset", required=True)
    p.add_argument("--split", choices=("train", "test"), default="test")
    p.add_argument("--predictions", required=True)
    p.add_argument("--system", required=True, help="system label for reports")
    p.add_argument("--missing", choices=("deletions", "skip"),
                   default="deletions",
                   help="how to score test ids without a prediction")
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.add_argument("--out")

    p = add("oracle", cmd_oracle, "per-subset oracle and rank-k WER bounds")
    p.add_argument("--config", required=True)
    p.add_argument("--subsets")
    p.add_argument("--split", choices=("train", "test"), default="test")

    p = add("build-prompts", cmd_build_prompts,
            "emit instruction prompt corpora")
    p.add_argument("--config", required=True)
    p.add_argument("--regime", choices=("sd", "cd"), required=True)
    p.add_argument("--split", choices=("train", "test"), default="train")
    p.add_argument("--subsets")
    p.add_argument("--n", type=int, help="hypotheses per prompt (default: config)")
    p.add_argument("--seed", type=int, help="shuffle seed (default: config)")
    p.add_argument("--valid-fraction", type=float, default=0.05)
    p.add_argument("--split-seed", type=int, default=42)
    p.add_argument("--out", required=True, help="output directory")

    p = add("report", cmd_report, "assemble a WER table from score outputs")
    p.add_argument("--results", nargs="+", required=True,
                   help="score --out JSON files")
    p.add_argument("--delta", help="system labels A,B for paired WER deltas")
    p.add_argument("--format", choices=("text", "csv", "json"), default="text")
    p.add_argument("--out")

    return parser


def dispatch(argv: Sequence[str]) -> int:
    """Run one CLI invocation; returns the exit code instead of exiting."""
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:  # argparse: 2 on usage error, 0 on --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> int:
    return dispatch(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
