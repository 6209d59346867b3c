"""Command-line entry point: evaluate | augment | kernel | report.

Defaults bake in the sampling protocol (seeds 7919/7907, 50 eval + 20
training numbers drawn from [1100, 2100), placeholder token NNNN) so a
run needs nothing beyond a treebank and a parser command.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .analysis import aggregate, analyze_batch, summarize
from .augment import (DEFAULT_TOKEN, AugmentedBatch, SamplingConfig, SubstitutionError,
                      augment_treebank, find_year_numerals, sample_eval_numbers,
                      sample_training_numbers, substitute_tokens, synthesize_batch)
from .conllu import ConlluError, Treebank, TreeError, build_dep_tree, parse_conllu, \
    read_treebank, serialize_conllu, write_treebank
from .grct import LexMode, parse_bracketed, to_grct
from .kernel import KernelError, KernelParams, ncptk, ptk, ptk_oracle
from .report import (BatchOutcome, SplitReport, render_cluster_listing, render_text,
                     report_document, representative_grcts, write_figures, write_groups_csv,
                     write_report_json, write_summary_csv)
from .runner import ParserError, ParserSpec, group_by_source_line, run_parser


class ConfigError(ValueError):
    pass


CONFIG_INT_KEYS = ("eval_seed", "train_seed", "eval_count", "train_count",
                   "oversample", "lo", "hi", "workers")
CONFIG_FLOAT_KEYS = ("lam", "mu", "tolerance", "parser_timeout")
CONFIG_STR_KEYS = ("token",)


def load_config_file(path: Path) -> dict:
    """Plain ``key = value`` lines; '#' starts a comment."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def merge_config(args: argparse.Namespace) -> dict:
    merged: dict = {
        "eval_seed": 7919, "train_seed": 7907, "eval_count": 50, "train_count": 20,
        "oversample": 100, "lo": 1100, "hi": 2100,
        "lam": 0.4, "mu": 0.4, "tolerance": 1e-9,
        "token": DEFAULT_TOKEN, "workers": 1, "parser_timeout": 300.0,
    }
    if getattr(args, "config", None):
        path = Path(args.config)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        for key, value in load_config_file(path).items():
            if key in CONFIG_INT_KEYS:
                merged[key] = int(value)
            elif key in CONFIG_FLOAT_KEYS:
                merged[key] = float(value)
            elif key in CONFIG_STR_KEYS:
                merged[key] = value
            else:
                raise ConfigError(f"unknown config key {key!r}")
    for key in (*CONFIG_INT_KEYS, *CONFIG_FLOAT_KEYS, *CONFIG_STR_KEYS):
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    return merged


def sampling_from(merged: dict) -> SamplingConfig:
    return SamplingConfig(eval_seed=merged["eval_seed"], train_seed=merged["train_seed"],
                          eval_count=merged["eval_count"], train_count=merged["train_count"],
                          oversample=merged["oversample"], lo=merged["lo"], hi=merged["hi"])


def kernel_from(merged: dict) -> KernelParams:
    return KernelParams(lam=merged["lam"], mu=merged["mu"], tolerance=merged["tolerance"])


def _add_common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="key = value file overriding defaults")
    sub.add_argument("--eval-seed", dest="eval_seed", type=int)
    sub.add_argument("--train-seed", dest="train_seed", type=int)
    sub.add_argument("--eval-count", dest="eval_count", type=int)
    sub.add_argument("--train-count", dest="train_count", type=int)
    sub.add_argument("--lo", type=int)
    sub.add_argument("--hi", type=int)
    sub.add_argument("--lambda", dest="lam", type=float)
    sub.add_argument("--mu", type=float)
    sub.add_argument("--tolerance", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="yearshift",
                                     description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"yearshift {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    ev = subs.add_parser("evaluate", help="parse augmented batches and write the reports")
    ev.add_argument("--treebank", action="append", required=True,
                    help="CoNLL-U file; repeat for several splits")
    ev.add_argument("--parser-cmd", dest="parser_cmd", required=True,
                    help="parser command; {input}/{output} switch to file modes")
    ev.add_argument("--out", required=True, help="output directory")
    ev.add_argument("--parser-timeout", dest="parser_timeout", type=float)
    ev.add_argument("--workers", type=int)
    _add_common_flags(ev)

    aug = subs.add_parser("augment", help="emit an augmented or token-substituted treebank")
    aug.add_argument("--treebank", required=True)
    aug.add_argument("--mode", choices=("numeral", "token"), default="numeral")
    aug.add_argument("--token")
    aug.add_argument("--out", required=True, help="output CoNLL-U path")
    aug.add_argument("--force", action="store_true", help="overwrite an existing output file")
    _add_common_flags(aug)

    ker = subs.add_parser("kernel", help="kernel value of two sentences or bracketed trees")
    ker.add_argument("a", help="CoNLL-U file (first sentence) or '(...)' bracketed tree")
    ker.add_argument("b", help="second input, same forms")
    ker.add_argument("--mode", choices=("form", "feats"), default="form")
    ker.add_argument("--oracle", action="store_true",
                     help="also print the enumeration oracle's value")
    _add_common_flags(ker)

    rep = subs.add_parser("report", help="re-render reports from a cached evaluate run")
    rep.add_argument("--run", required=True, help="output directory of a previous evaluate")
    rep.add_argument("--out", help="directory for the re-rendered reports (default: --run)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "evaluate":
            return cmd_evaluate(args)
        if args.command == "augment":
            return cmd_augment(args)
        if args.command == "kernel":
            return cmd_kernel(args)
        return cmd_report(args)
    except (ConfigError, ConlluError, KernelError, SubstitutionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ParserError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


# ---------------------------------------------------------------- evaluate

def _slug(value: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]", "_", value) or "s"


def _batch_lines(batch: AugmentedBatch) -> list[str]:
    return [batch.original.text] + [text for _, text, _ in batch.variants]


def _extract_batches(treebank: Treebank, numbers: list[int]) -> list[AugmentedBatch]:
    batches = []
    for sentence in treebank.sentences:
        if not find_year_numerals(sentence.text):
            continue
        try:
            build_dep_tree(sentence)
        except TreeError as exc:
            print(f"warning: skipping {sentence.sent_id or '?'}: invalid gold tree ({exc})",
                  file=sys.stderr)
            continue
        batches.append(synthesize_batch(sentence, numbers))
    return batches


def _failed_result(batch: AugmentedBatch, params: KernelParams):
    return analyze_batch(batch, [], [[] for _ in batch.variants], params)


def _write_manifest(out_dir: Path, merged: dict, treebanks: list[tuple[str, Path]],
                    parser_cmd: str | None) -> None:
    manifest = {
        "tool": "yearshift",
        "version": __version__,
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "config": merged,
        "parser_cmd": parser_cmd,
        "treebanks": [{"split": split, "path": str(path.resolve())}
                      for split, path in treebanks],
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                                           encoding="utf-8")


def _config_snapshot(merged: dict, batch_size: int) -> dict:
    return {
        "version": __version__,
        "kernel": {"lambda": merged["lam"], "mu": merged["mu"],
                   "tolerance": merged["tolerance"]},
        "sampling": {key: merged[key] for key in
                     ("eval_seed", "train_seed", "eval_count", "train_count",
                      "oversample", "lo", "hi")},
        "batch_size": batch_size,
    }


def _write_reports(out_dir: Path, splits: list[SplitReport], merged: dict,
                   batch_size: int) -> None:
    document = report_document(splits, _config_snapshot(merged, batch_size))
    write_report_json(out_dir / "report.json", document)
    (out_dir / "report.txt").write_text(render_text(splits), encoding="utf-8")
    (out_dir / "clusters.txt").write_text(render_cluster_listing(splits), encoding="utf-8")
    write_summary_csv(out_dir / "summary.csv", splits)
    write_groups_csv(out_dir / "groups.csv", splits)
    figures_dir = out_dir / "figures"
    figures_dir.mkdir(exist_ok=True)
    write_figures(figures_dir, splits)


def _analyze_split(name: str, batches: list[AugmentedBatch], fetch, params: KernelParams,
                   failures: list[str]) -> SplitReport:
    """fetch(index, batch) -> parsed groups or raises ParserError."""
    outcomes = []
    for index, batch in enumerate(batches):
        try:
            groups = fetch(index, batch)
        except ParserError as exc:
            failures.append(f"{name}/{batch.original.sent_id or index}: {exc}")
            result = _failed_result(batch, params)
            outcomes.append(BatchOutcome(batch, result, (), error=str(exc)))
            continue
        result = analyze_batch(batch, groups[0], groups[1:], params)
        reps = representative_grcts(result, groups[1:])
        outcomes.append(BatchOutcome(batch, result, reps))
    results = [o.result for o in outcomes]
    return SplitReport(name, summarize(results), aggregate(results, batch_size=len(
        batches[0].variants) if batches else 0), outcomes)


def cmd_evaluate(args: argparse.Namespace) -> int:
    merged = merge_config(args)
    cfg = sampling_from(merged)
    params = kernel_from(merged)

    treebanks: list[tuple[str, Path]] = []
    for raw in args.treebank:
        path = Path(raw)
        if not path.exists():
            raise ConfigError(f"treebank not found: {path}")
        treebanks.append((path.stem, path))

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_manifest(out_dir, merged, treebanks, args.parser_cmd)

    numbers = sample_eval_numbers(cfg)
    spec = ParserSpec.from_command(args.parser_cmd, timeout=merged["parser_timeout"])
    failures: list[str] = []
    splits: list[SplitReport] = []
    for split, path in treebanks:
        batches = _extract_batches(read_treebank(path), numbers)
        batch_dir = out_dir / "batches" / split
        parsed_dir = out_dir / "parsed" / split
        batch_dir.mkdir(parents=True, exist_ok=True)
        parsed_dir.mkdir(parents=True, exist_ok=True)

        tags = [f"{i:04d}_{_slug(b.original.sent_id or str(i))}" for i, b in enumerate(batches)]
        all_lines = [_batch_lines(b) for b in batches]
        for tag, lines in zip(tags, all_lines):
            (batch_dir / f"{tag}.txt").write_text("".join(l + "\n" for l in lines),
                                                  encoding="utf-8")

        def parse_one(index: int):
            try:
                return run_parser(spec, all_lines[index])
            except ParserError as exc:
                return exc

        with ThreadPoolExecutor(max_workers=merged["workers"]) as pool:
            fetched = list(pool.map(parse_one, range(len(batches))))
        for tag, groups in zip(tags, fetched):
            if isinstance(groups, ParserError):
                continue
            flat = [s for group in groups for s in group]
            (parsed_dir / f"{tag}.conllu").write_text(
                serialize_conllu(Treebank(tuple(flat))), encoding="utf-8")

        def fetch(index: int, batch: AugmentedBatch):
            got = fetched[index]
            if isinstance(got, ParserError):
                raise got
            return got

        splits.append(_analyze_split(split, batches, fetch, params, failures))

    _write_reports(out_dir, splits, merged, cfg.eval_count)
    for failure in failures:
        print(f"warning: parser failure on batch {failure}", file=sys.stderr)
    total_batches = sum(len(s.outcomes) for s in splits)
    if total_batches and all(o.error is not None for s in splits for o in s.outcomes):
        print("error: every parser invocation failed", file=sys.stderr)
        return 1
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    run_dir = Path(args.run)
    manifest_path = run_dir / "manifest.json"
    if not manifest_path.exists():
        raise ConfigError(f"no manifest.json under {run_dir}")
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    merged = manifest["config"]
    cfg = sampling_from(merged)
    params = kernel_from(merged)
    numbers = sample_eval_numbers(cfg)

    out_dir = Path(args.out) if args.out else run_dir
    out_dir.mkdir(parents=True, exist_ok=True)

    failures: list[str] = []
    splits = []
    for entry in manifest["treebanks"]:
        split, path = entry["split"], Path(entry["path"])
        if not path.exists():
            raise ConfigError(f"treebank recorded in manifest not found: {path}")
        batches = _extract_batches(read_treebank(path), numbers)
        parsed_dir = run_dir / "parsed" / split

        def fetch(index: int, batch: AugmentedBatch):
            tag = f"{index:04d}_{_slug(batch.original.sent_id or str(index))}"
            cache = parsed_dir / f"{tag}.conllu"
            if not cache.exists():
                raise ParserError(f"no cached parser output {cache}")
            cached = parse_conllu(cache.read_text(encoding="utf-8"))
            try:
                return group_by_source_line(list(cached.sentences), 1 + len(batch.variants))
            except ValueError as exc:
                raise ParserError(str(exc)) from exc

        splits.append(_analyze_split(split, batches, fetch, params, failures))

    _write_reports(out_dir, splits, merged, cfg.eval_count)
    for failure in failures:
        print(f"warning: missing or bad cache for batch {failure}", file=sys.stderr)
    return 0


# ---------------------------------------------------------------- augment

def cmd_augment(args: argparse.Namespace) -> int:
    merged = merge_config(args)
    cfg = sampling_from(merged)
    path = Path(args.treebank)
    if not path.exists():
        raise ConfigError(f"treebank not found: {path}")
    out_path = Path(args.out)
    if out_path.exists() and not args.force:
        raise ConfigError(f"output exists: {out_path} (use --force to overwrite)")

    treebank = read_treebank(path)
    manifest: dict = {
        "tool": "yearshift", "version": __version__,
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "mode": args.mode, "input": str(path.resolve()),
        "sampling": asdict(cfg),
    }
    if args.mode == "numeral":
        eval_numbers = sample_eval_numbers(cfg)
        numbers = sample_training_numbers(cfg, exclude=set(eval_numbers))
        result = augment_treebank(treebank, numbers)
        manifest["numbers"] = numbers
        manifest["excluded_eval_numbers"] = sorted(set(eval_numbers))
    else:
        result = substitute_tokens(treebank, merged["token"])
        manifest["token"] = merged["token"]

    out_path.parent.mkdir(parents=True, exist_ok=True)
    write_treebank(result, out_path)
    Path(str(out_path) + ".manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"{len(treebank)} sentences in, {len(result)} out -> {out_path}")
    return 0


# ---------------------------------------------------------------- kernel

def _load_kernel_input(raw: str, mode: LexMode):
    if raw.lstrip().startswith("("):
        return parse_bracketed(raw)
    path = Path(raw)
    if not path.exists():
        raise ConfigError(f"kernel input is neither a bracketed tree nor a file: {raw}")
    treebank = read_treebank(path)
    if not treebank.sentences:
        raise ConfigError(f"{path} contains no sentences")
    return to_grct(build_dep_tree(treebank.sentences[0]), mode)


def cmd_kernel(args: argparse.Namespace) -> int:
    merged = merge_config(args)
    params = kernel_from(merged)
    mode = LexMode.FORM if args.mode == "form" else LexMode.FEATS
    a = _load_kernel_input(args.a, mode)
    b = _load_kernel_input(args.b, mode)
    print(f"K      = {ptk(a, b, params)!r}")
    print(f"NCPTK  = {ncptk(a, b, params)!r}")
    if args.oracle:
        print(f"oracle = {ptk_oracle(a, b, params)!r}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
