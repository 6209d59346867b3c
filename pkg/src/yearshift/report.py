"""Report rendering: JSON, aligned text tables, CSV, and figures.

The JSON carries the full-precision numbers and validates against the
schema shipped in yearshift/schemas/report.schema.json; the text tables
mirror the summary / per-group layout; figures (correct-count histogram,
cluster-count bars, differing-subtree diagrams for the worst batch) land
next to the delimited output.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass
from importlib import resources
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .analysis import (ORIGINAL_CORRECT, ORIGINAL_INCORRECT, BatchResult, GroupReport, Stats,
                       SummaryReport, tree_diff)
from .augment import AugmentedBatch
from .grct import GrctNode, GrctTree, LexMode, to_bracketed, to_grct
from .conllu import build_dep_tree


@dataclass(frozen=True)
class BatchOutcome:
    """Everything the renderers need about one analyzed batch."""

    batch: AugmentedBatch
    result: BatchResult
    representative_trees: tuple[GrctTree, ...]
    error: str | None = None

    @property
    def sent_id(self) -> str:
        return self.batch.original.sent_id or "?"


@dataclass(frozen=True)
class SplitReport:
    name: str
    summary: SummaryReport
    groups: list[GroupReport]
    outcomes: list[BatchOutcome]


def representative_grcts(result: BatchResult, parsed_variants) -> tuple[GrctTree, ...]:
    """FEATS-mode trees of the cluster representatives of one batch."""
    trees = []
    for rep in result.cluster_set.representatives:
        variant_index = result.considered_indices[rep]
        trees.append(to_grct(build_dep_tree(parsed_variants[variant_index][0]),
                             LexMode.FEATS))
    return tuple(trees)


# ---------------------------------------------------------------- JSON

def load_schema() -> dict:
    text = resources.files("yearshift").joinpath("schemas/report.schema.json").read_text("utf-8")
    return json.loads(text)


def validate_report(document: dict) -> None:
    import jsonschema

    jsonschema.validate(document, load_schema())


def _stats_json(stats: Stats) -> dict:
    return asdict(stats)


def _group_json(report: GroupReport) -> dict:
    return {
        "group": report.group,
        "batches_considered": report.batches_considered,
        "q1_completely_correct": report.q1_completely_correct,
        "q2_correct_per_batch": _stats_json(report.q2_correct_per_batch),
        "q3_consistent_error_batches": report.q3_consistent_error_batches,
        "q4_cluster_count": _stats_json(report.q4_cluster_count),
        "q5_between_cluster_ncptk": _stats_json(report.q5_between_cluster_ncptk),
    }


def _batch_json(outcome: BatchOutcome) -> dict:
    result = outcome.result
    clusters = result.cluster_set
    numerals = [[outcome.batch.replacements[result.considered_indices[i]] for i in members]
                for members in clusters.clusters]
    return {
        "sent_id": outcome.sent_id,
        "replaced_digits": outcome.batch.replaced_digits,
        "original_seg": result.original_seg.label(),
        "original_correct": result.original_correct,
        "considered": result.considered,
        "correct_count": result.correct_count,
        "consistent_errors": result.consistent_errors,
        "cluster_sizes": list(clusters.sizes()),
        "cluster_numerals": numerals,
        "between_cluster_ncptk": clusters.between_cluster_values(),
        "error": outcome.error,
    }


def report_document(splits: list[SplitReport], config_snapshot: dict) -> dict:
    doc = {
        "tool": "yearshift",
        "version": config_snapshot.get("version", "0"),
        "kernel": config_snapshot["kernel"],
        "sampling": config_snapshot["sampling"],
        "batch_size": config_snapshot["batch_size"],
        "splits": {},
    }
    for split in splits:
        doc["splits"][split.name] = {
            "summary": {
                "original": asdict(split.summary.original),
                "augmented": asdict(split.summary.augmented),
            },
            "groups": [_group_json(g) for g in split.groups],
            "batches": [_batch_json(o) for o in split.outcomes],
        }
    return doc


def write_report_json(path: Path, document: dict) -> None:
    validate_report(document)
    path.write_text(json.dumps(document, sort_keys=True, indent=2) + "\n", encoding="utf-8")


# ---------------------------------------------------------------- text

def _fmt(value: float | None) -> str:
    if value is None:
        return "NA"
    for digits in (2, 4, 6):
        rounded = round(value, digits)
        if rounded != 0 or value == 0:
            break
    text = f"{rounded:.{digits}f}".rstrip("0").rstrip(".")
    return text if text not in ("", "-0") else "0"


def _stat_lines(stats: Stats) -> tuple[str, str]:
    if stats.n == 0:
        return "NA", "NA"
    return (f"{_fmt(stats.mean)} ({_fmt(stats.sd)})",
            f"{_fmt(stats.median)} ({_fmt(stats.min)} - {_fmt(stats.max)})")


def _summary_rows(summary: SummaryReport) -> list[tuple[str, str]]:
    rows = []
    for label, side in (("Original", summary.original), ("Augmented", summary.augmented)):
        pct = "NA" if side.correctly_parsed_pct is None else f"{side.correctly_parsed_pct}%"
        rows += [
            (f"{label} in total", str(side.total)),
            ("Wrong sent. segm.", str(side.wrong_segmentation)),
            (f"{label} considered", str(side.considered)),
            ("Corr. parsed sent.", str(side.correctly_parsed)),
            ("Corr. parsed sent. (%)", pct),
        ]
    return rows


def _group_rows(groups: list[GroupReport]) -> list[tuple[str, str, str]]:
    by_name = {g.group: g for g in groups}
    plus = by_name[ORIGINAL_CORRECT]
    minus = by_name[ORIGINAL_INCORRECT]

    def q3(g: GroupReport) -> str:
        return "NA" if g.q3_consistent_error_batches is None else str(g.q3_consistent_error_batches)

    rows = [
        ("Batches considered", str(plus.batches_considered), str(minus.batches_considered)),
        ("Completely corr. batches (Q1)", str(plus.q1_completely_correct),
         str(minus.q1_completely_correct)),
        ("Corr. parsed sent. within a batch (Q2)", "", ""),
    ]
    for row_label, index in (("Mean (SD)", 0), ("Median (Min - Max)", 1)):
        rows.append(("  " + row_label, _stat_lines(plus.q2_correct_per_batch)[index],
                     _stat_lines(minus.q2_correct_per_batch)[index]))
    rows.append(("Batches with consistent errors (Q3)", q3(plus), q3(minus)))
    rows.append(("Number of error clusters (Q4)", "", ""))
    for row_label, index in (("Mean (SD)", 0), ("Median (Min - Max)", 1)):
        rows.append(("  " + row_label, _stat_lines(plus.q4_cluster_count)[index],
                     _stat_lines(minus.q4_cluster_count)[index]))
    rows.append(("Between-cluster NCPTK (Q5)", "", ""))
    for row_label, index in (("Mean (SD)", 0), ("Median (Min - Max)", 1)):
        rows.append(("  " + row_label, _stat_lines(plus.q5_between_cluster_ncptk)[index],
                     _stat_lines(minus.q5_between_cluster_ncptk)[index]))
    return rows


def _align(rows: list[tuple[str, ...]]) -> str:
    widths = [max(len(r[c]) for r in rows) for c in range(len(rows[0]))]
    return "\n".join("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
                     for row in rows)


def render_text(splits: list[SplitReport]) -> str:
    out = io.StringIO()
    for split in splits:
        print(f"=== {split.name} ===", file=out)
        print(_align(_summary_rows(split.summary)), file=out)
        print(file=out)
        header = ("Metric", "Original +", "Original -")
        print(_align([header] + _group_rows(split.groups)), file=out)
        print(file=out)
    return out.getvalue()


# ---------------------------------------------------------------- CSV

def write_summary_csv(path: Path, splits: list[SplitReport]) -> None:
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["split", "side", "total", "wrong_segmentation", "considered",
                         "correctly_parsed", "correctly_parsed_pct"])
        for split in splits:
            for side_name, side in (("original", split.summary.original),
                                    ("augmented", split.summary.augmented)):
                writer.writerow([split.name, side_name, side.total, side.wrong_segmentation,
                                 side.considered, side.correctly_parsed,
                                 "" if side.correctly_parsed_pct is None
                                 else side.correctly_parsed_pct])


def write_groups_csv(path: Path, splits: list[SplitReport]) -> None:
    stat_fields = ["mean", "sd", "median", "min", "max", "n"]
    header = ["split", "group", "batches_considered", "q1_completely_correct",
              "q3_consistent_error_batches"]
    for q in ("q2", "q4", "q5"):
        header += [f"{q}_{f}" for f in stat_fields]
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for split in splits:
            for group in split.groups:
                row = [split.name, group.group, group.batches_considered,
                       group.q1_completely_correct,
                       "" if group.q3_consistent_error_batches is None
                       else group.q3_consistent_error_batches]
                for stats in (group.q2_correct_per_batch, group.q4_cluster_count,
                              group.q5_between_cluster_ncptk):
                    row += ["" if getattr(stats, f) is None else getattr(stats, f)
                            for f in stat_fields]
                writer.writerow(row)


# ------------------------------------------------------- cluster listing

def render_cluster_listing(splits: list[SplitReport]) -> str:
    """Worst-first listing of multi-cluster batches with bracketed diffs."""
    out = io.StringIO()
    for split in splits:
        multi = [o for o in split.outcomes
                 if o.result.original_seg.ok and o.result.cluster_set.cluster_count >= 2]
        multi.sort(key=lambda o: (-o.result.cluster_set.cluster_count, o.sent_id))
        for outcome in multi:
            clusters = outcome.result.cluster_set
            numerals = [[outcome.batch.replacements[outcome.result.considered_indices[i]]
                         for i in members] for members in clusters.clusters]
            print(f"[{split.name}] {outcome.sent_id}: {clusters.cluster_count} clusters, "
                  f"sizes {list(clusters.sizes())}", file=out)
            for c, members in enumerate(clusters.clusters, start=1):
                listed = ", ".join(str(n) for n in numerals[c - 1])
                print(f"  cluster {c}: {len(members)} trees (numerals {listed})", file=out)
            base = outcome.representative_trees[0]
            for c in range(1, clusters.cluster_count):
                for left, right in tree_diff(base, outcome.representative_trees[c]):
                    print(f"  diff 1 vs {c + 1}: {to_bracketed(left)}  !=  {to_bracketed(right)}",
                          file=out)
            print(file=out)
    return out.getvalue()


# ---------------------------------------------------------------- figures

def _tree_positions(root: GrctNode):
    positions: dict[int, tuple[float, float]] = {}
    edges: list[tuple[int, int]] = []
    next_x = [0.0]

    def place(node: GrctNode, depth: int) -> float:
        if not node.children:
            x = next_x[0]
            next_x[0] += 1.0
        else:
            xs = []
            for child in node.children:
                xs.append(place(child, depth + 1))
                edges.append((id(node), id(child)))
            x = sum(xs) / len(xs)
        positions[id(node)] = (x, -float(depth))
        return x

    place(root, 0)
    return positions, edges


def _draw_tree(ax, root: GrctNode, title: str) -> None:
    positions, edges = _tree_positions(root)
    labels = {}
    stack = [root]
    while stack:
        node = stack.pop()
        labels[id(node)] = node.label if node.label else "_"
        stack.extend(node.children)
    for a, b in edges:
        (x1, y1), (x2, y2) = positions[a], positions[b]
        ax.plot([x1, x2], [y1, y2], color="0.6", linewidth=1, zorder=1)
    for key, (x, y) in positions.items():
        ax.text(x, y, labels[key], ha="center", va="center", fontsize=8, zorder=2,
                bbox={"boxstyle": "round,pad=0.25", "facecolor": "white", "edgecolor": "0.4"})
    ax.set_title(title, fontsize=9)
    ax.set_axis_off()
    ax.margins(0.2)


def write_figures(outdir: Path, splits: list[SplitReport]) -> list[Path]:
    written = []
    for split in splits:
        usable = [o.result for o in split.outcomes if o.result.original_seg.ok]
        if usable:
            fig, axes = plt.subplots(1, 2, figsize=(9, 3.2))
            for ax, (name, wanted) in zip(axes, ((ORIGINAL_CORRECT, True),
                                                 (ORIGINAL_INCORRECT, False))):
                counts = [r.correct_count for r in usable if r.original_correct is wanted]
                ax.hist(counts, bins=10, color="#4878a8", edgecolor="white")
                ax.set_title(f"{name} (n={len(counts)})", fontsize=9)
                ax.set_xlabel("correct variants per batch", fontsize=8)
            fig.suptitle(f"{split.name}: correctly parsed variants per batch", fontsize=10)
            fig.tight_layout()
            path = outdir / f"correct_counts_{split.name}.png"
            fig.savefig(path, dpi=150)
            plt.close(fig)
            written.append(path)

            cluster_counts = [r.cluster_set.cluster_count for r in usable
                              if r.cluster_set.cluster_count >= 2]
            if cluster_counts:
                fig, ax = plt.subplots(figsize=(5, 3.2))
                top = max(cluster_counts)
                ax.bar(range(2, top + 1),
                       [cluster_counts.count(k) for k in range(2, top + 1)],
                       color="#a85448", edgecolor="white")
                ax.set_xlabel("error clusters in batch", fontsize=8)
                ax.set_ylabel("batches", fontsize=8)
                ax.set_title(f"{split.name}: error-cluster counts", fontsize=10)
                fig.tight_layout()
                path = outdir / f"cluster_counts_{split.name}.png"
                fig.savefig(path, dpi=150)
                plt.close(fig)
                written.append(path)

        worst = None
        for outcome in split.outcomes:
            if outcome.result.cluster_set.cluster_count >= 2 and (
                    worst is None or outcome.result.cluster_set.cluster_count
                    > worst.result.cluster_set.cluster_count):
                worst = outcome
        if worst is not None:
            written.append(_write_worst_batch_figure(outdir, split.name, worst))
    return written


def _write_worst_batch_figure(outdir: Path, split_name: str, outcome: BatchOutcome) -> Path:
    reps = outcome.representative_trees
    base = reps[0]
    panels: list[tuple[str, GrctNode]] = []
    first_diff = tree_diff(base, reps[1])
    panels.append((f"cluster 1 (size {len(outcome.result.cluster_set.clusters[0])})",
                   first_diff[0][0] if first_diff else base.root))
    for c in range(1, len(reps)):
        diffs = tree_diff(base, reps[c])
        node = diffs[0][1] if diffs else reps[c].root
        panels.append((f"cluster {c + 1} (size {len(outcome.result.cluster_set.clusters[c])})",
                       node))
    cols = min(len(panels), 4)
    rows = (len(panels) + cols - 1) // cols
    fig, axes = plt.subplots(rows, cols, figsize=(3.2 * cols, 2.6 * rows), squeeze=False)
    for ax in axes.flat:
        ax.set_axis_off()
    for ax, (title, node) in zip(axes.flat, panels):
        _draw_tree(ax, node, title)
    fig.suptitle(f"{split_name} {outcome.sent_id}: differing subtrees", fontsize=10)
    fig.tight_layout()
    path = outdir / f"worst_batch_{split_name}.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
