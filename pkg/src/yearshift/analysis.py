"""Per-batch correctness judgments and the Q1-Q5 aggregates.

A parse counts as correct when its FEATS-mode relation-centered tree is
identical to the gold one, i.e. the normalized kernel is exactly 1.
Sentences the parser re-segmented (or failed to return) are excluded:
a bad original drops its whole batch, a bad variant only shrinks the
batch's considered size.
"""
from __future__ import annotations

import statistics
from dataclasses import dataclass

from .augment import AugmentedBatch
from .clusters import ErrorClusterSet, cluster_batch
from .conllu import DepTree, Sentence, TreeError, build_dep_tree
from .grct import GrctNode, GrctTree, LexMode, grct_equal, to_grct
from .kernel import KernelParams

ORIGINAL_CORRECT = "original_correct"
ORIGINAL_INCORRECT = "original_incorrect"


@dataclass(frozen=True)
class SegStatus:
    """How many output sentences came back for one input sentence."""

    outputs: int

    @property
    def ok(self) -> bool:
        return self.outputs == 1

    @property
    def empty(self) -> bool:
        return self.outputs == 0

    @property
    def split(self) -> bool:
        return self.outputs > 1

    def label(self) -> str:
        if self.ok:
            return "ok"
        if self.empty:
            return "empty"
        return f"split({self.outputs})"


def check_segmentation(outputs: list[Sentence]) -> SegStatus:
    return SegStatus(len(outputs))


def is_correctly_parsed(parsed: DepTree, gold: DepTree) -> bool:
    """Identical DEPREL/UPOS/FEATS structure; FORM, LEMMA and the rest ignored."""
    return grct_equal(to_grct(parsed, LexMode.FEATS), to_grct(gold, LexMode.FEATS))


@dataclass(frozen=True)
class BatchResult:
    original_correct: bool
    original_seg: SegStatus
    variant_correct: tuple[bool, ...]
    variant_seg: tuple[SegStatus, ...]
    considered: int
    cluster_set: ErrorClusterSet
    consistent_errors: bool
    # variant index behind each tree the cluster set was built over
    considered_indices: tuple[int, ...] = ()

    @property
    def correct_count(self) -> int:
        return sum(self.variant_correct)


def _feats_grct(sentence: Sentence) -> GrctTree | None:
    """FEATS-mode tree of a parsed sentence; None when no tree can be built."""
    try:
        return to_grct(build_dep_tree(sentence), LexMode.FEATS)
    except TreeError:
        return None


def analyze_batch(batch: AugmentedBatch, parsed_original: list[Sentence],
                  parsed_variants: list[list[Sentence]],
                  params: KernelParams = KernelParams()) -> BatchResult:
    """Judge one parsed batch against its derived golds.

    Variants whose parse mis-segments, or whose output is not a tree, are
    excluded from both the correctness counts and the clustering.
    """
    if len(parsed_variants) != len(batch.variants):
        raise ValueError(
            f"expected {len(batch.variants)} parsed variants, got {len(parsed_variants)}")

    original_seg = check_segmentation(parsed_original)
    original_correct = False
    if original_seg.ok:
        parsed_tree = _feats_grct(parsed_original[0])
        gold_tree = to_grct(build_dep_tree(batch.original), LexMode.FEATS)
        original_correct = parsed_tree is not None and grct_equal(parsed_tree, gold_tree)

    variant_seg = []
    variant_correct = []
    considered_trees = []
    considered_indices = []
    for index, ((_, _, gold), outputs) in enumerate(zip(batch.variants, parsed_variants)):
        seg = check_segmentation(outputs)
        variant_seg.append(seg)
        if not seg.ok:
            variant_correct.append(False)
            continue
        parsed_tree = _feats_grct(outputs[0])
        if parsed_tree is None:
            variant_correct.append(False)
            continue
        considered_trees.append(parsed_tree)
        considered_indices.append(index)
        gold_tree = to_grct(build_dep_tree(gold), LexMode.FEATS)
        variant_correct.append(grct_equal(parsed_tree, gold_tree))

    considered = sum(1 for s in variant_seg if s.ok)
    if considered_trees:
        cluster_set = cluster_batch(considered_trees, params)
    else:
        cluster_set = ErrorClusterSet((), (), ())
    consistent = not any(variant_correct) and cluster_set.cluster_count == 1
    return BatchResult(original_correct, original_seg, tuple(variant_correct),
                       tuple(variant_seg), considered, cluster_set, consistent,
                       tuple(considered_indices))


@dataclass(frozen=True)
class Stats:
    mean: float | None
    sd: float | None
    median: float | None
    min: float | None
    max: float | None
    n: int

    @classmethod
    def from_values(cls, values: list[float]) -> "Stats":
        if not values:
            return cls(None, None, None, None, None, 0)
        return cls(statistics.fmean(values), statistics.pstdev(values),
                   float(statistics.median(values)), float(min(values)),
                   float(max(values)), len(values))


@dataclass(frozen=True)
class GroupReport:
    group: str
    batches_considered: int
    q1_completely_correct: int
    q2_correct_per_batch: Stats
    q3_consistent_error_batches: int | None
    q4_cluster_count: Stats
    q5_between_cluster_ncptk: Stats


def aggregate(results: list[BatchResult], batch_size: int) -> list[GroupReport]:
    """The two per-group reports for one treebank split.

    Batches whose original sentence mis-segments are skipped entirely;
    consistent-error counts apply only to the incorrect-original group;
    cluster-count and between-cluster statistics cover batches with at
    least two clusters.
    """
    reports = []
    usable = [r for r in results if r.original_seg.ok]
    for r in usable:
        if not 0 <= r.correct_count <= batch_size:
            raise ValueError(
                f"correct count {r.correct_count} outside batch size {batch_size}")
    for group, members in ((ORIGINAL_CORRECT, [r for r in usable if r.original_correct]),
                           (ORIGINAL_INCORRECT, [r for r in usable if not r.original_correct])):
        q1 = sum(1 for r in members
                 if r.considered > 0 and r.correct_count == r.considered)
        q2 = Stats.from_values([float(r.correct_count) for r in members])
        q3 = (sum(1 for r in members if r.consistent_errors)
              if group == ORIGINAL_INCORRECT else None)
        multi = [r for r in members if r.cluster_set.cluster_count >= 2]
        q4 = Stats.from_values([float(r.cluster_set.cluster_count) for r in multi])
        q5 = Stats.from_values([v for r in multi
                                for v in r.cluster_set.between_cluster_values()])
        reports.append(GroupReport(group, len(members), q1, q2, q3, q4, q5))
    return reports


@dataclass(frozen=True)
class SideSummary:
    total: int
    wrong_segmentation: int
    considered: int
    correctly_parsed: int
    correctly_parsed_pct: float | None


@dataclass(frozen=True)
class SummaryReport:
    original: SideSummary
    augmented: SideSummary


def _pct(correct: int, considered: int) -> float | None:
    if considered == 0:
        return None
    return round(100.0 * correct / considered, 1)


def summarize(results: list[BatchResult]) -> SummaryReport:
    """The headline counts for one split: originals and augmented variants.

    Batches dropped for a mis-segmented original do not contribute their
    variants to the augmented rows.
    """
    total = len(results)
    wrong = sum(1 for r in results if not r.original_seg.ok)
    considered = total - wrong
    correct = sum(1 for r in results if r.original_seg.ok and r.original_correct)

    usable = [r for r in results if r.original_seg.ok]
    aug_total = sum(len(r.variant_seg) for r in usable)
    aug_wrong = sum(sum(1 for s in r.variant_seg if not s.ok) for r in usable)
    aug_considered = aug_total - aug_wrong
    aug_correct = sum(r.correct_count for r in usable)

    return SummaryReport(
        SideSummary(total, wrong, considered, correct, _pct(correct, considered)),
        SideSummary(aug_total, aug_wrong, aug_considered, aug_correct,
                    _pct(aug_correct, aug_considered)))


def tree_diff(a: GrctTree, b: GrctTree) -> list[tuple[GrctNode, GrctNode]]:
    """Maximal differing subtree pairs.

    Descends while labels and child counts match and reports the first
    mismatching pair along each diverging path; identical trees yield [].
    """
    diffs: list[tuple[GrctNode, GrctNode]] = []
    stack = [(a.root, b.root)]
    while stack:
        x, y = stack.pop()
        if x.label != y.label or x.kind is not y.kind or len(x.children) != len(y.children):
            diffs.append((x, y))
            continue
        stack.extend(reversed(list(zip(x.children, y.children))))
    return diffs
