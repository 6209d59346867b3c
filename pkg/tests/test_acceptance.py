"""Acceptance suite: one criterion per test, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines.
Expected golden-run values are derived in tests/fixtures/golden_expected.md.
"""
import functools
import json
import random
import time
from itertools import combinations

import pytest

from golden import BATCH_SIZE, FIXTURES, write_mock_setup
from yearshift.augment import (SamplingConfig, find_year_numerals, sample_eval_numbers,
                               sample_training_numbers, substitute_numeral)
from yearshift.cli import main
from yearshift.clusters import (IdentityGraph, bron_kerbosch, connected_components,
                                identity_graph)
from yearshift.conllu import build_dep_tree, parse_conllu, read_treebank, serialize_conllu
from yearshift.grct import GrctNode, GrctTree, LexMode, NodeKind, grct_equal, to_grct
from yearshift.kernel import KernelParams, ncptk, ptk, ptk_oracle

TOLERANCE = 1e-9

# frozen from the enumeration oracle; derivation in fixtures/golden_expected.md
GOLDEN_Q5_ORIGINAL_CORRECT = 0.8812356460381567
GOLDEN_Q5_ORIGINAL_INCORRECT = 0.7612721771316666


def criterion(name):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"FAIL  {name}")
                raise
            print(f"PASS  {name}")
        return run
    return wrap


def random_grct(rng, max_tokens=2):
    """A structurally valid GRCT with up to max_tokens tokens (3 nodes each)."""
    deprels = ("root", "obl", "case")
    upos = ("NUM", "VERB")
    feats = ("_", "NumForm=Digit")

    def token_chain():
        return GrctNode(rng.choice(upos), NodeKind.POS,
                        (GrctNode(rng.choice(feats), NodeKind.LEXICAL),))

    n_tokens = rng.randint(1, max_tokens)
    node = GrctNode(rng.choice(deprels), NodeKind.RELATION, (token_chain(),))
    for _ in range(n_tokens - 1):
        child = GrctNode(rng.choice(deprels), NodeKind.RELATION, (token_chain(),))
        children = [node.children[0], child] if rng.random() < 0.5 \
            else [child, node.children[0]]
        node = GrctNode(node.label, NodeKind.RELATION, tuple(children))
    return GrctTree.from_root(node)


@criterion("kernel oracle equivalence (>=200 pairs, <=6 nodes, 1e-9, <60s)")
def test_kernel_oracle_equivalence():
    rng = random.Random(101)
    started = time.monotonic()
    for _ in range(250):
        a = random_grct(rng)
        b = random_grct(rng)
        assert a.node_count <= 6 and b.node_count <= 6
        params = KernelParams(rng.uniform(0.05, 1.0), rng.uniform(0.05, 1.0))
        assert abs(ptk(a, b, params) - ptk_oracle(a, b, params)) <= TOLERANCE
    assert time.monotonic() - started < 60.0


@criterion("normalization suite (>=500 pairs in [0,1], identity iff unity)")
def test_normalization_suite():
    rng = random.Random(103)
    params = KernelParams()
    for _ in range(600):
        a = random_grct(rng)
        b = random_grct(rng)
        value = ncptk(a, b, params)
        assert 0.0 <= value <= 1.0 + TOLERANCE
        assert abs(ncptk(a, a, params) - 1.0) <= TOLERANCE
        assert (abs(value - 1.0) <= TOLERANCE) == grct_equal(a, b)


@criterion("clique correctness (exhaustive n<=4, random n=5,6, identity graphs)")
def test_clique_correctness():
    def brute_force(g):
        adj = g.neighbors()
        cliques = [set(s) for size in range(1, g.n + 1)
                   for s in combinations(range(g.n), size)
                   if all(b in adj[a] for a, b in combinations(s, 2))]
        return sorted(sorted(c) for c in cliques
                      if not any(c < other for other in cliques))

    for n in range(1, 5):
        pairs = list(combinations(range(n), 2))
        for mask in range(1 << len(pairs)):
            g = IdentityGraph(n, frozenset(p for i, p in enumerate(pairs) if mask >> i & 1))
            assert bron_kerbosch(g) == brute_force(g)

    rng = random.Random(107)
    for _ in range(200):
        n = rng.choice((5, 6))
        g = IdentityGraph(n, frozenset(p for p in combinations(range(n), 2)
                                       if rng.random() < 0.5))
        assert bron_kerbosch(g) == brute_force(g)

    for _ in range(100):
        trees = [random_grct(rng, max_tokens=1) for _ in range(rng.randint(1, 10))]
        g = identity_graph(trees)
        cliques = bron_kerbosch(g)
        assert cliques == connected_components(g)
        assert sorted(i for c in cliques for i in c) == list(range(g.n))


@criterion("substitution invariants on every fixture sentence + exact regex behavior")
def test_substitution_invariants():
    assert [m.digits for m in find_year_numerals("built in 1905 by")] == ["1905"]
    assert find_year_numerals("born in 1905.") == []
    assert find_year_numerals("costs 12345 kr") == []

    treebank = read_treebank(FIXTURES / "mini.conllu")
    substituted_any = False
    for sentence in treebank.sentences:
        if not find_year_numerals(sentence.text):
            continue
        substituted_any = True
        for number in (1100, 1776, 2099):
            variant = substitute_numeral(sentence, number)
            assert len(variant.tokens) == len(sentence.tokens)
            for before, after in zip(sentence.tokens, variant.tokens):
                assert before.head == after.head
                assert before.deprel == after.deprel
                assert before.upos == after.upos
                assert before.feats == after.feats
            assert grct_equal(to_grct(build_dep_tree(sentence), LexMode.FEATS),
                              to_grct(build_dep_tree(variant), LexMode.FEATS))
    assert substituted_any


@criterion("end-to-end golden run (planted counts, stats, byte-identical JSON)")
def test_end_to_end_golden_run(tmp_path):
    command, treebank = write_mock_setup(tmp_path)
    outs = []
    for name in ("gold1", "gold2"):
        out = tmp_path / name
        code = main(["evaluate", "--treebank", str(treebank), "--parser-cmd", command,
                     "--out", str(out), "--eval-count", str(BATCH_SIZE)])
        assert code == 0
        outs.append(out)
    assert (outs[0] / "report.json").read_bytes() == (outs[1] / "report.json").read_bytes()

    doc = json.loads((outs[0] / "report.json").read_text(encoding="utf-8"))
    split = doc["splits"]["mini"]

    assert split["summary"]["original"]["total"] == 6
    assert split["summary"]["original"]["wrong_segmentation"] == 2
    assert split["summary"]["original"]["considered"] == 4
    assert split["summary"]["original"]["correctly_parsed"] == 2
    assert split["summary"]["original"]["correctly_parsed_pct"] == 50.0
    assert split["summary"]["augmented"]["total"] == 4 * BATCH_SIZE
    assert split["summary"]["augmented"]["correctly_parsed"] == 9
    assert split["summary"]["augmented"]["correctly_parsed_pct"] == 45.0

    plus, minus = split["groups"]
    assert plus["group"] == "original_correct"
    assert plus["batches_considered"] == 2
    assert plus["q1_completely_correct"] == 1
    q2 = plus["q2_correct_per_batch"]
    assert (q2["mean"], q2["sd"], q2["median"], q2["min"], q2["max"], q2["n"]) == \
        (4.5, 0.5, 4.5, 4.0, 5.0, 2)
    assert plus["q4_cluster_count"]["mean"] == 2.0 and plus["q4_cluster_count"]["n"] == 1
    assert abs(plus["q5_between_cluster_ncptk"]["mean"]
               - GOLDEN_Q5_ORIGINAL_CORRECT) <= TOLERANCE

    assert minus["group"] == "original_incorrect"
    assert minus["batches_considered"] == 2
    assert minus["q1_completely_correct"] == 0
    assert minus["q3_consistent_error_batches"] == 1
    q2m = minus["q2_correct_per_batch"]
    assert (q2m["mean"], q2m["sd"], q2m["median"], q2m["min"], q2m["max"]) == \
        (0.0, 0.0, 0.0, 0.0, 0.0)
    assert minus["q4_cluster_count"]["mean"] == 2.0 and minus["q4_cluster_count"]["n"] == 1
    assert abs(minus["q5_between_cluster_ncptk"]["mean"]
               - GOLDEN_Q5_ORIGINAL_INCORRECT) <= TOLERANCE

    by_id = {b["sent_id"]: b for b in split["batches"]}
    assert by_id["s1"]["original_seg"] == "split(2)"
    assert by_id["s2"]["original_seg"] == "empty"
    assert by_id["s5"]["cluster_sizes"] == [3, 2]
    assert by_id["s6"]["cluster_sizes"] == [4, 1]


@criterion("determinism: identical augment outputs, eval/train disjoint")
def test_determinism(tmp_path):
    digests = []
    for name in ("d1.conllu", "d2.conllu"):
        out = tmp_path / name
        assert main(["augment", "--treebank", str(FIXTURES / "mini.conllu"),
                     "--mode", "numeral", "--out", str(out)]) == 0
        digests.append(out.read_bytes())
    assert digests[0] == digests[1]

    cfg = SamplingConfig()
    eval_numbers = sample_eval_numbers(cfg)
    training = sample_training_numbers(cfg, exclude=set(eval_numbers))
    assert len(eval_numbers) == 50 and len(training) == 20
    assert not set(training) & set(eval_numbers)
    assert sample_eval_numbers(cfg) == eval_numbers  # stable across calls


@criterion("CoNLL-U round trip byte-identical on all fixtures (MWT + empty nodes)")
def test_round_trip_all_fixtures():
    fixtures = sorted(FIXTURES.glob("*.conllu"))
    assert fixtures
    saw_mwt = saw_empty = False
    for path in fixtures:
        raw = path.read_text(encoding="utf-8")
        treebank = parse_conllu(raw)
        assert serialize_conllu(treebank) == raw, path
        saw_mwt = saw_mwt or any(s.mwt_lines for s in treebank.sentences)
        saw_empty = saw_empty or any(s.empty_nodes for s in treebank.sentences)
    assert saw_mwt and saw_empty


@pytest.mark.skip(reason="needs a pinned neural-pipeline adapter and UD_English-EWT; "
                         "directional integration check, run manually when models exist")
def test_stanza_integration_directional():
    """On real data the original correct-parse rate should land near the low
    twenties of percent, the augmented rate within a few points of it, and at
    least one incorrect-original batch must show two or more error clusters."""
