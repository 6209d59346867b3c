from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from yearshift.conllu import (ConlluError, Sentence, Token, TreeError, Treebank,
                              build_dep_tree, parse_conllu, serialize_conllu)

FIXTURES = Path(__file__).parent / "fixtures"

HEJ = "1\tHej\thej\tINTJ\t_\t_\t0\tdiscourse\t_\t_"


def test_parse_minimal_sentence():
    tb = parse_conllu(HEJ + "\n\n")
    assert len(tb) == 1
    assert len(tb.sentences[0].tokens) == 1
    tok = tb.sentences[0].tokens[0]
    assert tok.form == "Hej" and tok.head == 0 and tok.deprel == "discourse"


def test_parse_preserves_mwt_and_builds_tree_from_words_only():
    text = ("# text = don't stop\n"
            "1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_\n"
            "1\tdo\tdo\tAUX\t_\t_\t3\taux\t_\t_\n"
            "2\tn't\tnot\tPART\t_\t_\t3\tadvmod\t_\t_\n"
            "3\tstop\tstop\tVERB\t_\t_\t0\troot\t_\t_\n\n")
    tb = parse_conllu(text)
    sentence = tb.sentences[0]
    assert len(sentence.mwt_lines) == 1
    tree = build_dep_tree(sentence)
    assert len(tree.nodes) == 3
    assert tree.nodes[tree.root].form == "stop"


def test_wrong_column_count_names_line():
    bad = "1\tHej\thej\tINTJ\t_\t_\t0\tdiscourse\t_\n"
    with pytest.raises(ConlluError, match="line 1: expected 10 columns"):
        parse_conllu(bad)


def test_non_numeric_head_and_id_rejected():
    with pytest.raises(ConlluError, match="line 1"):
        parse_conllu("x\tHej\thej\tINTJ\t_\t_\t0\tdiscourse\t_\t_\n")
    with pytest.raises(ConlluError, match="non-numeric head"):
        parse_conllu("1\tHej\thej\tINTJ\t_\t_\ty\tdiscourse\t_\t_\n")


def test_duplicate_id_rejected():
    text = HEJ + "\n" + HEJ + "\n\n"
    with pytest.raises(ConlluError, match="duplicate token id 1"):
        parse_conllu(text)


def test_multiple_roots_is_recoverable_not_fatal():
    text = ("1\ta\ta\tX\t_\t_\t0\troot\t_\t_\n"
            "2\tb\tb\tX\t_\t_\t0\troot\t_\t_\n\n")
    tb = parse_conllu(text)
    sentence = tb.sentences[0]
    assert any("root" in p for p in sentence.validation_errors())
    with pytest.raises(TreeError, match="found 2"):
        build_dep_tree(sentence)


def test_validate_treebank_carries_sentence_index():
    from yearshift.conllu import validate_treebank
    text = (HEJ + "\n\n"
            "1\ta\ta\tX\t_\t_\t0\troot\t_\t_\n"
            "2\tb\tb\tX\t_\t_\t0\troot\t_\t_\n\n")
    problems = validate_treebank(parse_conllu(text))
    assert problems and problems[0].startswith("sentence 1:")


def test_serialize_empty_treebank():
    assert serialize_conllu(Treebank(())) == ""


def test_comment_order_kept():
    text = "# text = Hej\n" + HEJ + "\n\n"
    tb = parse_conllu(text)
    assert serialize_conllu(tb) == text
    assert tb.sentences[0].text == "Hej"


@pytest.mark.parametrize("name", ["mini.conllu"])
def test_round_trip_fixture_byte_identical(name):
    raw = (FIXTURES / name).read_text(encoding="utf-8")
    assert serialize_conllu(parse_conllu(raw)) == raw


def test_round_trip_structural_equality():
    raw = (FIXTURES / "mini.conllu").read_text(encoding="utf-8")
    tb = parse_conllu(raw)
    assert parse_conllu(serialize_conllu(tb)) == Treebank(tb.sentences)


def test_no_token_lines_dropped():
    raw = (FIXTURES / "mini.conllu").read_text(encoding="utf-8")
    word_lines = [l for l in raw.splitlines()
                  if l and not l.startswith("#") and "-" not in l.split("\t")[0]
                  and "." not in l.split("\t")[0]]
    tb = parse_conllu(raw)
    assert sum(len(s.tokens) for s in tb.sentences) == len(word_lines)


def test_build_dep_tree_chain():
    text = ("1\ta\ta\tX\t_\t_\t0\troot\t_\t_\n"
            "2\tb\tb\tX\t_\t_\t1\tdep\t_\t_\n\n")
    tree = build_dep_tree(parse_conllu(text).sentences[0])
    assert tree.root == 0
    assert tree.dependents(0) == (1,)

    chain = ("1\ta\ta\tX\t_\t_\t0\troot\t_\t_\n"
             "2\tb\tb\tX\t_\t_\t1\tdep\t_\t_\n"
             "3\tc\tc\tX\t_\t_\t2\tdep\t_\t_\n\n")
    tree = build_dep_tree(parse_conllu(chain).sentences[0])
    assert tree.dependents(0) == (1,) and tree.dependents(1) == (2,)


def test_self_loop_is_cycle_error():
    text = ("1\ta\ta\tX\t_\t_\t0\troot\t_\t_\n"
            "2\tb\tb\tX\t_\t_\t2\tdep\t_\t_\n\n")
    with pytest.raises(TreeError):
        build_dep_tree(parse_conllu(text).sentences[0])


def test_cycle_lists_ids():
    text = ("1\ta\ta\tX\t_\t_\t0\troot\t_\t_\n"
            "2\tb\tb\tX\t_\t_\t3\tdep\t_\t_\n"
            "3\tc\tc\tX\t_\t_\t2\tdep\t_\t_\n\n")
    with pytest.raises(TreeError, match=r"\[2, 3\]"):
        build_dep_tree(parse_conllu(text).sentences[0])


def test_tree_has_all_nodes_reachable():
    raw = (FIXTURES / "mini.conllu").read_text(encoding="utf-8")
    for sentence in parse_conllu(raw).sentences:
        tree = build_dep_tree(sentence)
        seen = set()
        stack = [tree.root]
        while stack:
            i = stack.pop()
            seen.add(i)
            stack.extend(tree.dependents(i))
        assert seen == set(range(len(sentence.tokens)))
        assert sum(len(tree.dependents(i)) for i in seen) == len(sentence.tokens) - 1


def test_reconstruct_text_space_after_and_mwt():
    raw = (FIXTURES / "mini.conllu").read_text(encoding="utf-8")
    by_id = {s.sent_id: s for s in parse_conllu(raw).sentences}
    assert by_id["s7"].reconstruct_text() == "don't stop"
    assert by_id["s10"].reconstruct_text() == "from 1918."


token_texts = st.text(alphabet=st.characters(blacklist_characters="\t\n", codec="utf-8"),
                      min_size=1, max_size=6)


@st.composite
def random_sentences(draw):
    n = draw(st.integers(min_value=1, max_value=6))
    tokens = []
    for i in range(1, n + 1):
        head = 0 if i == 1 else draw(st.integers(min_value=1, max_value=i - 1))
        tokens.append(Token(i, draw(token_texts), draw(token_texts), "X", "_", "_",
                            head, "dep" if head else "root", "_", "_"))
    return Sentence(("# sent_id = h1",), tuple(tokens))


@given(random_sentences())
def test_round_trip_random_sentences(sentence):
    tb = Treebank((sentence,))
    assert parse_conllu(serialize_conllu(tb)) == tb
    assert serialize_conllu(parse_conllu(serialize_conllu(tb))) == serialize_conllu(tb)
