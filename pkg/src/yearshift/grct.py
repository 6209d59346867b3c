"""Grammatical relation centered trees.

Each token of a dependency tree becomes a three-node chain
relation -> part-of-speech -> lexical, and a dependent's relation node
hangs under its head's relation node.  The lexical layer carries either
FORM or FEATS, so FEATS-mode trees are invariant under numeral
substitution while FORM-mode trees expose it.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

from .conllu import DepTree


class NodeKind(enum.Enum):
    RELATION = "relation"
    POS = "pos"
    LEXICAL = "lexical"


class LexMode(enum.Enum):
    FORM = "form"
    FEATS = "feats"


@dataclass(frozen=True)
class GrctNode:
    label: str
    kind: NodeKind
    children: tuple["GrctNode", ...] = ()


@dataclass(frozen=True)
class GrctTree:
    root: GrctNode
    node_count: int

    @classmethod
    def from_root(cls, root: GrctNode) -> "GrctTree":
        count = 0
        stack = [root]
        while stack:
            node = stack.pop()
            count += 1
            stack.extend(node.children)
        return cls(root, count)


def to_grct(tree: DepTree, mode: LexMode = LexMode.FORM) -> GrctTree:
    """Transform a dependency tree into its relation-centered form.

    At each relation node the children (the head's own POS chain plus the
    dependents' relation nodes) are ordered by the word index of their
    source tokens; the POS chain takes the head token's index.
    """

    def build(index: int) -> GrctNode:
        tok = tree.nodes[index]
        lex = tok.form if mode is LexMode.FORM else tok.feats
        chain = GrctNode(tok.upos, NodeKind.POS, (GrctNode(lex, NodeKind.LEXICAL),))
        ordered = sorted([(index, chain)] + [(d, build(d)) for d in tree.dependents(index)])
        return GrctNode(tok.deprel, NodeKind.RELATION, tuple(n for _, n in ordered))

    return GrctTree.from_root(build(tree.root))


def grct_equal(a: GrctTree, b: GrctTree) -> bool:
    """Structural identity: same labels, kinds, and child order throughout."""
    if a.node_count != b.node_count:
        return False
    stack = [(a.root, b.root)]
    while stack:
        x, y = stack.pop()
        if x.label != y.label or x.kind is not y.kind or len(x.children) != len(y.children):
            return False
        stack.extend(zip(x.children, y.children))
    return True


def structure_key(node: GrctNode) -> tuple:
    """Hashable canonical form; equal keys iff grct_equal on the subtrees."""
    return (node.kind.value, node.label, tuple(structure_key(c) for c in node.children))


_ESCAPES = {"(": "\\(", ")": "\\)", " ": "\\ ", "\\": "\\\\"}


def _escape(label: str) -> str:
    return "".join(_ESCAPES.get(ch, ch) for ch in label)


def to_bracketed(node: GrctNode) -> str:
    """Debug serialization, e.g. ``(root (INTJ Hej))``."""
    if node.kind is NodeKind.LEXICAL:
        return _escape(node.label)
    inner = " ".join(to_bracketed(c) for c in node.children)
    return f"({_escape(node.label)} {inner})" if inner else f"({_escape(node.label)})"


def parse_bracketed(text: str) -> GrctTree:
    """Parse the bracketed debug form back into a tree.

    Kinds are recovered structurally: a bare atom is lexical, a node whose
    single child is an atom is a POS node, everything else a relation node.
    """
    tokens = _lex(text)
    node, rest = _parse_node(tokens)
    if rest:
        raise ValueError("trailing content after bracketed tree")
    return GrctTree.from_root(node)


def _lex(text: str) -> list[tuple[str, str]]:
    """Tagged tokens: ("open", ""), ("close", ""), or ("atom", label)."""
    out: list[tuple[str, str]] = []
    atom: list[str] = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\\" and i + 1 < len(text):
            atom.append(text[i + 1])
            i += 2
            continue
        if ch in "() \t\n":
            if atom:
                out.append(("atom", "".join(atom)))
                atom = []
            if ch == "(":
                out.append(("open", ""))
            elif ch == ")":
                out.append(("close", ""))
        else:
            atom.append(ch)
        i += 1
    if atom:
        out.append(("atom", "".join(atom)))
    return out


def _parse_node(tokens: list[tuple[str, str]]) -> tuple[GrctNode, list[tuple[str, str]]]:
    if not tokens:
        raise ValueError("empty bracketed tree")
    (tag, value), rest = tokens[0], tokens[1:]
    if tag == "atom":
        return GrctNode(value, NodeKind.LEXICAL), rest
    if tag == "close":
        raise ValueError("unexpected ')'")
    if not rest or rest[0][0] != "atom":
        raise ValueError("expected node label after '('")
    label, rest = rest[0][1], rest[1:]
    children: list[GrctNode] = []
    while rest and rest[0][0] != "close":
        child, rest = _parse_node(rest)
        children.append(child)
    if not rest:
        raise ValueError("unterminated '('")
    rest = rest[1:]
    if len(children) == 1 and children[0].kind is NodeKind.LEXICAL and not children[0].children:
        kind = NodeKind.POS
    else:
        kind = NodeKind.RELATION
    return GrctNode(label, kind, tuple(children)), rest
