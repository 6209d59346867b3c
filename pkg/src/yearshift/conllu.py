"""CoNLL-U reading, validation, serialization, and dependency-tree construction.

Round-tripping is byte-exact for valid input: comments, multiword-token
ranges, and empty nodes are preserved verbatim at their original positions.
"""
from __future__ import annotations

from dataclasses import dataclass


class ConlluError(ValueError):
    """Malformed CoNLL-U input; message names the offending line."""


class TreeError(ValueError):
    """Sentence whose head fields do not form a single rooted tree."""


@dataclass(frozen=True)
class Token:
    """One word line of a CoNLL-U sentence (10 columns)."""

    id: int
    form: str
    lemma: str
    upos: str
    xpos: str
    feats: str
    head: int
    deprel: str
    deps: str
    misc: str

    def with_form(self, form: str, lemma: str) -> "Token":
        """Copy with FORM and LEMMA replaced; every other column kept."""
        return Token(self.id, form, lemma, self.upos, self.xpos, self.feats,
                     self.head, self.deprel, self.deps, self.misc)

    def to_line(self) -> str:
        return "\t".join((str(self.id), self.form, self.lemma, self.upos,
                          self.xpos, self.feats, str(self.head), self.deprel,
                          self.deps, self.misc))


@dataclass(frozen=True)
class Sentence:
    """One sentence block: comments, word tokens, and preserved extras.

    ``mwt_lines`` and ``empty_nodes`` hold ``(anchor, seq, raw_line)`` where
    ``anchor`` is the number of word tokens preceding the line and ``seq``
    its position among the block's non-comment lines, so serialization can
    restore the original interleaving exactly.
    """

    comments: tuple[str, ...] = ()
    tokens: tuple[Token, ...] = ()
    mwt_lines: tuple[tuple[int, int, str], ...] = ()
    empty_nodes: tuple[tuple[int, int, str], ...] = ()

    @property
    def sent_id(self) -> str | None:
        return self.comment_value("sent_id")

    def comment_value(self, key: str) -> str | None:
        prefix = f"# {key} ="
        for line in self.comments:
            if line.startswith(prefix):
                return line[len(prefix):].lstrip(" ")
        return None

    @property
    def text(self) -> str:
        """Surface text: the ``# text`` comment, else rebuilt from tokens."""
        stated = self.comment_value("text")
        if stated is not None:
            return stated
        return self.reconstruct_text()

    def reconstruct_text(self) -> str:
        """Join FORMs honoring SpaceAfter=No and multiword-token surfaces."""
        covered: dict[int, tuple[str, str, int]] = {}
        for anchor, _seq, raw in self.mwt_lines:
            cols = raw.split("\t")
            lo, hi = cols[0].split("-")
            covered[int(lo)] = (cols[1], cols[9] if len(cols) > 9 else "_", int(hi))
        parts: list[str] = []
        skip_until = 0
        for tok in self.tokens:
            if tok.id <= skip_until:
                continue
            if tok.id in covered:
                form, misc, skip_until = covered[tok.id]
            else:
                form, misc = tok.form, tok.misc
            parts.append(form)
            if "SpaceAfter=No" not in misc.split("|"):
                parts.append(" ")
        return "".join(parts).rstrip(" ")

    def with_comment(self, key: str, value: str) -> "Sentence":
        """Copy with the ``# key = value`` comment replaced (or appended)."""
        line = f"# {key} = {value}"
        prefix = f"# {key} ="
        comments = list(self.comments)
        for i, existing in enumerate(comments):
            if existing.startswith(prefix):
                comments[i] = line
                break
        else:
            comments.append(line)
        return Sentence(tuple(comments), self.tokens, self.mwt_lines, self.empty_nodes)

    def validation_errors(self) -> list[str]:
        """Recoverable structural problems (ids, heads, root count)."""
        problems = []
        for pos, tok in enumerate(self.tokens, start=1):
            if tok.id != pos:
                problems.append(f"token ids not consecutive at position {pos} (found {tok.id})")
                break
        n = len(self.tokens)
        roots = [t.id for t in self.tokens if t.head == 0]
        if len(roots) != 1:
            problems.append(f"expected exactly one root, found {len(roots)}")
        for tok in self.tokens:
            if tok.head == tok.id:
                problems.append(f"token {tok.id} heads itself")
            elif tok.head > n:
                problems.append(f"token {tok.id} has head {tok.head} outside sentence")
        return problems


@dataclass(frozen=True)
class DepTree:
    """Rooted dependency tree over the word tokens of one sentence."""

    nodes: tuple[Token, ...]
    children: tuple[tuple[int, ...], ...]
    root: int

    def dependents(self, index: int) -> tuple[int, ...]:
        return self.children[index]


@dataclass(frozen=True)
class Treebank:
    sentences: tuple[Sentence, ...]
    source_name: str = ""

    def __len__(self) -> int:
        return len(self.sentences)


def parse_conllu(text: str, source_name: str = "") -> Treebank:
    """Parse CoNLL-U text into a Treebank, preserving every line.

    Raises ConlluError (with the 1-based line number) for malformed token
    lines.  Structural problems such as multiple roots are left for
    Sentence.validation_errors / build_dep_tree so that parser output under
    study can be flagged rather than crash the run.
    """
    sentences: list[Sentence] = []
    comments: list[str] = []
    tokens: list[Token] = []
    mwt: list[tuple[int, int, str]] = []
    empty: list[tuple[int, int, str]] = []
    seq = 0
    seen_ids: set[int] = set()

    def flush() -> None:
        nonlocal comments, tokens, mwt, empty, seq, seen_ids
        if comments or tokens or mwt or empty:
            sentences.append(Sentence(tuple(comments), tuple(tokens), tuple(mwt), tuple(empty)))
        comments, tokens, mwt, empty = [], [], [], []
        seq = 0
        seen_ids = set()

    for lineno, line in enumerate(text.split("\n"), start=1):
        if line == "":
            flush()
            continue
        if line.startswith("#"):
            comments.append(line)
            continue
        cols = line.split("\t")
        if len(cols) != 10:
            raise ConlluError(f"line {lineno}: expected 10 columns, got {len(cols)}")
        ident = cols[0]
        if "-" in ident:
            mwt.append((len(tokens), seq, line))
            seq += 1
            continue
        if "." in ident:
            empty.append((len(tokens), seq, line))
            seq += 1
            continue
        if not ident.isdigit() or int(ident) < 1:
            raise ConlluError(f"line {lineno}: non-numeric or invalid token id {ident!r}")
        if not cols[6].isdigit():
            raise ConlluError(f"line {lineno}: non-numeric head {cols[6]!r}")
        tid = int(ident)
        if tid in seen_ids:
            raise ConlluError(f"line {lineno}: duplicate token id {tid}")
        seen_ids.add(tid)
        tokens.append(Token(tid, cols[1], cols[2], cols[3], cols[4], cols[5],
                            int(cols[6]), cols[7], cols[8], cols[9]))
        seq += 1
    flush()
    return Treebank(tuple(sentences), source_name)


def serialize_sentence(sentence: Sentence) -> str:
    """One sentence block including the trailing blank separator line."""
    extras = sorted(sentence.mwt_lines + sentence.empty_nodes, key=lambda e: e[1])
    lines = list(sentence.comments)
    ei = 0
    for pos, tok in enumerate(sentence.tokens):
        while ei < len(extras) and extras[ei][0] == pos:
            lines.append(extras[ei][2])
            ei += 1
        lines.append(tok.to_line())
    while ei < len(extras):
        lines.append(extras[ei][2])
        ei += 1
    return "\n".join(lines) + "\n\n"


def serialize_conllu(treebank: Treebank) -> str:
    return "".join(serialize_sentence(s) for s in treebank.sentences)


def build_dep_tree(sentence: Sentence) -> DepTree:
    """Dependency tree from head fields; MWT ranges and empty nodes excluded.

    Raises TreeError when the sentence has zero or multiple roots, heads
    outside the sentence, or a cycle (cycle ids listed in the message).
    """
    tokens = sentence.tokens
    n = len(tokens)
    roots = [i for i, t in enumerate(tokens) if t.head == 0]
    if len(roots) != 1:
        raise TreeError(f"expected exactly one root token, found {len(roots)}")
    children: list[list[int]] = [[] for _ in range(n)]
    for i, tok in enumerate(tokens):
        if tok.head == 0:
            continue
        if tok.head > n or tok.head == tok.id:
            raise TreeError(f"token {tok.id} has invalid head {tok.head}")
        children[tok.head - 1].append(i)
    reached: set[int] = set()
    stack = [roots[0]]
    while stack:
        i = stack.pop()
        reached.add(i)
        stack.extend(children[i])
    if len(reached) != n:
        cycle_ids = sorted(tokens[i].id for i in range(n) if i not in reached)
        raise TreeError(f"cycle detected among token ids {cycle_ids}")
    return DepTree(tuple(tokens), tuple(tuple(c) for c in children), roots[0])


def validate_treebank(treebank: Treebank) -> list[str]:
    """Recoverable problems across all sentences, tagged with their index."""
    problems = []
    for index, sentence in enumerate(treebank.sentences):
        for problem in sentence.validation_errors():
            problems.append(f"sentence {index}: {problem}")
    return problems


def read_treebank(path) -> Treebank:
    from pathlib import Path
    p = Path(path)
    return parse_conllu(p.read_text(encoding="utf-8"), source_name=p.stem)


def write_treebank(treebank: Treebank, path) -> None:
    from pathlib import Path
    Path(path).write_text(serialize_conllu(treebank), encoding="utf-8")
