"""Year-numeral detection, seeded sampling, and substitution.

A year numeral is a 4-digit group with a space on both sides; only the
first detected group drives substitution, but every space-delimited
occurrence of the same digits in the sentence is replaced.  Replacement
numbers come from a self-contained splitmix64 stream so that sampling is
reproducible across platforms and processes.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .conllu import Sentence, Token, Treebank

YEAR_PATTERN = re.compile(r"(?<= )\d{4}(?= )")

DEFAULT_TOKEN = "NNNN"


class SubstitutionError(ValueError):
    pass


class SamplingError(ValueError):
    pass


@dataclass(frozen=True)
class NumeralMatch:
    start: int
    end: int
    digits: str


@dataclass(frozen=True)
class SamplingConfig:
    eval_seed: int = 7919
    train_seed: int = 7907
    eval_count: int = 50
    train_count: int = 20
    oversample: int = 100
    lo: int = 1100
    hi: int = 2100

    def __post_init__(self) -> None:
        if self.lo >= self.hi:
            raise SamplingError(f"empty range [{self.lo}, {self.hi})")
        if self.eval_count < 0 or self.train_count < 0 or self.oversample < 0:
            raise SamplingError("sample counts must be non-negative")


@dataclass(frozen=True)
class AugmentedBatch:
    original: Sentence
    replaced_digits: str
    variants: tuple[tuple[int, str, Sentence], ...]

    def __len__(self) -> int:
        return len(self.variants)

    @property
    def replacements(self) -> tuple[int, ...]:
        return tuple(r for r, _, _ in self.variants)


def find_year_numerals(text: str) -> list[NumeralMatch]:
    """All space-delimited 4-digit groups, left to right."""
    return [NumeralMatch(m.start(), m.end(), m.group())
            for m in YEAR_PATTERN.finditer(text)]


def _splitmix64(state: int):
    """Documented portable 64-bit stream (splitmix64)."""
    mask = (1 << 64) - 1
    while True:
        state = (state + 0x9E3779B97F4A7C15) & mask
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & mask
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & mask
        yield z ^ (z >> 31)


def sample_uniform(seed: int, count: int, lo: int, hi: int) -> list[int]:
    """count integers uniform in [lo, hi), with replacement, seeded.

    Rejection sampling over the splitmix64 stream keeps the distribution
    exactly uniform and the sequence identical on every platform.
    """
    if lo >= hi:
        raise SamplingError(f"empty range [{lo}, {hi})")
    width = hi - lo
    limit = (1 << 64) - ((1 << 64) % width)
    stream = _splitmix64(seed & ((1 << 64) - 1))
    out: list[int] = []
    while len(out) < count:
        draw = next(stream)
        if draw < limit:
            out.append(lo + draw % width)
    return out


def sample_eval_numbers(cfg: SamplingConfig) -> list[int]:
    return sample_uniform(cfg.eval_seed, cfg.eval_count, cfg.lo, cfg.hi)


def sample_training_numbers(cfg: SamplingConfig, exclude: set[int]) -> list[int]:
    """Oversample, drop anything in exclude, keep the first train_count."""
    pool = sample_uniform(cfg.train_seed, cfg.oversample, cfg.lo, cfg.hi)
    survivors = [n for n in pool if n not in exclude]
    if len(survivors) < cfg.train_count:
        raise SamplingError(
            f"only {len(survivors)} of {cfg.oversample} oversampled numbers survive the "
            f"exclusion set; raise oversample above {cfg.oversample}")
    return survivors[:cfg.train_count]


def _aligned_space_delimited(text: str, tokens: tuple[Token, ...]) -> list[bool | None]:
    """Per token: is its surface occurrence space-delimited in text?

    Greedy left-to-right alignment of FORMs; tokens that cannot be located
    (clitics inside multiword tokens, stale text comments) get None.
    """
    flags: list[bool | None] = []
    cursor = 0
    for tok in tokens:
        at = text.find(tok.form, cursor)
        if at < 0:
            flags.append(None)
            continue
        end = at + len(tok.form)
        cursor = end
        flags.append(at > 0 and text[at - 1] == " " and end < len(text) and text[end] == " ")
    return flags


def substitute_first_numeral(sentence: Sentence, replacement: str) -> Sentence:
    """Apply the substitution rule with an arbitrary replacement string.

    The first space-delimited 4-digit group fixes the target digits D;
    every space-delimited occurrence of D is replaced in the text, and
    every token whose FORM is D at such an occurrence gets FORM and LEMMA
    set to the replacement.  All other columns stay untouched and the
    ``# text`` comment is regenerated.
    """
    text = sentence.text
    matches = find_year_numerals(text)
    if not matches:
        raise SubstitutionError("sentence contains no space-delimited 4-digit numeral")
    digits = matches[0].digits
    new_text = re.sub(rf"(?<= ){re.escape(digits)}(?= )", replacement, text)
    delimited = _aligned_space_delimited(text, sentence.tokens)
    new_tokens = tuple(
        tok.with_form(replacement, replacement)
        if tok.form == digits and delimited[i] is not False else tok
        for i, tok in enumerate(sentence.tokens))
    updated = Sentence(sentence.comments, new_tokens, sentence.mwt_lines, sentence.empty_nodes)
    if sentence.comment_value("text") is not None:
        updated = updated.with_comment("text", new_text)
    return updated


def substitute_numeral(sentence: Sentence, replacement: int) -> Sentence:
    if not 1000 <= replacement <= 9999:
        raise SubstitutionError(f"replacement {replacement} is not a 4-digit number")
    return substitute_first_numeral(sentence, str(replacement))


def synthesize_batch(sentence: Sentence, numbers: list[int]) -> AugmentedBatch:
    """One variant per number, each with a derived gold sentence."""
    text = sentence.text
    matches = find_year_numerals(text)
    if not matches:
        raise SubstitutionError("sentence contains no year numeral")
    variants = []
    for number in numbers:
        gold = substitute_numeral(sentence, number)
        variants.append((number, gold.text, gold))
    return AugmentedBatch(sentence, matches[0].digits, tuple(variants))


def _suffix_sent_id(sentence: Sentence, suffix: str) -> Sentence:
    sid = sentence.sent_id
    if sid is None:
        return sentence
    return sentence.with_comment("sent_id", f"{sid}-{suffix}")


def augment_treebank(treebank: Treebank, numbers: list[int]) -> Treebank:
    """Insert the synthesized variants right after each year sentence."""
    out: list[Sentence] = []
    for sentence in treebank.sentences:
        out.append(sentence)
        if not find_year_numerals(sentence.text):
            continue
        batch = synthesize_batch(sentence, numbers)
        for i, (_, _, gold) in enumerate(batch.variants, start=1):
            out.append(_suffix_sent_id(gold, f"aug{i}"))
    return Treebank(tuple(out), treebank.source_name)


def substitute_tokens(treebank: Treebank, token: str = DEFAULT_TOKEN) -> Treebank:
    """Replace year numerals with a fixed placeholder; size is preserved."""
    if not token or any(ch.isspace() for ch in token):
        raise SubstitutionError(f"placeholder token {token!r} must be non-empty and whitespace-free")
    out = []
    for sentence in treebank.sentences:
        if find_year_numerals(sentence.text):
            out.append(substitute_first_numeral(sentence, token))
        else:
            out.append(sentence)
    return Treebank(tuple(out), treebank.source_name)
