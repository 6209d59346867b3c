"""Drive an external parser process over the line-aligned wire contract.

Input is plain UTF-8 text, one sentence per line.  The parser must answer
with CoNLL-U in which every sentence carries a ``# source_line = k``
comment (1-based input line); output sentences are grouped by that stamp,
so re-segmentation shows up as a group of size != 1 instead of silently
shifting the alignment.
"""
from __future__ import annotations

import os
import shlex
import subprocess
import tempfile
from dataclasses import dataclass
from pathlib import Path

from .conllu import ConlluError, Sentence, parse_conllu

INPUT_PLACEHOLDER = "{input}"
OUTPUT_PLACEHOLDER = "{output}"


class ParserError(RuntimeError):
    """Failed parser invocation, carrying whatever diagnostics were captured."""

    def __init__(self, message: str, stderr: str = "", returncode: int | None = None):
        super().__init__(message)
        self.stderr = stderr
        self.returncode = returncode


@dataclass(frozen=True)
class ParserSpec:
    command: str
    input_mode: str = "stdin"    # stdin | file ({input} placeholder)
    output_mode: str = "stdout"  # stdout | file ({output} placeholder)
    timeout: float = 300.0
    env: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        if not self.command.strip():
            raise ValueError("parser command must be non-empty")
        if self.timeout <= 0:
            raise ValueError("parser timeout must be positive")

    @classmethod
    def from_command(cls, command: str, timeout: float = 300.0,
                     env: tuple[tuple[str, str], ...] = ()) -> "ParserSpec":
        """Infer file modes from {input} / {output} placeholders."""
        return cls(command,
                   input_mode="file" if INPUT_PLACEHOLDER in command else "stdin",
                   output_mode="file" if OUTPUT_PLACEHOLDER in command else "stdout",
                   timeout=timeout, env=env)


def run_parser(spec: ParserSpec, sentences: list[str]) -> list[list[Sentence]]:
    """One invocation; returns one (possibly empty) group per input line."""
    for line in sentences:
        if "\n" in line:
            raise ValueError("input sentences must be newline-free")
    payload = "".join(s + "\n" for s in sentences)

    with tempfile.TemporaryDirectory(prefix="yearshift-parse-") as tmp:
        argv = shlex.split(spec.command)
        in_path = Path(tmp, "input.txt")
        out_path = Path(tmp, "output.conllu")
        stdin_data: str | None = None
        if spec.input_mode == "file":
            in_path.write_text(payload, encoding="utf-8")
            argv = [a.replace(INPUT_PLACEHOLDER, str(in_path)) for a in argv]
        else:
            stdin_data = payload
        if spec.output_mode == "file":
            argv = [a.replace(OUTPUT_PLACEHOLDER, str(out_path)) for a in argv]

        env = dict(os.environ)
        env.update(dict(spec.env))
        try:
            proc = subprocess.run(argv, input=stdin_data, capture_output=True,
                                  encoding="utf-8", timeout=spec.timeout, env=env)
        except subprocess.TimeoutExpired as exc:
            raise ParserError(f"parser timed out after {spec.timeout}s",
                              stderr=_decode(exc.stderr)) from exc
        except UnicodeDecodeError as exc:
            raise ParserError(f"parser output is not valid UTF-8: {exc}") from exc
        except OSError as exc:
            raise ParserError(f"cannot launch parser: {exc}") from exc
        if proc.returncode != 0:
            raise ParserError(f"parser exited with code {proc.returncode}",
                              stderr=proc.stderr, returncode=proc.returncode)
        if spec.output_mode == "file":
            if not out_path.exists():
                raise ParserError("parser produced no output file", stderr=proc.stderr)
            output = out_path.read_text(encoding="utf-8")
        else:
            output = proc.stdout

    try:
        parsed = parse_conllu(output)
    except ConlluError as exc:
        raise ParserError(f"parser output is not valid CoNLL-U: {exc}",
                          stderr=proc.stderr) from exc
    try:
        return group_by_source_line(list(parsed.sentences), len(sentences))
    except ValueError as exc:
        raise ParserError(str(exc), stderr=proc.stderr) from exc


def group_by_source_line(parsed: list[Sentence], n_lines: int) -> list[list[Sentence]]:
    """Group parser output by its source_line stamps; empty groups allowed.

    Blocks without token lines (stream headers such as ``# model_version``)
    are metadata, not parses, and are skipped.
    """
    groups: list[list[Sentence]] = [[] for _ in range(n_lines)]
    for sentence in parsed:
        if not sentence.tokens:
            continue
        stamp = sentence.comment_value("source_line")
        if stamp is None or not stamp.strip().isdigit():
            raise ValueError("parser output sentence lacks a '# source_line = k' comment")
        k = int(stamp)
        if not 1 <= k <= n_lines:
            raise ValueError(f"source_line {k} outside 1..{n_lines}")
        groups[k - 1].append(sentence)
    return groups


def _decode(raw) -> str:
    if raw is None:
        return ""
    if isinstance(raw, bytes):
        return raw.decode("utf-8", "replace")
    return raw
