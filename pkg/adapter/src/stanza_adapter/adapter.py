"""Core of the wire contract: one input line in, stamped CoNLL-U out.

Every input line is processed as its own document, so whatever the model
does to sentence boundaries is visible upstream: two output sentences for
one line mean a split, zero mean the line was lost.  Each emitted sentence
carries exactly one ``# source_line = k`` comment (k is the 1-based input
line), and the stream starts with a single ``# model_version`` header so
results stay traceable to the model that produced them.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass, field
from typing import Callable, Iterable, Protocol, TextIO

DEFAULT_PROCESSORS = ("tokenize", "mwt", "pos", "lemma", "depparse")


@dataclass(frozen=True)
class AdapterConfig:
    lang: str
    package: str = "default"
    processors: tuple[str, ...] = DEFAULT_PROCESSORS
    model_dir: str | None = None
    device: str = "cpu"


class LinePipeline(Protocol):
    """What the adapter needs from a backend."""

    def parse_line(self, line: str) -> str:
        """CoNLL-U text for one line treated as a whole document."""
        ...

    def model_version(self) -> str:
        """Version string recorded verbatim in the output header."""
        ...


class PipelineError(RuntimeError):
    """The backend could not be constructed (missing package, missing models)."""


def split_blocks(conllu_text: str) -> list[str]:
    """Sentence blocks of a CoNLL-U document, without separators."""
    blocks = []
    current: list[str] = []
    for line in conllu_text.split("\n"):
        if line == "":
            if current:
                blocks.append("\n".join(current))
                current = []
        else:
            current.append(line)
    if current:
        blocks.append("\n".join(current))
    return blocks


def serve_parse_requests(pipeline: LinePipeline, source: Iterable[str], sink: TextIO,
                         log: TextIO = sys.stderr) -> None:
    """Stream the contract: header once, then stamped blocks per input line.

    A backend failure on one line logs the error and emits nothing for
    that line (an empty group upstream); the stream continues.
    """
    sink.write(f"# model_version = {pipeline.model_version()}\n\n")
    for k, raw in enumerate(source, start=1):
        line = raw.rstrip("\n")
        try:
            parsed = pipeline.parse_line(line)
        except Exception as exc:  # per-line failures must not kill the stream
            print(f"line {k}: inference failed: {exc}", file=log)
            continue
        for block in split_blocks(parsed):
            sink.write(f"# source_line = {k}\n{block}\n\n")


class StanzaPipeline:
    """Real backend; imports stanza lazily so the adapter stays importable."""

    def __init__(self, config: AdapterConfig):
        try:
            import stanza
        except ImportError as exc:
            raise PipelineError(
                "the stanza package is not installed; install the 'stanza' extra") from exc
        kwargs = {
            "lang": config.lang,
            "processors": ",".join(config.processors),
            "package": config.package,
            "use_gpu": config.device != "cpu",
            "download_method": None,
        }
        if config.model_dir:
            kwargs["dir"] = config.model_dir
        try:
            self._nlp = stanza.Pipeline(**kwargs)
        except Exception as exc:
            raise PipelineError(f"cannot load stanza pipeline: {exc}") from exc
        self._version = (f"stanza {stanza.__version__} lang={config.lang} "
                         f"package={config.package} processors={','.join(config.processors)}")

    def parse_line(self, line: str) -> str:
        doc = self._nlp(line)
        return "{:C}".format(doc)

    def model_version(self) -> str:
        return self._version


def build_pipeline(config: AdapterConfig,
                   factory: Callable[[AdapterConfig], LinePipeline] | None = None) -> LinePipeline:
    if factory is not None:
        return factory(config)
    return StanzaPipeline(config)
