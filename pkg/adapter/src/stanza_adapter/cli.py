"""stanza-line-adapter: stdin lines -> stamped CoNLL-U on stdout."""
from __future__ import annotations

import argparse
import importlib
import sys

from .adapter import (DEFAULT_PROCESSORS, AdapterConfig, LinePipeline, PipelineError,
                      build_pipeline, serve_parse_requests)


def resolve_factory(spec: str):
    """'module:callable' -> backend factory, for tests and custom engines."""
    module_name, _, attr = spec.partition(":")
    if not module_name or not attr:
        raise ValueError(f"--backend expects module:callable, got {spec!r}")
    module = importlib.import_module(module_name)
    return getattr(module, attr)


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stanza-line-adapter", description=__doc__)
    parser.add_argument("--lang", required=True, help="language code, e.g. en")
    parser.add_argument("--package", default="default",
                        help="model package pin, recorded in the output header")
    parser.add_argument("--processors", default=",".join(DEFAULT_PROCESSORS),
                        help="comma-separated processor list")
    parser.add_argument("--model-dir", dest="model_dir",
                        help="directory holding pre-downloaded models")
    parser.add_argument("--device", default="cpu", choices=("cpu", "cuda"))
    parser.add_argument("--backend", default=None,
                        help="module:callable returning a pipeline (default: stanza)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_arg_parser().parse_args(argv)
    config = AdapterConfig(lang=args.lang, package=args.package,
                           processors=tuple(args.processors.split(",")),
                           model_dir=args.model_dir, device=args.device)
    try:
        factory = resolve_factory(args.backend) if args.backend else None
        pipeline: LinePipeline = build_pipeline(config, factory)
    except (PipelineError, ValueError, ImportError, AttributeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    serve_parse_requests(pipeline, sys.stdin, sys.stdout)
    return 0


if __name__ == "__main__":
    sys.exit(main())
