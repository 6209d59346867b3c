"""Line-aligned CoNLL-U adapter around a pretrained Stanza pipeline."""

__version__ = "0.1.0"

from .adapter import AdapterConfig, LinePipeline, serve_parse_requests
