"""Resolving network arguments: bundled fixture names, inline text or files."""
from __future__ import annotations

from pathlib import Path

from zonet.lowdim import CATALOG_CLASSES, example_names, load_catalog, load_example
from zonet.network.core import NetworkError, ReactionNetwork, parse_network


def load_network_source(source: str, base_dir: str = ".") -> ReactionNetwork:
    """``source`` is a bundled name (``example5``, ``g35``), network text or a path."""
    source = source.strip()
    if source in CATALOG_CLASSES:
        return load_catalog()[source]
    if source in example_names():
        return load_example(source)
    if "->" in source:
        return parse_network(source)
    path = Path(source)
    if not path.is_absolute():
        path = Path(base_dir) / path
    try:
        text = path.read_text()
    except OSError as exc:
        raise FileNotFoundError(f"cannot read network file {path}: {exc.strerror}") from None
    try:
        return parse_network(text)
    except NetworkError as exc:
        raise NetworkError(f"{path}: {exc}") from None
