"""Spanning planar subgraphs of prescribed girth in random graphs."""

__version__ = "0.1.0"
