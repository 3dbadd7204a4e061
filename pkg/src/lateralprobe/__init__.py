"""Lateral-reading assistant: given a text, generate probing questions,
ground them in web-search results, and produce per-question answers with
per-sentence source attributions."""

__version__ = "0.1.0"
