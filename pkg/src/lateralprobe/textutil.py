"""Whitespace-rule helpers shared by input validation, segmentation, and answer metrics.

A "word" is a maximal run of non-whitespace characters. Every word count in
the pipeline (input limit, segment widths, answer length) uses this one rule.
"""

import re

_WS_RUN = re.compile(r"\s+")


def words(text: str) -> list[str]:
    """Maximal non-whitespace runs, in order."""
    return text.split()


def count_words(text: str) -> int:
    return len(text.split())


def collapse_ws(text: str) -> str:
    """Collapse whitespace runs to single spaces and trim the ends."""
    return _WS_RUN.sub(" ", text).strip()
