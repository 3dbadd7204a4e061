"""HTML-to-plaintext reduction and fixed-word-width segmentation of fetched pages.

Extraction is deliberately mechanical (strip non-content tags, newline at
block boundaries) rather than readability-heuristic: the same page must
always reduce to the same plaintext.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from html.parser import HTMLParser

from .errors import EmptyContentError, FetchFailedError
from .fetch import PageFetcher
from .providers.base import SearchResult
from .textutil import collapse_ws, count_words

FETCH_OK = "ok"
FETCH_FAILED = "fetch_failed"
FETCH_EMPTY = "empty_content"

DEFAULT_SEGMENT_WIDTH = 256


@dataclass(frozen=True)
class TextSegment:
    """A consecutive, non-overlapping chunk of a document's word sequence."""

    parent_doc: int
    seq: int
    text: str
    word_count: int

    def __post_init__(self):
        if self.seq < 1:
            raise ValueError("seq must be >= 1")
        if self.word_count < 1:
            raise ValueError("segments must contain at least one word")
        if self.word_count != count_words(self.text):
            raise ValueError("word_count does not match the segment text")


@dataclass(frozen=True)
class WebDocument:
    """A fetched page reduced to plaintext, plus its segments once numbered."""

    doc_number: int
    url: str
    title: str
    plaintext: str
    fetch_status: str
    segments: tuple[TextSegment, ...] = ()

    def __post_init__(self):
        if self.doc_number < 1:
            raise ValueError("doc_number must be >= 1")
        if self.fetch_status not in (FETCH_OK, FETCH_FAILED, FETCH_EMPTY):
            raise ValueError(f"unknown fetch_status: {self.fetch_status!r}")
        if (self.fetch_status == FETCH_OK) != bool(self.plaintext):
            raise ValueError("plaintext must be non-empty exactly when fetch_status is ok")


_SKIP_TAGS = {
    "script",
    "style",
    "noscript",
    "template",
    "head",
    "title",
    "nav",
    "header",
    "footer",
    "iframe",
    "svg",
    "canvas",
    "form",
}

_BLOCK_TAGS = {
    "address",
    "article",
    "blockquote",
    "br",
    "dd",
    "div",
    "dl",
    "dt",
    "figcaption",
    "figure",
    "h1",
    "h2",
    "h3",
    "h4",
    "h5",
    "h6",
    "hr",
    "li",
    "main",
    "ol",
    "p",
    "pre",
    "section",
    "table",
    "td",
    "th",
    "tr",
    "ul",
}

# Sentinel for block boundaries; raw newlines inside a block are ordinary
# whitespace and must not survive as line breaks.
_BREAK = "\x00"


class _PlaintextExtractor(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self._skip_depth = 0
        self.parts: list[str] = []

    def handle_starttag(self, tag, attrs):
        if tag in _SKIP_TAGS:
            self._skip_depth += 1
        elif tag in _BLOCK_TAGS:
            self.parts.append(_BREAK)

    def handle_startendtag(self, tag, attrs):
        if tag in _BLOCK_TAGS and tag not in _SKIP_TAGS:
            self.parts.append(_BREAK)

    def handle_endtag(self, tag):
        if tag in _SKIP_TAGS:
            self._skip_depth = max(0, self._skip_depth - 1)
        elif tag in _BLOCK_TAGS:
            self.parts.append(_BREAK)

    def handle_data(self, data):
        if not self._skip_depth:
            self.parts.append(data)


def extract_plaintext(html: str) -> str:
    """Reduce an HTML document to plaintext.

    Script/style/nav/header/footer content is removed, block elements become
    newline boundaries, entities are decoded, and whitespace collapses to
    single spaces within lines. Raises EmptyContentError when nothing
    extractable remains.
    """
    parser = _PlaintextExtractor()
    parser.feed(html)
    parser.close()
    blocks = "".join(parser.parts).split(_BREAK)
    lines = [collapse_ws(block) for block in blocks]
    text = "\n".join(line for line in lines if line)
    if not text:
        raise EmptyContentError("no extractable text")
    return text


def plain_to_text(body: str) -> str:
    """Normalize a text/plain body: collapse whitespace within lines, drop blanks."""
    lines = [collapse_ws(line) for line in body.splitlines()]
    text = "\n".join(line for line in lines if line)
    if not text:
        raise EmptyContentError("no extractable text")
    return text


def segment(
    plaintext: str, segment_width: int = DEFAULT_SEGMENT_WIDTH, parent_doc: int = 1
) -> list[TextSegment]:
    """Group the text's words into consecutive non-overlapping chunks of
    segment_width words; the final chunk holds the remainder. Inter-word
    whitespace within a chunk is normalized to single spaces.
    """
    if segment_width < 1:
        raise ValueError("segment_width must be >= 1")
    tokens = plaintext.split()
    return [
        TextSegment(
            parent_doc=parent_doc,
            seq=seq,
            text=" ".join(chunk),
            word_count=len(chunk),
        )
        for seq, chunk in enumerate(
            (tokens[start : start + segment_width] for start in range(0, len(tokens), segment_width)),
            start=1,
        )
    ]


def fetch_document(result: SearchResult, fetcher: PageFetcher) -> WebDocument:
    """Fetch one search result and reduce it to plaintext.

    Never raises: fetch and extraction failures come back as documents with
    fetch_status fetch_failed / empty_content. The provisional doc_number is
    the search rank; finalize_documents renumbers survivors.
    """
    try:
        page = fetcher.fetch(result.url)
    except FetchFailedError:
        return WebDocument(result.rank, result.url, result.title, "", FETCH_FAILED)
    try:
        if page.content_type == "text/plain":
            plaintext = plain_to_text(page.body)
        else:
            plaintext = extract_plaintext(page.body)
    except EmptyContentError:
        return WebDocument(result.rank, result.url, result.title, "", FETCH_EMPTY)
    return WebDocument(result.rank, result.url, result.title, plaintext, FETCH_OK)


def finalize_documents(
    documents: list[WebDocument], segment_width: int
) -> tuple[list[WebDocument], list[WebDocument]]:
    """Drop failed fetches, renumber survivors contiguously from 1, and attach
    segments. Returns (live documents, dropped documents); the answer prompt's
    citation numbers must be dense, so numbering happens only after the drop.
    """
    live = [doc for doc in documents if doc.fetch_status == FETCH_OK]
    dropped = [doc for doc in documents if doc.fetch_status != FETCH_OK]
    finalized = [
        replace(
            doc,
            doc_number=number,
            segments=tuple(segment(doc.plaintext, segment_width, parent_doc=number)),
        )
        for number, doc in enumerate(live, start=1)
    ]
    return finalized, dropped
