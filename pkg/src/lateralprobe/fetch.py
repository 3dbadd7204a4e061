"""Bounded page fetching.

Caps response size, redirect count, and request time so one slow or hostile
page cannot stall a probe. A custom transport can be mounted to serve fixture
pages from a local directory, which is how mock mode runs with no network.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from urllib.parse import urlsplit

import httpx

from .errors import FetchFailedError

logger = logging.getLogger(__name__)

USER_AGENT = "lateralprobe/0.1 (automated lateral-reading assistant; fetching user-requested sources)"

_TEXT_CONTENT_TYPES = ("text/html", "application/xhtml+xml", "text/plain")


@dataclass(frozen=True)
class FetchLimits:
    timeout_seconds: float = 10.0
    max_bytes: int = 5 * 1024 * 1024
    max_redirects: int = 5


@dataclass(frozen=True)
class FetchedPage:
    url: str
    content_type: str
    body: str


class PageFetcher:
    """httpx wrapper enforcing FetchLimits. Thread-safe; one instance serves
    all concurrent fetch workers."""

    def __init__(self, limits: FetchLimits | None = None, transport: httpx.BaseTransport | None = None):
        self.limits = limits or FetchLimits()
        self._client = httpx.Client(
            follow_redirects=True,
            max_redirects=self.limits.max_redirects,
            timeout=self.limits.timeout_seconds,
            headers={"User-Agent": USER_AGENT},
            transport=transport,
        )

    def close(self) -> None:
        self._client.close()

    def __enter__(self) -> "PageFetcher":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()

    def fetch(self, url: str) -> FetchedPage:
        """GET one page, returning its decoded body.

        Raises FetchFailedError for any of: non-absolute URL, non-200 status,
        unsupported content type, redirect chain over the cap, timeout, or a
        body over the size cap.
        """
        parts = urlsplit(url)
        if parts.scheme not in ("http", "https") or not parts.netloc:
            raise FetchFailedError(f"not an absolute http(s) url: {url!r}")
        try:
            with self._client.stream("GET", url) as response:
                if response.status_code != 200:
                    raise FetchFailedError(f"status {response.status_code} fetching {url}")
                content_type = (
                    response.headers.get("content-type", "").split(";")[0].strip().lower()
                )
                if content_type not in _TEXT_CONTENT_TYPES:
                    raise FetchFailedError(f"unsupported content type {content_type!r} at {url}")
                declared = response.headers.get("content-length")
                if declared and declared.isdigit() and int(declared) > self.limits.max_bytes:
                    raise FetchFailedError(f"declared size {declared} over cap at {url}")
                received = 0
                chunks: list[bytes] = []
                for chunk in response.iter_bytes():
                    received += len(chunk)
                    if received > self.limits.max_bytes:
                        raise FetchFailedError(
                            f"body exceeds {self.limits.max_bytes} bytes at {url}"
                        )
                    chunks.append(chunk)
                encoding = response.encoding or "utf-8"
        except httpx.TooManyRedirects:
            raise FetchFailedError(f"more than {self.limits.max_redirects} redirects at {url}")
        except httpx.TimeoutException:
            raise FetchFailedError(f"timeout after {self.limits.timeout_seconds}s at {url}")
        except httpx.HTTPError as exc:
            raise FetchFailedError(f"transport error at {url}: {exc}")
        body = b"".join(chunks).decode(encoding, errors="replace")
        return FetchedPage(url=url, content_type=content_type, body=body)


def local_directory_transport(pages_dir: str | Path) -> httpx.MockTransport:
    """Serve pages from a directory, keyed by URL path, with no network.

    ``https://any.host/some-page`` maps to ``<pages_dir>/some-page.html``
    (nested paths flatten with ``__``); unknown paths get a 404.
    """
    root = Path(pages_dir).resolve()

    def handler(request: httpx.Request) -> httpx.Response:
        name = request.url.path.strip("/").replace("/", "__") or "index"
        candidate = root / name
        if not candidate.suffix:
            candidate = candidate.with_suffix(".html")
        candidate = candidate.resolve()
        if not candidate.is_relative_to(root) or not candidate.is_file():
            return httpx.Response(404, text="not found")
        content_type = (
            "text/html; charset=utf-8"
            if candidate.suffix in (".html", ".htm")
            else "text/plain; charset=utf-8"
        )
        return httpx.Response(200, headers={"Content-Type": content_type}, content=candidate.read_bytes())

    return httpx.MockTransport(handler)
