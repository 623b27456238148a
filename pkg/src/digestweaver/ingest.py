"""Result-list loading and page fetching.

A result list is a JSON document ({"query": ..., "results": [...]}) naming the
ranked pages to pull in. Pages come either from local files (offline mode) or
over HTTP. A fetch problem never aborts the run: the page is marked skipped
with a reason and keeps its rank position.
"""

from __future__ import annotations

import base64
import hashlib
import json
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from urllib.parse import urlsplit

import requests

from .errors import DuplicateRankError, EmptyQueryError, SchemaError

USER_AGENT = "digestweaver/1.0"
MAX_REDIRECTS = 3


@dataclass(frozen=True)
class SearchResultEntry:
    rank: int
    url: str
    title: str = ""
    snippet: str = ""
    local_html_path: str | None = None


@dataclass
class ResultList:
    query: str
    entries: list[SearchResultEntry]

    @property
    def n(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class FetchPolicy:
    mode: str = "offline"              # "offline" | "online"
    top_n: int = 10
    timeout_ms: int = 10_000
    max_bytes: int = 2 * 1024 * 1024
    cache_dir: str | None = None
    cache_bypass: bool = False
    parallelism: int = 4

    def __post_init__(self) -> None:
        if self.mode not in ("offline", "online"):
            raise ValueError(f"unknown fetch mode {self.mode!r}")
        if self.top_n < 1 or self.timeout_ms < 1 or self.max_bytes < 1:
            raise ValueError("top_n, timeout_ms and max_bytes must be >= 1")
        if self.parallelism < 1:
            raise ValueError("parallelism must be >= 1")


@dataclass
class RawPage:
    source: SearchResultEntry
    body: bytes = b""
    media_type: str = ""
    fetch_status: str = "ok"           # "ok" | "skipped"
    skip_reason: str | None = None


def _skipped(entry: SearchResultEntry, reason: str) -> RawPage:
    return RawPage(source=entry, fetch_status="skipped", skip_reason=reason)


def load_result_list(path: str) -> ResultList:
    """Read a result-list JSON file; entries come back sorted by rank.

    Relative html_path values are resolved against the file's directory.
    Raises SchemaError (and subclasses) for content problems, OSError for I/O.
    """
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise SchemaError(f"{path}: not valid JSON: {exc}") from exc

    if not isinstance(doc, dict):
        raise SchemaError(f"{path}: top-level value must be an object")
    query = doc.get("query")
    if not isinstance(query, str):
        raise SchemaError(f"{path}: 'query' must be a string")
    if not query.strip():
        raise EmptyQueryError(f"{path}: query is empty")
    results = doc.get("results")
    if not isinstance(results, list):
        raise SchemaError(f"{path}: 'results' must be an array")

    base_dir = os.path.dirname(os.path.abspath(path))
    entries: list[SearchResultEntry] = []
    seen_ranks: set[int] = set()
    for pos, item in enumerate(results):
        if not isinstance(item, dict):
            raise SchemaError(f"{path}: results[{pos}] must be an object")
        rank = item.get("rank")
        if isinstance(rank, bool) or not isinstance(rank, int) or rank < 1:
            raise SchemaError(f"{path}: results[{pos}].rank must be a positive integer")
        if rank in seen_ranks:
            raise DuplicateRankError(f"{path}: duplicate rank {rank}")
        seen_ranks.add(rank)
        url = item.get("url")
        if not isinstance(url, str) or not url or not urlsplit(url).scheme:
            raise SchemaError(f"{path}: results[{pos}].url must be an absolute URI")
        html_path = item.get("html_path")
        if html_path is not None:
            if not isinstance(html_path, str):
                raise SchemaError(f"{path}: results[{pos}].html_path must be a string")
            if not os.path.isabs(html_path):
                html_path = os.path.join(base_dir, html_path)
        entries.append(SearchResultEntry(
            rank=rank,
            url=url,
            title=str(item.get("title", "")),
            snippet=str(item.get("snippet", "")),
            local_html_path=html_path,
        ))

    entries.sort(key=lambda e: e.rank)
    return ResultList(query=query, entries=entries)


def _cache_path(cache_dir: str, url: str) -> str:
    key = hashlib.sha256(url.encode("utf-8")).hexdigest()
    return os.path.join(cache_dir, f"{key}.json")


def _cache_get(policy: FetchPolicy, entry: SearchResultEntry) -> RawPage | None:
    if not policy.cache_dir or policy.cache_bypass:
        return None
    path = _cache_path(policy.cache_dir, entry.url)
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        if data.get("url") != entry.url:
            return None
        body = base64.b64decode(data["body_b64"])
    except (OSError, ValueError, KeyError):
        return None
    return RawPage(source=entry, body=body, media_type=data.get("media_type", "text/html"))


def _cache_put(policy: FetchPolicy, page: RawPage) -> None:
    if not policy.cache_dir or page.fetch_status != "ok":
        return
    os.makedirs(policy.cache_dir, exist_ok=True)
    path = _cache_path(policy.cache_dir, page.source.url)
    payload = {
        "url": page.source.url,
        "media_type": page.media_type,
        "body_b64": base64.b64encode(page.body).decode("ascii"),
    }
    fd, tmp = tempfile.mkstemp(dir=policy.cache_dir, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(payload, fh)
        os.replace(tmp, path)
    except OSError:
        if os.path.exists(tmp):
            os.unlink(tmp)


def _is_html(media_type: str) -> bool:
    return media_type in ("", "text/html", "application/xhtml+xml")


def _fetch_local(entry: SearchResultEntry, policy: FetchPolicy) -> RawPage:
    path = entry.local_html_path
    if not path:
        return _skipped(entry, "offline mode: entry has no local html path")
    try:
        with open(path, "rb") as fh:
            body = fh.read(policy.max_bytes + 1)
    except OSError as exc:
        return _skipped(entry, f"local file unreadable: {exc}")
    if len(body) > policy.max_bytes:
        return _skipped(entry, f"body exceeds {policy.max_bytes} bytes")
    if not body:
        return _skipped(entry, "empty body")
    return RawPage(source=entry, body=body, media_type="text/html")


def _fetch_http(entry: SearchResultEntry, policy: FetchPolicy) -> RawPage:
    timeout = policy.timeout_ms / 1000.0
    session = requests.Session()
    session.max_redirects = MAX_REDIRECTS
    try:
        resp = session.get(
            entry.url,
            headers={"User-Agent": USER_AGENT},
            timeout=timeout,
            stream=True,
            allow_redirects=True,
        )
    except requests.Timeout:
        return _skipped(entry, f"timeout after {policy.timeout_ms} ms")
    except requests.TooManyRedirects:
        return _skipped(entry, f"more than {MAX_REDIRECTS} redirects")
    except requests.RequestException as exc:
        return _skipped(entry, f"request failed: {exc}")

    with resp:
        if not (200 <= resp.status_code < 300):
            return _skipped(entry, f"http status {resp.status_code}")
        media_type = resp.headers.get("Content-Type", "").split(";")[0].strip().lower()
        if not _is_html(media_type):
            return _skipped(entry, f"unsupported media type: {media_type}")
        body = b""
        try:
            for chunk in resp.iter_content(chunk_size=65536):
                body += chunk
                if len(body) > policy.max_bytes:
                    return _skipped(entry, f"body exceeds {policy.max_bytes} bytes")
        except requests.RequestException as exc:
            return _skipped(entry, f"read failed: {exc}")
    if not body:
        return _skipped(entry, "empty body")
    return RawPage(source=entry, body=body, media_type=media_type or "text/html")


def fetch_page(entry: SearchResultEntry, policy: FetchPolicy) -> RawPage:
    """Fetch one result page. Failures yield a skipped page, never an exception."""
    if policy.mode == "offline":
        return _fetch_local(entry, policy)
    cached = _cache_get(policy, entry)
    if cached is not None:
        return cached
    page = _fetch_http(entry, policy)
    _cache_put(policy, page)
    return page


def fetch_all(result_list: ResultList, policy: FetchPolicy) -> list[RawPage]:
    """Fetch the first min(n, top_n) entries; output stays in rank order
    no matter how the concurrent fetches interleave."""
    selected = result_list.entries[: policy.top_n]
    if not selected:
        return []
    with ThreadPoolExecutor(max_workers=policy.parallelism) as pool:
        return list(pool.map(lambda e: fetch_page(e, policy), selected))
