"""Search-and-import pipeline for external code snippets.

A brief description becomes a keyword query, providers turn the query
into ranked candidates, and a candidate plus a user-completed annotation
becomes a draft concept in the store. The local-corpus provider works
offline against a directory of files; the remote provider speaks to a
generic search endpoint through an injectable transport.
"""

from __future__ import annotations

import dataclasses
import re
import threading
import time
from collections import deque
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable

import tomli

from .errors import (
    AuthMissingError,
    EmptyQueryError,
    FetchFailedError,
    FormatError,
    InvariantViolationError,
    IoError,
    ProviderUnreachableError,
    RateLimitedError,
)
from .store import Concept, Store, add_concept

MAX_KEYWORDS = 8
EXCERPT_LINES = 20

# fixed 50-word list; queries keep everything else
STOPWORDS = frozenset((
    "a", "an", "the", "of", "and", "or", "to", "in", "on", "at",
    "by", "for", "with", "from", "into", "that", "this", "these",
    "those", "it", "its", "is", "are", "was", "were", "be", "been",
    "being", "as", "but", "if", "then", "else", "not", "no", "do",
    "does", "did", "can", "could", "should", "would", "will", "shall",
    "may", "might", "has", "have", "had", "we",
))

PROVIDER_KINDS = ("local-corpus", "remote-api")


def _utc_now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass(frozen=True)
class SnippetCandidate:
    provider: str
    locator: str
    title: str
    excerpt: str
    score: float
    fetched_at: str = ""

    def __post_init__(self):
        if not self.locator:
            raise InvariantViolationError("candidate locator is empty",
                                          stage="harvest")
        if not 0.0 <= self.score <= 1.0:
            raise InvariantViolationError(
                f"candidate score {self.score} outside [0, 1]",
                stage="harvest", score=self.score)


@dataclass(frozen=True)
class ProviderConfig:
    name: str
    kind: str
    base: str
    auth_env: str = ""
    rate_per_min: int = 30
    page_size: int = 10

    def __post_init__(self):
        if self.kind not in PROVIDER_KINDS:
            raise InvariantViolationError(
                f"provider kind must be one of {', '.join(PROVIDER_KINDS)}, "
                f"got {self.kind!r}", stage="harvest", provider=self.name)
        if self.rate_per_min <= 0:
            raise InvariantViolationError(
                "provider rate limit must be positive", stage="harvest",
                provider=self.name, rate_per_min=self.rate_per_min)
        if self.page_size <= 0:
            raise InvariantViolationError(
                "provider page size must be positive", stage="harvest",
                provider=self.name, page_size=self.page_size)


class RateLimiter:
    """Sliding-window limiter: at most `max_per_minute` acquisitions in
    any 60-second span; refusals raise instead of blocking."""

    def __init__(self, max_per_minute: int,
                 clock: Callable[[], float] = time.monotonic):
        if max_per_minute <= 0:
            raise InvariantViolationError(
                "rate limit must be positive", stage="harvest",
                rate_per_min=max_per_minute)
        self.max_per_minute = max_per_minute
        self.clock = clock
        self._calls: deque[float] = deque()
        self._lock = threading.Lock()

    def acquire(self) -> None:
        with self._lock:
            now = self.clock()
            while self._calls and now - self._calls[0] >= 60.0:
                self._calls.popleft()
            if len(self._calls) >= self.max_per_minute:
                retry_after = 60.0 - (now - self._calls[0])
                raise RateLimitedError(
                    f"rate limit of {self.max_per_minute} requests per "
                    "minute reached", retry_after=round(retry_after, 3))
            self._calls.append(now)


def build_query(description: str) -> list[str]:
    """Case-fold, strip punctuation, drop stopwords, deduplicate keeping
    first occurrences, cap at 8 keywords."""
    tokens = re.findall(r"[a-z0-9]+", description.lower())
    keywords: list[str] = []
    for token in tokens:
        if token in STOPWORDS or token in keywords:
            continue
        keywords.append(token)
        if len(keywords) == MAX_KEYWORDS:
            break
    if not keywords:
        raise EmptyQueryError(
            f"no keywords survive filtering of {description!r}")
    return keywords


def _excerpt(text: str) -> str:
    return "\n".join(text.splitlines()[:EXCERPT_LINES])


def _search_local(cfg: ProviderConfig, keywords: list[str],
                  now: Callable[[], str]) -> list[SnippetCandidate]:
    root = Path(cfg.base)
    if not root.is_dir():
        raise ProviderUnreachableError(
            f"local corpus directory {cfg.base!r} is not readable",
            provider=cfg.name, cause="not a directory")
    scored: list[tuple[float, str, SnippetCandidate]] = []
    fetched_at = now()
    for path in sorted(root.rglob("*")):
        if not path.is_file():
            continue
        try:
            text = path.read_text(encoding="utf-8", errors="replace")
        except OSError as exc:
            raise ProviderUnreachableError(
                f"cannot read {path}", provider=cfg.name,
                cause=str(exc)) from exc
        haystack = text.lower()
        hits = sum(1 for k in keywords if k in haystack)
        if hits == 0:
            continue
        score = hits / len(keywords)
        scored.append((score, path.as_posix(), SnippetCandidate(
            provider=cfg.name, locator=path.as_posix(), title=path.name,
            excerpt=_excerpt(text), score=score, fetched_at=fetched_at)))
    scored.sort(key=lambda row: (-row[0], row[1]))
    return [candidate for _, _, candidate in scored]


def _default_fetch(url: str, headers: dict[str, str]) -> object:
    import requests

    response = requests.get(url, headers=headers, timeout=10)
    response.raise_for_status()
    return response.json()


def _search_remote(cfg: ProviderConfig, keywords: list[str],
                   fetch: Callable | None, limiter: RateLimiter | None,
                   env: dict, now: Callable[[], str],
                   max_pages: int) -> list[SnippetCandidate]:
    headers: dict[str, str] = {}
    if cfg.auth_env:
        token = env.get(cfg.auth_env)
        if not token:
            raise AuthMissingError(
                f"provider {cfg.name!r} needs the environment variable "
                f"{cfg.auth_env!r}", provider=cfg.name, env_var=cfg.auth_env)
        headers["Authorization"] = f"Bearer {token}"
    if fetch is None:
        fetch = _default_fetch
    if limiter is None:
        limiter = RateLimiter(cfg.rate_per_min)

    candidates: list[SnippetCandidate] = []
    query = "+".join(keywords)
    for page in range(1, max_pages + 1):
        limiter.acquire()
        url = f"{cfg.base}?q={query}&page={page}&per_page={cfg.page_size}"
        try:
            payload = fetch(url, headers)
        except RateLimitedError:
            raise
        except Exception as exc:
            raise ProviderUnreachableError(
                f"provider {cfg.name!r} request failed",
                provider=cfg.name, cause=str(exc)) from exc
        items = payload.get("items") if isinstance(payload, dict) else payload
        if not isinstance(items, list):
            raise FetchFailedError(
                f"provider {cfg.name!r} returned an unexpected payload "
                "shape", provider=cfg.name, locator=url)
        fetched_at = now()
        for item in items:
            if not isinstance(item, dict):
                raise FetchFailedError(
                    f"provider {cfg.name!r} returned a malformed item",
                    provider=cfg.name, locator=url)
            locator = item.get("path") or item.get("url") or ""
            rank = len(candidates)
            score = item.get("score", 1.0 / (1 + rank))
            candidates.append(SnippetCandidate(
                provider=cfg.name, locator=locator,
                title=str(item.get("title", locator)),
                excerpt=_excerpt(str(item.get("text", ""))),
                score=max(0.0, min(1.0, float(score))),
                fetched_at=fetched_at))
        if len(items) < cfg.page_size:
            break
    return candidates


def search_provider(cfg: ProviderConfig, keywords: list[str], *,
                    fetch: Callable | None = None,
                    limiter: RateLimiter | None = None,
                    env: dict | None = None,
                    now: Callable[[], str] = _utc_now,
                    max_pages: int = 5) -> list[SnippetCandidate]:
    """Ranked candidates for the keywords. `fetch(url, headers)` and the
    limiter are injectable so remote behavior is testable offline."""
    if not keywords:
        raise EmptyQueryError("keyword list is empty")
    if cfg.kind == "local-corpus":
        return _search_local(cfg, keywords, now)
    import os

    return _search_remote(cfg, keywords, fetch, limiter,
                          os.environ if env is None else env, now, max_pages)


def import_candidate(store: Store, candidate: SnippetCandidate,
                     draft: Concept) -> Store:
    """Add the annotated draft to the store, recording where the snippet
    came from. The draft's snippet falls back to the candidate's locator
    when it is a readable file."""
    if draft.snippet is None and draft.kind == "terminal":
        path = Path(candidate.locator)
        try:
            snippet = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise FetchFailedError(
                f"cannot fetch snippet body from {candidate.locator!r}",
                locator=candidate.locator, cause=str(exc)) from exc
        draft = dataclasses.replace(draft, snippet=snippet)

    note = f"harvested from {candidate.locator}"
    if candidate.fetched_at:
        note += f" at {candidate.fetched_at}"
    curation = draft.annotation.curation
    notes = f"{curation.notes}; {note}" if curation.notes else note
    annotation = dataclasses.replace(
        draft.annotation, curation=dataclasses.replace(curation, notes=notes))
    return add_concept(store, dataclasses.replace(draft,
                                                  annotation=annotation))


def load_providers(path: str | Path) -> dict[str, ProviderConfig]:
    """Provider table from a TOML file: one section per provider with
    kind, base, and optional auth_env, rate_per_min, page_size."""
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise IoError(f"cannot read provider config {str(path)!r}",
                      path=str(path), cause=str(exc)) from exc
    try:
        data = tomli.loads(raw.decode("utf-8"))
    except (tomli.TOMLDecodeError, UnicodeDecodeError) as exc:
        raise FormatError(f"invalid provider config: {exc}",
                          path=str(path)) from exc
    providers: dict[str, ProviderConfig] = {}
    for name, section in data.items():
        if not isinstance(section, dict):
            raise FormatError(
                f"provider section {name!r} must be a table",
                path=str(path), provider=name)
        unknown = set(section) - {"kind", "base", "auth_env",
                                  "rate_per_min", "page_size"}
        if unknown:
            raise FormatError(
                f"provider section {name!r} has unknown keys: "
                f"{', '.join(sorted(unknown))}", path=str(path),
                provider=name)
        if "kind" not in section or "base" not in section:
            raise FormatError(
                f"provider section {name!r} needs 'kind' and 'base'",
                path=str(path), provider=name)
        providers[name] = ProviderConfig(name=name, **section)
    return providers


def default_providers() -> dict[str, ProviderConfig]:
    """Single offline provider over the corpus shipped with the package."""
    from .corpus_data import corpus_path

    return {"local": ProviderConfig(name="local", kind="local-corpus",
                                    base=str(corpus_path()))}
