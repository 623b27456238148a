"""Segment scoring and candidate selection.

Every segment gets a query density and a profile density (token counts over
segment length), combined linearly into one score; segments scoring above the
threshold become candidates, near-duplicates are suppressed, and the survivors
are ordered by (score desc, page asc, position asc).
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .profiles import Profile
    from .segmenter import Segment, SegmentMatrix

# Fixed built-in English stopword list. Versioned with the package on purpose:
# scores must be reproducible across installs.
DEFAULT_STOPWORDS = frozenset("""
about above after again against all am an and any are as at
be because been before being below between both but by
can cannot could did do does doing down during each few for from further
had has have having he her here hers herself him himself his how
if in into is it its itself just me more most my myself
no nor not now of off on once only or other our ours ourselves out over own
same she should so some such than that the their theirs them themselves
then there these they this those through to too under until up very
was we were what when where which while who whom why will with would
you your yours yourself yourselves
""".split())

_TOKEN_RE = re.compile(r"[^\W_]+")


def tokenize(text: str, stopwords: frozenset[str] = DEFAULT_STOPWORDS) -> list[str]:
    """Lowercase, split on runs of non-alphanumerics, drop short tokens and stopwords."""
    return [
        t for t in _TOKEN_RE.findall(text.lower())
        if len(t) >= 2 and t not in stopwords
    ]


def load_stopwords(path: str) -> frozenset[str]:
    """Read a whitespace-separated stopword file, replacing the built-in list."""
    with open(path, encoding="utf-8") as fh:
        return frozenset(fh.read().split())


@dataclass(frozen=True)
class ScoreConfig:
    alpha: float = 0.5            # weight of the query density
    beta: float = 0.5             # weight of the profile density
    delta: float = 0.05           # selection threshold (strictly exceeded)
    max_candidates: int = 12
    stopwords: frozenset[str] = DEFAULT_STOPWORDS

    def __post_init__(self) -> None:
        if not (0.0 <= self.alpha <= 1.0 and 0.0 <= self.beta <= 1.0):
            raise ValueError("alpha and beta must lie in [0, 1]")
        if self.alpha + self.beta <= 0.0:
            raise ValueError("alpha + beta must be positive")
        if self.delta < 0.0:
            raise ValueError("delta must be >= 0")
        if self.max_candidates < 1:
            raise ValueError("max_candidates must be >= 1")


@dataclass(frozen=True)
class WeightedSegment:
    segment: "Segment"
    query_density: float
    profile_density: float
    score: float


@dataclass
class CandidateSet:
    """Selected segments, ordered by (score desc, page_index asc, seg_index asc)."""

    candidates: list[WeightedSegment] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.candidates)

    def __iter__(self):
        return iter(self.candidates)


def _order_key(ws: WeightedSegment) -> tuple[float, int, int]:
    return (-ws.score, ws.segment.page_index, ws.segment.seg_index)


def weigh_segment(
    seg: "Segment",
    query_terms: list[str],
    m: "Profile",
    cfg: ScoreConfig,
) -> WeightedSegment:
    """Score one segment against query tokens and profile terms.

    Densities are plain token-count ratios. The query sum is taken over the
    *set* of query terms; the profile sum iterates terms in sorted order so the
    float result never depends on dict or set iteration order.
    """
    toks = tokenize(seg.text, cfg.stopwords)
    n = len(toks)
    if n == 0:
        qd = pd = 0.0
    else:
        counts = Counter(toks)
        qd = sum(counts[t] for t in set(query_terms)) / n
        pd = sum(w * counts[t] for t, w in sorted(m.terms.items())) / n
        pd = min(pd, 1.0)
    return WeightedSegment(
        segment=seg,
        query_density=qd,
        profile_density=pd,
        score=cfg.alpha * qd + cfg.beta * pd,
    )


def weigh_matrix(
    omega: "SegmentMatrix",
    query: str,
    m: "Profile",
    cfg: ScoreConfig,
) -> list[list[WeightedSegment]]:
    """Apply weigh_segment to every cell; output shape equals input shape."""
    query_terms = tokenize(query, cfg.stopwords)
    return [
        [weigh_segment(seg, query_terms, m, cfg) for seg in row]
        for row in omega.rows
    ]


def _jaccard(a: set[str], b: set[str]) -> float:
    if not a and not b:
        return 1.0
    union = len(a | b)
    return len(a & b) / union


def select_candidates(
    phi: list[list[WeightedSegment]],
    cfg: ScoreConfig,
) -> CandidateSet:
    """Keep cells with score > delta, suppress near-duplicates, order, truncate.

    Two candidates are duplicates when the Jaccard similarity of their token
    sets exceeds 0.9; the one earlier in the ordering survives.
    """
    above = [ws for row in phi for ws in row if ws.score > cfg.delta]
    above.sort(key=_order_key)

    kept: list[WeightedSegment] = []
    kept_tokens: list[set[str]] = []
    for ws in above:
        tokset = set(tokenize(ws.segment.text, cfg.stopwords))
        if any(_jaccard(tokset, seen) > 0.9 for seen in kept_tokens):
            continue
        kept.append(ws)
        kept_tokens.append(tokset)

    return CandidateSet(candidates=kept[: cfg.max_candidates])
