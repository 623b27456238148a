"""Compose the final digest page by token replacement.

Templates carry literal {{SEGMENT}}, {{QUERY}} and {{GENERATED_AT}} tokens.
Candidates fill segment slots in order; when there are more candidates than
slots the surplus is appended to the last slot, separated by a rule, so the
page grows vertically instead of dropping material.
"""

from __future__ import annotations

import html
from dataclasses import dataclass, field
from datetime import datetime, timezone

from .errors import NoTokensError
from .scorer import CandidateSet, WeightedSegment

SEGMENT_TOKEN = "{{SEGMENT}}"
QUERY_TOKEN = "{{QUERY}}"
GENERATED_AT_TOKEN = "{{GENERATED_AT}}"

SEPARATOR_HTML = '<hr class="dps-sep"/>'

DEFAULT_TEMPLATE = """<!DOCTYPE html>
<html lang="en">
<head>
<meta charset="utf-8">
<title>Digest: {{QUERY}}</title>
<style>
  body { font-family: Georgia, serif; margin: 2rem auto; max-width: 46rem; }
  .dps-segment { border: 1px solid #ddd; border-radius: 6px; padding: 0.8rem 1rem; margin: 1rem 0; }
  .dps-segment::after { content: attr(data-source); display: block; margin-top: 0.6rem;
                        font-size: 0.75rem; color: #777; word-break: break-all; }
  .dps-sep { border: none; border-top: 2px dashed #bbb; margin: 1rem 0; }
  header h1 { font-size: 1.4rem; }
  header p { color: #555; font-size: 0.85rem; }
</style>
</head>
<body>
<header>
  <h1>Digest for &ldquo;{{QUERY}}&rdquo;</h1>
  <p>generated {{GENERATED_AT}}</p>
</header>
<main>
{{SEGMENT}}
</main>
</body>
</html>
"""


@dataclass(frozen=True)
class _Token:
    pos: int
    literal: str


@dataclass
class Template:
    raw: str
    tokens: list[_Token]

    @property
    def slot_count(self) -> int:
        return sum(1 for t in self.tokens if t.literal == SEGMENT_TOKEN)


@dataclass
class Placement:
    slot_index: int
    candidate_ids: list[tuple[int, int]]   # (page_index, seg_index)


@dataclass
class ComposedPage:
    html: str
    placements: list[Placement] = field(default_factory=list)
    query: str = ""
    generated_at: str = ""


def parse_template(text: str) -> Template:
    """Locate every token by literal match; at least one segment slot required."""
    tokens: list[_Token] = []
    for literal in (SEGMENT_TOKEN, QUERY_TOKEN, GENERATED_AT_TOKEN):
        start = 0
        while True:
            pos = text.find(literal, start)
            if pos < 0:
                break
            tokens.append(_Token(pos=pos, literal=literal))
            start = pos + len(literal)
    tokens.sort(key=lambda t: t.pos)
    tpl = Template(raw=text, tokens=tokens)
    if tpl.slot_count == 0:
        raise NoTokensError("template contains no {{SEGMENT}} token")
    return tpl


def load_template(path: str | None) -> Template:
    """Parse the template at path, or the built-in single-slot default."""
    if path is None:
        return parse_template(DEFAULT_TEMPLATE)
    with open(path, encoding="utf-8") as fh:
        return parse_template(fh.read())


def _wrap(candidate: WeightedSegment) -> str:
    seg = candidate.segment
    return (
        '<section class="dps-segment"'
        f' data-source="{html.escape(seg.source_url, quote=True)}"'
        f' data-score="{candidate.score:.4f}"'
        f' data-rank="{seg.page_index + 1}">'
        f"{seg.html_fragment}</section>"
    )


def _format_timestamp(now: datetime | None) -> str:
    moment = now.astimezone(timezone.utc) if now else datetime.now(timezone.utc)
    return moment.strftime("%Y-%m-%dT%H:%M:%SZ")


def build_page(
    cs: CandidateSet,
    tpl: Template,
    query: str,
    now: datetime | None = None,
) -> ComposedPage:
    """Fill the template: candidate i goes to slot i; surplus candidates are
    appended to the last slot in order, separated by SEPARATOR_HTML."""
    candidates = list(cs)
    k = tpl.slot_count
    assignments: list[list[WeightedSegment]] = [[] for _ in range(k)]
    if len(candidates) <= k:
        for idx, cand in enumerate(candidates):
            assignments[idx] = [cand]
    else:
        for idx in range(k - 1):
            assignments[idx] = [candidates[idx]]
        assignments[k - 1] = candidates[k - 1:]

    generated_at = _format_timestamp(now)
    escaped_query = html.escape(query, quote=True)

    out: list[str] = []
    placements: list[Placement] = []
    cursor = 0
    slot = 0
    for token in tpl.tokens:
        out.append(tpl.raw[cursor:token.pos])
        if token.literal == SEGMENT_TOKEN:
            cands = assignments[slot]
            out.append(SEPARATOR_HTML.join(_wrap(c) for c in cands))
            placements.append(Placement(
                slot_index=slot,
                candidate_ids=[(c.segment.page_index, c.segment.seg_index) for c in cands],
            ))
            slot += 1
        elif token.literal == QUERY_TOKEN:
            out.append(escaped_query)
        else:
            out.append(generated_at)
        cursor = token.pos + len(token.literal)
    out.append(tpl.raw[cursor:])

    return ComposedPage(
        html="".join(out),
        placements=placements,
        query=query,
        generated_at=generated_at,
    )
