"""Split fetched pages into ordered content segments.

A page is parsed into a sanitized node tree, boilerplate subtrees are dropped,
atomic text blocks are collected in document order, and the blocks are grouped
into segments: headings open a new segment, size limits close one, and
too-small stragglers are merged into a neighbor. Per page, the segment texts
partition the block texts exactly (nothing lost, nothing duplicated).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import htmltree
from .errors import NotFetchedError
from .htmltree import DEFAULT_STRIP_TAGS, Node, collapse_ws
from .ingest import RawPage

ATOMIC_TAGS = frozenset({
    "p", "li", "td", "th", "h1", "h2", "h3", "h4", "h5", "h6",
    "pre", "blockquote", "dt", "dd", "figcaption",
})

HEADING_TAGS = frozenset({"h1", "h2", "h3", "h4", "h5", "h6"})

BLOCK_LEVEL_TAGS = frozenset({
    "address", "article", "aside", "blockquote", "details", "div", "dl",
    "dd", "dt", "fieldset", "figcaption", "figure", "footer", "form",
    "h1", "h2", "h3", "h4", "h5", "h6", "header", "hr", "li", "main",
    "menu", "nav", "ol", "p", "pre", "section", "table", "tbody", "td",
    "tfoot", "th", "thead", "tr", "ul",
})

DEFAULT_BOILERPLATE_TAGS = frozenset({"nav", "footer", "aside"})


@dataclass(frozen=True)
class SegConfig:
    min_chars: int = 80
    max_chars: int = 2000
    strip_tags: frozenset[str] = DEFAULT_STRIP_TAGS
    boilerplate_tags: frozenset[str] = DEFAULT_BOILERPLATE_TAGS

    def __post_init__(self) -> None:
        if not (1 <= self.min_chars < self.max_chars):
            raise ValueError("need 1 <= min_chars < max_chars")


@dataclass
class ContentTree:
    root: Node


@dataclass(frozen=True)
class Segment:
    page_index: int
    seg_index: int
    text: str
    html_fragment: str
    source_url: str
    heading: str | None = None

    @property
    def char_len(self) -> int:
        return len(self.text)


@dataclass
class SegmentMatrix:
    """One row per fetched page, rank order; skipped pages get empty rows."""

    rows: list[list[Segment]] = field(default_factory=list)


def parse_html(page: RawPage, strip_tags: frozenset[str] = DEFAULT_STRIP_TAGS) -> ContentTree:
    """Decode and parse a fetched page; malformed markup yields a best-effort
    tree, non-UTF-8 bytes are decoded lossily."""
    if page.fetch_status != "ok":
        raise NotFetchedError(
            f"page for {page.source.url} was skipped: {page.skip_reason}"
        )
    text = page.body.decode("utf-8", errors="replace")
    return ContentTree(root=htmltree.parse(text, strip_tags))


@dataclass
class _Block:
    text: str
    fragment: str
    heading: str | None
    is_heading: bool


def _prune(node: Node, boilerplate: frozenset[str]) -> Node:
    kept = Node(tag=node.tag, attrs=dict(node.attrs))
    for child in node.children:
        if isinstance(child, str):
            kept.children.append(child)
        elif child.tag not in boilerplate:
            kept.children.append(_prune(child, boilerplate))
    return kept


def _is_atomic_div(node: Node) -> bool:
    return node.tag == "div" and not any(
        c.tag in BLOCK_LEVEL_TAGS for c in node.element_children()
    )


def _collect_blocks(root: Node) -> list[_Block]:
    blocks: list[_Block] = []
    last_heading: str | None = None

    def walk(node: Node) -> None:
        nonlocal last_heading
        for child in node.element_children():
            if child.tag in ATOMIC_TAGS or _is_atomic_div(child):
                text = collapse_ws(htmltree.node_text(child))
                if not text:
                    continue
                if child.tag in HEADING_TAGS:
                    last_heading = text
                    blocks.append(_Block(text, htmltree.render(child), text, True))
                else:
                    blocks.append(_Block(text, htmltree.render(child), last_heading, False))
            else:
                walk(child)

    walk(root)
    return blocks


def _group_blocks(blocks: list[_Block], cfg: SegConfig) -> list[list[_Block]]:
    groups: list[list[_Block]] = []
    current: list[_Block] = []
    current_len = 0

    for block in blocks:
        if block.is_heading or not current:
            if current:
                groups.append(current)
            current = [block]
            current_len = len(block.text)
            continue
        joined = current_len + 1 + len(block.text)
        if joined > cfg.max_chars:
            groups.append(current)
            current = [block]
            current_len = len(block.text)
        else:
            current.append(block)
            current_len = joined
    if current:
        groups.append(current)

    # Merge undersized groups forward (or backward for the page's last group).
    def group_len(group: list[_Block]) -> int:
        return sum(len(b.text) for b in group) + len(group) - 1

    i = 0
    while i < len(groups):
        if group_len(groups[i]) >= cfg.min_chars:
            i += 1
            continue
        if i + 1 < len(groups):
            groups[i + 1] = groups[i] + groups[i + 1]
            del groups[i]
        elif i > 0:
            groups[i - 1] = groups[i - 1] + groups[i]
            del groups[i]
        else:
            break  # a lone undersized group stays as the page's only segment
    return groups


def segment_page(tree: ContentTree, i: int, url: str, cfg: SegConfig) -> list[Segment]:
    """Produce the ordered segments of one page (empty list for empty pages)."""
    pruned = _prune(tree.root, cfg.boilerplate_tags)
    blocks = _collect_blocks(pruned)
    groups = _group_blocks(blocks, cfg)
    segments = []
    for j, group in enumerate(groups):
        segments.append(Segment(
            page_index=i,
            seg_index=j,
            text=" ".join(b.text for b in group),
            html_fragment="".join(b.fragment for b in group),
            source_url=url,
            heading=group[0].heading,
        ))
    return segments


def build_segment_matrix(pages: list[RawPage], cfg: SegConfig) -> SegmentMatrix:
    """Segment every fetched page; row k belongs to page k, skipped rows empty."""
    rows: list[list[Segment]] = []
    for k, page in enumerate(pages):
        if page.fetch_status != "ok":
            rows.append([])
            continue
        tree = parse_html(page, cfg.strip_tags)
        rows.append(segment_page(tree, k, page.source.url, cfg))
    return SegmentMatrix(rows=rows)
