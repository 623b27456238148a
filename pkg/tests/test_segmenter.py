import random
import re

import pytest

from digestweaver.errors import NotFetchedError
from digestweaver.htmltree import parse
from digestweaver.ingest import RawPage, SearchResultEntry
from digestweaver.segmenter import (
    SegConfig,
    build_segment_matrix,
    parse_html,
    segment_page,
)

from support import gen_page

URL = "https://fixture.test/page"


def page_of(html, status="ok", reason=None):
    entry = SearchResultEntry(rank=1, url=URL)
    return RawPage(source=entry, body=html.encode("utf-8"),
                   media_type="text/html", fetch_status=status, skip_reason=reason)


def segments_of(html, cfg=None):
    cfg = cfg or SegConfig()
    tree = parse_html(page_of(html), cfg.strip_tags)
    return segment_page(tree, 0, URL, cfg)


# Independent re-derivation of the block-collection contract (prune
# boilerplate, then walk: atomic tags and divs with no block-level child are
# emitted whole, in document order, dropping empty texts).
_REF_ATOMIC = {"p", "li", "td", "th", "h1", "h2", "h3", "h4", "h5", "h6",
               "pre", "blockquote", "dt", "dd", "figcaption"}
_REF_BLOCK = {"address", "article", "aside", "blockquote", "details", "div",
              "dl", "dd", "dt", "fieldset", "figcaption", "figure", "footer",
              "form", "h1", "h2", "h3", "h4", "h5", "h6", "header", "hr",
              "li", "main", "menu", "nav", "ol", "p", "pre", "section",
              "table", "tbody", "td", "tfoot", "th", "thead", "tr", "ul"}


def reference_block_texts(html, boilerplate=frozenset({"nav", "footer", "aside"})):
    root = parse(html)

    def subtree_text(node):
        pieces = []
        stack = [node]
        while stack:
            current = stack.pop()
            if isinstance(current, str):
                pieces.append(current)
                continue
            if current is not node and current.tag in boilerplate:
                continue
            stack.extend(reversed(current.children))
        return re.sub(r"\s+", " ", "".join(pieces)).strip()

    texts = []

    def visit(node):
        for child in node.element_children():
            if child.tag in boilerplate:
                continue
            non_boiler_children = [c for c in child.element_children()
                                   if c.tag not in boilerplate]
            atomic = child.tag in _REF_ATOMIC or (
                child.tag == "div"
                and not any(c.tag in _REF_BLOCK for c in non_boiler_children)
            )
            if atomic:
                text = subtree_text(child)
                if text:
                    texts.append(text)
            else:
                visit(child)

    visit(root)
    return texts


def assert_partition(html, cfg=None):
    cfg = cfg or SegConfig()
    segs = segments_of(html, cfg)
    got = " ".join(s.text for s in segs)
    want = " ".join(reference_block_texts(html, cfg.boilerplate_tags))
    assert got == want


class TestParseHtml:
    def test_rejects_skipped_pages(self):
        with pytest.raises(NotFetchedError):
            parse_html(page_of("", status="skipped", reason="http status 404"))

    def test_lossy_decoding(self):
        entry = SearchResultEntry(rank=1, url=URL)
        page = RawPage(source=entry, body=b"<p>caf\xe9 latin-1</p>", media_type="text/html")
        tree = parse_html(page)
        assert "caf" in tree.root.element_children()[0].children[0]


class TestSegmentPage:
    def test_single_paragraph(self):
        segs = segments_of("<p>" + "x" * 120 + "</p>")
        assert len(segs) == 1
        assert segs[0].char_len == 120
        assert segs[0].heading is None

    def test_headings_open_segments(self):
        html = ("<h2>A</h2><p>" + "x" * 200 + "</p>"
                "<h2>B</h2><p>" + "y" * 200 + "</p>")
        segs = segments_of(html)
        assert [(s.seg_index, s.heading, s.char_len) for s in segs] == [
            (0, "A", 202), (1, "B", 202),
        ]
        assert segs[0].text.startswith("A ")

    def test_small_blocks_coalesce(self):
        html = "".join(f"<p>{'x' * 30}</p>" for _ in range(3))
        segs = segments_of(html)
        assert [s.char_len for s in segs] == [92]

    def test_max_chars_splits(self):
        cfg = SegConfig(min_chars=10, max_chars=100)
        html = "".join("<p>" + "x" * 60 + "</p>" for _ in range(3))
        segs = segments_of(html, cfg)
        assert [s.char_len for s in segs] == [60, 60, 60]

    def test_oversized_single_block_kept_whole(self):
        cfg = SegConfig(min_chars=10, max_chars=100)
        segs = segments_of("<p>" + "x" * 250 + "</p>", cfg)
        assert [s.char_len for s in segs] == [250]

    def test_undersized_trailer_merges_backward(self):
        cfg = SegConfig(min_chars=50, max_chars=100)
        html = "<p>" + "x" * 90 + "</p><p>" + "y" * 20 + "</p>"
        segs = segments_of(html, cfg)
        assert [s.char_len for s in segs] == [111]

    def test_lone_short_segment_survives(self):
        segs = segments_of("<p>tiny</p>")
        assert [s.char_len for s in segs] == [4]

    def test_empty_page_yields_nothing(self):
        assert segments_of("<div><span></span></div>") == []
        assert segments_of("") == []

    def test_boilerplate_dropped(self):
        html = ("<nav><p>menu menu menu</p></nav>"
                "<p>" + "content " * 15 + "</p>"
                "<footer><p>legal</p></footer>")
        segs = segments_of(html)
        assert len(segs) == 1
        assert "menu" not in segs[0].text
        assert "legal" not in segs[0].text

    def test_div_without_block_children_is_atomic(self):
        segs = segments_of("<div>" + "plain text " * 10 + "</div>")
        assert len(segs) == 1
        assert segs[0].text.startswith("plain text")

    def test_div_with_block_children_descends(self):
        html = "<div><p>" + "a" * 90 + "</p></div><div><p>" + "b" * 90 + "</p></div>"
        cfg = SegConfig(min_chars=10, max_chars=100)
        segs = segments_of(html, cfg)
        assert [s.char_len for s in segs] == [90, 90]

    def test_table_cells_are_blocks(self):
        html = "<table><tr><td>alpha cell</td><td>beta cell</td></tr></table>"
        segs = segments_of(html)
        assert segs[0].text == "alpha cell beta cell"

    def test_heading_carried_to_following_segments(self):
        cfg = SegConfig(min_chars=10, max_chars=60)
        html = "<h2>Topic</h2><p>" + "x" * 50 + "</p><p>" + "y" * 50 + "</p>"
        segs = segments_of(html, cfg)
        assert len(segs) == 2
        assert segs[0].heading == "Topic"
        assert segs[1].heading == "Topic"   # nearest preceding heading

    def test_fragment_is_sanitized_markup(self):
        html = '<p onclick="x()">safe <script>evil()</script>text here padded out</p>'
        segs = segments_of("<p>" + "x" * 80 + "</p>" + html)
        joined = "".join(s.html_fragment for s in segs)
        assert "script" not in joined
        assert "onclick" not in joined

    def test_indices_contiguous(self):
        html = "".join(f"<h2>H{k}</h2><p>{'x' * 100}</p>" for k in range(4))
        segs = segments_of(html)
        assert [s.seg_index for s in segs] == list(range(len(segs)))
        assert all(s.page_index == 0 for s in segs)


class TestPartitionProperty:
    def test_spec_examples(self):
        assert_partition("<p>hello world this is content</p>")
        assert_partition("<h2>A</h2><p>" + "x" * 200 + "</p><h2>B</h2><p>" + "y" * 200 + "</p>")

    def test_handcrafted_tricky_pages(self):
        pages = [
            "<div><div><p>deep</p></div>loose text</div>",
            "<ul><li>one<li>two<li>three</ul>",
            "<table><tr><td>a<td>b<tr><td>c</table>",
            "<p>start<div>middle</div><p>end",
            "<blockquote>quoted" + " words" * 30,
            "<article><header><h1>Title</h1></header><p>body text here</p></article>",
            "<dl><dt>term</dt><dd>definition text</dd></dl>",
            "<figure><figcaption>caption words</figcaption></figure>",
        ]
        for html in pages:
            assert_partition(html)

    def test_generated_corpus(self):
        rng = random.Random(2024)
        for _ in range(30):
            assert_partition(gen_page(rng))

    def test_generated_corpus_with_tight_limits(self):
        rng = random.Random(2025)
        cfg = SegConfig(min_chars=25, max_chars=120)
        for _ in range(20):
            assert_partition(gen_page(rng), cfg)


class TestLengthBounds:
    def test_rule_derived_bounds(self):
        rng = random.Random(2026)
        cfg = SegConfig(min_chars=40, max_chars=300)
        for _ in range(25):
            segs = segments_of(gen_page(rng), cfg)
            for pos, seg in enumerate(segs):
                if pos < len(segs) - 1:
                    assert seg.char_len >= cfg.min_chars
                assert seg.char_len >= 1

    def test_max_bound_with_merge_slack(self):
        # A segment may exceed max_chars only through a single oversized block
        # or a straggler merge, which adds under min_chars of slack.
        rng = random.Random(2027)
        cfg = SegConfig(min_chars=40, max_chars=300)
        checked = 0
        for _ in range(40):
            html = gen_page(rng)
            blocks = reference_block_texts(html)
            if any(len(b) > cfg.max_chars for b in blocks):
                continue
            for seg in segments_of(html, cfg):
                assert seg.char_len <= cfg.max_chars + cfg.min_chars
                checked += 1
        assert checked > 20


class TestBuildSegmentMatrix:
    def test_rows_follow_pages(self):
        ok1 = page_of("<p>" + "x" * 100 + "</p><h2>T</h2><p>" + "y" * 100 + "</p>")
        ok2 = page_of("<p>" + "z" * 100 + "</p>")
        matrix = build_segment_matrix([ok1, ok2], SegConfig())
        assert [len(r) for r in matrix.rows] == [2, 1]
        assert matrix.rows[1][0].page_index == 1

    def test_ragged_three_by_two(self):
        three = page_of("".join(f"<h2>S{k}</h2><p>{'x' * 100}</p>" for k in range(3)))
        two = page_of("".join(f"<h2>S{k}</h2><p>{'y' * 100}</p>" for k in range(2)))
        matrix = build_segment_matrix([three, two], SegConfig())
        assert [len(r) for r in matrix.rows] == [3, 2]
        assert [s.seg_index for s in matrix.rows[0]] == [0, 1, 2]

    def test_zero_pages(self):
        assert build_segment_matrix([], SegConfig()).rows == []

    def test_skipped_page_gets_empty_row(self):
        ok = page_of("<p>" + "x" * 100 + "</p>")
        skipped = page_of("", status="skipped", reason="timeout")
        matrix = build_segment_matrix([ok, skipped], SegConfig())
        assert [len(r) for r in matrix.rows] == [1, 0]

    def test_deterministic(self):
        rng = random.Random(2028)
        pages = [page_of(gen_page(rng)) for _ in range(5)]
        a = build_segment_matrix(pages, SegConfig())
        b = build_segment_matrix(pages, SegConfig())
        assert a == b


class TestSegConfig:
    def test_rejects_bad_bounds(self):
        with pytest.raises(ValueError):
            SegConfig(min_chars=100, max_chars=50)
        with pytest.raises(ValueError):
            SegConfig(min_chars=0)
