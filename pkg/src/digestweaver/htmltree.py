"""Error-recovering HTML parsing into a small sanitized node tree.

Built on html.parser so malformed markup never raises: unclosed elements are
closed at end of input, stray end tags are ignored, and common implicit-close
rules (p, li, dt/dd, table cells) are applied. Script, style, noscript,
iframe and svg subtrees plus comments are dropped during parsing.
"""

from __future__ import annotations

import html
import re
from dataclasses import dataclass, field
from html.parser import HTMLParser

DEFAULT_STRIP_TAGS = frozenset({"script", "style", "noscript", "iframe", "svg"})

VOID_TAGS = frozenset({
    "area", "base", "br", "col", "embed", "hr", "img", "input",
    "link", "meta", "param", "source", "track", "wbr",
})

# Start tags that implicitly close an open <p>.
_P_CLOSERS = frozenset({
    "address", "article", "aside", "blockquote", "details", "div", "dl",
    "dd", "dt", "fieldset", "figcaption", "figure", "footer", "form",
    "h1", "h2", "h3", "h4", "h5", "h6", "header", "hr", "li", "main",
    "menu", "nav", "ol", "p", "pre", "section", "table", "ul",
})

# Attributes kept when serializing sanitized fragments.
_SAFE_ATTRS = frozenset({
    "href", "src", "alt", "title", "colspan", "rowspan", "datetime", "cite", "lang",
})

_WS_RE = re.compile(r"\s+")


@dataclass
class Node:
    tag: str
    attrs: dict[str, str] = field(default_factory=dict)
    children: list["Node | str"] = field(default_factory=list)

    def element_children(self) -> list["Node"]:
        return [c for c in self.children if isinstance(c, Node)]


def collapse_ws(text: str) -> str:
    """Collapse every run of Unicode whitespace to one space and trim."""
    return _WS_RE.sub(" ", text).strip()


def node_text(node: Node) -> str:
    """Concatenated raw text of the subtree (no separators inserted)."""
    parts: list[str] = []

    def walk(n: Node) -> None:
        for child in n.children:
            if isinstance(child, str):
                parts.append(child)
            else:
                walk(child)

    walk(node)
    return "".join(parts)


class _TreeBuilder(HTMLParser):
    def __init__(self, strip_tags: frozenset[str]):
        super().__init__(convert_charrefs=True)
        self.strip_tags = strip_tags
        self.root = Node(tag="#document")
        self.stack: list[Node] = [self.root]
        self.suppressed: list[str] = []

    # -- implicit-close helpers -------------------------------------------

    def _close_nearest(self, targets: frozenset[str], stop_at: frozenset[str]) -> None:
        """Pop up to and including the nearest open target, unless a stop tag
        sits closer to the top of the stack."""
        for idx in range(len(self.stack) - 1, 0, -1):
            tag = self.stack[idx].tag
            if tag in stop_at:
                return
            if tag in targets:
                del self.stack[idx:]
                return

    def _apply_implicit_closes(self, tag: str) -> None:
        if tag == "li":
            self._close_nearest(frozenset({"li"}), frozenset({"ul", "ol"}))
        elif tag in ("dt", "dd"):
            self._close_nearest(frozenset({"dt", "dd"}), frozenset({"dl"}))
        elif tag in ("td", "th"):
            self._close_nearest(frozenset({"td", "th"}), frozenset({"tr", "table"}))
        elif tag == "tr":
            self._close_nearest(frozenset({"tr"}), frozenset({"table"}))
        elif tag == "option":
            self._close_nearest(frozenset({"option"}), frozenset({"select"}))
        if tag in _P_CLOSERS:
            self._close_nearest(frozenset({"p"}), frozenset())

    # -- HTMLParser callbacks ---------------------------------------------

    def handle_starttag(self, tag: str, attrs) -> None:
        if tag in self.strip_tags:
            self.suppressed.append(tag)
            return
        if self.suppressed:
            return
        self._apply_implicit_closes(tag)
        node = Node(tag=tag)
        for name, value in attrs:
            node.attrs.setdefault(name.lower(), value or "")
        self.stack[-1].children.append(node)
        if tag not in VOID_TAGS:
            self.stack.append(node)

    def handle_endtag(self, tag: str) -> None:
        if self.suppressed:
            if tag == self.suppressed[-1]:
                self.suppressed.pop()
            return
        if tag in self.strip_tags or tag in VOID_TAGS:
            return
        for idx in range(len(self.stack) - 1, 0, -1):
            if self.stack[idx].tag == tag:
                del self.stack[idx:]
                return
        # no matching open tag: drop it

    def handle_data(self, data: str) -> None:
        if self.suppressed or not data:
            return
        self.stack[-1].children.append(data)

    def handle_comment(self, data: str) -> None:
        pass

    def handle_decl(self, decl: str) -> None:
        pass

    def handle_pi(self, data: str) -> None:
        pass


def parse(text: str, strip_tags: frozenset[str] = DEFAULT_STRIP_TAGS) -> Node:
    """Parse HTML text into a node tree; never raises on malformed input."""
    builder = _TreeBuilder(strip_tags)
    builder.feed(text)
    builder.close()
    return builder.root


def _render_attrs(attrs: dict[str, str]) -> str:
    parts = []
    for name, value in attrs.items():
        if name not in _SAFE_ATTRS:
            continue
        if name in ("href", "src") and value.strip().lower().startswith("javascript:"):
            continue
        parts.append(f' {name}="{html.escape(value, quote=True)}"')
    return "".join(parts)

def render(node: Node) -> str:
    """Serialize a subtree back to sanitized markup.

    Only whitelisted attributes survive; text and attribute values are
    entity-escaped. The #document root renders as its children.
    """
    out: list[str] = []

    def walk(n: Node) -> None:
        is_root = n.tag == "#document"
        if not is_root:
            out.append(f"<{n.tag}{_render_attrs(n.attrs)}")
            if n.tag in VOID_TAGS:
                out.append("/>")
                return
            out.append(">")
        for child in n.children:
            if isinstance(child, str):
                out.append(html.escape(child, quote=False))
            else:
                walk(child)
        if not is_root:
            out.append(f"</{n.tag}>")

    walk(node)
    return "".join(out)
