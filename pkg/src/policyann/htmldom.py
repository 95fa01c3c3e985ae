"""A small, tolerant HTML DOM built on html.parser.

Implements the subset of tree construction the preprocessing pipeline needs:
implied end tags for p/li/td/th/tr, void elements, and recovery from stray
close tags. Attribute values are kept verbatim.
"""

from __future__ import annotations

import re
from html.parser import HTMLParser
from typing import Callable, Iterator, Optional

# Inline tags contribute text to their parent without word separation.
# br is deliberately absent: it acts as a word boundary.
INLINE_TAGS = frozenset(
    {"span", "a", "b", "i", "em", "strong", "u", "small", "sup", "sub",
     "mark", "code"}
)

VOID_ELEMENTS = frozenset(
    {"area", "base", "br", "col", "embed", "hr", "img", "input", "link",
     "meta", "param", "source", "track", "wbr"}
)

# Opening one of these closes an open element of the listed tags first.
_IMPLIED_CLOSERS: dict[str, frozenset[str]] = {
    "p": frozenset({"p"}),
    "li": frozenset({"li"}),
    "td": frozenset({"td", "th"}),
    "th": frozenset({"td", "th"}),
    "tr": frozenset({"tr", "td", "th"}),
    "h1": frozenset({"p"}),
    "h2": frozenset({"p"}),
    "h3": frozenset({"p"}),
    "h4": frozenset({"p"}),
    "h5": frozenset({"p"}),
    "h6": frozenset({"p"}),
    "ul": frozenset({"p"}),
    "ol": frozenset({"p"}),
    "table": frozenset({"p"}),
}

# Implied closes never propagate past these boundaries.
_SCOPE_BOUNDARIES = frozenset({"ul", "ol", "table", "tr", "body", "html", "[document]"})

_WS_RE = re.compile(r"\s+")


class Node:
    parent: Optional["Element"] = None


class Text(Node):
    def __init__(self, data: str):
        self.data = data

    def __repr__(self):
        return f"Text({self.data!r})"


class Comment(Node):
    def __init__(self, data: str):
        self.data = data

    def __repr__(self):
        return f"Comment({self.data!r})"


class Element(Node):
    def __init__(self, tag: str, attrs: Optional[dict[str, str]] = None):
        self.tag = tag
        self.attrs = dict(attrs or {})
        self.children: list[Node] = []

    def __repr__(self):
        return f"<{self.tag} children={len(self.children)}>"

    def append(self, node: Node) -> None:
        node.parent = self
        self.children.append(node)

    def remove(self, node: Node) -> None:
        self.children.remove(node)
        node.parent = None

    def replace(self, old: Node, new: Node) -> None:
        index = self.children.index(old)
        self.children[index] = new
        new.parent = self
        old.parent = None

    def iter_elements(self) -> Iterator["Element"]:
        """Depth-first iteration over this element and its descendants."""
        yield self
        for child in list(self.children):
            if isinstance(child, Element):
                yield from child.iter_elements()

    def find_all(
        self, match: str | Callable[["Element"], bool]
    ) -> list["Element"]:
        """Descendant elements matching a tag name or a predicate."""
        if isinstance(match, str):
            tag = match
            match = lambda el: el.tag == tag  # noqa: E731
        return [el for el in self.iter_elements() if match(el)]

    def direct_text(self) -> str:
        """Concatenated text of the element's own text-node children."""
        parts = [c.data for c in self.children if isinstance(c, Text)]
        return collapse_whitespace(" ".join(parts)).strip()

    def text_content(self) -> str:
        """Whitespace-collapsed text of the whole subtree.

        Inline elements contribute their text without added separation;
        block-level boundaries separate words.
        """
        parts: list[str] = []

        def walk(node: Node) -> None:
            if isinstance(node, Text):
                parts.append(node.data)
            elif isinstance(node, Element):
                block = node.tag not in INLINE_TAGS
                if block:
                    parts.append("\n")
                for child in node.children:
                    walk(child)
                if block:
                    parts.append("\n")

        walk(self)
        return collapse_whitespace("".join(parts)).strip()

    def classes_and_id(self) -> str:
        return " ".join(
            v for k, v in self.attrs.items() if k in ("id", "class") and v
        ).lower()


def collapse_whitespace(text: str) -> str:
    return _WS_RE.sub(" ", text)


class _TreeBuilder(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.root = Element("[document]")
        self.stack: list[Element] = [self.root]

    def _open_tags(self) -> list[str]:
        return [el.tag for el in self.stack]

    def _close_implied(self, tag: str) -> None:
        closable = _IMPLIED_CLOSERS.get(tag)
        if not closable:
            return
        for element in reversed(self.stack[1:]):
            if element.tag in closable:
                while self.stack[-1] is not element:
                    self.stack.pop()
                self.stack.pop()
                return
            if element.tag in _SCOPE_BOUNDARIES:
                return

    def handle_starttag(self, tag, attrs):
        self._close_implied(tag)
        element = Element(tag, {k: (v or "") for k, v in attrs})
        self.stack[-1].append(element)
        if tag not in VOID_ELEMENTS:
            self.stack.append(element)

    def handle_startendtag(self, tag, attrs):
        element = Element(tag, {k: (v or "") for k, v in attrs})
        self.stack[-1].append(element)

    def handle_endtag(self, tag):
        if tag in VOID_ELEMENTS:
            return
        for depth in range(len(self.stack) - 1, 0, -1):
            if self.stack[depth].tag == tag:
                del self.stack[depth:]
                return
        # stray close tag: ignore

    def handle_data(self, data):
        if data:
            self.stack[-1].append(Text(data))

    def handle_comment(self, data):
        self.stack[-1].append(Comment(data))


def parse_html(payload: bytes | str) -> Element:
    """Parse HTML tolerantly; always returns a synthetic [document] root."""
    if isinstance(payload, bytes):
        payload = payload.decode("utf-8", errors="replace")
    builder = _TreeBuilder()
    builder.feed(payload)
    builder.close()
    return builder.root


def visible_tokens(element: Element) -> list[str]:
    """Non-whitespace tokens of all text in the subtree, in document order."""
    return element.text_content().split()
