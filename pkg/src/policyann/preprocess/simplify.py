"""DOM simplification: inline unwrapping, attribute stripping, nesting
collapse and whitespace normalization."""

from __future__ import annotations

from ..htmldom import INLINE_TAGS, Comment, Element, Node, Text, collapse_whitespace

# Structural tags preserved as-is; anything else becomes a div.
KNOWN_TAGS = frozenset(
    {"div", "p", "h1", "h2", "h3", "h4", "h5", "h6",
     "ul", "ol", "li", "table", "thead", "tbody", "tfoot", "tr", "td", "th"}
)

# Tags folded into div rather than treated as unknown content.
_DIV_ALIASES = frozenset({"main", "article", "section", "body", "html", "[document]"})

_DROP_TAGS = frozenset({"script", "style", "noscript"})

# The only attributes that carry table structure.
_KEPT_ATTRS = frozenset({"colspan", "rowspan"})

# Tags whose single-element-child nesting collapses (generic containers).
_COLLAPSIBLE = frozenset({"div"})


def _clone(node: Node) -> Node | None:
    if isinstance(node, Comment):
        return None
    if isinstance(node, Text):
        return Text(node.data)
    assert isinstance(node, Element)
    tag = node.tag
    if tag in _DROP_TAGS:
        return None
    if tag == "br":
        return Text(" ")
    if tag in INLINE_TAGS:
        # handled by caller (spliced into parent)
        raise AssertionError("inline tags are unwrapped before cloning")
    if tag in _DIV_ALIASES or tag not in KNOWN_TAGS:
        tag = "div"
    attrs = {k: v for k, v in node.attrs.items() if k in _KEPT_ATTRS and node.tag in ("td", "th")}
    clone = Element(tag, attrs)
    _copy_children(node, clone)
    return clone


def _copy_children(source: Element, target: Element) -> None:
    for child in source.children:
        if isinstance(child, Element) and child.tag in INLINE_TAGS:
            # unwrap: splice the inline element's content into the target
            _copy_children(child, target)
            continue
        cloned = _clone(child)
        if cloned is not None:
            target.append(cloned)


def _normalize_text_nodes(element: Element) -> None:
    merged: list[Node] = []
    for child in element.children:
        if isinstance(child, Text) and merged and isinstance(merged[-1], Text):
            merged[-1].data += child.data
        else:
            merged.append(child)
    result: list[Node] = []
    for child in merged:
        if isinstance(child, Text):
            data = collapse_whitespace(child.data)
            if not data.strip():
                continue
            child.data = data
        result.append(child)
    element.children = []
    for child in result:
        element.append(child)
        if isinstance(child, Element):
            _normalize_text_nodes(child)


def _collapse_nesting(element: Element) -> Element:
    for index, child in enumerate(element.children):
        if isinstance(child, Element):
            element.children[index] = _collapse_nesting(child)
            element.children[index].parent = element
    while (
        element.tag in _COLLAPSIBLE
        and len(element.children) == 1
        and isinstance(element.children[0], Element)
    ):
        element = element.children[0]
        element.parent = None
    return element


def simplify_html(subtree: Element) -> Element:
    """Produce a simplified copy of a main-content subtree.

    Removes scripts, styles and comments, strips all attributes except table
    structure, unwraps inline tags, converts unknown tags to div, collapses
    single-child div nesting to fixpoint, and normalizes whitespace.
    """
    if subtree.tag in INLINE_TAGS or subtree.tag in _DROP_TAGS:
        wrapper = Element("div")
        wrapper.append(subtree)
        subtree = wrapper
    root = _clone(subtree)
    assert isinstance(root, Element)
    _normalize_text_nodes(root)
    return _collapse_nesting(root)
