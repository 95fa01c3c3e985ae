"""Parse a simplified subtree into context-enriched passages."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..htmldom import Element
from ..model import CONTEXT_TAGS, ContextElement, ElementType, Passage

_HEADING_LEVELS = {"h1": 1, "h2": 2, "h3": 3, "h4": 4, "h5": 5, "h6": 6}

_ELEMENT_TYPES = {
    "h1": ElementType.HEADLINE, "h2": ElementType.HEADLINE,
    "h3": ElementType.HEADLINE, "h4": ElementType.HEADLINE,
    "h5": ElementType.HEADLINE, "h6": ElementType.HEADLINE,
    "li": ElementType.LIST_ITEM,
    "td": ElementType.TABLE_CELL,
    "th": ElementType.TABLE_HEADER,
}

_LIST_TAGS = frozenset({"ul", "ol"})
_CELL_TAGS = frozenset({"td", "th"})


def _context_tag(tag: str) -> str:
    return tag if tag in CONTEXT_TAGS else "div"


@dataclass
class _Emitted:
    element: Element
    text: str


def _table_header_context(cell: Element) -> list[ContextElement]:
    """Column header (same column in the table's header row) and the row's
    leading header cell, when present."""
    row = cell.parent
    while row is not None and row.tag != "tr":
        row = row.parent
    if row is None:
        return []
    table = row.parent
    while table is not None and table.tag != "table":
        table = table.parent
    if table is None:
        return []

    rows = [el for el in table.iter_elements() if el.tag == "tr"]
    header_row = next(
        (r for r in rows if any(c.tag == "th" for c in r.children if isinstance(c, Element))),
        None,
    )
    context: list[ContextElement] = []

    cells = [c for c in row.children if isinstance(c, Element) and c.tag in _CELL_TAGS]
    column = cells.index(cell) if cell in cells else -1

    if header_row is not None and header_row is not row and column >= 0:
        header_cells = [
            c for c in header_row.children if isinstance(c, Element) and c.tag in _CELL_TAGS
        ]
        if column < len(header_cells) and header_cells[column].tag == "th":
            text = header_cells[column].direct_text()
            if text:
                context.append(ContextElement(text=text, tag="th"))

    first = cells[0] if cells else None
    if first is not None and first is not cell and first.tag == "th":
        text = first.direct_text()
        if text and all(c.text != text or c.tag != "th" for c in context):
            context.append(ContextElement(text=text, tag="th"))
    return context


def parse_passages(root: Element, id_prefix: str = "p") -> list[Passage]:
    """Emit one passage per text-bearing element, in document order.

    Context per passage: the chain of nearest preceding headings of strictly
    decreasing level (outermost first); for list items and table cells, the
    passage immediately preceding the enclosing list/table; for table cells,
    the column and leading row header cells.
    """
    passages: list[Passage] = []
    heading_stack: list[tuple[int, ContextElement]] = []
    last_emitted: Optional[_Emitted] = None
    # list/table element id() -> the passage emitted just before entering it
    structure_intro: dict[int, Optional[_Emitted]] = {}

    def nearest_structure(element: Element, tags: frozenset[str]) -> Optional[Element]:
        node = element.parent
        while node is not None:
            if node.tag in tags:
                return node
            node = node.parent
        return None

    def visit(element: Element) -> None:
        nonlocal last_emitted
        if element.tag in _LIST_TAGS or element.tag == "table":
            structure_intro[id(element)] = last_emitted

        text = element.direct_text()
        if text:
            element_type = _ELEMENT_TYPES.get(element.tag, ElementType.TEXT)
            level = _HEADING_LEVELS.get(element.tag)

            if level is not None:
                while heading_stack and heading_stack[-1][0] >= level:
                    heading_stack.pop()

            context: list[ContextElement] = [entry for _, entry in heading_stack]

            if element_type in (ElementType.LIST_ITEM, ElementType.TABLE_CELL):
                structure = nearest_structure(
                    element, _LIST_TAGS if element_type is ElementType.LIST_ITEM else frozenset({"table"})
                )
                intro = structure_intro.get(id(structure)) if structure is not None else None
                if intro is not None:
                    context.append(
                        ContextElement(text=intro.text, tag=_context_tag(intro.element.tag))
                    )

            if element_type is ElementType.TABLE_CELL:
                context.extend(_table_header_context(element))

            passage = Passage(
                element_type=element_type,
                context=tuple(context),
                text=text,
                id=f"{id_prefix}{len(passages):04d}",
            )
            passages.append(passage)
            last_emitted = _Emitted(element=element, text=text)

            if level is not None:
                heading_stack.append(
                    (level, ContextElement(text=text, tag=_context_tag(element.tag)))
                )

        for child in element.children:
            if isinstance(child, Element):
                visit(child)

    visit(root)
    return passages
