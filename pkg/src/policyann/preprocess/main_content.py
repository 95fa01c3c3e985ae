"""Rule-based main-content isolation for policy pages."""

from __future__ import annotations

from ..errors import InvalidDocument
from ..htmldom import Element, parse_html

REMOVE_TAGS = frozenset(
    {"head", "header", "footer", "nav", "aside", "script", "style",
     "noscript", "iframe", "form", "button"}
)

# Case-insensitive substrings of id/class values that mark boilerplate nodes.
REMOVE_ATTR_PATTERNS = (
    "nav", "menu", "footer", "header", "sidebar", "cookie-banner", "breadcrumb",
)

CANDIDATE_TAGS = frozenset({"body", "main", "article", "section", "div", "[document]"})

_SEMANTIC_BONUS = {"main": 3, "article": 2}
_ATTR_BONUS_PATTERNS = ("content", "policy", "privacy")


def _is_boilerplate(element: Element) -> bool:
    if element.tag in REMOVE_TAGS:
        return True
    haystack = element.classes_and_id()
    return bool(haystack) and any(p in haystack for p in REMOVE_ATTR_PATTERNS)


def strip_boilerplate(root: Element) -> None:
    for element in list(root.iter_elements()):
        if element is root:
            continue
        if element.parent is not None and _is_boilerplate(element):
            element.parent.remove(element)


def _score(element: Element) -> int:
    score = _SEMANTIC_BONUS.get(element.tag, 0)
    haystack = element.classes_and_id()
    if any(p in haystack for p in _ATTR_BONUS_PATTERNS):
        score += 2
    return score


def isolate_main_content(html: bytes | str, min_words: int = 50) -> Element:
    """Strip boilerplate and return the highest-scoring content container.

    Candidates are scored by semantic tag and attribute-pattern bonuses; ties
    go to the candidate with the longest visible text. Raises InvalidDocument
    when the winner has fewer than `min_words` visible words.
    """
    root = parse_html(html)
    strip_boilerplate(root)

    candidates = [el for el in root.iter_elements() if el.tag in CANDIDATE_TAGS]
    if not candidates:
        candidates = [root]

    best = max(candidates, key=lambda el: (_score(el), len(el.text_content())))
    word_count = len(best.text_content().split())
    if word_count < min_words:
        raise InvalidDocument(
            f"no content container with at least {min_words} visible words "
            f"(best candidate <{best.tag}> has {word_count})"
        )
    return best
