"""Walk one HTML policy from raw markup to structured passages.

Shows main-content isolation, structural simplification and passage parsing
with heading/list/table context.
"""

from pathlib import Path

from policyann.preprocess import isolate_main_content, parse_passages, simplify_html

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def main():
    html = (FIXTURES / "lists.html").read_text("utf-8")

    main_content = isolate_main_content(html)
    print("isolated main content tag:", main_content.tag)
    print("visible words:", len(main_content.text_content().split()))

    simplified = simplify_html(main_content)
    tags = sorted({e.tag for e in simplified.iter_elements()})
    print("tags after simplification:", ", ".join(tags))

    passages = parse_passages(simplified, id_prefix="demo:")
    print(f"\n{len(passages)} passages:")
    for passage in passages:
        chain = " > ".join(c.text for c in passage.context)
        prefix = f"[{passage.element_type.value}]"
        print(f"  {prefix:<14} {chain + ' | ' if chain else ''}{passage.text[:60]}")


if __name__ == "__main__":
    main()
