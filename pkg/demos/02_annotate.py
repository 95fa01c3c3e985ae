"""Run the two-layer annotation pipeline offline with the rule-based mock.

The same code path works against any OpenAI-compatible endpoint by swapping
the provider (see policyann.providers.HttpChatProvider).
"""

from pathlib import Path

from policyann.annotate import annotate_document, self_correct_document
from policyann.mockllm import RuleBasedMockChat
from policyann.model import document_from_passages, serialize_policy
from policyann.preprocess import isolate_main_content, parse_passages, simplify_html

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def main():
    html = (FIXTURES / "basic.html").read_text("utf-8")
    passages = parse_passages(simplify_html(isolate_main_content(html)), id_prefix="demo:")
    document = document_from_passages("basic", passages)

    llm = RuleBasedMockChat()
    annotated, records = annotate_document(document, llm)
    corrected, _ = self_correct_document(annotated, llm)

    outcomes = {}
    for record in records:
        outcomes[record.outcome] = outcomes.get(record.outcome, 0) + 1
    print("annotation layer outcomes:", outcomes)

    for annotated_passage in corrected.passages:
        if not annotated_passage.annotations:
            continue
        print(f"\n{annotated_passage.passage.text}")
        for annotation in sorted(annotated_passage.annotations, key=lambda a: a.span):
            flag = "+" if annotation.performed else "-"
            print(f"  {flag} {annotation.label.value}: \"{annotation.span}\"")

    print("\nserialized bytes:", len(serialize_policy(corrected)))


if __name__ == "__main__":
    main()
