"""Score predicted annotations against ground truth at both evaluation
levels: per-label presence and span-level hybrid similarity."""

from policyann.evaluate import EvalConfig, label_metrics, report_text, span_metrics
from policyann.model import AnnotatedPassage, Annotation, ElementType, Passage, TransparencyRequirement
from policyann.providers import HashEmbedder


def passage(text, *annotations, pid="p1"):
    return AnnotatedPassage(
        passage=Passage(element_type=ElementType.TEXT, context=(), text=text, id=pid),
        annotations=frozenset(annotations),
    )


def ann(span, label, performed=True):
    return Annotation(span=span, label=TransparencyRequirement(label), performed=performed)


def main():
    text = "We collect your name and e-mail address to create your account."
    ground_truth = passage(
        text,
        ann("your name", "Data Categories"),
        ann("your [...] e-mail address", "Data Categories"),
        ann("to create your account", "Processing Purpose"),
    )
    predicted = passage(
        text,
        ann("your name", "Data Categories"),
        ann("e-mail address", "Data Categories"),  # near miss, high overlap
        ann("your account", "Data Categories"),    # wrong label for this phrase
    )

    config = EvalConfig(tau=0.5, embedder=HashEmbedder())
    print(report_text(span_metrics([(predicted.annotations, ground_truth.annotations)], config)))
    print()
    print(report_text(label_metrics([(predicted, ground_truth)])))


if __name__ == "__main__":
    main()
