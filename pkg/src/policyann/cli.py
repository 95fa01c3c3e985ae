"""Command-line workflow orchestration.

Each subcommand reads and writes the documented artifact formats, appends a
run-manifest entry, and holds a per-workspace lock so concurrent runs over
one output directory serialize. Exit status: 0 success, 1 hard error,
2 configuration error.
"""

from __future__ import annotations

import dataclasses
import functools
import hashlib
import json
import sys
import time
import uuid
from pathlib import Path
from typing import Optional

import click
from filelock import FileLock, Timeout

from . import evaluate as ev
from .annotate import annotate_document, self_correct_document
from .config import ToolkitConfig, load_config
from .errors import ConfigError, InvalidDocument, PolicyAnnError
from .model import document_from_passages, parse_policy, serialize_policy
from .preprocess import (
    RawDocument,
    apply_filters,
    dedup_corpus,
    detect_privacy_policy,
    isolate_main_content,
    parse_passages,
    simplify_html,
)
from .review.service import ReviewService
from .sampler import build_cluster_report


def _handle_errors(func):
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except ConfigError as exc:
            click.echo(f"config error: {exc}", err=True)
            sys.exit(2)
        except (PolicyAnnError, OSError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)
        except Timeout:
            click.echo("error: workspace is locked by another run", err=True)
            sys.exit(1)

    return wrapper


def _workspace_lock(output_dir: Path) -> FileLock:
    output_dir.mkdir(parents=True, exist_ok=True)
    return FileLock(output_dir / ".policyann.lock", timeout=30)


def _config_digest(config: ToolkitConfig) -> str:
    blob = json.dumps(dataclasses.asdict(config), sort_keys=True, default=str)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


def _record_stage(
    output_dir: Path, stage: str, config: ToolkitConfig, counts: dict, started: float
) -> None:
    entry = {
        "run_id": uuid.uuid4().hex,
        "stage": stage,
        "config_digest": _config_digest(config),
        "counts": counts,
        "duration_s": round(time.monotonic() - started, 3),
    }
    with (output_dir / "manifest.jsonl").open("a", encoding="utf-8") as handle:
        handle.write(json.dumps(entry, ensure_ascii=False) + "\n")


def _html_files(input_dir: Path) -> list[Path]:
    files = sorted(p for p in input_dir.iterdir() if p.suffix in (".html", ".htm"))
    if not files:
        raise click.ClickException(f"no HTML files in {input_dir}")
    return files


def _json_files(input_dir: Path) -> list[Path]:
    files = sorted(
        p for p in input_dir.iterdir()
        if p.suffix == ".json" and p.name not in ("ingest.json", "sample.json", "detect.json")
    )
    if not files:
        raise click.ClickException(f"no passage documents in {input_dir}")
    return files


def _main_text(html: str) -> str:
    return isolate_main_content(html).text_content()


@click.group()
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="YAML configuration file.")
@click.pass_context
def main(ctx, config_path):
    """Privacy-policy annotation toolkit."""
    ctx.ensure_object(dict)
    try:
        ctx.obj["config"] = load_config(config_path)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)


@main.command()
@click.option("--input", "input_dir", type=click.Path(exists=True), required=True)
@click.option("--output", "output_dir", type=click.Path(), required=True)
@click.pass_context
@_handle_errors
def ingest(ctx, input_dir, output_dir):
    """Deduplicate a directory of raw HTML files (URL, bytes, main text)."""
    config: ToolkitConfig = ctx.obj["config"]
    input_dir, output_dir = Path(input_dir), Path(output_dir)
    started = time.monotonic()
    with _workspace_lock(output_dir):
        docs = []
        for path in _html_files(input_dir):
            sidecar = path.with_suffix(".url")
            url = sidecar.read_text("utf-8").strip() if sidecar.exists() else path.name
            docs.append(RawDocument(doc_id=path.stem, bytes=path.read_bytes(), url=url))

        def main_text(doc: RawDocument) -> str:
            return _main_text(doc.bytes.decode("utf-8", errors="replace"))

        kept, rejections = dedup_corpus(docs, main_text_fn=main_text)
        report = {
            "kept": [{"doc_id": d.doc_id, "url": d.url} for d in kept],
            "rejections": [
                {"doc_id": r.doc_id, "stage": r.stage, "detail": r.detail}
                for r in rejections
            ],
        }
        (output_dir / "ingest.json").write_text(
            json.dumps(report, indent=2, ensure_ascii=False) + "\n", "utf-8"
        )
        _record_stage(output_dir, "ingest", config,
                      {"in": len(docs), "kept": len(kept), "rejected": len(rejections)},
                      started)
    click.echo(f"kept {len(kept)} of {len(docs)} documents")


@main.command()
@click.option("--input", "input_dir", type=click.Path(exists=True), required=True)
@click.option("--output", "output_dir", type=click.Path(), required=True)
@click.pass_context
@_handle_errors
def preprocess(ctx, input_dir, output_dir):
    """HTML to passage documents: main content, filters, simplification,
    passage parsing."""
    config: ToolkitConfig = ctx.obj["config"]
    input_dir, output_dir = Path(input_dir), Path(output_dir)
    started = time.monotonic()
    emitted, rejections = 0, []
    with _workspace_lock(output_dir):
        for path in _html_files(input_dir):
            html = path.read_text("utf-8", errors="replace")
            try:
                main = isolate_main_content(html, min_words=config.filters.min_words)
            except InvalidDocument as exc:
                rejections.append(
                    {"doc_id": path.stem, "stage": "main_content", "detail": str(exc)}
                )
                continue
            rejection = apply_filters(main.text_content(), config.filters, doc_id=path.stem)
            if rejection is not None:
                rejections.append(
                    {"doc_id": rejection.doc_id, "stage": rejection.stage,
                     "detail": rejection.detail}
                )
                continue
            simplified = simplify_html(main)
            passages = parse_passages(simplified, id_prefix=f"{path.stem}:")
            document = document_from_passages(path.stem, passages, source_url=path.name)
            (output_dir / f"{path.stem}.json").write_bytes(serialize_policy(document))
            emitted += 1
        with (output_dir / "rejections.jsonl").open("a", encoding="utf-8") as handle:
            for record in rejections:
                handle.write(json.dumps(record, ensure_ascii=False) + "\n")
        _record_stage(output_dir, "preprocess", config,
                      {"emitted": emitted, "rejected": len(rejections)}, started)
    click.echo(f"emitted {emitted} passage documents, rejected {len(rejections)}")


@main.command()
@click.option("--input", "input_dir", type=click.Path(exists=True), required=True)
@click.option("--output", "output_dir", type=click.Path(), required=True)
@click.option("--mock", is_flag=True, help="Force the offline mock provider.")
@click.pass_context
@_handle_errors
def detect(ctx, input_dir, output_dir, mock):
    """Classify each document's main text as privacy policy or not."""
    config: ToolkitConfig = ctx.obj["config"]
    if mock:
        config = dataclasses.replace(config, provider=dataclasses.replace(config.provider, kind="mock"))
    llm = config.make_chat_provider()
    input_dir, output_dir = Path(input_dir), Path(output_dir)
    started = time.monotonic()
    with _workspace_lock(output_dir):
        verdicts = {}
        for path in _html_files(input_dir):
            html = path.read_text("utf-8", errors="replace")
            try:
                text = _main_text(html)
            except InvalidDocument:
                verdicts[path.stem] = "unknown"
                continue
            verdicts[path.stem] = detect_privacy_policy(text, llm)
        (output_dir / "detect.json").write_text(
            json.dumps(verdicts, indent=2, sort_keys=True) + "\n", "utf-8"
        )
        _record_stage(output_dir, "detect", config,
                      {"documents": len(verdicts),
                       "true": sum(1 for v in verdicts.values() if v == "true")},
                      started)
    click.echo(f"classified {len(verdicts)} documents")


def _run_annotation_layer(ctx, input_dir, output_dir, mock, layer_fn, stage):
    config: ToolkitConfig = ctx.obj["config"]
    if mock:
        config = dataclasses.replace(config, provider=dataclasses.replace(config.provider, kind="mock"))
    llm = config.make_chat_provider()
    input_dir, output_dir = Path(input_dir), Path(output_dir)
    started = time.monotonic()
    outcomes = {"ok": 0, "repaired": 0, "failed": 0}
    with _workspace_lock(output_dir):
        with (output_dir / "runs.jsonl").open("a", encoding="utf-8") as runs:
            for path in _json_files(input_dir):
                document = parse_policy(path.read_bytes(), policy_id=path.stem)
                annotated, records = layer_fn(document, llm)
                (output_dir / path.name).write_bytes(serialize_policy(annotated))
                for record in records:
                    outcomes[record.outcome] += 1
                    runs.write(json.dumps(record.to_dict(), ensure_ascii=False) + "\n")
        _record_stage(output_dir, stage, config, outcomes, started)
    click.echo(
        f"{stage}: {outcomes['ok']} ok, {outcomes['repaired']} repaired, "
        f"{outcomes['failed']} failed"
    )


@main.command()
@click.option("--input", "input_dir", type=click.Path(exists=True), required=True)
@click.option("--output", "output_dir", type=click.Path(), required=True)
@click.option("--mock", is_flag=True, help="Force the offline mock provider.")
@click.pass_context
@_handle_errors
def annotate(ctx, input_dir, output_dir, mock):
    """First-layer annotation of passage documents."""
    _run_annotation_layer(ctx, input_dir, output_dir, mock, annotate_document, "annotate")


@main.command()
@click.option("--input", "input_dir", type=click.Path(exists=True), required=True)
@click.option("--output", "output_dir", type=click.Path(), required=True)
@click.option("--mock", is_flag=True, help="Force the offline mock provider.")
@click.pass_context
@_handle_errors
def correct(ctx, input_dir, output_dir, mock):
    """Second-layer self-correction of annotated documents."""
    _run_annotation_layer(ctx, input_dir, output_dir, mock, self_correct_document, "correct")


@main.command()
@click.option("--input", "input_dir", type=click.Path(exists=True), required=True)
@click.option("--output", "output_dir", type=click.Path(), required=True)
@click.option("--k", default=None, help="Cluster count; omit for elbow selection.")
@click.option("--sample-size", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.pass_context
@_handle_errors
def sample(ctx, input_dir, output_dir, k, sample_size, seed):
    """Cluster documents on embeddings and draw a diversity-weighted sample."""
    config: ToolkitConfig = ctx.obj["config"]
    sampler = config.sampler
    if k is not None:
        sampler = dataclasses.replace(sampler, k=k if k == "auto" else int(k))
    if sample_size is not None:
        sampler = dataclasses.replace(sampler, sample_size=sample_size)
    if seed is not None:
        sampler = dataclasses.replace(sampler, seed=seed)
    embedder = config.make_embedder()

    input_dir, output_dir = Path(input_dir), Path(output_dir)
    started = time.monotonic()
    with _workspace_lock(output_dir):
        ids, vectors, word_counts = [], [], []
        for path in _json_files(input_dir):
            document = parse_policy(path.read_bytes(), policy_id=path.stem)
            text = "\n".join(p.passage.text for p in document.passages)
            ids.append(path.stem)
            vectors.append(embedder.embed(text))
            word_counts.append(len(text.split()))
        stats, selected, elbow = build_cluster_report(
            vectors, ids, word_counts, sampler
        )
        report = {
            "k": len(stats),
            "elbow_found": elbow.elbow_found if elbow else None,
            "clusters": [dataclasses.asdict(s) for s in stats],
            "sample": selected,
        }
        (output_dir / "sample.json").write_text(
            json.dumps(report, indent=2) + "\n", "utf-8"
        )
        _record_stage(output_dir, "sample", config,
                      {"documents": len(ids), "sampled": len(selected)}, started)
    click.echo(f"sampled {len(selected)} of {len(ids)} documents into {len(stats)} clusters")


@main.command()
@click.option("--pred", "pred_path", type=click.Path(exists=True), required=True,
              help="Predicted document (file) or directory of documents.")
@click.option("--gt", "gt_path", type=click.Path(exists=True), required=True,
              help="Ground-truth document or directory, matched by file name.")
@click.option("--tau", type=float, default=None)
@click.option("--output", "output_path", type=click.Path(), default=None,
              help="Write the full JSON report here.")
@click.pass_context
@_handle_errors
def evaluate(ctx, pred_path, gt_path, tau, output_path):
    """Span- and label-level metrics of predictions against ground truth."""
    config: ToolkitConfig = ctx.obj["config"]
    eval_config = ev.EvalConfig(
        tau=tau if tau is not None else config.tau,
        embedder=config.make_embedder(),
    )
    pred_path, gt_path = Path(pred_path), Path(gt_path)
    pred_files = _json_files(pred_path) if pred_path.is_dir() else [pred_path]
    pairs = []
    for pred_file in pred_files:
        gt_file = gt_path / pred_file.name if gt_path.is_dir() else gt_path
        if not gt_file.exists():
            raise click.ClickException(f"no ground truth for {pred_file.name}")
        predicted = parse_policy(pred_file.read_bytes(), policy_id=pred_file.stem)
        truth = parse_policy(gt_file.read_bytes(), policy_id=gt_file.stem)
        if len(predicted.passages) != len(truth.passages):
            raise click.ClickException(
                f"{pred_file.name}: passage count differs from ground truth"
            )
        pairs.extend(zip(predicted.passages, truth.passages))

    span_report = ev.span_metrics(
        [(p.annotations, g.annotations) for p, g in pairs], eval_config
    )
    label_report = ev.label_metrics(pairs)
    click.echo(ev.report_text(span_report))
    click.echo(ev.report_text(label_report))
    if output_path:
        Path(output_path).write_text(
            json.dumps({"span": span_report.to_dict(), "label": label_report.to_dict()},
                       indent=2) + "\n",
            "utf-8",
        )


@main.command()
@click.option("--input", "input_dir", type=click.Path(exists=True), required=True,
              help="Directory of annotated passage documents to review.")
@click.option("--log", "log_path", type=click.Path(), default=None,
              help="Event log location (defaults to the configured path).")
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
@click.pass_context
@_handle_errors
def serve(ctx, input_dir, log_path, host, port):
    """Run the dual-review HTTP service over a directory of documents."""
    import uvicorn

    from .review.app import create_app

    config: ToolkitConfig = ctx.obj["config"]
    log = Path(log_path or config.review.log)
    service = ReviewService(log_path=log)
    for path in _json_files(Path(input_dir)):
        if path.stem not in service.policies:
            document = parse_policy(path.read_bytes(), policy_id=path.stem)
            service.register_policy(document)
    ui_dir = Path(config.review.ui_dir) if config.review.ui_dir else None
    app = create_app(service, ui_dir=ui_dir)
    uvicorn.run(app, host=host or config.review.host, port=port or config.review.port)


@main.command()
@click.option("--log", "log_path", type=click.Path(exists=True), required=True)
@click.option("--policy-id", required=True)
@click.option("--output", "output_path", type=click.Path(), required=True)
@click.pass_context
@_handle_errors
def export(ctx, log_path, policy_id, output_path):
    """Export a fully reviewed policy's ground truth from the event log."""
    service = ReviewService(log_path=Path(log_path))
    if policy_id not in service.policies:
        raise click.ClickException(f"no policy {policy_id!r} in the event log")
    Path(output_path).write_bytes(service.export_ground_truth_bytes(policy_id))
    click.echo(f"wrote ground truth for {policy_id} to {output_path}")


if __name__ == "__main__":
    main()
