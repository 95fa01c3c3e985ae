/** HTML renderers for the review and jury screens.
 *
 * These return markup strings so they are testable without a browser; the
 * controller in main.ts attaches them to the document and wires events.
 */

import { Run, segmentPassage } from "./highlight.js";
import {
  AnnotationItem,
  DisputePayload,
  LabelInfo,
  PassageItem,
  TaskPayload,
} from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function isPassageItem(item: unknown): item is PassageItem {
  if (typeof item !== "object" || item === null) return false;
  const candidate = item as PassageItem;
  return (
    typeof candidate.passage === "string" &&
    Array.isArray(candidate.context) &&
    Array.isArray(candidate.annotations)
  );
}

export function renderErrorBanner(message: string): string {
  return `<div class="error-banner" role="alert">${escapeHtml(message)}</div>`;
}

export function renderContext(item: PassageItem): string {
  if (item.context.length === 0) return "";
  const entries = item.context
    .map(
      (c) =>
        `<span class="context-item context-${escapeHtml(c.type)}">${escapeHtml(c.text)}</span>`,
    )
    .join(" › ");
  return `<div class="context">${entries}</div>`;
}

export function renderRuns(runs: Run[]): string {
  return runs
    .map((run) => {
      if (run.badges.length === 0) return escapeHtml(run.text);
      const badges = run.badges
        .map(
          (b) =>
            `<span class="badge${b.performed ? "" : " negated"}" ` +
            `data-annotation="${b.annotationIndex}" ` +
            `style="background:${escapeHtml(b.color)}">${escapeHtml(b.label)}</span>`,
        )
        .join("");
      const colors = run.badges.map((b) => b.color).join(",");
      return (
        `<mark class="run" data-badges="${run.badges.length}" ` +
        `style="--colors:${escapeHtml(colors)}">${escapeHtml(run.text)}` +
        `<span class="badges">${badges}</span></mark>`
      );
    })
    .join("");
}

export function renderLegend(labels: LabelInfo[]): string {
  const entries = labels
    .map(
      (l) =>
        `<li><span class="swatch" style="background:${escapeHtml(l.color)}"></span>` +
        `${escapeHtml(l.name)} <small>${escapeHtml(l.gdpr_references)}</small></li>`,
    )
    .join("");
  return `<ul class="legend">${entries}</ul>`;
}

export function renderAnnotationControls(annotations: AnnotationItem[]): string {
  if (annotations.length === 0) {
    return `<p class="empty">No annotations yet.</p>
<button data-action="add_annotation">Add annotation</button>`;
  }
  const rows = annotations
    .map(
      (a, i) => `<tr data-index="${i}">
  <td>${escapeHtml(a.requirement)}</td>
  <td><code>${escapeHtml(a.value)}</code></td>
  <td>${a.performed ? "performed" : "not performed"}</td>
  <td>
    <button data-action="change_label" data-index="${i}">label</button>
    <button data-action="toggle_performed" data-index="${i}">±</button>
    <button data-action="adjust_span" data-index="${i}">span</button>
    <button data-action="delete_annotation" data-index="${i}">delete</button>
  </td>
</tr>`,
    )
    .join("\n");
  return `<table class="annotations"><tbody>${rows}</tbody></table>
<button data-action="add_annotation">Add annotation</button>`;
}

export function renderTask(
  task: TaskPayload,
  annotations: AnnotationItem[],
  labels: LabelInfo[],
): string {
  if (!isPassageItem(task.item)) {
    return renderErrorBanner("task payload does not match the expected schema");
  }
  const runs = segmentPassage(task.item.passage, annotations, labels);
  return `<section class="task" data-task="${escapeHtml(task.task_id)}">
${renderContext(task.item)}
<p class="passage">${renderRuns(runs)}</p>
${renderAnnotationControls(annotations)}
<button data-action="submit">Submit review</button>
${renderLegend(labels)}
</section>`;
}

function renderReviewPane(
  title: string,
  passage: string,
  annotations: AnnotationItem[],
  conflicting: Set<string>,
  labels: LabelInfo[],
): string {
  const runs = segmentPassage(passage, annotations, labels);
  const list = annotations
    .map((a) => {
      const key = JSON.stringify([a.requirement, a.value, a.performed]);
      const cls = conflicting.has(key) ? "conflict" : "shared";
      return `<li class="${cls}">${escapeHtml(a.requirement)}: <code>${escapeHtml(a.value)}</code></li>`;
    })
    .join("");
  return `<div class="pane">
<h3>${escapeHtml(title)}</h3>
<p class="passage">${renderRuns(runs)}</p>
<ul>${list}</ul>
</div>`;
}

export function renderJuryView(dispute: DisputePayload, labels: LabelInfo[]): string {
  if (!isPassageItem(dispute.item) || !dispute.diff || dispute.reviews.length !== 2) {
    return renderErrorBanner("dispute payload does not match the expected schema");
  }
  const key = (a: AnnotationItem) => JSON.stringify([a.requirement, a.value, a.performed]);
  const conflicting = new Set([
    ...dispute.diff.only_in_1.map(key),
    ...dispute.diff.only_in_2.map(key),
  ]);
  return `<section class="jury" data-task="${escapeHtml(dispute.task_id)}">
${renderContext(dispute.item)}
<div class="side-by-side">
${renderReviewPane(`Review 1 (${dispute.reviews[0].reviewer_id})`, dispute.item.passage, dispute.reviews[0].annotations, conflicting, labels)}
${renderReviewPane(`Review 2 (${dispute.reviews[1].reviewer_id})`, dispute.item.passage, dispute.reviews[1].annotations, conflicting, labels)}
</div>
<button data-action="pick_review_1">Accept review 1</button>
<button data-action="pick_review_2">Accept review 2</button>
<button data-action="custom">Edit and submit custom set</button>
</section>`;
}
