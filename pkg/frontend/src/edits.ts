/** Click-based edit actions over an annotation set.
 *
 * Every action returns a new array (the input is never mutated) and is
 * validated against the passage text, so any action sequence yields a set
 * the server will accept.
 */

import { AnnotationItem, DISCONTINUITY, annotationKey } from "./types.js";
import { validateAnnotation } from "./validate.js";

export type EditAction =
  | { kind: "add_annotation"; annotation: AnnotationItem }
  | { kind: "delete_annotation"; index: number }
  | { kind: "change_label"; index: number; requirement: string }
  | { kind: "toggle_performed"; index: number }
  | { kind: "adjust_span"; index: number; value: string };

export class EditError extends Error {}

function requireIndex(annotations: AnnotationItem[], index: number): AnnotationItem {
  const a = annotations[index];
  if (a === undefined) throw new EditError(`no annotation at index ${index}`);
  return a;
}

function dedupe(annotations: AnnotationItem[]): AnnotationItem[] {
  const seen = new Set<string>();
  const out: AnnotationItem[] = [];
  for (const a of annotations) {
    const key = annotationKey(a);
    if (!seen.has(key)) {
      seen.add(key);
      out.push(a);
    }
  }
  return out;
}

export function applyAction(
  annotations: AnnotationItem[],
  action: EditAction,
  passageText: string,
): AnnotationItem[] {
  let next: AnnotationItem[];
  switch (action.kind) {
    case "add_annotation":
      next = [...annotations, action.annotation];
      break;
    case "delete_annotation":
      requireIndex(annotations, action.index);
      next = annotations.filter((_, i) => i !== action.index);
      break;
    case "change_label": {
      const target = requireIndex(annotations, action.index);
      next = annotations.map((a, i) =>
        i === action.index ? { ...target, requirement: action.requirement } : a,
      );
      break;
    }
    case "toggle_performed": {
      const target = requireIndex(annotations, action.index);
      next = annotations.map((a, i) =>
        i === action.index ? { ...target, performed: !target.performed } : a,
      );
      break;
    }
    case "adjust_span": {
      const target = requireIndex(annotations, action.index);
      next = annotations.map((a, i) =>
        i === action.index ? { ...target, value: action.value } : a,
      );
      break;
    }
  }
  for (const a of next) {
    if (!validateAnnotation(a, passageText)) {
      throw new EditError(`edit produces an invalid span: "${a.value}"`);
    }
  }
  return dedupe(next);
}

/** Build a span string from one or more selected text fragments.
 *
 * Fragments must appear in the passage in selection order; gaps between
 * consecutive fragments are replaced with the "[...]" placeholder.
 */
export function buildSpan(fragments: string[], passageText: string): string {
  const parts = fragments.map((f) => f.trim()).filter((f) => f !== "");
  if (parts.length === 0) throw new EditError("empty selection");
  let cursor = 0;
  for (const part of parts) {
    const index = passageText.indexOf(part, cursor);
    if (index < 0) throw new EditError(`selection not found in passage: "${part}"`);
    cursor = index + part.length;
  }
  return parts.join(` ${DISCONTINUITY} `);
}
