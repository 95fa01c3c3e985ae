/** Client-side annotation validation, mirroring the server's rules exactly:
 * exact substring matching of "[...]"-separated segments, in order, taking
 * the leftmost occurrence after the previous segment's end. */

import { AnnotationItem, DISCONTINUITY } from "./types.js";

export interface CharRange {
  start: number;
  end: number;
}

export function spanSegments(span: string): string[] {
  return span.split(DISCONTINUITY).map((part) => part.trim());
}

/** Locate each segment of the span in the passage text.
 * Returns the covered character ranges, or null when any segment is
 * missing, empty, or out of order. */
export function locateSpan(span: string, passageText: string): CharRange[] | null {
  if (span.trim() === "") return null;
  const ranges: CharRange[] = [];
  let cursor = 0;
  for (const segment of spanSegments(span)) {
    if (segment === "") return null;
    const index = passageText.indexOf(segment, cursor);
    if (index < 0) return null;
    cursor = index + segment.length;
    ranges.push({ start: index, end: cursor });
  }
  return ranges;
}

export function validateAnnotation(a: AnnotationItem, passageText: string): boolean {
  return locateSpan(a.value, passageText) !== null;
}

export function validateSet(annotations: AnnotationItem[], passageText: string): string[] {
  const problems: string[] = [];
  for (const a of annotations) {
    if (!validateAnnotation(a, passageText)) {
      problems.push(`span not found in passage: "${a.value}"`);
    }
  }
  return problems;
}
