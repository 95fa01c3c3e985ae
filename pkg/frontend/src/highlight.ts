/** Segment a passage into highlight runs.
 *
 * A run is a maximal stretch of text covered by the same set of
 * annotations. Concatenating the runs always reproduces the passage text
 * verbatim; overlaps stack badges instead of altering the text.
 */

import { AnnotationItem, LabelInfo } from "./types.js";
import { locateSpan } from "./validate.js";

export interface Badge {
  label: string;
  color: string;
  performed: boolean;
  /** Index into the annotation list this badge belongs to. */
  annotationIndex: number;
}

export interface Run {
  text: string;
  badges: Badge[];
}

export function colorFor(label: string, labels: LabelInfo[]): string {
  const info = labels.find((l) => l.name === label);
  return info ? info.color : "#cccccc";
}

export function segmentPassage(
  passageText: string,
  annotations: AnnotationItem[],
  labels: LabelInfo[],
): Run[] {
  interface Coverage {
    start: number;
    end: number;
    badge: Badge;
  }
  const coverages: Coverage[] = [];
  annotations.forEach((a, index) => {
    const ranges = locateSpan(a.value, passageText);
    if (!ranges) return; // invalid spans simply do not highlight
    const badge: Badge = {
      label: a.requirement,
      color: colorFor(a.requirement, labels),
      performed: a.performed,
      annotationIndex: index,
    };
    for (const range of ranges) coverages.push({ ...range, badge });
  });

  const cuts = new Set<number>([0, passageText.length]);
  for (const c of coverages) {
    cuts.add(c.start);
    cuts.add(c.end);
  }
  const boundaries = Array.from(cuts).sort((x, y) => x - y);

  const runs: Run[] = [];
  for (let i = 0; i + 1 < boundaries.length; i++) {
    const start = boundaries[i];
    const end = boundaries[i + 1];
    if (start === end) continue;
    const badges = coverages
      .filter((c) => c.start <= start && end <= c.end)
      .map((c) => c.badge);
    runs.push({ text: passageText.slice(start, end), badges });
  }
  return runs;
}

export function concatRuns(runs: Run[]): string {
  return runs.map((r) => r.text).join("");
}
