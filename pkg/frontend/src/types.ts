/** Wire types shared with the review service HTTP API. */

export interface AnnotationItem {
  requirement: string;
  value: string;
  performed: boolean;
}

export interface ContextItem {
  text: string;
  type: string;
}

export interface PassageItem {
  type: string;
  context: ContextItem[];
  passage: string;
  annotations: AnnotationItem[];
}

export interface LabelInfo {
  name: string;
  gdpr_references: string;
  color: string;
}

export interface TaskPayload {
  task_id: string;
  policy_id: string;
  state: string;
  item: PassageItem;
}

export interface ReviewSummary {
  reviewer_id: string;
  annotations: AnnotationItem[];
}

export interface DiffPayload {
  only_in_1: AnnotationItem[];
  only_in_2: AnnotationItem[];
  common: AnnotationItem[];
}

export interface DisputePayload extends TaskPayload {
  reviews: ReviewSummary[];
  diff: DiffPayload;
}

export interface PolicyProgress {
  policy_id: string;
  source_url: string | null;
  passages: number;
  finalized: number;
  disputed: number;
}

export type ResolveDecision = "pick_review_1" | "pick_review_2" | "custom";

/** The placeholder that marks skipped clauses inside a discontinuous span. */
export const DISCONTINUITY = "[...]";

export function annotationKey(a: AnnotationItem): string {
  return JSON.stringify([a.requirement, a.value, a.performed]);
}

export function sameAnnotationSet(a: AnnotationItem[], b: AnnotationItem[]): boolean {
  const left = new Set(a.map(annotationKey));
  const right = new Set(b.map(annotationKey));
  if (left.size !== right.size) return false;
  for (const key of left) if (!right.has(key)) return false;
  return true;
}
