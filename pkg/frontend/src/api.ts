/** Thin client over the review service HTTP API. The bearer token doubles
 * as the reviewer identity. */

import {
  AnnotationItem,
  DisputePayload,
  LabelInfo,
  PolicyProgress,
  ResolveDecision,
  TaskPayload,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: unknown,
  ) {
    super(`HTTP ${status}: ${JSON.stringify(detail)}`);
  }
}

export class ApiClient {
  constructor(
    private baseUrl: string,
    private reviewerId: string,
    private fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request(path: string, init: RequestInit = {}): Promise<Response> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      ...init,
      headers: {
        Authorization: `Bearer ${this.reviewerId}`,
        "Content-Type": "application/json",
        ...(init.headers ?? {}),
      },
    });
    if (!response.ok) {
      let detail: unknown = null;
      try {
        detail = (await response.json()).detail;
      } catch {
        detail = await response.text();
      }
      throw new ApiError(response.status, detail);
    }
    return response;
  }

  async getLabels(): Promise<LabelInfo[]> {
    return (await this.request("/api/labels")).json();
  }

  async getPolicies(): Promise<PolicyProgress[]> {
    return (await this.request("/api/policies")).json();
  }

  /** Next open task for this reviewer, or null when everything is done. */
  async nextTask(): Promise<TaskPayload | null> {
    const response = await this.request("/api/tasks/next");
    if (response.status === 204) return null;
    return response.json();
  }

  async submitReview(
    taskId: string,
    annotations: AnnotationItem[],
  ): Promise<{ task_id: string; state: string }> {
    return (
      await this.request(`/api/tasks/${encodeURIComponent(taskId)}/review`, {
        method: "POST",
        body: JSON.stringify({ annotations }),
      })
    ).json();
  }

  async getDisputes(): Promise<DisputePayload[]> {
    return (await this.request("/api/disputes")).json();
  }

  async resolveDispute(
    taskId: string,
    decision: ResolveDecision,
    annotations?: AnnotationItem[],
  ): Promise<{ task_id: string; state: string; resolution: string }> {
    return (
      await this.request(`/api/disputes/${encodeURIComponent(taskId)}/resolve`, {
        method: "POST",
        body: JSON.stringify({ decision, annotations: annotations ?? null }),
      })
    ).json();
  }

  async exportPolicy(policyId: string): Promise<unknown[]> {
    return (await this.request(`/api/export/${encodeURIComponent(policyId)}`)).json();
  }
}
