import { describe, expect, it } from "vitest";

import { ApiClient, ApiError, FetchLike } from "../src/api.js";
import { AnnotationItem, TaskPayload, sameAnnotationSet } from "../src/types.js";

interface Recorded {
  url: string;
  init: RequestInit | undefined;
}

function mockFetch(
  routes: Record<string, { status: number; body?: unknown }>,
  log: Recorded[] = [],
): FetchLike {
  return async (url, init) => {
    log.push({ url, init });
    const key = `${init?.method ?? "GET"} ${url}`;
    const route = routes[key];
    if (!route) throw new Error(`unexpected request: ${key}`);
    return new Response(route.body === undefined ? null : JSON.stringify(route.body), {
      status: route.status,
      headers: { "Content-Type": "application/json" },
    });
  };
}

const TASK: TaskPayload = {
  task_id: "p:0",
  policy_id: "p",
  state: "pending",
  item: {
    type: "paragraph",
    context: [],
    passage: "We use cookies to remember your settings.",
    annotations: [
      { requirement: "Processing Purpose", value: "to remember your settings", performed: true },
      { requirement: "Data Categories", value: "cookies", performed: true },
    ],
  },
};

describe("ApiClient", () => {
  it("sends the reviewer id as a bearer token on every request", async () => {
    const log: Recorded[] = [];
    const client = new ApiClient(
      "http://svc",
      "alice",
      mockFetch({ "GET http://svc/api/labels": { status: 200, body: [] } }, log),
    );
    await client.getLabels();
    const headers = log[0].init?.headers as Record<string, string>;
    expect(headers.Authorization).toBe("Bearer alice");
  });

  it("returns null from nextTask on 204", async () => {
    const client = new ApiClient(
      "http://svc",
      "alice",
      mockFetch({ "GET http://svc/api/tasks/next": { status: 204 } }),
    );
    expect(await client.nextTask()).toBeNull();
  });

  it("throws ApiError with the response detail on failure", async () => {
    const client = new ApiClient(
      "http://svc",
      "alice",
      mockFetch({
        "GET http://svc/api/export/p": {
          status: 409,
          body: { detail: { policy_id: "p", pending: ["p:1"] } },
        },
      }),
    );
    await expect(client.exportPolicy("p")).rejects.toSatisfy((error: unknown) => {
      expect(error).toBeInstanceOf(ApiError);
      expect((error as ApiError).status).toBe(409);
      expect((error as ApiError).detail).toEqual({ policy_id: "p", pending: ["p:1"] });
      return true;
    });
  });

  it("submitting unchanged annotations posts a body set-equal to the received set", async () => {
    const log: Recorded[] = [];
    const client = new ApiClient(
      "http://svc",
      "alice",
      mockFetch(
        {
          "GET http://svc/api/tasks/next": { status: 200, body: TASK },
          "POST http://svc/api/tasks/p%3A0/review": {
            status: 200,
            body: { task_id: "p:0", state: "one_review" },
          },
        },
        log,
      ),
    );
    const task = await client.nextTask();
    expect(task).not.toBeNull();
    // The reviewer accepts the machine annotations without edits.
    await client.submitReview(task!.task_id, task!.item.annotations);
    const posted = JSON.parse(log[1].init!.body as string) as {
      annotations: AnnotationItem[];
    };
    expect(sameAnnotationSet(posted.annotations, TASK.item.annotations)).toBe(true);
  });
});
