/** Browser entry point: wires the renderers to the review service API.
 *
 * Everything DOM-specific lives here; the modules it calls are pure so the
 * test suite can exercise them without a browser.
 */

import { ApiClient, ApiError } from "./api.js";
import { EditAction, applyAction, buildSpan } from "./edits.js";
import {
  renderErrorBanner,
  renderJuryView,
  renderTask,
} from "./render.js";
import {
  AnnotationItem,
  DisputePayload,
  LabelInfo,
  ResolveDecision,
  TaskPayload,
} from "./types.js";
import { validateSet } from "./validate.js";

interface AppState {
  client: ApiClient;
  labels: LabelInfo[];
  task: TaskPayload | null;
  /** Working copy the reviewer edits; starts as the machine annotations. */
  annotations: AnnotationItem[];
  dispute: DisputePayload | null;
}

function byId(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
}

function promptLabel(labels: LabelInfo[]): string | null {
  const names = labels.map((l, i) => `${i + 1}. ${l.name}`).join("\n");
  const answer = window.prompt(`Pick a label:\n${names}`);
  if (!answer) return null;
  const index = Number(answer) - 1;
  return labels[index] ? labels[index].name : answer;
}

function readAction(
  kind: string,
  index: number,
  state: AppState,
): EditAction | null {
  switch (kind) {
    case "delete_annotation":
      return { kind, index };
    case "toggle_performed":
      return { kind, index };
    case "change_label": {
      const requirement = promptLabel(state.labels);
      return requirement ? { kind, requirement, index } : null;
    }
    case "adjust_span": {
      const selection = window.getSelection()?.toString() ?? "";
      const value = selection || window.prompt("New span text:") || "";
      if (!value || !state.task) return null;
      return { kind, index, value: buildSpan([value], state.task.item.passage) };
    }
    case "add_annotation": {
      if (!state.task) return null;
      const selection = window.getSelection()?.toString() ?? "";
      const value = selection || window.prompt("Span text:") || "";
      const requirement = value ? promptLabel(state.labels) : null;
      if (!value || !requirement) return null;
      return {
        kind,
        annotation: {
          requirement,
          value: buildSpan([value], state.task.item.passage),
          performed: true,
        },
      };
    }
    default:
      return null;
  }
}

async function showNextTask(state: AppState, root: HTMLElement): Promise<void> {
  state.task = await state.client.nextTask();
  if (!state.task) {
    root.innerHTML = `<p class="done">No open tasks — all passages reviewed.</p>`;
    return;
  }
  state.annotations = state.task.item.annotations.map((a) => ({ ...a }));
  redraw(state, root);
}

function redraw(state: AppState, root: HTMLElement): void {
  if (state.dispute) {
    root.innerHTML = renderJuryView(state.dispute, state.labels);
  } else if (state.task) {
    root.innerHTML = renderTask(state.task, state.annotations, state.labels);
  }
}

async function handleClick(
  event: MouseEvent,
  state: AppState,
  root: HTMLElement,
): Promise<void> {
  const target = event.target as HTMLElement;
  const action = target.dataset.action;
  if (!action) return;

  if (state.dispute) {
    const decision = action as ResolveDecision;
    if (decision === "pick_review_1" || decision === "pick_review_2") {
      await state.client.resolveDispute(state.dispute.task_id, decision);
      state.dispute = null;
      await showNextTask(state, root);
    } else if (decision === "custom") {
      const text = window.prompt("Final annotation set as JSON array:");
      if (!text) return;
      await state.client.resolveDispute(
        state.dispute.task_id,
        "custom",
        JSON.parse(text) as AnnotationItem[],
      );
      state.dispute = null;
      await showNextTask(state, root);
    }
    return;
  }

  if (!state.task) return;
  if (action === "submit") {
    const problems = validateSet(state.annotations, state.task.item.passage);
    if (problems.length > 0) {
      root.insertAdjacentHTML("afterbegin", renderErrorBanner(problems.join("; ")));
      return;
    }
    await state.client.submitReview(state.task.task_id, state.annotations);
    await showNextTask(state, root);
    return;
  }

  const index = Number(target.dataset.index ?? "-1");
  const edit = readAction(action, index, state);
  if (!edit) return;
  try {
    state.annotations = applyAction(state.annotations, edit, state.task.item.passage);
  } catch (error) {
    root.insertAdjacentHTML("afterbegin", renderErrorBanner(String(error)));
    return;
  }
  redraw(state, root);
}

export async function startApp(): Promise<void> {
  const root = byId("app");
  const reviewerId =
    new URLSearchParams(window.location.search).get("reviewer") ||
    window.prompt("Reviewer id:") ||
    "anonymous";
  const state: AppState = {
    client: new ApiClient("", reviewerId),
    labels: [],
    task: null,
    annotations: [],
    dispute: null,
  };
  try {
    state.labels = await state.client.getLabels();
    const disputes = await state.client.getDisputes();
    state.dispute = disputes[0] ?? null;
    if (state.dispute) {
      redraw(state, root);
    } else {
      await showNextTask(state, root);
    }
  } catch (error) {
    const detail = error instanceof ApiError ? error.message : String(error);
    root.innerHTML = renderErrorBanner(`failed to load: ${detail}`);
    return;
  }
  root.addEventListener("click", (event) => {
    void handleClick(event as MouseEvent, state, root).catch((error) => {
      root.insertAdjacentHTML("afterbegin", renderErrorBanner(String(error)));
    });
  });
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  void startApp();
}
