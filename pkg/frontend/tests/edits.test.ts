import { describe, expect, it } from "vitest";

import { EditError, applyAction, buildSpan } from "../src/edits.js";
import { AnnotationItem } from "../src/types.js";

const PASSAGE = "You may contact our data protection officer at dpo@example.test at any time.";

const BASE: AnnotationItem[] = [
  { requirement: "DPO Contact", value: "dpo@example.test", performed: true },
];

describe("applyAction", () => {
  it("adds a valid annotation without mutating the input", () => {
    const next = applyAction(
      BASE,
      {
        kind: "add_annotation",
        annotation: { requirement: "Right to Lodge Complaint", value: "at any time", performed: true },
      },
      PASSAGE,
    );
    expect(next).toHaveLength(2);
    expect(BASE).toHaveLength(1);
  });

  it("rejects an addition whose span is not in the passage", () => {
    expect(() =>
      applyAction(
        BASE,
        {
          kind: "add_annotation",
          annotation: { requirement: "DPO Contact", value: "missing text", performed: true },
        },
        PASSAGE,
      ),
    ).toThrow(EditError);
  });

  it("deletes by index and rejects bad indices", () => {
    expect(applyAction(BASE, { kind: "delete_annotation", index: 0 }, PASSAGE)).toEqual([]);
    expect(() => applyAction(BASE, { kind: "delete_annotation", index: 3 }, PASSAGE)).toThrow(
      EditError,
    );
  });

  it("changes the label in place", () => {
    const next = applyAction(
      BASE,
      { kind: "change_label", index: 0, requirement: "Controller Contact" },
      PASSAGE,
    );
    expect(next[0].requirement).toBe("Controller Contact");
    expect(next[0].value).toBe(BASE[0].value);
  });

  it("toggles the performed flag back and forth", () => {
    const once = applyAction(BASE, { kind: "toggle_performed", index: 0 }, PASSAGE);
    expect(once[0].performed).toBe(false);
    const twice = applyAction(once, { kind: "toggle_performed", index: 0 }, PASSAGE);
    expect(twice[0].performed).toBe(true);
  });

  it("adjusts a span only when the new value validates", () => {
    const next = applyAction(
      BASE,
      { kind: "adjust_span", index: 0, value: "data protection officer" },
      PASSAGE,
    );
    expect(next[0].value).toBe("data protection officer");
    expect(() =>
      applyAction(BASE, { kind: "adjust_span", index: 0, value: "nowhere" }, PASSAGE),
    ).toThrow(EditError);
  });

  it("drops exact duplicates after an edit", () => {
    const doubled = [...BASE, { ...BASE[0], requirement: "Controller Contact" }];
    const next = applyAction(
      doubled,
      { kind: "change_label", index: 1, requirement: "DPO Contact" },
      PASSAGE,
    );
    expect(next).toHaveLength(1);
  });
});

describe("buildSpan", () => {
  it("joins in-order fragments with the discontinuity placeholder", () => {
    expect(buildSpan(["You may contact", "at any time"], PASSAGE)).toBe(
      "You may contact [...] at any time",
    );
  });

  it("trims fragments and drops empty ones", () => {
    expect(buildSpan(["  dpo@example.test  ", "   "], PASSAGE)).toBe("dpo@example.test");
  });

  it("rejects fragments that are missing or out of order", () => {
    expect(() => buildSpan(["at any time", "You may contact"], PASSAGE)).toThrow(EditError);
    expect(() => buildSpan([], PASSAGE)).toThrow(EditError);
  });
});
