import { describe, expect, it } from "vitest";

import { locateSpan, validateAnnotation, validateSet } from "../src/validate.js";

const PASSAGE = "We store data for 6 months and then delete it, unless the law says otherwise.";

describe("locateSpan", () => {
  it("finds a contiguous span", () => {
    expect(locateSpan("for 6 months", PASSAGE)).toEqual([{ start: 14, end: 26 }]);
  });

  it("finds discontinuous segments in order", () => {
    const ranges = locateSpan("We store data [...] delete it", PASSAGE);
    expect(ranges).toHaveLength(2);
    expect(PASSAGE.slice(ranges![0].start, ranges![0].end)).toBe("We store data");
    expect(PASSAGE.slice(ranges![1].start, ranges![1].end)).toBe("delete it");
  });

  it("rejects out-of-order segments", () => {
    expect(locateSpan("delete it [...] We store data", PASSAGE)).toBeNull();
  });

  it("rejects missing text, empty spans, and empty segments", () => {
    expect(locateSpan("for 7 months", PASSAGE)).toBeNull();
    expect(locateSpan("   ", PASSAGE)).toBeNull();
    expect(locateSpan("We store data [...] ", PASSAGE)).toBeNull();
  });

  it("trims whitespace around segments", () => {
    expect(locateSpan("  for 6 months  ", PASSAGE)).toEqual([{ start: 14, end: 26 }]);
  });
});

describe("validateSet", () => {
  it("reports one problem per bad annotation", () => {
    const problems = validateSet(
      [
        { requirement: "Data Retention Period", value: "for 6 months", performed: true },
        { requirement: "Data Retention Period", value: "for 9 months", performed: true },
      ],
      PASSAGE,
    );
    expect(problems).toHaveLength(1);
    expect(problems[0]).toContain("for 9 months");
  });

  it("accepts a fully valid set", () => {
    expect(
      validateAnnotation(
        { requirement: "Data Retention Period", value: "for 6 months", performed: true },
        PASSAGE,
      ),
    ).toBe(true);
  });
});
