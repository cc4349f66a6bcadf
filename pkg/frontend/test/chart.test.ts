import { describe, expect, it } from "vitest";

import type { QuestionAggregate } from "../src/api.js";
import { divergentSegments } from "../src/chart.js";

const SCORERS = ["explod_v2", "pem"];

function question(counts: Record<string, number>): QuestionAggregate {
  return { question_id: 1, goal: "diversity", text: "q", counts };
}

describe("divergent segment layout", () => {
  it("widths are proportional to counts", () => {
    const segments = divergentSegments(
      question({ much_more_explod_v2: 2, more_explod_v2: 4, equal: 2, more_pem: 1, much_more_pem: 1 }),
      SCORERS,
    );
    const widths = segments.map((s) => s.x1 - s.x0);
    const expected = [0.2, 0.4, 0.2, 0.1, 0.1];
    widths.forEach((w, i) => expect(w).toBeCloseTo(expected[i]!, 12));
    expect(segments.map((s) => s.count)).toEqual([2, 4, 2, 1, 1]);
  });

  it("the equal bucket straddles the midline", () => {
    const segments = divergentSegments(
      question({ much_more_explod_v2: 1, more_explod_v2: 1, equal: 2, more_pem: 1, much_more_pem: 1 }),
      SCORERS,
    );
    const equal = segments.find((s) => s.bucket === "equal")!;
    expect((equal.x0 + equal.x1) / 2).toBeCloseTo(0.5, 12);
  });

  it("segments are contiguous and ordered", () => {
    const segments = divergentSegments(
      question({ much_more_explod_v2: 3, more_explod_v2: 0, equal: 1, more_pem: 2, much_more_pem: 4 }),
      SCORERS,
    );
    for (let i = 1; i < segments.length; i++) {
      expect(segments[i]!.x0).toBeCloseTo(segments[i - 1]!.x1, 12);
    }
    expect(segments[0]!.bucket).toBe("much_more_explod_v2");
    expect(segments[4]!.bucket).toBe("much_more_pem");
  });

  it("an all-zero row collapses onto the midline", () => {
    const segments = divergentSegments(question({}), SCORERS);
    for (const segment of segments) {
      expect(segment.x0).toBe(0.5);
      expect(segment.x1).toBe(0.5);
    }
  });

  it("ignores unknown buckets", () => {
    const segments = divergentSegments(
      question({ much_more_explod_v2: 1, bogus_bucket: 99, equal: 1 }),
      SCORERS,
    );
    const total = segments.reduce((acc, s) => acc + (s.x1 - s.x0), 0);
    expect(total).toBeCloseTo(1.0, 12);
  });
});
