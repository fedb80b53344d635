import { describe, expect, it } from "vitest";

import { formatComponent, formatDegrees, formatTriplet } from "../src/format.js";

describe("display formatting", () => {
  it("components show exactly six decimals", () => {
    expect(formatComponent(0.5773502691896258)).toBe("0.577350");
    expect(formatComponent(1)).toBe("1.000000");
    expect(formatComponent(0)).toBe("0.000000");
  });

  it("triplet formats verbatim server values", () => {
    const triplet = [0.5711777490074647, 0.6027611268488557, 0.5571669435623969];
    expect(formatTriplet(triplet)).toBe("(0.571178, 0.602761, 0.557167)");
  });

  it("matches toFixed(6) of the raw value for any input", () => {
    for (let i = 0; i < 100; i++) {
      const v = Math.random();
      expect(formatComponent(v)).toBe(v.toFixed(6));
    }
  });

  it("rejects non-triplets", () => {
    expect(() => formatTriplet([1, 2])).toThrow();
  });

  it("degrees use three decimals", () => {
    expect(formatDegrees(3.6581)).toBe("3.658°");
  });
});
