import { describe, expect, it } from "vitest";

import { formatAcres, formatInr, groupIndian } from "../src/format.js";

describe("groupIndian", () => {
  it("leaves up to three digits alone", () => {
    expect(groupIndian("7")).toBe("7");
    expect(groupIndian("383")).toBe("383");
  });

  it("groups the last three then pairs", () => {
    expect(groupIndian("1000")).toBe("1,000");
    expect(groupIndian("347383")).toBe("3,47,383");
    expect(groupIndian("1234567")).toBe("12,34,567");
    expect(groupIndian("123456789")).toBe("12,34,56,789");
  });
});

describe("formatInr", () => {
  it("renders the sample-problem profit the way the figure is quoted", () => {
    expect(formatInr(347383)).toBe("₹ 3,47,383");
    expect(formatInr(347382.876)).toBe("₹ 3,47,383");
  });

  it("rounds to whole rupees", () => {
    expect(formatInr(199.5)).toBe("₹ 200");
    expect(formatInr(0.4)).toBe("₹ 0");
  });

  it("handles negatives", () => {
    expect(formatInr(-125000)).toBe("-₹ 1,25,000");
  });
});

describe("formatAcres", () => {
  it("always shows three decimals", () => {
    expect(formatAcres(7.1918)).toBe("7.192");
    expect(formatAcres(0)).toBe("0.000");
    expect(formatAcres(12.1233)).toBe("12.123");
  });
});
