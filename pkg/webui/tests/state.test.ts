import { describe, expect, it } from "vitest";

import {
  applySolution,
  buildRequest,
  canSolve,
  draftFromDefaults,
  editCrop,
  editScalar,
  isValid,
  solveFailed,
  startSolve,
  toggleCrop,
  validateDraft,
} from "../src/state.js";
import type { CropsResponse, PortfolioSolution } from "../src/types.js";

const CROPS_RESPONSE: CropsResponse = {
  defaults: { total_land_acres: 20, budget_inr: 200000, storage_kg: 40000 },
  crops: [
    {
      name: "Jowar",
      economics: {
        cost_per_acre_inr: 7000,
        yield_kg_per_acre: 1500,
        cost_price_per_kg_inr: 20,
        forecast_price_per_kg_inr: 30.34,
      },
      available: true,
    },
    {
      name: "Rice",
      economics: {
        cost_per_acre_inr: 22500,
        yield_kg_per_acre: 3000,
        cost_price_per_kg_inr: 29.5,
        forecast_price_per_kg_inr: null,
      },
      available: false,
    },
  ],
};

const SOLUTION: PortfolioSolution = {
  status: "optimal",
  objective_inr: 1234.5,
  acres: { Jowar: 2.0, Rice: 0.0 },
  binding: ["land"],
};

describe("draftFromDefaults", () => {
  it("prefills the resource limits and selects every crop", () => {
    const draft = draftFromDefaults(CROPS_RESPONSE);
    expect(draft.totalLand).toBe("20");
    expect(draft.budget).toBe("200000");
    expect(draft.storage).toBe("40000");
    expect(draft.crops.map((c) => c.selected)).toEqual([true, true]);
    expect(draft.dirty).toBe(false);
    expect(draft.lastSolution).toBeNull();
  });

  it("turns a missing forecast price into an empty input", () => {
    const draft = draftFromDefaults(CROPS_RESPONSE);
    expect(draft.crops[1]!.forecastPrice).toBe("");
  });

  it("is valid and solvable straight away", () => {
    const draft = draftFromDefaults(CROPS_RESPONSE);
    expect(isValid(validateDraft(draft))).toBe(true);
    expect(canSolve(draft)).toBe(true);
  });
});

describe("dirty flag", () => {
  it("stays clean while nothing has been solved", () => {
    const draft = editScalar(draftFromDefaults(CROPS_RESPONSE), "budget", "100");
    expect(draft.dirty).toBe(false);
  });

  it("marks any edit after a solution as stale", () => {
    let draft = applySolution(draftFromDefaults(CROPS_RESPONSE), SOLUTION);
    expect(draft.dirty).toBe(false);
    draft = editScalar(draft, "budget", "100000");
    expect(draft.dirty).toBe(true);
    expect(draft.lastSolution).toEqual(SOLUTION);
  });

  it("crop edits and toggles also invalidate", () => {
    const solved = applySolution(draftFromDefaults(CROPS_RESPONSE), SOLUTION);
    expect(editCrop(solved, "Jowar", "costPrice", "21").dirty).toBe(true);
    expect(toggleCrop(solved, "Rice").dirty).toBe(true);
  });

  it("re-solving clears the flag", () => {
    let draft = applySolution(draftFromDefaults(CROPS_RESPONSE), SOLUTION);
    draft = editScalar(draft, "budget", "100000");
    draft = applySolution(startSolve(draft), SOLUTION);
    expect(draft.dirty).toBe(false);
    expect(draft.solving).toBe(false);
  });
});

describe("validation", () => {
  it("rejects nonpositive resources", () => {
    const draft = editScalar(draftFromDefaults(CROPS_RESPONSE), "budget", "0");
    const errors = validateDraft(draft);
    expect(errors.scalar.budget).toMatch(/greater than 0/);
    expect(canSolve(draft)).toBe(false);
  });

  it("rejects non-numeric input", () => {
    const draft = editCrop(
      draftFromDefaults(CROPS_RESPONSE), "Jowar", "yieldPerAcre", "lots",
    );
    expect(validateDraft(draft).crops.Jowar?.yieldPerAcre).toBe("not a number");
  });

  it("blocks solving with every crop deselected", () => {
    let draft = draftFromDefaults(CROPS_RESPONSE);
    draft = toggleCrop(draft, "Jowar");
    draft = toggleCrop(draft, "Rice");
    const errors = validateDraft(draft);
    expect(errors.global).toContain("select at least one crop");
    expect(canSolve(draft)).toBe(false);
  });

  it("ignores problems on deselected crops", () => {
    let draft = editCrop(
      draftFromDefaults(CROPS_RESPONSE), "Rice", "costPerAcre", "-5",
    );
    expect(isValid(validateDraft(draft))).toBe(false);
    draft = toggleCrop(draft, "Rice");
    expect(isValid(validateDraft(draft))).toBe(true);
  });

  it("allows an empty forecast price but not junk", () => {
    const empty = editCrop(
      draftFromDefaults(CROPS_RESPONSE), "Jowar", "forecastPrice", "",
    );
    expect(isValid(validateDraft(empty))).toBe(true);
    const junk = editCrop(empty, "Jowar", "forecastPrice", "soon");
    expect(validateDraft(junk).crops.Jowar?.forecastPrice).toBe("not a number");
  });
});

describe("buildRequest", () => {
  it("serializes selected crops and omits blank forecast prices", () => {
    const request = buildRequest(draftFromDefaults(CROPS_RESPONSE), 26);
    expect(request).toEqual({
      total_land_acres: 20,
      budget_inr: 200000,
      storage_kg: 40000,
      horizon_weeks: 26,
      crops: [
        {
          name: "Jowar",
          cost_per_acre_inr: 7000,
          yield_kg_per_acre: 1500,
          cost_price_per_kg_inr: 20,
          forecast_price_per_kg_inr: 30.34,
        },
        {
          name: "Rice",
          cost_per_acre_inr: 22500,
          yield_kg_per_acre: 3000,
          cost_price_per_kg_inr: 29.5,
        },
      ],
    });
  });

  it("drops deselected crops", () => {
    const draft = toggleCrop(draftFromDefaults(CROPS_RESPONSE), "Rice");
    const request = buildRequest(draft);
    expect(request.crops.map((c) => c.name)).toEqual(["Jowar"]);
    expect(request.horizon_weeks).toBeUndefined();
  });
});

describe("solve lifecycle", () => {
  it("permits only one in-flight solve", () => {
    const draft = startSolve(draftFromDefaults(CROPS_RESPONSE));
    expect(draft.solving).toBe(true);
    expect(canSolve(draft)).toBe(false);
  });

  it("a failed solve preserves the draft and re-enables the button", () => {
    const before = editScalar(draftFromDefaults(CROPS_RESPONSE), "budget", "5000");
    const after = solveFailed(startSolve(before));
    expect(after.solving).toBe(false);
    expect(after.budget).toBe("5000");
    expect(canSolve(after)).toBe(true);
  });
});
