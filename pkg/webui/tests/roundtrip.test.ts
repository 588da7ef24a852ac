// Live round-trip against the real service: load defaults, solve, edit the
// budget, re-solve. Requires the Python package to be installed
// (`pip install -e .` at the repo root); the test spawns `cropcast serve`
// on a free port and tears it down afterwards.

import { spawn, type ChildProcess } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { formatAcres, formatInr } from "../src/format.js";
import {
  applySolution,
  buildRequest,
  canSolve,
  draftFromDefaults,
  editScalar,
  startSolve,
  type ScenarioDraft,
} from "../src/state.js";

const PORT = 8350 + (process.pid % 200);
const BASE = `http://127.0.0.1:${PORT}`;

let service: ChildProcess;
const api = new ApiClient(BASE);

async function waitForService(): Promise<void> {
  for (let attempt = 0; attempt < 120; attempt++) {
    try {
      const response = await fetch(`${BASE}/api/crops`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 500));
  }
  throw new Error("service did not come up");
}

beforeAll(async () => {
  service = spawn(
    "python3",
    ["-m", "cropcast.cli", "serve", "--port", String(PORT)],
    { stdio: "ignore" },
  );
  await waitForService();
});

afterAll(() => {
  service?.kill("SIGTERM");
});

describe("UI round-trip against the live service", () => {
  let draft: ScenarioDraft;

  it("loads the bundled defaults into the draft", async () => {
    const response = await api.getCrops();
    expect(response.crops.map((c) => c.name)).toEqual([
      "Jowar", "Rice", "Maize", "Urad",
    ]);
    draft = draftFromDefaults(response);
    expect(draft.totalLand).toBe("20");
    expect(draft.budget).toBe("200000");
    expect(draft.storage).toBe("40000");
    expect(canSolve(draft)).toBe(true);
  });

  it("solves the default draft to the documented plan", async () => {
    draft = startSolve(draft);
    const solution = await api.solvePortfolio(buildRequest(draft));
    draft = applySolution(draft, solution);

    expect(solution.status).toBe("optimal");
    expect(solution.acres.Maize).toBeCloseTo(7.1918, 2);
    expect(solution.acres.Jowar).toBeCloseTo(12.1233, 2);
    expect(solution.acres.Urad).toBeCloseTo(0.6849, 2);
    expect(solution.acres.Rice).toBeCloseTo(0.0, 6);
    expect(Math.abs(solution.objective_inr - 347383)).toBeLessThan(50);

    // the display layer only formats; the underlying values are untouched
    expect(formatAcres(solution.acres.Maize!)).toBe("7.192");
    expect(formatAcres(solution.acres.Jowar!)).toBe("12.123");
    expect(formatAcres(solution.acres.Urad!)).toBe("0.685");
    expect(formatInr(solution.objective_inr)).toBe("₹ 3,47,383");
    expect(new Set(solution.binding)).toEqual(new Set(["budget", "storage", "land"]));
    expect(draft.dirty).toBe(false);
  });

  it("editing the budget marks the shown solution stale", () => {
    draft = editScalar(draft, "budget", "100000");
    expect(draft.dirty).toBe(true);
    expect(draft.lastSolution).not.toBeNull();
  });

  it("re-solving under the tighter budget changes the plan and binds budget", async () => {
    const previous = draft.lastSolution!;
    draft = startSolve(draft);
    const solution = await api.solvePortfolio(buildRequest(draft));
    draft = applySolution(draft, solution);

    expect(solution.status).toBe("optimal");
    expect(solution.objective_inr).toBeLessThan(previous.objective_inr);
    const moved = Object.keys(solution.acres).some(
      (crop) => Math.abs(solution.acres[crop]! - (previous.acres[crop] ?? 0)) > 1e-6,
    );
    expect(moved).toBe(true);
    expect(solution.binding).toContain("budget");
    expect(draft.dirty).toBe(false);
  });

  it("rejects a zero budget with a field-level error", async () => {
    const bad = editScalar(draft, "budget", "0");
    expect(canSolve(bad)).toBe(false); // client side blocks it first
    const request = { ...buildRequest(draft), budget_inr: 0 };
    const error = await api.solvePortfolio(request).catch((e) => e);
    expect(error.status).toBe(400);
    expect(error.body.code).toBe("validation_error");
  });
});
