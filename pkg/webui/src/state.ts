// Scenario draft state: editing, validation, and the dirty/solving flags.
// All functions are pure (draft in, draft out) so the DOM layer stays thin
// and the invariants are testable without a browser.

import type {
  CropEntry,
  CropsResponse,
  PortfolioSolution,
  SolveRequest,
  SolveRequestCrop,
} from "./types.js";

export interface CropDraft {
  name: string;
  selected: boolean;
  available: boolean;
  costPerAcre: string;
  yieldPerAcre: string;
  costPrice: string;
  forecastPrice: string; // empty string lets the service fill it from the champion
}

export interface ScenarioDraft {
  totalLand: string;
  budget: string;
  storage: string;
  crops: CropDraft[];
  lastSolution: PortfolioSolution | null;
  dirty: boolean;
  solving: boolean;
}

export type ScalarField = "totalLand" | "budget" | "storage";
export type CropField = "costPerAcre" | "yieldPerAcre" | "costPrice" | "forecastPrice";

export interface ValidationErrors {
  scalar: Partial<Record<ScalarField, string>>;
  crops: Record<string, Partial<Record<CropField, string>>>;
  global: string[];
}

function asInput(value: number | null | undefined): string {
  return value == null ? "" : String(value);
}

export function draftFromDefaults(response: CropsResponse): ScenarioDraft {
  return {
    totalLand: asInput(response.defaults.total_land_acres),
    budget: asInput(response.defaults.budget_inr),
    storage: asInput(response.defaults.storage_kg),
    crops: response.crops.map(cropDraft),
    lastSolution: null,
    dirty: false,
    solving: false,
  };
}

function cropDraft(entry: CropEntry): CropDraft {
  return {
    name: entry.name,
    selected: true,
    available: entry.available,
    costPerAcre: asInput(entry.economics.cost_per_acre_inr),
    yieldPerAcre: asInput(entry.economics.yield_kg_per_acre),
    costPrice: asInput(entry.economics.cost_price_per_kg_inr),
    forecastPrice: asInput(entry.economics.forecast_price_per_kg_inr),
  };
}

function touched(draft: ScenarioDraft): ScenarioDraft {
  return { ...draft, dirty: draft.lastSolution != null };
}

export function editScalar(
  draft: ScenarioDraft, field: ScalarField, value: string,
): ScenarioDraft {
  return touched({ ...draft, [field]: value });
}

export function editCrop(
  draft: ScenarioDraft, name: string, field: CropField, value: string,
): ScenarioDraft {
  return touched({
    ...draft,
    crops: draft.crops.map((c) => (c.name === name ? { ...c, [field]: value } : c)),
  });
}

export function toggleCrop(draft: ScenarioDraft, name: string): ScenarioDraft {
  return touched({
    ...draft,
    crops: draft.crops.map((c) =>
      c.name === name ? { ...c, selected: !c.selected } : c,
    ),
  });
}

function positiveNumber(raw: string): string | null {
  if (raw.trim() === "") return "required";
  const value = Number(raw);
  if (!Number.isFinite(value)) return "not a number";
  if (value <= 0) return "must be greater than 0";
  return null;
}

function finiteNumber(raw: string): string | null {
  if (raw.trim() === "") return "required";
  return Number.isFinite(Number(raw)) ? null : "not a number";
}

/** Client-side checks cover only the cheap invariants (positivity, nonempty
 * selection); the service remains the validation authority. */
export function validateDraft(draft: ScenarioDraft): ValidationErrors {
  const errors: ValidationErrors = { scalar: {}, crops: {}, global: [] };
  for (const field of ["totalLand", "budget", "storage"] as const) {
    const problem = positiveNumber(draft[field]);
    if (problem) errors.scalar[field] = problem;
  }
  const selected = draft.crops.filter((c) => c.selected);
  if (selected.length === 0) {
    errors.global.push("select at least one crop");
  }
  for (const crop of selected) {
    const problems: Partial<Record<CropField, string>> = {};
    const costPerAcre = positiveNumber(crop.costPerAcre);
    if (costPerAcre) problems.costPerAcre = costPerAcre;
    const yieldPerAcre = positiveNumber(crop.yieldPerAcre);
    if (yieldPerAcre) problems.yieldPerAcre = yieldPerAcre;
    const costPrice = finiteNumber(crop.costPrice);
    if (costPrice) problems.costPrice = costPrice;
    if (crop.forecastPrice.trim() !== "" && !Number.isFinite(Number(crop.forecastPrice))) {
      problems.forecastPrice = "not a number";
    }
    if (Object.keys(problems).length) errors.crops[crop.name] = problems;
  }
  return errors;
}

export function isValid(errors: ValidationErrors): boolean {
  return (
    Object.keys(errors.scalar).length === 0 &&
    Object.keys(errors.crops).length === 0 &&
    errors.global.length === 0
  );
}

/** Solve is enabled only for a valid draft with no solve in flight. */
export function canSolve(draft: ScenarioDraft): boolean {
  return !draft.solving && isValid(validateDraft(draft));
}

export function buildRequest(draft: ScenarioDraft, horizonWeeks?: number): SolveRequest {
  const crops: SolveRequestCrop[] = draft.crops
    .filter((c) => c.selected)
    .map((c) => {
      const crop: SolveRequestCrop = {
        name: c.name,
        cost_per_acre_inr: Number(c.costPerAcre),
        yield_kg_per_acre: Number(c.yieldPerAcre),
        cost_price_per_kg_inr: Number(c.costPrice),
      };
      if (c.forecastPrice.trim() !== "") {
        crop.forecast_price_per_kg_inr = Number(c.forecastPrice);
      }
      return crop;
    });
  const request: SolveRequest = {
    total_land_acres: Number(draft.totalLand),
    budget_inr: Number(draft.budget),
    storage_kg: Number(draft.storage),
    crops,
  };
  if (horizonWeeks != null) request.horizon_weeks = horizonWeeks;
  return request;
}

export function startSolve(draft: ScenarioDraft): ScenarioDraft {
  return { ...draft, solving: true };
}

/** The displayed solution always corresponds to the just-solved draft. */
export function applySolution(
  draft: ScenarioDraft, solution: PortfolioSolution,
): ScenarioDraft {
  return { ...draft, lastSolution: solution, dirty: false, solving: false };
}

export function solveFailed(draft: ScenarioDraft): ScenarioDraft {
  return { ...draft, solving: false };
}
