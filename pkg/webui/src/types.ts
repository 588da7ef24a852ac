// Wire types mirroring the service JSON exactly.

export interface CropEconomicsDoc {
  cost_per_acre_inr: number;
  yield_kg_per_acre: number;
  cost_price_per_kg_inr: number;
  forecast_price_per_kg_inr: number | null;
}

export interface CropEntry {
  name: string;
  economics: CropEconomicsDoc;
  available: boolean;
}

export interface ScenarioDefaults {
  total_land_acres: number | null;
  budget_inr: number | null;
  storage_kg: number | null;
}

export interface CropsResponse {
  defaults: ScenarioDefaults;
  crops: CropEntry[];
}

export interface ForecastPoint {
  week_date: string;
  price_inr: number;
}

export interface ForecastResponse {
  crop: string;
  champion: string;
  horizon: number;
  history: ForecastPoint[];
  points: ForecastPoint[];
}

export interface LeaderboardRow {
  model: string;
  rmse: number | null;
  rmsep: number | null;
  mape: number | null;
  failed: boolean;
}

export interface LeaderboardResponse {
  crop: string;
  rows: LeaderboardRow[];
}

export interface SolveRequestCrop {
  name: string;
  cost_per_acre_inr: number;
  yield_kg_per_acre: number;
  cost_price_per_kg_inr: number;
  forecast_price_per_kg_inr?: number;
}

export interface SolveRequest {
  total_land_acres: number;
  budget_inr: number;
  storage_kg: number;
  horizon_weeks?: number;
  crops: SolveRequestCrop[];
}

export interface PortfolioSolution {
  status: "optimal" | "infeasible" | "unbounded";
  objective_inr: number;
  acres: Record<string, number>;
  binding: string[];
}

export interface FieldError {
  field: string;
  message: string;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  field_errors: FieldError[];
}
