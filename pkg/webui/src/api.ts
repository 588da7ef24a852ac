// Thin fetch client for the four service endpoints. No math happens here.

import type {
  ApiErrorBody,
  CropsResponse,
  ForecastResponse,
  LeaderboardResponse,
  PortfolioSolution,
  SolveRequest,
} from "./types.js";

export class ApiRequestError extends Error {
  constructor(
    readonly status: number,
    readonly body: ApiErrorBody | null,
  ) {
    super(body?.message ?? `request failed with status ${status}`);
    this.name = "ApiRequestError";
  }
}

async function parseOrThrow<T>(response: Response): Promise<T> {
  if (response.ok) {
    return (await response.json()) as T;
  }
  let body: ApiErrorBody | null = null;
  try {
    body = (await response.json()) as ApiErrorBody;
  } catch {
    body = null;
  }
  throw new ApiRequestError(response.status, body);
}

export class ApiClient {
  constructor(private readonly baseUrl: string = "") {}

  async getCrops(): Promise<CropsResponse> {
    return parseOrThrow(await fetch(`${this.baseUrl}/api/crops`));
  }

  async getForecast(crop: string, horizon: number): Promise<ForecastResponse> {
    const url = `${this.baseUrl}/api/forecast/${encodeURIComponent(crop)}?h=${horizon}`;
    return parseOrThrow(await fetch(url));
  }

  async getLeaderboard(crop: string): Promise<LeaderboardResponse> {
    const url = `${this.baseUrl}/api/leaderboard/${encodeURIComponent(crop)}`;
    return parseOrThrow(await fetch(url));
  }

  async solvePortfolio(request: SolveRequest): Promise<PortfolioSolution> {
    const response = await fetch(`${this.baseUrl}/api/portfolio/solve`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(request),
    });
    return parseOrThrow(response);
  }
}
