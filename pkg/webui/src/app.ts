// DOM wiring. Rendering only: every number shown comes straight from the
// service response (display formatting aside), and every edit goes through
// the pure state reducers.

import { ApiClient, ApiRequestError } from "./api.js";
import { buildAllocationBars, buildLineChart } from "./chart.js";
import { formatAcres, formatInr, formatPrice } from "./format.js";
import {
  applySolution,
  buildRequest,
  canSolve,
  draftFromDefaults,
  editCrop,
  editScalar,
  solveFailed,
  startSolve,
  toggleCrop,
  validateDraft,
  type CropField,
  type ScalarField,
  type ScenarioDraft,
} from "./state.js";
import type { ForecastResponse } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export class App {
  private draft: ScenarioDraft | null = null;
  private forecastCrop = "";
  private horizon = 52;
  private loadingForecast = false;

  constructor(
    private readonly doc: Document,
    private readonly api: ApiClient,
  ) {}

  async start(): Promise<void> {
    this.byId("retry").addEventListener("click", () => void this.loadDefaults());
    this.byId("solve").addEventListener("click", () => void this.solve());
    this.byId("horizon").addEventListener("change", () => {
      const value = Number((this.byId("horizon") as HTMLInputElement).value);
      this.horizon = Number.isFinite(value) && value >= 1 ? Math.floor(value) : 52;
      void this.loadForecast();
    });
    (this.byId("forecast-crop") as HTMLSelectElement).addEventListener(
      "change",
      (event) => {
        this.forecastCrop = (event.target as HTMLSelectElement).value;
        void this.loadForecast();
      },
    );
    await this.loadDefaults();
  }

  private byId(id: string): HTMLElement {
    const node = this.doc.getElementById(id);
    if (!node) throw new Error(`missing #${id}`);
    return node;
  }

  private banner(message: string | null): void {
    const banner = this.byId("banner");
    const retry = this.byId("retry");
    if (message == null) {
      banner.hidden = true;
      retry.hidden = true;
    } else {
      banner.hidden = false;
      this.byId("banner-text").textContent = message;
      retry.hidden = false;
    }
  }

  async loadDefaults(): Promise<void> {
    this.banner(null);
    try {
      const response = await this.api.getCrops();
      this.draft = draftFromDefaults(response);
      const available = response.crops.filter((c) => c.available).map((c) => c.name);
      this.forecastCrop = available[0] ?? "";
      this.renderCropSelect(available);
      this.render();
      if (this.forecastCrop) void this.loadForecast();
    } catch (error) {
      this.banner(`service unreachable: ${String(error)}`);
    }
  }

  async solve(): Promise<void> {
    if (!this.draft || !canSolve(this.draft)) return; // in flight or invalid
    this.draft = startSolve(this.draft);
    this.render();
    try {
      const solution = await this.api.solvePortfolio(buildRequest(this.draft));
      this.draft = applySolution(this.draft, solution);
      this.banner(null);
    } catch (error) {
      this.draft = solveFailed(this.draft);
      if (error instanceof ApiRequestError && error.body) {
        const details = error.body.field_errors
          .map((e) => `${e.field}: ${e.message}`)
          .join("; ");
        this.banner(`${error.body.message}${details ? ` (${details})` : ""}`);
      } else {
        this.banner(`solve failed: ${String(error)}`); // draft is preserved
      }
    }
    this.render();
  }

  async loadForecast(): Promise<void> {
    if (!this.forecastCrop || this.loadingForecast) return;
    this.loadingForecast = true;
    const note = this.byId("forecast-note");
    note.textContent = "loading forecast (first request fits the champion model)...";
    try {
      const response = await this.api.getForecast(this.forecastCrop, this.horizon);
      this.renderForecast(response);
      note.textContent = "";
    } catch (error) {
      if (error instanceof ApiRequestError && error.status === 404) {
        note.textContent = `no price data for ${this.forecastCrop}`;
      } else {
        note.textContent = `forecast failed: ${String(error)}`;
      }
      this.clearSvg("forecast-chart");
      this.byId("champion").textContent = "";
    }
    this.loadingForecast = false;
  }

  // -- rendering ----------------------------------------------------------

  private render(): void {
    if (!this.draft) return;
    this.renderScenarioInputs();
    this.renderCropTable();
    this.renderValidation();
    this.renderSolution();
  }

  private renderScenarioInputs(): void {
    const draft = this.draft!;
    const bind = (id: string, field: ScalarField) => {
      const input = this.byId(id) as HTMLInputElement;
      if (input.value !== draft[field]) input.value = draft[field];
      input.oninput = () => {
        this.draft = editScalar(this.draft!, field, input.value);
        this.renderValidation();
        this.renderSolution();
      };
    };
    bind("total-land", "totalLand");
    bind("budget", "budget");
    bind("storage", "storage");
  }

  private renderCropTable(): void {
    const body = this.byId("crop-rows");
    const draft = this.draft!;
    body.textContent = "";
    for (const crop of draft.crops) {
      const row = this.doc.createElement("tr");

      const selectCell = this.doc.createElement("td");
      const checkbox = this.doc.createElement("input");
      checkbox.type = "checkbox";
      checkbox.checked = crop.selected;
      checkbox.onchange = () => {
        this.draft = toggleCrop(this.draft!, crop.name);
        this.render();
      };
      selectCell.appendChild(checkbox);
      row.appendChild(selectCell);

      const nameCell = this.doc.createElement("td");
      nameCell.textContent = crop.name + (crop.available ? "" : " (no price data)");
      row.appendChild(nameCell);

      const fields: Array<[CropField, string]> = [
        ["costPerAcre", crop.costPerAcre],
        ["yieldPerAcre", crop.yieldPerAcre],
        ["costPrice", crop.costPrice],
        ["forecastPrice", crop.forecastPrice],
      ];
      for (const [field, value] of fields) {
        const cell = this.doc.createElement("td");
        const input = this.doc.createElement("input");
        input.value = value;
        input.disabled = !crop.selected;
        input.oninput = () => {
          this.draft = editCrop(this.draft!, crop.name, field, input.value);
          this.renderValidation();
          this.renderSolution();
        };
        if (field === "forecastPrice") input.placeholder = "champion fills";
        cell.appendChild(input);
        row.appendChild(cell);
      }
      body.appendChild(row);
    }
  }

  private renderValidation(): void {
    const draft = this.draft!;
    const errors = validateDraft(draft);
    const messages: string[] = [...errors.global];
    for (const [field, message] of Object.entries(errors.scalar)) {
      messages.push(`${field}: ${message}`);
    }
    for (const [crop, problems] of Object.entries(errors.crops)) {
      for (const [field, message] of Object.entries(problems)) {
        messages.push(`${crop}.${field}: ${message}`);
      }
    }
    this.byId("validation").textContent = messages.join(" · ");
    const button = this.byId("solve") as HTMLButtonElement;
    button.disabled = !canSolve(draft);
    button.textContent = draft.solving ? "Solving..." : "Solve";
  }

  private renderSolution(): void {
    const draft = this.draft!;
    this.byId("stale").hidden = !draft.dirty;
    const solution = draft.lastSolution;
    const objective = this.byId("objective");
    const binding = this.byId("binding");
    if (!solution) {
      objective.textContent = "";
      binding.textContent = "";
      this.clearSvg("alloc-chart");
      return;
    }
    if (solution.status !== "optimal") {
      objective.textContent = `no optimal plan: ${solution.status}`;
      binding.textContent = "";
      this.clearSvg("alloc-chart");
      return;
    }
    objective.textContent = `estimated profit ${formatInr(solution.objective_inr)}`;
    binding.textContent = "";
    for (const name of solution.binding) {
      const badge = this.doc.createElement("span");
      badge.className = "badge";
      badge.textContent = `${name} binding`;
      binding.appendChild(badge);
    }
    this.renderAllocation(solution.acres);
  }

  private renderAllocation(acres: Record<string, number>): void {
    const svg = this.clearSvg("alloc-chart");
    const bars = buildAllocationBars(acres);
    svg.setAttribute("viewBox", `0 0 320 ${Math.max(1, bars.length) * 28 + 8}`);
    for (const bar of bars) {
      const label = this.doc.createElementNS(SVG_NS, "text");
      label.setAttribute("x", "0");
      label.setAttribute("y", String(bar.y + bar.height - 2));
      label.textContent = bar.label;
      svg.appendChild(label);

      const rect = this.doc.createElementNS(SVG_NS, "rect");
      rect.setAttribute("x", String(bar.x));
      rect.setAttribute("y", String(bar.y));
      rect.setAttribute("width", String(bar.width));
      rect.setAttribute("height", String(bar.height));
      rect.setAttribute("class", "bar");
      svg.appendChild(rect);

      const value = this.doc.createElementNS(SVG_NS, "text");
      value.setAttribute("x", String(bar.x + bar.width + 4));
      value.setAttribute("y", String(bar.y + bar.height - 2));
      value.textContent = `${formatAcres(bar.value)} ac`;
      svg.appendChild(value);
    }
  }

  private renderCropSelect(names: string[]): void {
    const select = this.byId("forecast-crop") as HTMLSelectElement;
    select.textContent = "";
    for (const name of names) {
      const option = this.doc.createElement("option");
      option.value = name;
      option.textContent = name;
      select.appendChild(option);
    }
    select.value = this.forecastCrop;
  }

  private renderForecast(response: ForecastResponse): void {
    this.byId("champion").textContent =
      `champion model: ${response.champion} · ` +
      `last price ${formatPrice(response.history[response.history.length - 1]?.price_inr ?? 0)}`;
    const svg = this.clearSvg("forecast-chart");
    const geometry = buildLineChart(response.history, response.points);
    svg.setAttribute("viewBox", `0 0 ${geometry.width} ${geometry.height}`);
    for (const tick of geometry.yTicks) {
      const text = this.doc.createElementNS(SVG_NS, "text");
      text.setAttribute("x", "2");
      text.setAttribute("y", String(tick.pos + 3));
      text.textContent = tick.label;
      svg.appendChild(text);
    }
    for (const tick of geometry.xTicks) {
      const text = this.doc.createElementNS(SVG_NS, "text");
      text.setAttribute("x", String(tick.pos));
      text.setAttribute("y", String(geometry.height - 6));
      text.setAttribute("class", "xtick");
      text.textContent = tick.label;
      svg.appendChild(text);
    }
    const history = this.doc.createElementNS(SVG_NS, "path");
    history.setAttribute("d", geometry.historyPath);
    history.setAttribute("class", "history");
    svg.appendChild(history);
    const forecast = this.doc.createElementNS(SVG_NS, "path");
    forecast.setAttribute("d", geometry.forecastPath);
    forecast.setAttribute("class", "forecast");
    svg.appendChild(forecast);
  }

  private clearSvg(id: string): HTMLElement {
    const svg = this.byId(id);
    svg.textContent = "";
    return svg;
  }
}
