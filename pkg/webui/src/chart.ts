// Pure SVG geometry for the two charts. No DOM access: functions return
// path strings and positioned labels that app.ts drops into <svg> nodes.

import type { ForecastPoint } from "./types.js";

export interface Tick {
  pos: number;
  label: string;
}

export interface LineChartGeometry {
  width: number;
  height: number;
  historyPath: string;
  forecastPath: string;
  xTicks: Tick[];
  yTicks: Tick[];
}

export interface Bar {
  label: string;
  value: number;
  x: number;
  y: number;
  width: number;
  height: number;
}

const PAD = { left: 46, right: 12, top: 10, bottom: 22 };

function pathFrom(points: Array<[number, number]>): string {
  return points
    .map(([x, y], i) => `${i === 0 ? "M" : "L"}${x.toFixed(2)},${y.toFixed(2)}`)
    .join(" ");
}

/** History and forecast share one time axis; the forecast path starts at the
 * last history point so the curves join visually. */
export function buildLineChart(
  history: ForecastPoint[],
  forecast: ForecastPoint[],
  width = 640,
  height = 240,
): LineChartGeometry {
  const all = [...history, ...forecast];
  if (all.length === 0) {
    return { width, height, historyPath: "", forecastPath: "", xTicks: [], yTicks: [] };
  }
  const prices = all.map((p) => p.price_inr);
  let lo = Math.min(...prices);
  let hi = Math.max(...prices);
  if (hi === lo) {
    lo -= 1;
    hi += 1;
  }
  const innerW = width - PAD.left - PAD.right;
  const innerH = height - PAD.top - PAD.bottom;
  const x = (i: number) =>
    PAD.left + (all.length === 1 ? 0 : (i / (all.length - 1)) * innerW);
  const y = (price: number) => PAD.top + ((hi - price) / (hi - lo)) * innerH;

  const historyPts = history.map(
    (p, i) => [x(i), y(p.price_inr)] as [number, number],
  );
  const forecastPts = forecast.map(
    (p, i) => [x(history.length + i), y(p.price_inr)] as [number, number],
  );
  if (historyPts.length > 0 && forecastPts.length > 0) {
    forecastPts.unshift(historyPts[historyPts.length - 1]!);
  }

  const xTicks: Tick[] = [];
  const step = Math.max(1, Math.floor(all.length / 6));
  for (let i = 0; i < all.length; i += step) {
    xTicks.push({ pos: x(i), label: all[i]!.week_date });
  }
  const yTicks: Tick[] = [];
  for (let k = 0; k <= 4; k++) {
    const price = lo + ((hi - lo) * k) / 4;
    yTicks.push({ pos: y(price), label: price.toFixed(1) });
  }
  return {
    width,
    height,
    historyPath: pathFrom(historyPts),
    forecastPath: pathFrom(forecastPts),
    xTicks,
    yTicks,
  };
}

/** Horizontal allocation bars, one per crop, scaled to the largest acreage. */
export function buildAllocationBars(
  acres: Record<string, number>,
  width = 320,
  rowHeight = 28,
): Bar[] {
  const names = Object.keys(acres);
  const max = Math.max(...names.map((n) => acres[n]!), 1e-9);
  const labelWidth = 90;
  return names.map((name, i) => {
    const value = acres[name]!;
    return {
      label: name,
      value,
      x: labelWidth,
      y: i * rowHeight + 4,
      width: Math.max(0, (value / max) * (width - labelWidth - 60)),
      height: rowHeight - 8,
    };
  });
}

export function pathSegmentCount(path: string): number {
  return path === "" ? 0 : path.split(" ").length;
}
