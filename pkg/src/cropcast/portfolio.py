"""Acreage allocation: build and solve the planting linear program.

Maximizes estimated profit over continuous per-crop acreages subject to a
budget, a storage, and a land constraint. The solver is a dense primal
simplex with Bland's rule, which is deterministic, cycle-free, and more
than adequate at this scale (a handful of crops and three constraints).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .exceptions import ParameterError, SolverFailureError

SIMPLEX_TOL = 1e-9
STATUS_OPTIMAL = "optimal"
STATUS_INFEASIBLE = "infeasible"
STATUS_UNBOUNDED = "unbounded"

CONSTRAINT_NAMES = ("budget", "storage", "land")


@dataclass(frozen=True)
class CropEconomics:
    """Per-crop cost, yield, and estimated net profit per kg."""

    crop: str
    cost_per_acre: float
    yield_per_acre: float
    net_profit_per_kg: float

    def __post_init__(self) -> None:
        if self.cost_per_acre <= 0:
            raise ParameterError(f"{self.crop}: cost_per_acre must be > 0")
        if self.yield_per_acre <= 0:
            raise ParameterError(f"{self.crop}: yield_per_acre must be > 0")


@dataclass(frozen=True)
class FarmScenario:
    """Farmer inputs: the crop wishlist and the three resource limits."""

    crops: tuple[CropEconomics, ...]
    total_land: float
    budget: float
    storage: float

    def __post_init__(self) -> None:
        if not self.crops:
            raise ParameterError("scenario needs at least one crop")
        names = [c.crop for c in self.crops]
        if len(set(names)) != len(names):
            raise ParameterError(f"duplicate crop names in scenario: {names}")
        for field_name in ("total_land", "budget", "storage"):
            if getattr(self, field_name) <= 0:
                raise ParameterError(f"{field_name} must be > 0")


@dataclass(frozen=True, eq=False)
class LinearProgram:
    """max c.x subject to A x <= b, x >= 0 (b nonnegative)."""

    objective: np.ndarray
    constraint_matrix: np.ndarray
    rhs: np.ndarray
    constraint_names: tuple[str, ...]
    variable_names: tuple[str, ...]

    def __post_init__(self) -> None:
        c = np.asarray(self.objective, dtype=float)
        A = np.asarray(self.constraint_matrix, dtype=float)
        b = np.asarray(self.rhs, dtype=float)
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "constraint_matrix", A)
        object.__setattr__(self, "rhs", b)
        if A.ndim != 2 or A.shape != (len(b), len(c)):
            raise ParameterError(
                f"dimension mismatch: A is {A.shape}, c has {len(c)}, b has {len(b)}"
            )
        if len(self.constraint_names) != len(b):
            raise ParameterError("one name per constraint row required")
        if len(self.variable_names) != len(c):
            raise ParameterError("one name per variable required")
        if np.any(b < 0):
            raise ParameterError("standard form requires nonnegative right-hand sides")


@dataclass(frozen=True)
class PortfolioSolution:
    """Optimal acres per crop with the binding-constraint report."""

    acres: dict[str, float]
    objective_value: float
    binding: tuple[str, ...]
    status: str

    def to_json(self) -> str:
        return json.dumps(
            {
                "status": self.status,
                "objective_inr": self.objective_value,
                "acres": self.acres,
                "binding": list(self.binding),
            },
            indent=2,
        )


def net_profit_per_kg(forecast_price: float, cost_price: float) -> float:
    """Estimated profit per kg: forecast selling price minus current cost price.

    May be negative; loss-making crops stay in the program and are priced
    out by optimization rather than filtered.
    """
    return forecast_price - cost_price


def build_lp(scenario: FarmScenario) -> LinearProgram:
    """Assemble the LP: objective yield*profit per acre, three <= constraints."""
    c = np.array([e.yield_per_acre * e.net_profit_per_kg for e in scenario.crops])
    A = np.array(
        [
            [e.cost_per_acre for e in scenario.crops],
            [e.yield_per_acre for e in scenario.crops],
            [1.0] * len(scenario.crops),
        ]
    )
    b = np.array([scenario.budget, scenario.storage, scenario.total_land])
    return LinearProgram(
        objective=c,
        constraint_matrix=A,
        rhs=b,
        constraint_names=CONSTRAINT_NAMES,
        variable_names=tuple(e.crop for e in scenario.crops),
    )


def solve_lp(lp: LinearProgram) -> PortfolioSolution:
    """Primal simplex with Bland's rule on the slack-augmented tableau.

    Returns the optimal vertex (raw variable values keyed by variable name)
    or unbounded status. With nonnegative right-hand sides the slack basis
    is feasible, so the infeasible status is unreachable here; it exists for
    schema completeness.

    Raises:
        SolverFailureError: iteration cap exceeded (unreachable under
            Bland's rule; kept as a hard stop).
    """
    A = lp.constraint_matrix
    b = lp.rhs
    c = lp.objective
    m, n = A.shape

    # tableau: m constraint rows + objective row; columns = n vars, m slacks, rhs
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n : n + m] = np.eye(m)
    T[:m, -1] = b
    T[m, :n] = -c
    basis = list(range(n, n + m))

    for _ in range(10 * (m + n + m)):
        # Bland: entering variable = lowest index with an improving reduced cost
        enter = -1
        for j in range(n + m):
            if T[m, j] < -SIMPLEX_TOL:
                enter = j
                break
        if enter < 0:
            x = np.zeros(n + m)
            for i, bv in enumerate(basis):
                x[bv] = T[i, -1]
            acres = {name: float(v) for name, v in zip(lp.variable_names, x[:n])}
            slack = b - A @ x[:n]
            binding = tuple(
                name
                for name, sl, rhs in zip(lp.constraint_names, slack, b)
                if sl <= 1e-6 * (1.0 + abs(rhs))
            )
            return PortfolioSolution(
                acres=acres,
                objective_value=float(T[m, -1]),
                binding=binding,
                status=STATUS_OPTIMAL,
            )
        # ratio test; ties again by lowest basis variable index (Bland)
        leave = -1
        best = None
        for i in range(m):
            if T[i, enter] > SIMPLEX_TOL:
                ratio = T[i, -1] / T[i, enter]
                if (
                    best is None
                    or ratio < best - SIMPLEX_TOL
                    or (abs(ratio - best) <= SIMPLEX_TOL and basis[i] < basis[leave])
                ):
                    best = ratio
                    leave = i
        if leave < 0:
            return PortfolioSolution(
                acres={name: float("nan") for name in lp.variable_names},
                objective_value=float("inf"),
                binding=(),
                status=STATUS_UNBOUNDED,
            )
        pivot = T[leave, enter]
        T[leave] /= pivot
        for i in range(m + 1):
            if i != leave and T[i, enter] != 0.0:
                T[i] -= T[i, enter] * T[leave]
        basis[leave] = enter

    raise SolverFailureError("simplex exceeded its iteration cap")


def solve_portfolio(scenario: FarmScenario) -> PortfolioSolution:
    """build_lp + solve_lp with acres mapped back to crop names."""
    return solve_lp(build_lp(scenario))


def forecast_to_price(forecast_values, method: str = "mean", week: int | None = None) -> float:
    """Collapse a forecast curve into the single selling price for the LP.

    ``mean`` averages the whole horizon; ``sale_week`` takes the price at a
    specific 1-based week of the horizon.
    """
    values = np.asarray(forecast_values, dtype=float)
    if len(values) == 0:
        raise ParameterError("forecast is empty")
    if method == "mean":
        return float(np.mean(values))
    if method == "sale_week":
        if week is None or not (1 <= week <= len(values)):
            raise ParameterError(
                f"sale_week must be in [1, {len(values)}], got {week}"
            )
        return float(values[week - 1])
    raise ParameterError(f"unknown price method {method!r}")


def scenario_from_dict(
    doc: dict, forecast_prices: dict[str, float] | None = None
) -> FarmScenario:
    """Build a FarmScenario from the scenario JSON document.

    Crops lacking ``forecast_price_per_kg_inr`` take their price from
    ``forecast_prices`` (the champion-model fill computed by the caller).
    """
    crops = []
    for entry in doc.get("crops", []):
        name = entry["name"]
        forecast_price = entry.get("forecast_price_per_kg_inr")
        if forecast_price is None:
            if not forecast_prices or name not in forecast_prices:
                raise ParameterError(
                    f"crop {name!r} has no forecast price and none was supplied"
                )
            forecast_price = forecast_prices[name]
        crops.append(
            CropEconomics(
                crop=name,
                cost_per_acre=float(entry["cost_per_acre_inr"]),
                yield_per_acre=float(entry["yield_kg_per_acre"]),
                net_profit_per_kg=net_profit_per_kg(
                    float(forecast_price), float(entry["cost_price_per_kg_inr"])
                ),
            )
        )
    return FarmScenario(
        crops=tuple(crops),
        total_land=float(doc["total_land_acres"]),
        budget=float(doc["budget_inr"]),
        storage=float(doc["storage_kg"]),
    )


def load_scenario(path, forecast_prices: dict[str, float] | None = None) -> FarmScenario:
    with open(path) as fh:
        return scenario_from_dict(json.load(fh), forecast_prices)
