"""LP construction and the simplex solver, checked against vertex enumeration."""

import itertools
import json

import numpy as np
import pytest

from cropcast.exceptions import ParameterError
from cropcast.portfolio import (
    CropEconomics,
    FarmScenario,
    LinearProgram,
    build_lp,
    forecast_to_price,
    net_profit_per_kg,
    scenario_from_dict,
    solve_lp,
    solve_portfolio,
)

SAMPLE_SCENARIO = FarmScenario(
    crops=(
        CropEconomics("Rice", 22500, 3000, 4.50),
        CropEconomics("Maize", 15000, 3000, 7.00),
        CropEconomics("Jowar", 7000, 1500, 10.34),
        CropEconomics("Urad", 10600, 350, 34.72),
    ),
    total_land=20,
    budget=200000,
    storage=40000,
)

EXPECTED_ACRES = {"Rice": 0.0, "Maize": 7.1918, "Jowar": 12.1233, "Urad": 0.6849}
EXPECTED_OBJECTIVE = 347382.9


def lp_of(c, A, b):
    c = np.asarray(c, float)
    A = np.asarray(A, float)
    b = np.asarray(b, float)
    return LinearProgram(
        objective=c,
        constraint_matrix=A,
        rhs=b,
        constraint_names=tuple(f"row{i}" for i in range(len(b))),
        variable_names=tuple(f"x{j}" for j in range(len(c))),
    )


def enumerate_vertices(c, A, b, tol=1e-9):
    """Brute-force oracle: visit every basic feasible point of
    {A x <= b, x >= 0} and return (best objective, list of optimal vertices)."""
    A = np.asarray(A, float)
    b = np.asarray(b, float)
    c = np.asarray(c, float)
    m, n = A.shape
    G = np.vstack([A, -np.eye(n)])
    h = np.concatenate([b, np.zeros(n)])
    best = None
    best_vertices = []
    for rows in itertools.combinations(range(m + n), n):
        M = G[list(rows)]
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        x = np.linalg.solve(M, h[list(rows)])
        if np.any(G @ x > h + 1e-7):
            continue
        value = float(c @ x)
        if best is None or value > best + tol:
            best = value
            best_vertices = [x]
        elif abs(value - best) <= tol:
            if not any(np.allclose(x, v, atol=1e-7) for v in best_vertices):
                best_vertices.append(x)
    return best, best_vertices


class TestNetProfit:
    def test_rice_magnitude(self):
        assert net_profit_per_kg(34.00, 29.50) == pytest.approx(4.50)

    def test_zero(self):
        assert net_profit_per_kg(25.0, 25.0) == 0.0

    def test_losses_representable(self):
        assert net_profit_per_kg(20.0, 25.0) == -5.0


class TestBuildLp:
    def test_sample_problem_coefficients(self):
        lp = build_lp(SAMPLE_SCENARIO)
        assert list(lp.objective) == [13500.0, 21000.0, 15510.0, 12152.0]
        assert list(lp.rhs) == [200000.0, 40000.0, 20.0]
        assert lp.constraint_names == ("budget", "storage", "land")
        assert np.array_equal(
            lp.constraint_matrix,
            np.array(
                [
                    [22500, 15000, 7000, 10600],
                    [3000, 3000, 1500, 350],
                    [1, 1, 1, 1],
                ],
                dtype=float,
            ),
        )

    def test_single_crop_shape(self):
        scenario = FarmScenario(
            crops=(CropEconomics("Rice", 100, 50, 2.0),),
            total_land=1, budget=1e9, storage=1e9,
        )
        lp = build_lp(scenario)
        assert lp.constraint_matrix.shape == (3, 1)
        assert lp.variable_names == ("Rice",)

    def test_crop_permutation_permutes_columns(self):
        lp = build_lp(SAMPLE_SCENARIO)
        reordered = FarmScenario(
            crops=SAMPLE_SCENARIO.crops[::-1],
            total_land=20, budget=200000, storage=40000,
        )
        lp2 = build_lp(reordered)
        assert np.array_equal(lp2.objective, lp.objective[::-1])
        assert np.array_equal(lp2.constraint_matrix, lp.constraint_matrix[:, ::-1])


class TestSolveLp:
    def test_one_dimensional(self):
        sol = solve_lp(lp_of([1.0], [[1.0]], [5.0]))
        assert sol.status == "optimal"
        assert sol.acres["x0"] == pytest.approx(5.0)
        assert sol.objective_value == pytest.approx(5.0)

    def test_two_variable_vertex(self):
        # vertices (0,0),(4,0),(0,2),(3,1) give objectives 0,12,4,11
        sol = solve_lp(lp_of([3.0, 2.0], [[1.0, 1.0], [1.0, 3.0]], [4.0, 6.0]))
        assert sol.status == "optimal"
        assert sol.acres["x0"] == pytest.approx(4.0, abs=1e-9)
        assert sol.acres["x1"] == pytest.approx(0.0, abs=1e-9)
        assert sol.objective_value == pytest.approx(12.0, abs=1e-9)

    def test_unbounded(self):
        sol = solve_lp(lp_of([1.0, 0.0], [[-1.0, 1.0]], [1.0]))
        assert sol.status == "unbounded"

    def test_negative_rhs_rejected(self):
        with pytest.raises(ParameterError):
            lp_of([1.0], [[1.0]], [-1.0])

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ParameterError):
            LinearProgram(
                objective=np.array([1.0, 2.0]),
                constraint_matrix=np.array([[1.0]]),
                rhs=np.array([1.0]),
                constraint_names=("row0",),
                variable_names=("x0", "x1"),
            )

    def test_degenerate_ratio_ties_are_handled(self):
        # both rows tie in the ratio test at the first pivot
        sol = solve_lp(lp_of([1.0, 1.0], [[1.0, 0.0], [1.0, 1.0]], [2.0, 2.0]))
        assert sol.status == "optimal"
        assert sol.objective_value == pytest.approx(2.0, abs=1e-9)


class TestAgainstVertexEnumeration:
    def test_hundred_random_instances(self):
        rng = np.random.default_rng(2024)
        checked = 0
        for _ in range(100):
            n = int(rng.integers(1, 5))
            m = int(rng.integers(1, 6))
            A = rng.uniform(0.0, 4.0, size=(m, n))
            for j in range(n):  # keep the polytope bounded
                if A[:, j].max() < 0.5:
                    A[int(rng.integers(0, m)), j] = rng.uniform(0.5, 4.0)
            b = rng.uniform(1.0, 10.0, size=m)
            c = rng.uniform(-5.0, 5.0, size=n)
            best, vertices = enumerate_vertices(c, A, b)
            sol = solve_lp(lp_of(c, A, b))
            assert sol.status == "optimal"
            assert sol.objective_value == pytest.approx(best, abs=1e-6)
            if len(vertices) == 1:  # unique optimum: allocations must agree too
                x = np.array([sol.acres[f"x{j}"] for j in range(n)])
                assert np.allclose(x, vertices[0], atol=1e-6)
            checked += 1
        assert checked == 100

    def test_constructed_unbounded_instances(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            n = int(rng.integers(2, 5))
            m = int(rng.integers(1, 6))
            A = rng.uniform(0.2, 3.0, size=(m, n))
            j = int(rng.integers(0, n))
            A[:, j] = -rng.uniform(0.0, 1.0, size=m)  # x_j is a free ray
            c = rng.uniform(0.1, 3.0, size=n)
            b = rng.uniform(1.0, 10.0, size=m)
            sol = solve_lp(lp_of(c, A, b))
            assert sol.status == "unbounded"


class TestSampleProblem:
    def test_allocation_and_objective(self):
        sol = solve_portfolio(SAMPLE_SCENARIO)
        assert sol.status == "optimal"
        for crop, expected in EXPECTED_ACRES.items():
            assert sol.acres[crop] == pytest.approx(expected, abs=0.005)
        assert sol.objective_value == pytest.approx(EXPECTED_OBJECTIVE, abs=1.0)

    def test_all_three_constraints_binding(self):
        sol = solve_portfolio(SAMPLE_SCENARIO)
        assert set(sol.binding) == {"budget", "storage", "land"}

    def test_solution_satisfies_constraints(self):
        sol = solve_portfolio(SAMPLE_SCENARIO)
        lp = build_lp(SAMPLE_SCENARIO)
        x = np.array([sol.acres[name] for name in lp.variable_names])
        assert np.all(lp.constraint_matrix @ x <= lp.rhs * (1 + 1e-9) + 1e-6)
        recomputed = sum(
            e.yield_per_acre * e.net_profit_per_kg * sol.acres[e.crop]
            for e in SAMPLE_SCENARIO.crops
        )
        assert sol.objective_value == pytest.approx(recomputed, abs=1e-6)

    def test_rice_exclusion_is_an_outcome(self):
        sol = solve_portfolio(SAMPLE_SCENARIO)
        assert sol.acres["Rice"] == pytest.approx(0.0, abs=1e-9)


class TestScenarioProperties:
    def test_slack_budget_not_binding(self):
        scenario = FarmScenario(
            crops=SAMPLE_SCENARIO.crops,
            total_land=20,
            budget=10 * 20 * 22500,
            storage=40000,
        )
        sol = solve_portfolio(scenario)
        assert "budget" not in sol.binding

    def test_all_negative_profits_plant_nothing(self):
        scenario = FarmScenario(
            crops=(
                CropEconomics("A", 100, 50, -1.0),
                CropEconomics("B", 200, 80, -0.5),
            ),
            total_land=10, budget=10000, storage=5000,
        )
        sol = solve_portfolio(scenario)
        assert all(v == 0.0 for v in sol.acres.values())
        assert sol.objective_value == 0.0

    def test_objective_scaling_keeps_allocation(self):
        base = solve_portfolio(SAMPLE_SCENARIO)
        scaled = FarmScenario(
            crops=tuple(
                CropEconomics(e.crop, e.cost_per_acre, e.yield_per_acre,
                              e.net_profit_per_kg * 3.0)
                for e in SAMPLE_SCENARIO.crops
            ),
            total_land=20, budget=200000, storage=40000,
        )
        sol = solve_portfolio(scaled)
        for crop in EXPECTED_ACRES:
            assert sol.acres[crop] == pytest.approx(base.acres[crop], abs=1e-9)
        assert sol.objective_value == pytest.approx(base.objective_value * 3.0, rel=1e-9)

    def test_adding_unprofitable_crop_never_hurts(self):
        base = solve_portfolio(SAMPLE_SCENARIO)
        extended = FarmScenario(
            crops=SAMPLE_SCENARIO.crops + (CropEconomics("Loser", 5000, 1000, -2.0),),
            total_land=20, budget=200000, storage=40000,
        )
        sol = solve_portfolio(extended)
        assert sol.objective_value >= base.objective_value - 1e-9

    def test_crop_permutation_invariance(self):
        base = solve_portfolio(SAMPLE_SCENARIO)
        permuted = FarmScenario(
            crops=SAMPLE_SCENARIO.crops[::-1],
            total_land=20, budget=200000, storage=40000,
        )
        sol = solve_portfolio(permuted)
        assert sol.objective_value == pytest.approx(base.objective_value, abs=1e-9)
        for crop in EXPECTED_ACRES:
            assert sol.acres[crop] == pytest.approx(base.acres[crop], abs=1e-9)


class TestScenarioJson:
    DOC = {
        "total_land_acres": 20,
        "budget_inr": 200000,
        "storage_kg": 40000,
        "crops": [
            {
                "name": "Rice",
                "cost_per_acre_inr": 22500,
                "yield_kg_per_acre": 3000,
                "cost_price_per_kg_inr": 29.5,
                "forecast_price_per_kg_inr": 34.0,
            },
            {
                "name": "Maize",
                "cost_per_acre_inr": 15000,
                "yield_kg_per_acre": 3000,
                "cost_price_per_kg_inr": 15.0,
            },
        ],
    }

    def test_forecast_price_fill(self):
        scenario = scenario_from_dict(self.DOC, {"Maize": 22.0})
        maize = scenario.crops[1]
        assert maize.net_profit_per_kg == pytest.approx(7.0)

    def test_missing_price_without_fill_rejected(self):
        with pytest.raises(ParameterError, match="Maize"):
            scenario_from_dict(self.DOC)

    def test_solution_json_shape(self):
        doc = json.loads(solve_portfolio(SAMPLE_SCENARIO).to_json())
        assert set(doc) == {"status", "objective_inr", "acres", "binding"}
        assert doc["status"] == "optimal"

    def test_budget_must_be_positive(self):
        bad = dict(self.DOC, budget_inr=0)
        with pytest.raises(ParameterError):
            scenario_from_dict(bad, {"Maize": 22.0})


class TestForecastToPrice:
    def test_mean(self):
        assert forecast_to_price([1.0, 2.0, 3.0]) == 2.0

    def test_sale_week(self):
        assert forecast_to_price([1.0, 2.0, 3.0], "sale_week", week=3) == 3.0

    def test_sale_week_out_of_range(self):
        with pytest.raises(ParameterError):
            forecast_to_price([1.0], "sale_week", week=2)
