"""Branch and bound checked by exhaustive enumeration over binaries."""

from __future__ import annotations

import itertools

import numpy as np
import pytest

from gridops.lp import GE, INF, LE, LinearProgram, solve_lp
from gridops.milp import solve_milp


def enumerate_best(lp: LinearProgram, fixed=None):
    """Oracle: try every binary assignment, solve the remaining LP."""
    binaries = lp.binary_indices
    best = None
    for combo in itertools.product([0.0, 1.0], repeat=len(binaries)):
        bounds = {j: (v, v) for j, v in zip(binaries, combo)}
        if fixed:
            skip = False
            for j, v in fixed.items():
                if j in bounds and bounds[j][0] != v:
                    skip = True
                bounds[j] = (v, v)
            if skip:
                continue
        sol = solve_lp(lp, var_bounds=bounds)
        if sol.status == "optimal" and (best is None or sol.objective < best - 1e-9):
            best = sol.objective
    return best


def knapsack_lp():
    # Pick items maximizing value under a weight cap.
    values = [6.0, 10.0, 12.0, 7.0]
    weights = [1.0, 2.0, 3.0, 2.0]
    lp = LinearProgram()
    for k, v in enumerate(values):
        lp.add_var(f"z{k}", 0, 1, obj=-v, binary=True)
    lp.add_constr("cap", [(k, w) for k, w in enumerate(weights)], LE, 5.0)
    return lp


def test_knapsack():
    lp = knapsack_lp()
    sol = solve_milp(lp)
    assert sol.status == "optimal"
    assert sol.objective == pytest.approx(enumerate_best(lp), abs=1e-6)
    assert sol.objective == pytest.approx(-23.0, abs=1e-6)  # items 1 and 2
    assert all(abs(v - round(v)) < 1e-9 for v in sol.x)


def test_fixed_binaries_respected():
    lp = knapsack_lp()
    fixed = {2: 0.0}
    sol = solve_milp(lp, fixed=fixed)
    assert sol.x[2] == 0.0
    assert sol.objective == pytest.approx(enumerate_best(lp, fixed), abs=1e-6)


def test_integral_relaxation_skips_branching():
    lp = LinearProgram()
    z = lp.add_var("z", 0, 1, obj=1.0, binary=True)
    p = lp.add_var("p", 0, 10, obj=0.5)
    lp.add_constr("need", [(p, 1.0)], GE, 4.0)
    # p <= 4z with p >= 4 forces z = 1 already in the relaxation.
    lp.add_constr("link", [(p, 1.0), (z, -4.0)], LE, 0.0)
    sol = solve_milp(lp)
    assert sol.status == "optimal"
    assert sol.branches == 0
    assert sol.objective == pytest.approx(3.0, abs=1e-9)


def test_infeasible_program():
    lp = LinearProgram()
    z = lp.add_var("z", 0, 1, obj=1.0, binary=True)
    lp.add_constr("hi", [(z, 1.0)], GE, 0.4)
    lp.add_constr("lo", [(z, 1.0)], LE, 0.6)
    # No integral point in [0.4, 0.6].
    assert solve_milp(lp).status == "infeasible"


def test_node_limit_reports_distinct_status():
    lp = knapsack_lp()
    sol = solve_milp(lp, node_limit=2)
    assert sol.status in ("node_limit", "infeasible")


def test_random_mixed_programs_match_enumeration():
    rng = np.random.default_rng(11)
    for trial in range(25):
        nb = int(rng.integers(2, 5))
        nc = int(rng.integers(1, 3))
        m = int(rng.integers(1, 5))
        lp = LinearProgram()
        for k in range(nb):
            lp.add_var(f"z{k}", 0, 1, obj=round(float(rng.normal()), 3), binary=True)
        for k in range(nc):
            lp.add_var(f"x{k}", 0, 3, obj=round(float(rng.normal()), 3))
        n = nb + nc
        for i in range(m):
            coeffs = [(j, round(float(rng.normal()), 3)) for j in range(n)]
            rhs = round(float(rng.normal(scale=2)), 3)
            lp.add_constr(f"r{i}", coeffs, LE if rng.random() < 0.7 else GE, rhs)
        sol = solve_milp(lp)
        best = enumerate_best(lp)
        if best is None:
            assert sol.status == "infeasible", f"trial {trial}"
        else:
            assert sol.status == "optimal", f"trial {trial}"
            assert sol.objective == pytest.approx(best, abs=1e-6), f"trial {trial}"


def test_deterministic_repeat():
    lp = knapsack_lp()
    a = solve_milp(lp)
    b = solve_milp(lp)
    assert np.array_equal(a.x, b.x)
    assert a.nodes == b.nodes
