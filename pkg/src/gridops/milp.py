"""Best-first branch and bound over the simplex in :mod:`gridops.lp`.

Only binary variables are branched.  The search is deterministic: nodes are
ordered by (relaxation bound, creation sequence), the branch variable is the
binary closest to 0.5 (lowest index on ties), and the zero branch is created
first so it wins ties.
"""

from __future__ import annotations

import heapq

import numpy as np

from .lp import LinearProgram, Solution, solve_lp

INT_TOL = 1e-6
GAP_TOL = 1e-6
NODE_LIMIT = 200_000


def _fractional(x: np.ndarray, binaries: list[int]) -> int | None:
    """Most fractional binary index, or None if all are integral."""
    best_j, best_d = None, INT_TOL
    for j in binaries:
        d = abs(x[j] - round(x[j]))
        if d > best_d + 1e-12:
            best_j, best_d = j, d
        elif best_j is not None and abs(d - best_d) <= 1e-12:
            pass  # keep the lower index
    return best_j


def solve_milp(lp: LinearProgram,
               fixed: dict[int, float] | None = None,
               node_limit: int = NODE_LIMIT) -> Solution:
    """Solve a mixed-binary program.

    ``fixed`` pins variables to values before the search (used for must-run
    units and carried-over commitments).  Hitting ``node_limit`` returns the
    incumbent with status ``node_limit``; with no incumbent the status is
    ``infeasible``.
    """
    binaries = lp.binary_indices
    base: dict[int, tuple[float, float]] = {}
    if fixed:
        for j, val in fixed.items():
            base[j] = (val, val)

    root = solve_lp(lp, var_bounds=base or None)
    if root.status != "optimal":
        return root

    seq = 0
    heap: list[tuple[float, int, dict[int, tuple[float, float]], Solution]] = []
    heapq.heappush(heap, (root.objective, seq, base, root))
    incumbent: Solution | None = None
    nodes = 1
    branches = 0

    while heap:
        bound, _, bounds, relax = heapq.heappop(heap)
        if incumbent is not None and bound >= incumbent.objective - GAP_TOL:
            continue
        j = _fractional(relax.x, [b for b in binaries if b not in bounds or
                                  bounds[b][0] != bounds[b][1]])
        if j is None:
            if incumbent is None or relax.objective < incumbent.objective - GAP_TOL:
                incumbent = relax
            continue
        branches += 1
        for val in (0.0, 1.0):
            if nodes >= node_limit:
                break
            child = dict(bounds)
            child[j] = (val, val)
            sol = solve_lp(lp, var_bounds=child)
            nodes += 1
            seq += 1
            if sol.status != "optimal":
                continue
            if incumbent is not None and sol.objective >= incumbent.objective - GAP_TOL:
                continue
            heapq.heappush(heap, (sol.objective, seq, child, sol))
        if nodes >= node_limit:
            status = "node_limit"
            if incumbent is None:
                return Solution(status="infeasible", nodes=nodes, branches=branches)
            out = incumbent
            return Solution(status=status, x=out.x, objective=out.objective,
                            duals=out.duals, nodes=nodes, branches=branches)

    if incumbent is None:
        return Solution(status="infeasible", nodes=nodes, branches=branches)
    x = incumbent.x.copy()
    for j in binaries:
        x[j] = round(x[j])
    return Solution(status="optimal", x=x, objective=incumbent.objective,
                    duals=incumbent.duals, nodes=nodes, branches=branches)
