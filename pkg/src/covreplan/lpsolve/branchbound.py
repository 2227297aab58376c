"""Branch-and-bound wrapper restoring integrality when a relaxation is fractional.

Branching rule: most-fractional integer-marked variable, ties by lowest
index; depth-first with a best-bound restart every 256 nodes.  Nodes are
bound-override dictionaries, so no model copies are made.
"""

from __future__ import annotations

import math
import time

import numpy as np

from .model import INT_TOL, LpModel, LpSolution, Status
from .simplex import solve_lp

RESTART_EVERY = 256


def _most_fractional(model: LpModel, values: np.ndarray) -> int | None:
    best, best_frac = None, INT_TOL
    for i in sorted(model.integer_marks):
        frac = values[i] - math.floor(values[i])
        score = 0.5 - abs(0.5 - frac)  # distance to nearest integer
        if score > best_frac:
            best_frac = score
            best = i
    return best


def solve_integral(model: LpModel, deadline: float | None = None) -> LpSolution:
    """Best integral solution found by branch and bound.

    Status is OPTIMAL only when the search completed; DEADLINE_EXCEEDED
    returns the incumbent if one exists (empty values otherwise).
    """
    t_end = None if deadline is None else time.monotonic() + deadline

    def remaining() -> float | None:
        if t_end is None:
            return None
        return max(0.0, t_end - time.monotonic())

    root = solve_lp(model, remaining())
    if root.status in (Status.INFEASIBLE, Status.UNBOUNDED):
        return root
    if root.status is Status.OPTIMAL and root.is_integral:
        return root
    if root.status is Status.DEADLINE_EXCEEDED:
        return root

    incumbent: LpSolution | None = None
    incumbent_obj = math.inf
    # node: (parent_bound, overrides dict)
    stack: list[tuple[float, dict[int, tuple[float, float]]]] = []
    var = _most_fractional(model, root.values)
    assert var is not None
    v = root.values[var]
    stack.append((root.objective_value, {var: (math.ceil(v), model.ub[var])}))
    stack.append((root.objective_value, {var: (model.lb[var], math.floor(v))}))
    nodes = 0
    timed_out = False

    while stack:
        rem = remaining()
        if rem is not None and rem <= 0.0:
            timed_out = True
            break
        nodes += 1
        if nodes % RESTART_EVERY == 0:
            stack.sort(key=lambda item: -item[0])  # best bound to the top
        bound, overrides = stack.pop()
        if bound >= incumbent_obj - 1e-9:
            continue
        sol = solve_lp(model, rem, overrides)
        if sol.status is Status.DEADLINE_EXCEEDED:
            timed_out = True
            break
        if sol.status is not Status.OPTIMAL:
            continue  # infeasible subproblem
        if sol.objective_value >= incumbent_obj - 1e-9:
            continue
        if sol.is_integral:
            incumbent = sol
            incumbent_obj = sol.objective_value
            continue
        var = _most_fractional(model, sol.values)
        if var is None:
            incumbent = sol
            incumbent_obj = sol.objective_value
            continue
        v = sol.values[var]
        lo = overrides.get(var, (model.lb[var], model.ub[var]))
        up_n = dict(overrides)
        up_n[var] = (math.ceil(v), lo[1])
        dn_n = dict(overrides)
        dn_n[var] = (lo[0], math.floor(v))
        stack.append((sol.objective_value, up_n))
        stack.append((sol.objective_value, dn_n))

    if incumbent is not None:
        status = Status.DEADLINE_EXCEEDED if timed_out else Status.OPTIMAL
        return LpSolution(status, incumbent.values, incumbent.objective_value,
                          True, incumbent.names, incumbent.iterations, nodes)
    if timed_out:
        return LpSolution(Status.DEADLINE_EXCEEDED, np.empty(0), math.nan,
                          False, list(model.names), 0, nodes)
    return LpSolution(Status.INFEASIBLE, np.empty(0), math.nan, False,
                      list(model.names), 0, nodes)
