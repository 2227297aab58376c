"""Linear program model container and solution record."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

LE, EQ, GE = "<=", "=", ">="

FEAS_TOL = 1e-7
INT_TOL = 1e-6


class Status(Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"
    DEADLINE_EXCEEDED = "DeadlineExceeded"


class LpModel:
    """Minimization LP/MILP: named bounded variables, linear constraints.

    Variables are addressed by dense index (creation order); the fixed order
    keeps solver pivoting deterministic.
    """

    def __init__(self):
        self.names: list[str] = []
        self.lb: list[float] = []
        self.ub: list[float] = []
        self.obj: list[float] = []
        self.integer_marks: set[int] = set()
        # constraint: (list[(var_idx, coef)], relation, rhs)
        self.constraints: list[tuple[list[tuple[int, float]], str, float]] = []
        self._by_name: dict[str, int] = {}

    @property
    def nvars(self) -> int:
        return len(self.names)

    def add_var(self, name: str, lb: float = 0.0, ub: float = math.inf,
                obj: float = 0.0, integer: bool = False) -> int:
        if name in self._by_name:
            raise ValueError(f"duplicate variable name {name!r}")
        if lb > ub:
            raise ValueError(f"variable {name!r}: lower bound exceeds upper")
        idx = len(self.names)
        self.names.append(name)
        self.lb.append(lb)
        self.ub.append(ub)
        self.obj.append(obj)
        if integer:
            self.integer_marks.add(idx)
        self._by_name[name] = idx
        return idx

    def var_index(self, name: str) -> int:
        return self._by_name[name]

    def add_constraint(self, coeffs: list[tuple[int, float]], rel: str,
                       rhs: float) -> None:
        if rel not in (LE, EQ, GE):
            raise ValueError(f"unknown relation {rel!r}")
        for idx, _ in coeffs:
            if not 0 <= idx < len(self.names):
                raise ValueError(f"constraint references undeclared variable {idx}")
        self.constraints.append((coeffs, rel, rhs))

    def dump_lp(self) -> str:
        """LP-style text dump (min / st / bounds / int) for external cross-checks."""
        def term(c, name, first):
            sign = "-" if c < 0 else ("" if first else "+")
            mag = abs(c)
            return f"{sign} {mag:g} {name} ".replace("  ", " ")

        out = ["min"]
        line = "  obj: "
        first = True
        for i, c in enumerate(self.obj):
            if c != 0:
                line += term(c, self.names[i], first)
                first = False
        if first:
            line += "0"
        out.append(line.rstrip())
        out.append("st")
        for k, (coeffs, rel, rhs) in enumerate(self.constraints):
            line = f"  c{k}: "
            first = True
            for idx, c in coeffs:
                line += term(c, self.names[idx], first)
                first = False
            line += f"{rel} {rhs:g}"
            out.append(line)
        out.append("bounds")
        for i, name in enumerate(self.names):
            out.append(f"  {self.lb[i]:g} <= {name} <= {self.ub[i]:g}")
        if self.integer_marks:
            out.append("int")
            out.append("  " + " ".join(self.names[i]
                                       for i in sorted(self.integer_marks)))
        return "\n".join(out) + "\n"


@dataclass
class LpSolution:
    status: Status
    values: np.ndarray  # per-variable, empty when no solution is available
    objective_value: float
    is_integral: bool
    names: list[str] = field(default_factory=list)
    iterations: int = 0
    nodes: int = 0  # branch-and-bound nodes explored (0 for plain LP solves)

    def __getitem__(self, name: str) -> float:
        return float(self.values[self.names.index(name)])

    def value_map(self) -> dict[str, float]:
        return {n: float(v) for n, v in zip(self.names, self.values)}


def integrality(model: LpModel, values: np.ndarray, tol: float = INT_TOL) -> bool:
    for i in sorted(model.integer_marks):
        if abs(values[i] - round(values[i])) > tol:
            return False
    return True
