"""Self-contained LP solver: revised simplex plus branch and bound.

The simplex eta-file kernels come from a compiled extension when available
(``covreplan.lpsolve.kernels_compiled`` is True) with a numpy fallback.
"""

from ._kern import IS_COMPILED as kernels_compiled
from .branchbound import solve_integral
from .model import EQ, GE, LE, LpModel, LpSolution, Status
from .simplex import solve_lp

__all__ = [
    "EQ", "GE", "LE", "LpModel", "LpSolution", "Status",
    "solve_lp", "solve_integral", "kernels_compiled",
]
