"""Directed path-flow rows and maximal axis runs over an IOP.

These structures exist only to emit the per-cell inequality rows of the rank
optimization models: for each cell i, the left-flow row evaluates to
``x_H[i] - x_H[left(i)]`` (the missing-neighbor term is dropped at borders),
so a constraint row ``row - y <= 0`` lower-bounds the endpoint indicator.
"""

from __future__ import annotations

from dataclasses import dataclass

from .worldmodel import Iop

HORIZONTAL = "H"
VERTICAL = "V"

# A sparse row is a list of (cell_index, coefficient) pairs.
SparseRow = list[tuple[int, float]]


@dataclass
class FlowMatrices:
    """One sparse inequality row per cell per direction (left/right/top/bottom)."""

    a_l: list[SparseRow]
    a_r: list[SparseRow]
    a_t: list[SparseRow]
    a_b: list[SparseRow]


@dataclass(frozen=True)
class Run:
    """Maximal contiguous straight segment of IOP cells along one axis."""

    axis: str  # HORIZONTAL or VERTICAL
    cells: tuple[int, ...]  # IOP indices, in axis order (left->right / top->bottom)


def build_flow_matrices(iop: Iop) -> FlowMatrices:
    """Per-cell rows encoding orientation differences with each neighbor."""
    n = iop.n

    def rows(neighbor) -> list[SparseRow]:
        out: list[SparseRow] = []
        for i in range(n):
            j = int(neighbor[i])
            if j < 0:
                out.append([(i, 1.0)])  # border: no incoming flow term
            else:
                out.append([(i, 1.0), (j, -1.0)])
        return out

    return FlowMatrices(
        a_l=rows(iop.left),
        a_r=rows(iop.right),
        a_t=rows(iop.up),
        a_b=rows(iop.down),
    )


def runs(iop: Iop, axis: str) -> list[Run]:
    """Maximal runs of contiguous IOP cells along the given axis.

    Every cell appears in exactly one run per axis; single cells form runs of
    length one.
    """
    if axis == HORIZONTAL:
        prev, nxt = iop.left, iop.right
    elif axis == VERTICAL:
        prev, nxt = iop.up, iop.down
    else:
        raise ValueError(f"unknown axis {axis!r}")
    out: list[Run] = []
    for i in range(iop.n):
        if prev[i] >= 0:
            continue  # not a run head
        chain = [i]
        j = int(nxt[i])
        while j >= 0:
            chain.append(j)
            j = int(nxt[j])
        out.append(Run(axis, tuple(chain)))
    return out
