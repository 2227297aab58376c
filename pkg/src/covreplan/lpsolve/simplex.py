"""Bounded-variable revised primal simplex with an eta-file basis.

Design:
  - columns: structural variables, then one slack per row, then one
    artificial per row (artificials are bound-fixed to zero except while a
    row is infeasible during phase 1);
  - basis factorization: sparse LU (scipy splu) refreshed periodically,
    product-form eta updates in between (kernels compiled or numpy);
  - pricing: devex reference weights, switching to Bland's rule after a
    stall to guarantee termination under degeneracy;
  - warm starts: an optional 0/1 point snaps nonbasic variables to the
    matching bound, so a feasible guess skips phase 1 entirely;
  - determinism: fixed variable order, fixed tie-breaking.
"""

from __future__ import annotations

import math
import time

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from . import _kern
from .model import FEAS_TOL, LE, EQ, GE, LpModel, LpSolution, Status, integrality

NB_LOWER, NB_UPPER, BASIC, NB_FREE = 0, 1, 2, 3

ETA_CAP = 64
OPT_TOL = 1e-9
PIV_TOL = 1e-9
BLAND_TRIGGER = 600
MAX_ITER = 500_000


class _Deadline:
    def __init__(self, seconds: float | None):
        self.t_end = None if seconds is None else time.monotonic() + seconds

    def hit(self) -> bool:
        return self.t_end is not None and time.monotonic() > self.t_end


class SimplexSolver:
    def __init__(self, model: LpModel,
                 bound_overrides: dict[int, tuple[float, float]] | None = None,
                 warm: np.ndarray | None = None):
        self.model = model
        self.warm = None if warm is None else np.asarray(warm, dtype=float)
        nv = model.nvars
        m = len(model.constraints)
        self.nv, self.m = nv, m
        self.N = nv + 2 * m  # structurals + slacks + artificials

        lb = np.array(model.lb, dtype=float)
        ub = np.array(model.ub, dtype=float)
        if bound_overrides:
            for idx, (lo, hi) in bound_overrides.items():
                lb[idx], ub[idx] = lo, hi
        slack_lb = np.empty(m)
        slack_ub = np.empty(m)
        b = np.empty(m)
        rows_i: list[int] = []
        cols_i: list[int] = []
        vals: list[float] = []
        for k, (coeffs, rel, rhs) in enumerate(model.constraints):
            b[k] = rhs
            acc: dict[int, float] = {}
            for idx, c in coeffs:
                acc[idx] = acc.get(idx, 0.0) + c
            for idx, c in acc.items():
                rows_i.append(k)
                cols_i.append(idx)
                vals.append(c)
            rows_i.append(k)
            cols_i.append(nv + k)
            vals.append(1.0)
            if rel == LE:
                slack_lb[k], slack_ub[k] = 0.0, math.inf
            elif rel == GE:
                slack_lb[k], slack_ub[k] = -math.inf, 0.0
            else:
                slack_lb[k], slack_ub[k] = 0.0, 0.0
        for k in range(m):  # artificial identity columns
            rows_i.append(k)
            cols_i.append(nv + m + k)
            vals.append(1.0)
        self.A = sparse.csc_matrix(
            (vals, (rows_i, cols_i)), shape=(m, self.N))
        self.AT = self.A.T.tocsr()
        self.b = b
        self.lb = np.concatenate([lb, slack_lb, np.zeros(m)])
        self.ub = np.concatenate([ub, slack_ub, np.zeros(m)])
        self.cost2 = np.concatenate([np.array(model.obj, dtype=float),
                                     np.zeros(2 * m)])
        self.cost1 = np.zeros(self.N)

        self.vstat = np.zeros(self.N, dtype=np.int8)
        self.xval = np.zeros(self.N)
        self.basis = np.zeros(m, dtype=np.int64)
        self.basis_pos = np.full(self.N, -1, dtype=np.int64)
        self.lu = None
        self.eta_d = np.empty((ETA_CAP, m))
        self.eta_r = np.empty(ETA_CAP, dtype=np.int64)
        self.n_eta = 0
        self.iterations = 0
        self._resets = 0

    # ---- basis linear algebra ------------------------------------------

    def _factorize(self) -> None:
        B = self.A[:, self.basis].tocsc()
        self.lu = splu(B)
        self.n_eta = 0

    def _ftran(self, v: np.ndarray) -> np.ndarray:
        w = self.lu.solve(v)
        if self.n_eta:
            _kern.ftran_etas(self.eta_d, self.eta_r, self.n_eta, w)
        return w

    def _btran_unit(self, r: int) -> np.ndarray:
        e = np.zeros(self.m)
        e[r] = 1.0
        return self._btran(e)

    def _btran(self, c: np.ndarray) -> np.ndarray:
        c = c.copy()
        if self.n_eta:
            _kern.btran_etas(self.eta_d, self.eta_r, self.n_eta, c)
        return self.lu.solve(c, trans="T")

    def _column(self, q: int) -> np.ndarray:
        col = np.zeros(self.m)
        start, end = self.A.indptr[q], self.A.indptr[q + 1]
        col[self.A.indices[start:end]] = self.A.data[start:end]
        return col

    def _feas_violation(self) -> float:
        resid = np.abs(self.A @ self.xval - self.b)
        lo = np.maximum(self.lb - self.xval, 0.0)
        hi = np.maximum(self.xval - self.ub, 0.0)
        return max(float(resid.max(initial=0.0)),
                   float(lo.max(initial=0.0)), float(hi.max(initial=0.0)))

    def _recompute_basics(self) -> None:
        x = self.xval.copy()
        x[self.basis] = 0.0
        rhs = self.b - self.A @ x
        xb = self.lu.solve(rhs)
        if self.n_eta:
            _kern.ftran_etas(self.eta_d, self.eta_r, self.n_eta, xb)
        self.xval[self.basis] = xb

    # ---- initial basis --------------------------------------------------

    def _initial_basis(self) -> None:
        nv, m = self.nv, self.m
        for j in range(nv + m):
            if self.lb[j] > -math.inf:
                self.vstat[j] = NB_LOWER
                self.xval[j] = self.lb[j]
            elif self.ub[j] < math.inf:
                self.vstat[j] = NB_UPPER
                self.xval[j] = self.ub[j]
            else:
                self.vstat[j] = NB_FREE
                self.xval[j] = 0.0
        if self.warm is not None:
            # snap structurals to the bound nearest the warm-start point
            for j in range(min(nv, self.warm.size)):
                if math.isinf(self.lb[j]) or math.isinf(self.ub[j]):
                    continue
                if abs(self.warm[j] - self.ub[j]) < abs(self.warm[j] - self.lb[j]):
                    self.vstat[j] = NB_UPPER
                    self.xval[j] = self.ub[j]
                else:
                    self.vstat[j] = NB_LOWER
                    self.xval[j] = self.lb[j]
        x = self.xval[:nv]
        resid = self.b - self.A[:, :nv] @ x  # slacks/artificials all at 0 here
        self.basis_pos[:] = -1
        self.cost1[:] = 0.0
        for k in range(m):
            s = nv + k
            a = nv + m + k
            r = resid[k] - self.xval[s]
            self.lb[a] = 0.0
            self.ub[a] = 0.0
            self.xval[a] = 0.0
            self.vstat[a] = NB_LOWER
            if self.lb[s] - FEAS_TOL <= r <= self.ub[s] + FEAS_TOL:
                self.basis[k] = s
                self.vstat[s] = BASIC
                self.xval[s] = r
            else:
                # slack pinned at nearest bound; artificial absorbs the rest
                sv = min(max(r, self.lb[s]), self.ub[s])
                self.xval[s] = sv
                self.vstat[s] = NB_LOWER if sv == self.lb[s] else NB_UPPER
                av = r - sv
                self.lb[a] = min(0.0, av)
                self.ub[a] = max(0.0, av)
                self.xval[a] = av
                self.cost1[a] = 1.0 if av > 0 else -1.0
                self.basis[k] = a
                self.vstat[a] = BASIC
            self.basis_pos[self.basis[k]] = k
        self._factorize()

    # ---- simplex iterations ---------------------------------------------

    def _iterate(self, cost: np.ndarray, deadline: _Deadline) -> Status:
        """Run primal simplex to optimality for the given cost vector."""
        bland = False
        best_obj = math.inf
        stall = 0
        gamma = np.ones(self.N)  # devex reference weights
        while True:
            if self.iterations >= MAX_ITER:
                return Status.DEADLINE_EXCEEDED
            if self.iterations % 64 == 0 and deadline.hit():
                return Status.DEADLINE_EXCEEDED
            self.iterations += 1

            y = self._btran(cost[self.basis])
            d = cost - self.AT @ y
            viol = np.full(self.N, -math.inf)
            nb_l = self.vstat == NB_LOWER
            nb_u = self.vstat == NB_UPPER
            nb_f = self.vstat == NB_FREE
            viol[nb_l] = -d[nb_l]
            viol[nb_u] = d[nb_u]
            viol[nb_f] = np.abs(d[nb_f])
            fixed = self.lb == self.ub
            viol[fixed & ~ (self.vstat == BASIC)] = -math.inf
            if bland:
                cand = np.flatnonzero(viol > OPT_TOL)
                if cand.size == 0:
                    return Status.OPTIMAL
                q = int(cand[0])
            else:
                if viol[int(np.argmax(viol))] <= OPT_TOL:
                    return Status.OPTIMAL
                score = np.where(viol > OPT_TOL,
                                 np.square(viol) / gamma, -math.inf)
                q = int(np.argmax(score))

            sigma = 1.0 if (nb_l[q] or (nb_f[q] and d[q] < 0)) else -1.0
            w = self._ftran(self._column(q))
            delta = -sigma * w  # x_B change per unit of entering move

            xb = self.xval[self.basis]
            lb_b = self.lb[self.basis]
            ub_b = self.ub[self.basis]
            with np.errstate(divide="ignore", invalid="ignore"):
                t_up = np.where(delta > PIV_TOL, (ub_b - xb) / delta, math.inf)
                t_dn = np.where(delta < -PIV_TOL, (lb_b - xb) / delta, math.inf)
            ratios = np.minimum(t_up, t_dn)
            np.maximum(ratios, 0.0, out=ratios)
            t_enter = self.ub[q] - self.lb[q]
            r = int(np.argmin(ratios))
            t = float(ratios[r])
            if t >= t_enter - 1e-12:
                if math.isinf(t_enter):
                    if math.isinf(t):
                        return Status.UNBOUNDED
                else:
                    # bound flip: entering moves across its whole span
                    self.xval[self.basis] = xb + delta * t_enter
                    self.xval[q] += sigma * t_enter
                    self.vstat[q] = NB_UPPER if sigma > 0 else NB_LOWER
                    continue
            # tie-break: among near-minimal ratios take largest |pivot|
            near = np.flatnonzero(ratios <= t + 1e-9)
            r = int(near[np.argmax(np.abs(delta[near]))])
            leave = int(self.basis[r])

            self.xval[self.basis] = xb + delta * t
            enter_val = self.xval[q] + sigma * t
            # leaving variable lands on its blocking bound
            lv = self.xval[leave]
            if abs(lv - self.lb[leave]) <= abs(lv - self.ub[leave]):
                self.xval[leave] = self.lb[leave]
                self.vstat[leave] = NB_LOWER
            else:
                self.xval[leave] = self.ub[leave]
                self.vstat[leave] = NB_UPPER
            if not bland:
                # devex update from the pivot row
                rho = self._btran_unit(r)
                arow = self.AT @ rho
                a_rq = arow[q]
                if abs(a_rq) > PIV_TOL:
                    gq = gamma[q]
                    np.maximum(gamma, np.square(arow / a_rq) * gq, out=gamma)
                    gamma[leave] = max(gq / (a_rq * a_rq), 1.0)
                    if gamma.max() > 1e8:
                        gamma[:] = 1.0

            self.basis[r] = q
            self.basis_pos[leave] = -1
            self.basis_pos[q] = r
            self.vstat[q] = BASIC
            self.xval[q] = enter_val

            self.eta_d[self.n_eta] = w
            self.eta_r[self.n_eta] = r
            self.n_eta += 1
            if self.n_eta >= ETA_CAP:
                self._factorize()
                self._recompute_basics()

            obj = float(cost @ self.xval)
            if obj < best_obj - 1e-10:
                best_obj = obj
                stall = 0
                bland = False
            else:
                stall += 1
                if stall > BLAND_TRIGGER:
                    bland = True

    def solve(self, deadline_s: float | None = None) -> LpSolution:
        model = self.model
        dl = _Deadline(deadline_s)
        if self.m == 0:
            return self._solve_unconstrained()
        self._initial_basis()

        if np.any(self.cost1 != 0.0):
            st = self._iterate(self.cost1, dl)
            if st is not Status.OPTIMAL:
                return self._no_solution(st)
            self._factorize()
            self._recompute_basics()
            p1 = float(self.cost1 @ self.xval)
            if p1 > 1e-6:
                return self._no_solution(Status.INFEASIBLE)
            # pin artificials at zero for phase 2
            art = slice(self.nv + self.m, self.N)
            self.lb[art] = 0.0
            self.ub[art] = 0.0
            basic = self.vstat == BASIC
            self.xval[art] = np.where(basic[art], self.xval[art], 0.0)

        st = self._iterate(self.cost2, dl)
        if st is not Status.OPTIMAL:
            return self._no_solution(st)
        # clean pass: refactorize and confirm optimality without eta drift
        for _ in range(4):
            self._factorize()
            self._recompute_basics()
            st = self._iterate(self.cost2, dl)
            if st is not Status.OPTIMAL:
                return self._no_solution(st)
            if self.n_eta == 0:
                break
        if self._feas_violation() > 1e-6 and self._resets == 0:
            # numerical drift: restart once from a fresh basis
            self._resets = 1
            return self.solve(deadline_s)
        values = self.xval[:self.nv].copy()
        obj = float(np.array(model.obj) @ values)
        return LpSolution(
            status=Status.OPTIMAL,
            values=values,
            objective_value=obj,
            is_integral=integrality(model, values),
            names=list(model.names),
            iterations=self.iterations,
        )

    def _solve_unconstrained(self) -> LpSolution:
        values = np.zeros(self.nv)
        for j in range(self.nv):
            c = self.cost2[j]
            if c > 0:
                values[j] = self.lb[j]
            elif c < 0:
                values[j] = self.ub[j]
            else:
                values[j] = self.lb[j] if self.lb[j] > -math.inf else \
                    min(0.0, self.ub[j])
            if math.isinf(values[j]):
                return self._no_solution(Status.UNBOUNDED)
        obj = float(np.array(self.model.obj) @ values)
        return LpSolution(Status.OPTIMAL, values, obj,
                          integrality(self.model, values),
                          list(self.model.names), 0)

    def _no_solution(self, status: Status) -> LpSolution:
        return LpSolution(status, np.empty(0), math.nan, False,
                          list(self.model.names), self.iterations)


def solve_lp(model: LpModel, deadline: float | None = None,
             bound_overrides: dict[int, tuple[float, float]] | None = None,
             warm: np.ndarray | None = None) -> LpSolution:
    """Solve the linear relaxation of the model (integer marks ignored)."""
    return SimplexSolver(model, bound_overrides, warm=warm).solve(deadline)
