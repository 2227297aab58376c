import itertools
import math
import random

import numpy as np
import pytest
from scipy.optimize import linprog

from covreplan.lpsolve import (EQ, GE, LE, LpModel, Status, kernels_compiled,
                               solve_integral, solve_lp)
from covreplan.lpsolve._kernels_py import btran_etas as btran_py
from covreplan.lpsolve._kernels_py import ftran_etas as ftran_py
from covreplan.lpsolve.simplex import SimplexSolver


def small_model():
    # min -x - 2y  st  x + y <= 4, y <= 3, x,y >= 0
    m = LpModel()
    x = m.add_var("x")
    y = m.add_var("y")
    m.obj[x], m.obj[y] = -1.0, -2.0
    m.add_constraint([(x, 1.0), (y, 1.0)], LE, 4.0)
    m.add_constraint([(y, 1.0)], LE, 3.0)
    return m


class TestSolveLp:
    def test_known_optimum(self):
        sol = solve_lp(small_model())
        assert sol.status is Status.OPTIMAL
        assert sol.objective_value == pytest.approx(-7.0)
        assert sol.values == pytest.approx([1.0, 3.0])

    def test_equality_row(self):
        m = LpModel()
        x = m.add_var("x", 0.0, 10.0, 1.0)
        y = m.add_var("y", 0.0, 10.0, 3.0)
        m.add_constraint([(x, 1.0), (y, 1.0)], EQ, 5.0)
        sol = solve_lp(m)
        assert sol.objective_value == pytest.approx(5.0)
        assert sol.values == pytest.approx([5.0, 0.0])

    def test_infeasible(self):
        m = LpModel()
        x = m.add_var("x", 0.0, 1.0)
        m.add_constraint([(x, 1.0)], GE, 2.0)
        assert solve_lp(m).status is Status.INFEASIBLE

    def test_unbounded(self):
        m = LpModel()
        m.add_var("x", 0.0, math.inf, -1.0)
        m.add_constraint([(0, 1.0)], GE, 0.0)
        assert solve_lp(m).status is Status.UNBOUNDED

    def test_no_constraints(self):
        m = LpModel()
        m.add_var("x", -2.0, 5.0, 1.0)
        sol = solve_lp(m)
        assert sol.objective_value == pytest.approx(-2.0)

    def test_matches_reference_solver_on_random_lps(self):
        rng = np.random.default_rng(42)
        for trial in range(60):
            nv = int(rng.integers(2, 7))
            nc = int(rng.integers(1, 7))
            c = rng.integers(-5, 6, nv).astype(float)
            A = rng.integers(-3, 4, (nc, nv)).astype(float)
            b = rng.integers(0, 12, nc).astype(float)
            m = LpModel()
            for j in range(nv):
                m.add_var(f"v{j}", 0.0, 10.0, float(c[j]))
            for k in range(nc):
                coeffs = [(j, float(A[k, j])) for j in range(nv) if A[k, j]]
                if coeffs:
                    m.add_constraint(coeffs, LE, float(b[k]))
            ref = linprog(c, A_ub=A, b_ub=b, bounds=[(0.0, 10.0)] * nv,
                          method="highs")
            sol = solve_lp(m)
            if ref.status == 0:
                assert sol.status is Status.OPTIMAL
                assert sol.objective_value == pytest.approx(ref.fun, abs=1e-6)
            elif ref.status == 2:
                assert sol.status is Status.INFEASIBLE

    def test_warm_start_same_optimum(self):
        m = small_model()
        cold = solve_lp(m)
        warm = solve_lp(m, warm=np.array([0.0, 3.0]))
        assert warm.objective_value == pytest.approx(cold.objective_value)

    def test_feasible_warm_start_skips_artificials(self):
        # a feasible 0/1 warm point must start phase 2 directly
        m = LpModel()
        x = m.add_var("x", 0.0, 1.0, 1.0)
        y = m.add_var("y", 0.0, 1.0, 1.0)
        m.add_constraint([(x, 1.0), (y, 1.0)], EQ, 1.0)
        solver = SimplexSolver(m, warm=np.array([1.0, 0.0]))
        solver._initial_basis()
        assert not np.any(solver.cost1 != 0.0)


class TestSolveIntegral:
    def brute(self, m):
        best = None
        rngs = [range(int(m.lb[j]), int(m.ub[j]) + 1) for j in range(m.nvars)]
        for point in itertools.product(*rngs):
            ok = True
            for coeffs, rel, rhs in m.constraints:
                v = sum(c * point[j] for j, c in coeffs)
                if rel == LE and v > rhs + 1e-9:
                    ok = False
                elif rel == GE and v < rhs - 1e-9:
                    ok = False
                elif rel == EQ and abs(v - rhs) > 1e-9:
                    ok = False
            if ok:
                obj = sum(m.obj[j] * point[j] for j in range(m.nvars))
                if best is None or obj < best:
                    best = obj
        return best

    def test_matches_enumeration_on_random_milps(self):
        rng = np.random.default_rng(7)
        checked = 0
        for trial in range(40):
            nv = int(rng.integers(2, 5))
            nc = int(rng.integers(1, 5))
            m = LpModel()
            for j in range(nv):
                m.add_var(f"v{j}", 0.0, 3.0, float(rng.integers(-4, 5)),
                          integer=True)
            for k in range(nc):
                coeffs = [(j, float(rng.integers(-3, 4))) for j in range(nv)]
                coeffs = [t for t in coeffs if t[1]]
                if coeffs:
                    m.add_constraint(coeffs, LE, float(rng.integers(0, 9)))
            want = self.brute(m)
            sol = solve_integral(m)
            if want is None:
                assert sol.status is Status.INFEASIBLE
            else:
                assert sol.status is Status.OPTIMAL
                assert sol.objective_value == pytest.approx(want, abs=1e-6)
                assert sol.is_integral
                checked += 1
        assert checked >= 20

    def test_fractional_relaxation_rounds_nowhere(self):
        # odd-cycle style model whose relaxation is fractional (x=y=z=0.5)
        m = LpModel()
        v = [m.add_var(f"v{j}", 0.0, 1.0, -1.0, integer=True) for j in range(3)]
        m.add_constraint([(v[0], 1.0), (v[1], 1.0)], LE, 1.0)
        m.add_constraint([(v[1], 1.0), (v[2], 1.0)], LE, 1.0)
        m.add_constraint([(v[0], 1.0), (v[2], 1.0)], LE, 1.0)
        relax = solve_lp(m)
        assert not relax.is_integral
        sol = solve_integral(m)
        assert sol.is_integral
        assert sol.objective_value == pytest.approx(-1.0)


class TestKernels:
    def rand_etas(self, rng, m, k):
        eta_d = rng.standard_normal((k, m)) * 0.1
        eta_r = rng.integers(0, m, k).astype(np.int64)
        for i in range(k):
            eta_d[i, eta_r[i]] = 1.0 + rng.uniform(0.1, 1.0)
        return eta_d, eta_r

    def eta_product(self, eta_d, eta_r, k, m):
        """Explicit dense product E_1 E_2 ... E_k of the eta matrices."""
        prod = np.eye(m)
        for i in range(k):
            E = np.eye(m)
            E[:, eta_r[i]] = eta_d[i]
            prod = prod @ E
        return prod

    def test_python_kernels_invert_eta_product(self):
        rng = np.random.default_rng(0)
        for _ in range(25):
            m, k = int(rng.integers(2, 30)), int(rng.integers(1, 8))
            eta_d, eta_r = self.rand_etas(rng, m, k)
            M = self.eta_product(eta_d, eta_r, k, m)
            w = rng.standard_normal(m)
            got = w.copy()
            ftran_py(eta_d, eta_r, k, got)  # got = M^-1 w
            assert np.allclose(M @ got, w, atol=1e-8)
            c = rng.standard_normal(m)
            got = c.copy()
            btran_py(eta_d, eta_r, k, got)  # got = M^-T c
            assert np.allclose(M.T @ got, c, atol=1e-8)

    @pytest.mark.skipif(not kernels_compiled,
                        reason="compiled kernels unavailable")
    def test_compiled_matches_python(self):
        from covreplan.lpsolve._kernels import btran_etas as btran_c
        from covreplan.lpsolve._kernels import ftran_etas as ftran_c
        rng = np.random.default_rng(1)
        for _ in range(25):
            m, k = int(rng.integers(2, 40)), int(rng.integers(1, 10))
            eta_d, eta_r = self.rand_etas(rng, m, k)
            w = rng.standard_normal(m)
            a, b = w.copy(), w.copy()
            ftran_c(eta_d, eta_r, k, a)
            ftran_py(eta_d, eta_r, k, b)
            assert np.allclose(a, b)
            a, b = w.copy(), w.copy()
            btran_c(eta_d, eta_r, k, a)
            btran_py(eta_d, eta_r, k, b)
            assert np.allclose(a, b)
