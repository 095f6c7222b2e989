"""Interior-point solver tests.

The main oracle builds random problems with a known optimum: pick X* and Z*
positive semidefinite with complementary eigenspaces (X* Z* = 0), random
constraint matrices A_i with b_i = <A_i, X*>, and C = Z* + sum_i y_i A_i.
Then X* is primal optimal and (y, Z*) dual optimal with zero gap, so the
solver's objective must match <C, X*>.
"""

import io

import numpy as np
import pytest

from ftnsdr import (
    ConditioningError,
    ParameterError,
    SdpProblem,
    SdpSolution,
    SolveStatus,
    check_solution,
    dump_problem,
    load_problem,
    solve,
)


def _sym(rng, n):
    A = rng.standard_normal((n, n))
    return (A + A.T) / 2


def _planted_problem(rng, n, m_eq, m_ineq=0, rank=None):
    """Random SDP with a known optimal (X*, y*, Z*) certificate."""
    rank = rank if rank is not None else max(1, n // 2)
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    x_eigs = np.zeros(n)
    x_eigs[:rank] = rng.uniform(0.5, 2.0, size=rank)
    z_eigs = np.zeros(n)
    z_eigs[rank:] = rng.uniform(0.5, 2.0, size=n - rank)
    X_star = Q @ np.diag(x_eigs) @ Q.T
    Z_star = Q @ np.diag(z_eigs) @ Q.T

    equalities = []
    C = Z_star.copy()
    for _ in range(m_eq):
        A = _sym(rng, n)
        y = rng.standard_normal()
        equalities.append((A, float(np.trace(A @ X_star))))
        C += y * A

    inequalities = []
    for j in range(m_ineq):
        A = _sym(rng, n)
        val = float(np.trace(A @ X_star))
        if j % 2 == 0:
            # active constraint with nonnegative multiplier
            y = rng.uniform(0.1, 1.0)
            inequalities.append((A, val))
            C += y * A
        else:
            # inactive: slack at the optimum, multiplier zero
            inequalities.append((A, val - rng.uniform(0.5, 2.0)))

    C = (C + C.T) / 2
    problem = SdpProblem(C, equalities, inequalities)
    return problem, X_star, float(np.trace(C @ X_star))


class TestAnalytic:
    def test_diagonal_two_by_two(self):
        # min x11 - x22 subject to trace 2: optimum at X = diag(0, 2)
        C = np.diag([1.0, -1.0])
        problem = SdpProblem(C, [(np.eye(2), 2.0)])
        sol = solve(problem)
        assert sol.status is SolveStatus.OPTIMAL
        assert sol.objective == pytest.approx(-2.0, abs=1e-6)
        assert np.allclose(sol.X, np.diag([0.0, 2.0]), atol=1e-5)

    def test_scalar_lower_bound(self):
        problem = SdpProblem(np.array([[1.0]]), [], [(np.array([[1.0]]), 3.0)])
        sol = solve(problem)
        assert sol.status is SolveStatus.OPTIMAL
        assert sol.objective == pytest.approx(3.0, abs=1e-6)
        assert sol.slacks is not None and sol.slacks[0] == pytest.approx(0.0, abs=1e-5)

    def test_scalar_upper_bound(self):
        # maximize x (minimize -x) under x <= 9 encoded as -x >= -9
        problem = SdpProblem(np.array([[-1.0]]), [], [(np.array([[-1.0]]), -9.0)])
        sol = solve(problem)
        assert sol.objective == pytest.approx(-9.0, abs=1e-6)

    def test_inactive_inequality_keeps_slack(self):
        problem = SdpProblem(
            np.array([[1.0]]),
            [(np.array([[1.0]]), 5.0)],
            [(np.array([[1.0]]), 2.0)],
        )
        sol = solve(problem)
        assert sol.objective == pytest.approx(5.0, abs=1e-6)
        assert sol.slacks[0] == pytest.approx(3.0, abs=1e-4)


class TestPlantedOptima:
    @pytest.mark.parametrize("n,m_eq", [(3, 2), (5, 4), (8, 10), (12, 6)])
    def test_equality_problems(self, n, m_eq):
        rng = np.random.default_rng(100 + n + m_eq)
        for trial in range(4):
            problem, X_star, obj_star = _planted_problem(rng, n, m_eq)
            sol = solve(problem)
            assert sol.status is SolveStatus.OPTIMAL
            scale = 1 + abs(obj_star)
            assert abs(sol.objective - obj_star) / scale < 1e-5
            report = check_solution(problem, sol, tol=1e-5)
            assert report.feasible, report

    @pytest.mark.parametrize("n,m_eq,m_ineq", [(4, 2, 3), (6, 3, 5), (9, 4, 6)])
    def test_mixed_constraint_problems(self, n, m_eq, m_ineq):
        rng = np.random.default_rng(200 + n)
        for trial in range(3):
            problem, X_star, obj_star = _planted_problem(rng, n, m_eq, m_ineq)
            sol = solve(problem)
            assert sol.status is SolveStatus.OPTIMAL
            scale = 1 + abs(obj_star)
            assert abs(sol.objective - obj_star) / scale < 1e-5

    def test_low_rank_optimum(self):
        rng = np.random.default_rng(321)
        problem, X_star, obj_star = _planted_problem(rng, 10, 5, rank=1)
        sol = solve(problem)
        assert abs(sol.objective - obj_star) / (1 + abs(obj_star)) < 1e-5

    def test_gap_and_residuals_reported_small(self):
        rng = np.random.default_rng(7)
        problem, _, _ = _planted_problem(rng, 6, 4)
        sol = solve(problem, tol=1e-8)
        assert sol.duality_gap < 1e-7
        assert sol.primal_residual < 1e-7
        assert sol.dual_residual < 1e-7
        assert 0 < sol.iterations <= 200


class TestStatuses:
    def test_infeasible_certificate(self):
        # x11 = -1 contradicts positive semidefiniteness
        E11 = np.zeros((2, 2))
        E11[0, 0] = 1.0
        problem = SdpProblem(np.eye(2), [(E11, -1.0)])
        sol = solve(problem)
        assert sol.status is SolveStatus.INFEASIBLE

    def test_iteration_cap(self):
        rng = np.random.default_rng(9)
        problem, _, _ = _planted_problem(rng, 5, 3)
        sol = solve(problem, max_iter=2)
        assert sol.status is SolveStatus.MAX_ITERATIONS
        assert sol.iterations <= 2

    def test_determinism(self):
        rng = np.random.default_rng(11)
        problem, _, _ = _planted_problem(rng, 6, 4)
        a = solve(problem)
        b = solve(problem)
        assert a.objective == b.objective
        assert a.iterations == b.iterations
        assert np.array_equal(a.X, b.X)


class TestCheckSolution:
    def test_accepts_planted_point(self):
        rng = np.random.default_rng(13)
        problem, X_star, _ = _planted_problem(rng, 5, 3, m_ineq=2)
        report = check_solution(problem, X_star, tol=1e-7)
        assert report.feasible
        assert report.psd_ok

    def test_flags_indefinite_matrix(self):
        problem = SdpProblem(np.eye(2), [(np.eye(2), 1.0)])
        X = np.diag([1.1, -0.1])
        report = check_solution(problem, X, tol=1e-7)
        assert not report.psd_ok
        assert not report.feasible

    def test_flags_equality_violation(self):
        problem = SdpProblem(np.eye(2), [(np.eye(2), 1.0)])
        X = np.diag([0.6, 0.6])
        report = check_solution(problem, X, tol=1e-6)
        assert not report.feasible
        assert report.max_equality_violation > 1e-3

    def test_flags_inequality_violation(self):
        problem = SdpProblem(np.eye(1), [], [(np.eye(1), 3.0)])
        report = check_solution(problem, np.array([[2.0]]), tol=1e-6)
        assert not report.feasible
        assert report.max_inequality_violation > 0.1

    def test_accepts_solution_object(self):
        rng = np.random.default_rng(17)
        problem, _, _ = _planted_problem(rng, 4, 2)
        sol = solve(problem)
        assert isinstance(sol, SdpSolution)
        assert check_solution(problem, sol, tol=1e-5).feasible


class TestSerialization:
    def test_roundtrip_preserves_problem(self):
        rng = np.random.default_rng(19)
        problem, _, obj_star = _planted_problem(rng, 5, 3, m_ineq=2)
        buf = io.StringIO()
        dump_problem(problem, buf)
        buf.seek(0)
        loaded = load_problem(buf)
        assert np.array_equal(loaded.C, problem.C)
        assert len(loaded.equalities) == len(problem.equalities)
        assert len(loaded.inequalities) == len(problem.inequalities)
        for (A1, b1), (A2, b2) in zip(loaded.equalities, problem.equalities):
            assert np.array_equal(A1, A2) and b1 == b2
        # both copies solve to the identical answer
        assert solve(loaded).objective == solve(problem).objective

    def test_rejects_garbage_header(self):
        with pytest.raises(ParameterError):
            load_problem(io.StringIO("not a problem\n"))


class TestValidation:
    def test_rejects_nonsymmetric_cost(self):
        with pytest.raises(ParameterError):
            SdpProblem(np.array([[0.0, 1.0], [0.0, 0.0]]), [])

    def test_rejects_shape_mismatch(self):
        with pytest.raises(ParameterError):
            SdpProblem(np.eye(2), [(np.eye(3), 1.0)])

    def test_rejects_nonfinite(self):
        C = np.eye(2)
        C[0, 0] = np.nan
        with pytest.raises(ParameterError):
            SdpProblem(C, [])
