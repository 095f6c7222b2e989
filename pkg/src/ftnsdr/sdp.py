"""Dense primal-dual interior-point solver for small semidefinite programs.

Solves

    minimize    tr(C X)
    subject to  tr(A_i X) =  b_i   (equalities)
                tr(A_j X) >= b_j   (inequalities)
                X  positive semidefinite

for symmetric real data.  Inequalities are absorbed by appending one
nonnegative slack per constraint on an extra diagonal block of the primal
variable, which turns every constraint into an equality on the extended
matrix.  The solve itself is an infeasible-start path-following method with
Nesterov-Todd scaling and a Mehrotra predictor-corrector step, with a
fraction-to-boundary factor of 0.98 and static regularization 1e-10 on the
Schur complement.

Problem sizes here are small (matrix order up to a few hundred, constraint
counts up to a few hundred), so everything is dense and factorizations are
recomputed each iteration.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import ParameterError

_SYM_TOL = 1e-10
_REGULARIZATION = 1e-10
_BOUNDARY_FRACTION = 0.98


class SolveStatus(str, enum.Enum):
    OPTIMAL = "optimal"
    MAX_ITERATIONS = "max_iterations"
    INFEASIBLE = "infeasible"
    NUMERICAL_FAILURE = "numerical_failure"


def _as_sym(A, what):
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ParameterError(f"{what} must be square, got shape {A.shape}")
    if not np.isfinite(A).all():
        raise ParameterError(f"{what} contains non-finite entries")
    scale = 1.0 + float(np.max(np.abs(A)))
    if np.max(np.abs(A - A.T)) > _SYM_TOL * scale:
        raise ParameterError(f"{what} is not symmetric")
    return 0.5 * (A + A.T)


@dataclass
class SdpProblem:
    """Symmetric cost plus lists of (matrix, bound) constraint pairs."""

    C: np.ndarray
    equalities: list = field(default_factory=list)
    inequalities: list = field(default_factory=list)

    def __post_init__(self):
        self.C = _as_sym(self.C, "cost matrix")
        n = self.C.shape[0]
        self.equalities = [
            (self._check(A, n, f"equality {i}"), float(b))
            for i, (A, b) in enumerate(self.equalities)
        ]
        self.inequalities = [
            (self._check(A, n, f"inequality {i}"), float(b))
            for i, (A, b) in enumerate(self.inequalities)
        ]

    @staticmethod
    def _check(A, n, what):
        A = _as_sym(A, what)
        if A.shape[0] != n:
            raise ParameterError(f"{what} has order {A.shape[0]}, expected {n}")
        return A

    @property
    def n(self) -> int:
        return self.C.shape[0]


@dataclass
class SdpSolution:
    """Primal-dual output of ``solve``.

    ``X`` is restricted to the original matrix order (slack block stripped);
    ``slacks`` carries the inequality slack values.  Residuals are the scaled
    quantities used for termination, ``duality_gap`` is the absolute gap of
    the extended problem.
    """

    X: np.ndarray
    objective: float
    duality_gap: float
    primal_residual: float
    dual_residual: float
    status: SolveStatus
    iterations: int
    y: np.ndarray
    Z: np.ndarray
    slacks: np.ndarray


class _Constraint:
    """One constraint stored as sparse triplets over the extended matrix."""

    __slots__ = ("rows", "cols", "vals", "b", "dense", "diag_index")

    def __init__(self, A_dense, b, extra=None, n_ext=None):
        rows, cols = np.nonzero(A_dense)
        vals = A_dense[rows, cols]
        if extra is not None:
            rows = np.concatenate([rows, [extra[0]]])
            cols = np.concatenate([cols, [extra[1]]])
            vals = np.concatenate([vals, [extra[2]]])
        self.rows = rows.astype(np.intp)
        self.cols = cols.astype(np.intp)
        self.vals = vals.astype(float)
        self.b = float(b)
        self.dense = None
        # single entry on the diagonal with unit weight: enables fast paths
        self.diag_index = (
            int(self.rows[0])
            if self.rows.size == 1 and self.rows[0] == self.cols[0] and self.vals[0] == 1.0
            else None
        )

    def value(self, X) -> float:
        return float(np.dot(X[self.rows, self.cols], self.vals))

    def add_scaled(self, out, w):
        np.add.at(out, (self.rows, self.cols), w * self.vals)

    def scaled_by(self, Gm):
        """G' A G for this constraint (symmetric result)."""
        if self.dense is not None:
            P = Gm.T @ self.dense @ Gm
        else:
            P = (Gm.T[:, self.rows] * self.vals) @ Gm[self.cols, :]
        return 0.5 * (P + P.T)


def _build_extended(problem: SdpProblem):
    """Embed the problem on a blkdiag(X, slack-diagonal) extended variable."""
    n0 = problem.n
    q = len(problem.inequalities)
    n = n0 + q
    C = np.zeros((n, n))
    C[:n0, :n0] = problem.C

    cons = []
    for A, b in problem.equalities:
        A_ext = np.zeros((n, n))
        A_ext[:n0, :n0] = A
        cons.append(_Constraint(A_ext, b))
    for j, (A, b) in enumerate(problem.inequalities):
        A_ext = np.zeros((n, n))
        A_ext[:n0, :n0] = A
        # tr(A X) - s_j = b_j with s_j the appended slack diagonal entry
        cons.append(_Constraint(A_ext, b, extra=(n0 + j, n0 + j, -1.0)))
    for c in cons:
        if c.vals.size > 4 * n:
            dense = np.zeros((n, n))
            dense[c.rows, c.cols] = c.vals
            c.dense = dense
    return C, cons, n0, q, n


def _make_schur_solver(Msc):
    """Factor the Schur matrix and return a refined solver, or None.

    The system is Jacobi-scaled to unit diagonal before factorization (its
    raw diagonal can spread over many orders of magnitude near a degenerate
    optimum), perturbed by a static 1e-10 relative regularization escalated
    only on breakdown, and each solve does two refinement sweeps against the
    unregularized matrix to keep the achieved constraint residuals small.
    """
    m = Msc.shape[0]
    d = np.sqrt(np.diag(Msc))
    d = np.where(d > 0.0, d, 1.0)
    Ms = Msc / np.outer(d, d)
    reg = _REGULARIZATION
    fac = None
    for _ in range(5):
        try:
            fac = sla.cho_factor(Ms + reg * np.eye(m))
            break
        except sla.LinAlgError:
            reg *= 100.0
    if fac is None:
        return None

    def solve_system(rhs):
        dy = sla.cho_solve(fac, rhs / d) / d
        for _ in range(2):
            r = rhs - Msc @ dy
            dy = dy + sla.cho_solve(fac, r / d) / d
        return dy

    return solve_system


def _max_step(Lchol, dM, n):
    """Largest alpha with M + alpha dM PSD, for M = L L' already factored."""
    Y = sla.solve_triangular(Lchol, dM, lower=True)
    S = sla.solve_triangular(Lchol, Y.T, lower=True)
    S = 0.5 * (S + S.T)
    lmin = float(sla.eigh(S, eigvals_only=True, subset_by_index=[0, 0])[0])
    if lmin >= -1e-16:
        return np.inf
    return 1.0 / (-lmin)


def solve(problem: SdpProblem, tol: float = 1e-7, max_iter: int = 200, _trace=None) -> SdpSolution:
    """Run the interior-point method.

    Terminates as optimal when scaled primal and dual residuals and the
    relative duality gap all fall below ``tol``.  Declares infeasibility when
    a ray certificate emerges (dual objective diverging with a negative
    semidefinite aggregate), and numerical failure when factorizations break
    down or steps collapse.
    """
    if tol <= 0.0:
        raise ParameterError(f"tolerance must be positive, got {tol!r}")
    if max_iter < 1:
        raise ParameterError(f"max_iter must be >= 1, got {max_iter!r}")

    C, cons, n0, q, n = _build_extended(problem)
    m = len(cons)
    b = np.array([c.b for c in cons])
    norm_b = float(np.linalg.norm(b)) if m else 0.0
    norm_C = float(np.linalg.norm(C))
    all_unit_diag = all(c.diag_index is not None for c in cons)
    diag_idx = np.array([c.diag_index for c in cons], dtype=np.intp) if all_unit_diag else None

    s0 = 1.0 + (float(np.max(np.abs(b))) if m else 0.0)
    X = s0 * np.eye(n)
    Z = s0 * np.eye(n)
    y = np.zeros(m)

    status = SolveStatus.MAX_ITERATIONS
    iterations = 0
    best = None
    best_merit = np.inf

    def apply_A(Xm):
        if diag_idx is not None:
            return Xm[diag_idx, diag_idx].copy()
        return np.array([c.value(Xm) for c in cons])

    def apply_At(w):
        out = np.zeros((n, n))
        if diag_idx is not None:
            out[diag_idx, diag_idx] = w
            return out
        for c, wi in zip(cons, w):
            c.add_scaled(out, wi)
        return 0.5 * (out + out.T)

    for iterations in range(1, max_iter + 1):
        AX = apply_A(X)
        rp = b - AX
        Rd = C - apply_At(y) - Z
        pobj = float(np.tensordot(C, X))
        dobj = float(b @ y) if m else 0.0
        mu = float(np.tensordot(X, Z)) / n

        pinf = float(np.linalg.norm(rp)) / (1.0 + norm_b)
        dinf = float(np.linalg.norm(Rd)) / (1.0 + norm_C)
        relgap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))
        if _trace is not None:
            _trace.append(
                {"mu": mu, "pinf": pinf, "dinf": dinf, "relgap": relgap, "pobj": pobj, "dobj": dobj}
            )

        merit = max(pinf, dinf, relgap)
        if merit < best_merit:
            best_merit = merit
            best = (X.copy(), y.copy(), Z.copy())

        if pinf < tol and dinf < tol and relgap < tol:
            status = SolveStatus.OPTIMAL
            break

        # complementarity exhausted at floating-point scale: no step from
        # here can be resolved, so stop on the best iterate found
        if mu < 1e-15 * s0 * s0:
            break

        # Infeasibility: a diverging dual objective whose normalized aggregate
        # -A*(y)/(b'y) stays PSD is a Farkas ray, so no primal point exists.
        def certified(slack):
            if not m or dobj <= 0.0:
                return False
            S = -apply_At(y / dobj)
            smin = float(sla.eigh(S, eigvals_only=True, subset_by_index=[0, 0])[0])
            return smin > -slack
        if dobj > 1e8 * (1.0 + norm_C) * s0 and certified(1e-8):
            status = SolveStatus.INFEASIBLE
            break

        try:
            Lx = sla.cholesky(X, lower=True)
            Lz = sla.cholesky(Z, lower=True)
        except sla.LinAlgError:
            status = SolveStatus.INFEASIBLE if certified(1e-6) else SolveStatus.NUMERICAL_FAILURE
            break

        # Nesterov-Todd scaling: G d G' = X, G^-T d G^-1 = Z with d diagonal.
        U, d_sv, Vt = sla.svd(Lz.T @ Lx)
        if d_sv[-1] <= 0.0:
            status = SolveStatus.NUMERICAL_FAILURE
            break
        sd = np.sqrt(d_sv)
        Gm = Lx @ (Vt.T / sd)
        Gmi = ((Lz @ U) / sd).T  # inverse of Gm

        W = Gm @ Gm.T
        W = 0.5 * (W + W.T)

        # Schur complement M_ij = tr(A_i W A_j W) = <G'A_iG, G'A_jG>, built
        # as an explicit Gram product so it stays PSD under roundoff even
        # when W is badly spread near a degenerate optimum.
        if diag_idx is not None:
            Msc = W[np.ix_(diag_idx, diag_idx)] ** 2
        else:
            Pmat = np.empty((m, n * n))
            for ii, c in enumerate(cons):
                Pmat[ii] = c.scaled_by(Gm).ravel()
            Msc = Pmat @ Pmat.T
        schur_solve = _make_schur_solver(Msc)
        if schur_solve is None:
            status = SolveStatus.NUMERICAL_FAILURE
            break

        WRdW = W @ Rd @ W
        WRdW = 0.5 * (WRdW + WRdW.T)

        def newton(Rc):
            # Solve  A(dX) = rp,  A*(dy) + dZ = Rd,  dX + W dZ W = Rc.
            rhs = rp - apply_A(Rc) + apply_A(WRdW)
            dy = schur_solve(rhs) if m else np.zeros(0)
            dZ = Rd - apply_At(dy)
            WdZW = W @ dZ @ W
            dX = Rc - WdZW
            return dy, 0.5 * (dX + dX.T), 0.5 * (dZ + dZ.T)

        # predictor
        dy_a, dX_a, dZ_a = newton(-X)
        ap = min(1.0, _max_step(Lx, dX_a, n))
        ad = min(1.0, _max_step(Lz, dZ_a, n))
        mu_aff = float(np.tensordot(X + ap * dX_a, Z + ad * dZ_a)) / n
        sigma = min(1.0, max(1e-8, (max(mu_aff, 0.0) / mu) ** 3))

        # corrector in the scaled space, where X and Z both equal diag(d_sv)
        dXs = Gmi @ dX_a @ Gmi.T
        dZs = Gm.T @ dZ_a @ Gm
        H = dXs @ dZs
        H = 0.5 * (H + H.T)
        R = sigma * mu * np.eye(n) - np.diag(d_sv**2) - H
        S = 2.0 * R / np.add.outer(d_sv, d_sv)
        Rc = Gm @ S @ Gm.T
        Rc = 0.5 * (Rc + Rc.T)

        dy, dX, dZ = newton(Rc)
        ap = min(1.0, _BOUNDARY_FRACTION * _max_step(Lx, dX, n))
        ad = min(1.0, _BOUNDARY_FRACTION * _max_step(Lz, dZ, n))
        if max(ap, ad) < 1e-12:
            status = SolveStatus.INFEASIBLE if certified(1e-6) else SolveStatus.NUMERICAL_FAILURE
            break

        X = X + ap * dX
        y = y + ad * dy
        Z = Z + ad * dZ
        X = 0.5 * (X + X.T)
        Z = 0.5 * (Z + Z.T)

    if best is not None and status is not SolveStatus.INFEASIBLE:
        X, y, Z = best

    AX = apply_A(X)
    rp = b - AX
    Rd = C - apply_At(y) - Z
    pobj = float(np.tensordot(C, X))
    dobj = float(b @ y) if m else 0.0

    X0 = X[:n0, :n0].copy()
    slacks = np.diag(X)[n0:].copy() if q else np.zeros(0)
    return SdpSolution(
        X=X0,
        objective=float(np.tensordot(problem.C, X0)),
        duality_gap=abs(pobj - dobj),
        primal_residual=float(np.linalg.norm(rp)) / (1.0 + norm_b),
        dual_residual=float(np.linalg.norm(Rd)) / (1.0 + norm_C),
        status=status,
        iterations=iterations,
        y=y,
        Z=Z[:n0, :n0].copy(),
        slacks=slacks,
    )


@dataclass(frozen=True)
class SolutionCheck:
    """Independent residual report for a candidate primal solution."""

    objective: float
    min_eigenvalue: float
    equality_residuals: np.ndarray
    inequality_margins: np.ndarray
    max_equality_violation: float
    max_inequality_violation: float
    psd_ok: bool
    feasible: bool

    @property
    def ok(self) -> bool:
        return self.psd_ok and self.feasible


def check_solution(problem: SdpProblem, solution, tol: float = 1e-6) -> SolutionCheck:
    """Recompute feasibility of ``solution`` from scratch.

    ``solution`` may be an ``SdpSolution`` or a bare matrix.  Violations are
    measured relative to ``1 + |b|`` per constraint and ``1 + ||X||`` for the
    eigenvalue bound, mirroring the solver's scaled termination criteria.
    """
    X = np.asarray(getattr(solution, "X", solution), dtype=float)
    X = 0.5 * (X + X.T)
    if X.shape != (problem.n, problem.n):
        raise ParameterError(f"solution has shape {X.shape}, expected {(problem.n, problem.n)}")

    objective = float(np.tensordot(problem.C, X))
    evals = np.linalg.eigvalsh(X)
    min_eig = float(evals[0])
    scale_x = 1.0 + float(np.linalg.norm(X))

    eq = np.array([float(np.tensordot(A, X)) - b for A, b in problem.equalities])
    ineq = np.array([float(np.tensordot(A, X)) - b for A, b in problem.inequalities])
    eq_scale = np.array([1.0 + abs(b) for _, b in problem.equalities])
    ineq_scale = np.array([1.0 + abs(b) for _, b in problem.inequalities])

    max_eq = float(np.max(np.abs(eq) / eq_scale)) if eq.size else 0.0
    max_ineq = float(np.max(np.clip(-ineq, 0.0, None) / ineq_scale)) if ineq.size else 0.0
    psd_ok = min_eig >= -tol * scale_x
    feasible = psd_ok and max_eq <= tol and max_ineq <= tol

    return SolutionCheck(
        objective=objective,
        min_eigenvalue=min_eig,
        equality_residuals=eq,
        inequality_margins=ineq,
        max_equality_violation=max_eq,
        max_inequality_violation=max_ineq,
        psd_ok=psd_ok,
        feasible=feasible,
    )


def dump_problem(problem: SdpProblem, path) -> None:
    """Write a problem as plain text: header plus sparse triplet sections.

    Layout::

        sdp 1
        n <order> eq <count> ineq <count>
        C <nnz>
        <i> <j> <value>          (upper triangle, row major)
        E <k> <b> <nnz>          (one section per equality)
        ...
        I <k> <b> <nnz>          (one section per inequality)
        ...
    """

    def emit(fh, tag, A, extra=""):
        iu = np.triu_indices(A.shape[0])
        mask = A[iu] != 0.0
        rows, cols = iu[0][mask], iu[1][mask]
        vals = A[iu][mask]
        fh.write(f"{tag}{extra} {rows.size}\n")
        for i, j, v in zip(rows, cols, vals):
            fh.write(f"{i} {j} {float(v)!r}\n")

    own = isinstance(path, (str, bytes)) or hasattr(path, "__fspath__")
    fh = open(path, "w") if own else path
    try:
        fh.write("sdp 1\n")
        fh.write(f"n {problem.n} eq {len(problem.equalities)} ineq {len(problem.inequalities)}\n")
        emit(fh, "C", problem.C)
        for k, (A, b) in enumerate(problem.equalities):
            emit(fh, "E", A, f" {k} {float(b)!r}")
        for k, (A, b) in enumerate(problem.inequalities):
            emit(fh, "I", A, f" {k} {float(b)!r}")
    finally:
        if own:
            fh.close()


def load_problem(path) -> SdpProblem:
    """Read back a problem written by ``dump_problem``."""
    own = isinstance(path, (str, bytes)) or hasattr(path, "__fspath__")
    fh = open(path) if own else path
    try:
        lines = [ln.strip() for ln in fh if ln.strip()]
    finally:
        if own:
            fh.close()
    if not lines or lines[0].split() != ["sdp", "1"]:
        raise ParameterError("not a recognized problem dump")
    head = lines[1].split()
    n, n_eq, n_ineq = int(head[1]), int(head[3]), int(head[5])

    pos = 2

    def read_matrix(expect_tag):
        nonlocal pos
        parts = lines[pos].split()
        if parts[0] != expect_tag:
            raise ParameterError(f"expected section {expect_tag!r}, found {parts[0]!r}")
        pos += 1
        if expect_tag == "C":
            b = None
            nnz = int(parts[1])
        else:
            b = float(parts[2])
            nnz = int(parts[3])
        A = np.zeros((n, n))
        for _ in range(nnz):
            i, j, v = lines[pos].split()
            pos += 1
            A[int(i), int(j)] = float(v)
            A[int(j), int(i)] = float(v)
        return A, b

    C, _ = read_matrix("C")
    eqs = []
    for _ in range(n_eq):
        A, b = read_matrix("E")
        eqs.append((A, b))
    ineqs = []
    for _ in range(n_ineq):
        A, b = read_matrix("I")
        ineqs.append((A, b))
    return SdpProblem(C=C, equalities=eqs, inequalities=ineqs)
