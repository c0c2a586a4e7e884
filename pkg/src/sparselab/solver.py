"""Equality-constrained l1 minimization and exhaustive small-instance oracles.

``basis_pursuit`` minimizes ||z||_1 subject to Az = y for real or complex
data with a first-order operator-splitting iteration: entrywise (complex)
soft-thresholding alternated with exact projection onto the affine
constraint set through a cached SVD of A, with over-relaxation. The
projection makes every reported iterate feasible to machine precision, so
convergence is judged on the objective plateau and the splitting gap.

``brute_force_l1`` / ``brute_force_l0`` enumerate candidate supports
exhaustively on small real instances. A linear program attains its optimum
at a basic solution with at most m nonzeros, so enumerating supports of
size <= m and solving each by least squares finds the exact minimizer.
"""

from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

import numpy as np

from . import linalg

BRUTE_FORCE_MAX_COLS = 16
BRUTE_FORCE_MAX_ROWS = 8
#: absolute feasibility cutoff for oracle candidates
ORACLE_FEASIBILITY_TOL = 1e-9
#: over-relaxation factor of the splitting iteration, in (0, 2)
RELAXATION = 1.8
_CHECK_EVERY = 20


class InstanceTooLargeError(ValueError):
    """Instance exceeds the exhaustive oracle's size limits."""


class InfeasibleProblemError(ValueError):
    """No feasible point exists (y is not in the range of A)."""


@dataclass(frozen=True)
class SolverOptions:
    feasibility_tolerance: float = 1e-8   # on ||Az - y|| / max(1, ||y||)
    objective_tolerance: float = 1e-8     # relative ||z||_1 change per check window
    max_iterations: int = 50000
    step_parameter: float = 1.0           # soft-threshold level
    support_threshold: float = 1e-6       # entries below it count as zero

    def __post_init__(self):
        for name in ("feasibility_tolerance", "objective_tolerance",
                     "max_iterations", "step_parameter", "support_threshold"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class SolveReport:
    z: np.ndarray
    iterations: int
    converged: bool
    feasibility_residual: float
    objective: float
    support: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))


def _soft_threshold(u: np.ndarray, tau: float) -> np.ndarray:
    mag = np.abs(u)
    shrunk = np.maximum(mag - tau, 0.0)
    out = np.zeros_like(u)
    nz = mag > 0
    out[nz] = u[nz] * (shrunk[nz] / mag[nz])
    return out


def basis_pursuit(A, y, opts: Optional[SolverOptions] = None) -> SolveReport:
    """Minimize ||z||_1 subject to Az = y.

    Returns the best iterate with ``converged=False`` when the iteration
    budget runs out or y is not in the range of A within the feasibility
    tolerance. Converged reports satisfy
    ``feasibility_residual <= feasibility_tolerance``.
    """
    opts = opts or SolverOptions()
    A = linalg.as_matrix(A)
    y = linalg.as_vector(y)
    m, N = A.shape
    if y.size != m:
        raise linalg.DimensionError(f"rhs must have length {m}, got {y.size}")
    if np.iscomplexobj(A) != np.iscomplexobj(y):
        A = A.astype(np.complex128)
        y = y.astype(np.complex128)

    U, sv, Vh = np.linalg.svd(A, full_matrices=False)
    rank = int(np.sum(sv > linalg.RANK_RTOL * sv[0])) if sv.size and sv[0] > 0 else 0
    Ur = U[:, :rank]
    svr = sv[:rank]
    Vhr = Vh[:rank]

    def least_squares(v):
        return Vhr.conj().T @ ((Ur.conj().T @ v) / svr)

    def project(u):
        # exact projection onto {z : Az = y} (assuming y in range(A))
        return u - least_squares(A @ u - y)

    y_scale = max(1.0, float(np.linalg.norm(y)))
    z0 = least_squares(y) if rank else np.zeros(N, dtype=A.dtype)
    feas0 = float(np.linalg.norm(A @ z0 - y)) / y_scale
    if feas0 > opts.feasibility_tolerance:
        # no feasible point within tolerance; the least-squares point is the
        # best achievable residual
        return SolveReport(z=z0, iterations=0, converged=False,
                           feasibility_residual=feas0,
                           objective=float(np.abs(z0).sum()),
                           support=_support(z0, opts.support_threshold))

    tau = opts.step_parameter
    w = z0.copy()
    v = z0
    obj_prev = np.inf
    converged = False
    iterations = 0
    for k in range(1, opts.max_iterations + 1):
        x = _soft_threshold(w, tau)
        v = project(2.0 * x - w)
        w += RELAXATION * (v - x)
        iterations = k
        if k % _CHECK_EVERY == 0:
            obj = float(np.abs(v).sum())
            gap = float(np.linalg.norm(x - v))
            scale = max(1.0, float(np.linalg.norm(v)))
            if (abs(obj - obj_prev) <= opts.objective_tolerance * max(1.0, obj)
                    and gap <= 10.0 * opts.objective_tolerance * scale):
                converged = True
                break
            obj_prev = obj

    z = v
    feas = float(np.linalg.norm(A @ z - y)) / y_scale
    if feas > opts.feasibility_tolerance:
        converged = False
    return SolveReport(z=z, iterations=iterations, converged=converged,
                       feasibility_residual=feas,
                       objective=float(np.abs(z).sum()),
                       support=_support(z, opts.support_threshold))


def _support(z: np.ndarray, threshold: float) -> np.ndarray:
    return np.flatnonzero(np.abs(z) > threshold).astype(np.int64)


def _check_oracle_instance(A, y):
    A = linalg.as_matrix(A)
    y = linalg.as_vector(y)
    if np.iscomplexobj(A) or np.iscomplexobj(y):
        raise ValueError("exhaustive oracles accept real data only")
    m, N = A.shape
    if y.size != m:
        raise linalg.DimensionError(f"rhs must have length {m}, got {y.size}")
    if N > BRUTE_FORCE_MAX_COLS or m > BRUTE_FORCE_MAX_ROWS:
        raise InstanceTooLargeError(
            f"instance {m}x{N} exceeds oracle limits "
            f"{BRUTE_FORCE_MAX_ROWS}x{BRUTE_FORCE_MAX_COLS}"
        )
    return A, y, m, N


def _candidate(A, y, T, N):
    """Least-squares solution on support T, or None if not exactly feasible."""
    z = np.zeros(N)
    if T:
        sol = np.linalg.lstsq(A[:, T], y, rcond=None)[0]
        z[list(T)] = sol
    if np.linalg.norm(A @ z - y) <= ORACLE_FEASIBILITY_TOL:
        return z
    return None


def brute_force_l1(A, y) -> np.ndarray:
    """Exact l1 minimizer of Az = y by exhaustive support enumeration.

    Enumerates supports by size then lexicographic order and keeps the first
    strictly-best feasible candidate, so ties return the earliest support in
    that ordering. Real data only, limited to small instances.
    """
    A, y, m, N = _check_oracle_instance(A, y)
    best_z = None
    best_obj = np.inf
    for k in range(0, min(m, N) + 1):
        for T in combinations(range(N), k):
            z = _candidate(A, y, T, N)
            if z is None:
                continue
            obj = float(np.abs(z).sum())
            if obj < best_obj - 1e-12:
                best_obj = obj
                best_z = z
    if best_z is None:
        raise InfeasibleProblemError("no support yields an exactly feasible solution")
    return best_z


def brute_force_l0(A, y) -> np.ndarray:
    """Sparsest feasible solution by support enumeration in order of size."""
    A, y, m, N = _check_oracle_instance(A, y)
    for k in range(0, min(m, N) + 1):
        for T in combinations(range(N), k):
            z = _candidate(A, y, T, N)
            if z is not None:
                return z
    raise InfeasibleProblemError("no support yields an exactly feasible solution")
