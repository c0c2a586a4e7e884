"""Dense linear-algebra contracts: singular values, pseudo-inverse, norms.

All operations accept real or complex matrices; the conjugate transpose is
used wherever an adjoint is required. Computations are backed by LAPACK
through ``numpy.linalg``; the contracts below (accuracy against Gram
eigenvalue oracles, the injectivity threshold) are what callers rely on.
"""

import numpy as np

#: Relative singular-value threshold below which a tall matrix is treated as
#: rank deficient. Scale free: sigma_min is compared against sigma_max.
RANK_RTOL = 1e-10


class DimensionError(ValueError):
    """Operand shapes violate an operation's requirements."""


class RankDeficiencyError(ValueError):
    """Matrix is numerically rank deficient where injectivity is required."""


def as_matrix(a) -> np.ndarray:
    """Coerce to a 2-d float64/complex128 array with finite entries."""
    M = np.asarray(a)
    if M.ndim != 2:
        raise DimensionError(f"expected a 2-d array, got ndim={M.ndim}")
    if np.iscomplexobj(M):
        M = M.astype(np.complex128, copy=False)
    else:
        M = M.astype(np.float64, copy=False)
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix entries must be finite")
    return M


def as_vector(a) -> np.ndarray:
    """Coerce to a 1-d float64/complex128 array with finite entries."""
    v = np.asarray(a)
    if v.ndim != 1:
        raise DimensionError(f"expected a 1-d array, got ndim={v.ndim}")
    if np.iscomplexobj(v):
        v = v.astype(np.complex128, copy=False)
    else:
        v = v.astype(np.float64, copy=False)
    if not np.all(np.isfinite(v)):
        raise ValueError("vector entries must be finite")
    return v


def smallest_singular_value(M) -> float:
    """Smallest singular value of a tall matrix (rows >= cols)."""
    M = as_matrix(M)
    m, n = M.shape
    if m < n:
        raise DimensionError(f"matrix must have rows >= cols, got {m}x{n}")
    if n == 0:
        raise DimensionError("matrix must have at least one column")
    return float(np.linalg.svd(M, compute_uv=False)[-1])


def operator_norm(M) -> float:
    """Largest singular value (spectral norm)."""
    M = as_matrix(M)
    if M.size == 0:
        return 0.0
    return float(np.linalg.svd(M, compute_uv=False)[0])


def pseudo_inverse(B, rank_rtol: float = RANK_RTOL) -> np.ndarray:
    """Left pseudo-inverse (B*B)^{-1} B* of a tall full-column-rank matrix.

    Computed from a thin SVD rather than the normal equations for numerical
    stability; satisfies ``pseudo_inverse(B) @ B == Id`` to ~1e-10 in the
    spectral norm.

    Raises
    ------
    RankDeficiencyError
        If sigma_min(B) <= rank_rtol * sigma_max(B); for a column submatrix
        this signals that the submatrix is not injective.
    """
    B = as_matrix(B)
    m, n = B.shape
    if m < n:
        raise DimensionError(f"matrix must have rows >= cols, got {m}x{n}")
    if n == 0:
        raise DimensionError("matrix must have at least one column")
    U, sv, Vh = np.linalg.svd(B, full_matrices=False)
    if sv[0] == 0.0 or sv[-1] <= rank_rtol * sv[0]:
        raise RankDeficiencyError(
            f"rank-deficient matrix: sigma_min={sv[-1]:.3e} <= "
            f"{rank_rtol:g} * sigma_max={sv[0]:.3e}"
        )
    return (Vh.conj().T / sv) @ U.conj().T
