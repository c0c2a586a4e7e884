"""Exact-recovery certificate for equality-constrained l1 minimization.

A sparse vector x with support S and restricted sign vector sgn(x^S) is the
unique l1 minimizer subject to Az = Ax whenever (i) the column submatrix
A_S is injective and (ii) every off-support column a_l satisfies
|<pinv(A_S) a_l, sgn(x^S)>| < 1. The certificate is equivalent to checking
the dual vector h = (pinv(A_S))* sgn(x^S), which satisfies A_S* h = sgn(x^S)
by construction, against |(A* h)_l| < 1 off the support.

The verdict depends on x only through (S, sgn(x^S)); magnitudes never enter.
Support indices are zero-based throughout.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import linalg

#: max_correlation within this distance of 1 is flagged as a boundary case
#: and reported as not holding: the condition is a strict inequality, and
#: numerical equality cannot certify it.
BOUNDARY_TOL = 1e-12
SIGN_MODULUS_TOL = 1e-12
#: tolerance on ||A_S* h - sgn(x^S)||_inf when verifying a supplied dual.
DUAL_EQUALITY_TOL = 1e-8


@dataclass(frozen=True)
class CertificateResult:
    """Outcome of the exact-recovery certificate.

    ``correlations`` holds |<pinv(A_S) a_l, signs>| for off-support columns
    in increasing column order; ``dual_h`` is (pinv(A_S))* signs. Both are
    None when A_S is not injective (the pseudo-inverse does not exist), in
    which case max_correlation is NaN and the certificate does not hold.
    ``boundary`` marks max_correlation within BOUNDARY_TOL of 1.
    """

    injective: bool
    sigma_min: float
    correlations: Optional[np.ndarray]
    max_correlation: float
    dual_h: Optional[np.ndarray]
    holds: bool
    boundary: bool = False


def _check_support(support, N: int) -> np.ndarray:
    S = np.asarray(support, dtype=np.int64).reshape(-1)
    if S.size:
        if S.min() < 0 or S.max() >= N:
            raise IndexError(f"support indices must lie in [0, {N - 1}]")
        if np.unique(S).size != S.size:
            raise ValueError("support indices must be distinct")
    return np.sort(S)


def _check_signs(signs, s: int) -> np.ndarray:
    v = linalg.as_vector(signs)
    if v.size != s:
        raise linalg.DimensionError(f"expected {s} sign entries, got {v.size}")
    if v.size and np.max(np.abs(np.abs(v) - 1.0)) > SIGN_MODULUS_TOL:
        raise ValueError("sign entries must have modulus 1")
    return v


def fuchs_certificate(A, support, signs) -> CertificateResult:
    """Decide whether (support, signs) certifies unique l1 recovery under A.

    Parameters
    ----------
    A : (m, N) array
    support : zero-based column indices (may be empty)
    signs : unit-modulus values, one per support index

    An empty support holds trivially (the zero vector is recovered from
    y = 0); sigma_min is reported as +inf in that case.
    """
    A = linalg.as_matrix(A)
    m, N = A.shape
    S = _check_support(support, N)
    signs = _check_signs(signs, S.size)

    if S.size == 0:
        return CertificateResult(
            injective=True, sigma_min=np.inf,
            correlations=np.zeros(N), max_correlation=0.0,
            dual_h=np.zeros(m, dtype=A.dtype), holds=True,
        )

    # real data with real signs stays on the real path
    if np.iscomplexobj(A) and not np.iscomplexobj(signs):
        signs = signs.astype(np.complex128)
    elif np.iscomplexobj(signs) and not np.iscomplexobj(A):
        A = A.astype(np.complex128)

    A_S = A[:, S]
    if m < S.size:
        # wide submatrix can never be injective
        return CertificateResult(
            injective=False,
            sigma_min=float(np.linalg.svd(A_S, compute_uv=False)[-1]),
            correlations=None, max_correlation=np.nan, dual_h=None, holds=False,
        )

    U, sv, Vh = np.linalg.svd(A_S, full_matrices=False)
    sigma_min = float(sv[-1])
    injective = sv[0] > 0.0 and sigma_min > linalg.RANK_RTOL * float(sv[0])
    if not injective:
        return CertificateResult(
            injective=False, sigma_min=sigma_min,
            correlations=None, max_correlation=np.nan, dual_h=None, holds=False,
        )

    pinv = (Vh.conj().T / sv) @ U.conj().T
    h = pinv.conj().T @ signs
    # |<pinv(A_S) a_l, signs>| = |(A* h)_l|; computed for all columns at once
    corr_all = np.abs(h.conj() @ A)
    off = np.ones(N, dtype=bool)
    off[S] = False
    correlations = corr_all[off]
    max_corr = float(correlations.max()) if correlations.size else 0.0

    boundary = abs(max_corr - 1.0) <= BOUNDARY_TOL
    holds = bool(max_corr < 1.0 and not boundary)
    return CertificateResult(
        injective=True, sigma_min=sigma_min,
        correlations=correlations, max_correlation=max_corr,
        dual_h=h, holds=holds, boundary=boundary,
    )


def verify_dual_conditions(A, support, signs, h) -> bool:
    """Check a supplied dual vector against both certificate conditions.

    True iff ||A_S* h - signs||_inf <= DUAL_EQUALITY_TOL and |(A* h)_l| < 1
    for every off-support l.
    """
    A = linalg.as_matrix(A)
    m, N = A.shape
    S = _check_support(support, N)
    signs = _check_signs(signs, S.size)
    h = linalg.as_vector(h)
    if h.size != m:
        raise linalg.DimensionError(f"dual vector must have length {m}, got {h.size}")

    products = h.conj() @ A  # entry l is conj((A* h)_l); moduli are what we test
    if S.size:
        if np.max(np.abs(products[S].conj() - signs)) > DUAL_EQUALITY_TOL:
            return False
    off = np.ones(N, dtype=bool)
    off[S] = False
    if np.any(np.abs(products[off]) >= 1.0):
        return False
    return True
