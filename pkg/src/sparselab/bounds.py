"""Closed-form sample-complexity bounds and tail/concentration bounds.

Each evaluator computes its right-hand side exactly in double precision and
returns the smallest integer number of measurements satisfying it. Theorem
and tail-kind identifiers double as the CLI vocabulary.

Available theorems (``min_measurements``):

- ``gaussian_2_1``: square-root form bound for Gaussian ensembles,
  m >= s (sqrt(2 ln(2N/eps)) + 1 + sqrt(2 ln(2/eps)/s))^2.
- ``gaussian_asymptotic_2_2``: the large-(N, s) limit 2 s ln(3N/eps).
  Display only; it carries no finite-size guarantee.
- ``subgaussian_2_5``: 4c/gamma * s ln(4N/eps) with
  gamma = 1 - sqrt(3C/(4c)) * sqrt(ln(4/eps) / ln(4N/eps)) and C = 1.646/c_tilde.
- ``bernoulli_2_7``: the subgaussian bound specialized to +-1 entries with
  the rounded literal 5.45 in place of sqrt(3C/(4c)).
- ``gram_E_2``: C delta^-2 (3s + ln(2/eps)) measurements make an s-column
  normalized submatrix well conditioned: ||A_S* A_S - Id|| <= delta with
  probability 1 - eps. The ln(2/eps) budget is the lemma's own; callers
  wanting a ln(4/eps) budget pass eps/2.

Tail kinds (``tail_bound``):

- ``gaussian_smin_B1``:      exp(-m r^2 / 2)
- ``gaussian_C1``:           exp(-t^2 / (2 sigma^2))
- ``subgaussian_sum_D1``:    2 exp(-t^2 / (4 c ||a||^2))
- ``concentration_E1``:      2 exp(-c_tilde m t^2)
- ``bernoulli_concentration_2_6``: 2 exp(-(m/2)(t^2/2 - t^3/3)), t in (0, 1)
"""

import math
from dataclasses import dataclass
from typing import Optional

#: Covering-argument coefficient: C = COVERING_COEFF / c_tilde.
COVERING_COEFF = 1.646
#: Rounded sqrt(3 * (COVERING_COEFF * 12) / 2) used by the bernoulli_2_7 bound.
BERNOULLI_ROUNDED_FACTOR = 5.45
#: Slack subtracted before taking ceilings, guarding against an exactly
#: integral right-hand side landing on the next float up.
CEIL_SLACK = 2.0 ** -40

THEOREMS = ("gaussian_2_1", "gaussian_asymptotic_2_2", "subgaussian_2_5",
            "bernoulli_2_7", "gram_E_2")
TAIL_KINDS = ("gaussian_smin_B1", "gaussian_C1", "subgaussian_sum_D1",
              "concentration_E1", "bernoulli_concentration_2_6")


class NonpositiveDenominatorError(ValueError):
    """The bound's denominator is nonpositive for the given (N, eps)."""


@dataclass(frozen=True)
class BoundParams:
    """Parameter record for bound evaluators; each evaluator validates the
    fields it uses against their domains."""

    s: Optional[int] = None          # sparsity
    N: Optional[int] = None          # ambient dimension
    eps: Optional[float] = None      # failure probability, in (0, 1)
    c: Optional[float] = None        # subgaussian MGF constant
    c_tilde: Optional[float] = None  # concentration constant
    delta: Optional[float] = None    # Gram deviation, in (0, 1)
    r: Optional[float] = None        # singular-value slack
    t: Optional[float] = None        # tail threshold
    sigma: Optional[float] = None    # Gaussian standard deviation
    a_norm: Optional[float] = None   # l2 norm of the coefficient vector
    m: Optional[int] = None          # number of measurements


@dataclass(frozen=True)
class MeasurementBound:
    """Result of ``min_measurements``: the integer bound plus the internal
    quantities (alpha, gamma, delta, C) used to produce it."""

    theorem: str
    m: int
    rhs: float
    alpha: Optional[float] = None
    gamma: Optional[float] = None
    delta: Optional[float] = None
    covering_C: Optional[float] = None


@dataclass(frozen=True)
class CoveringConstant:
    C: float
    rho: float


def _require(params: BoundParams, *names):
    for name in names:
        if getattr(params, name) is None:
            raise ValueError(f"parameter {name!r} is required")


def _as_positive_int(name, value) -> int:
    iv = int(value)
    if iv != value or iv < 1:
        raise ValueError(f"{name} must be a positive integer, got {value}")
    return iv


def _check_eps(eps: float):
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")


def _ln_ratio(k: int, N: int, eps: float) -> float:
    # ln(k*N/eps) without overflowing float conversion for huge integer N
    return math.log(k * N) - math.log(eps)


def _ceil_measurements(rhs: float) -> int:
    return max(1, math.ceil(rhs - CEIL_SLACK))


def min_measurements(theorem: str, params: BoundParams) -> MeasurementBound:
    """Smallest integer m satisfying the selected recovery/conditioning bound.

    Raises
    ------
    NonpositiveDenominatorError
        For ``subgaussian_2_5`` / ``bernoulli_2_7`` when the denominator
        gamma is nonpositive (N too small relative to eps).
    ValueError
        For missing or out-of-domain parameters, or an unknown theorem.
    """
    if theorem == "gaussian_2_1":
        _require(params, "s", "N", "eps")
        s, N, eps = params.s, params.N, params.eps
        _check_eps(eps)
        s, N = _check_sparsity(s, N)
        L1 = _ln_ratio(2, N, eps)
        L2 = math.log(2.0) - math.log(eps)
        rhs = s * (math.sqrt(2.0 * L1) + 1.0 + math.sqrt(2.0 * L2 / s)) ** 2
        alpha = 1.0 / math.sqrt(2.0 * L1)
        return MeasurementBound(theorem, _ceil_measurements(rhs), rhs, alpha=alpha)

    if theorem == "gaussian_asymptotic_2_2":
        _require(params, "s", "N", "eps")
        s, N, eps = params.s, params.N, params.eps
        _check_eps(eps)
        s, N = _check_sparsity(s, N)
        rhs = 2.0 * s * _ln_ratio(3, N, eps)
        return MeasurementBound(theorem, _ceil_measurements(rhs), rhs)

    if theorem in ("subgaussian_2_5", "bernoulli_2_7"):
        _require(params, "s", "N", "eps")
        s, N, eps = params.s, params.N, params.eps
        _check_eps(eps)
        s, N = _check_sparsity(s, N)
        if theorem == "subgaussian_2_5":
            _require(params, "c", "c_tilde")
            c, c_tilde = params.c, params.c_tilde
            _check_positive(c=c, c_tilde=c_tilde)
            C = COVERING_COEFF / c_tilde
            factor = math.sqrt(3.0 * C / (4.0 * c))
        else:
            c = 0.5
            C = COVERING_COEFF * 12.0
            factor = BERNOULLI_ROUNDED_FACTOR
        L1 = _ln_ratio(4, N, eps)
        L2 = math.log(4.0) - math.log(eps)
        gamma = 1.0 - factor * math.sqrt(L2) / math.sqrt(L1)
        if gamma <= 0.0:
            raise NonpositiveDenominatorError(
                f"{theorem}: denominator 1 - {factor:g} * sqrt(ln(4/eps)/ln(4N/eps)) "
                f"= {gamma:.6g} <= 0 for N={N}, eps={eps}"
            )
        rhs = (4.0 * c / gamma) * s * L1
        return MeasurementBound(theorem, _ceil_measurements(rhs), rhs,
                                gamma=gamma, covering_C=C)

    if theorem == "gram_E_2":
        _require(params, "s", "delta", "eps", "c_tilde")
        s, delta, eps, c_tilde = params.s, params.delta, params.eps, params.c_tilde
        _check_eps(eps)
        s = _as_positive_int("s", s)
        if not 0.0 < delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {delta}")
        _check_positive(c_tilde=c_tilde)
        C = COVERING_COEFF / c_tilde
        rhs = C * delta ** -2 * (3.0 * s + math.log(2.0) - math.log(eps))
        return MeasurementBound(theorem, _ceil_measurements(rhs), rhs,
                                delta=delta, covering_C=C)

    raise ValueError(f"unknown theorem {theorem!r}; expected one of {THEOREMS}")


def _check_sparsity(s, N):
    s = _as_positive_int("s", s)
    N = _as_positive_int("N", N)
    if N < s:
        raise ValueError(f"N must be >= s, got N={N}, s={s}")
    return s, N


def _check_positive(**kwargs):
    for name, value in kwargs.items():
        if not value > 0:
            raise ValueError(f"{name} must be positive, got {value}")


def tail_bound(kind: str, params: BoundParams) -> float:
    """Evaluate a tail/concentration upper bound exactly.

    Values above 1 are returned as computed; callers may clamp for display.
    """
    if kind == "gaussian_smin_B1":
        _require(params, "m", "r")
        m, r = params.m, params.r
        _check_measurements(m)
        if r < 0:
            raise ValueError(f"r must be nonnegative, got {r}")
        return math.exp(-m * r * r / 2.0)

    if kind == "gaussian_C1":
        _require(params, "sigma", "t")
        sigma, t = params.sigma, params.t
        _check_positive(sigma=sigma)
        if t < 0:
            raise ValueError(f"t must be nonnegative, got {t}")
        return math.exp(-t * t / (2.0 * sigma * sigma))

    if kind == "subgaussian_sum_D1":
        _require(params, "c", "a_norm", "t")
        c, a_norm, t = params.c, params.a_norm, params.t
        _check_positive(c=c, a_norm=a_norm)
        if t < 0:
            raise ValueError(f"t must be nonnegative, got {t}")
        return 2.0 * math.exp(-t * t / (4.0 * c * a_norm * a_norm))

    if kind == "concentration_E1":
        _require(params, "c_tilde", "m", "t")
        c_tilde, m, t = params.c_tilde, params.m, params.t
        _check_measurements(m)
        _check_positive(c_tilde=c_tilde)
        if t < 0:
            raise ValueError(f"t must be nonnegative, got {t}")
        return 2.0 * math.exp(-c_tilde * m * t * t)

    if kind == "bernoulli_concentration_2_6":
        _require(params, "m", "t")
        m, t = params.m, params.t
        _check_measurements(m)
        if not 0.0 < t < 1.0:
            raise ValueError(f"t must lie in (0, 1), got {t}")
        return 2.0 * math.exp(-(m / 2.0) * (t * t / 2.0 - t ** 3 / 3.0))

    raise ValueError(f"unknown tail kind {kind!r}; expected one of {TAIL_KINDS}")


def _check_measurements(m):
    _as_positive_int("m", m)


def covering_constant(c_tilde: float) -> CoveringConstant:
    """Constants of the sphere-covering argument behind the Gram bound.

    rho solves ln(1 + 2/rho) = 3, i.e. rho = 2/(e^3 - 1) independent of
    c_tilde, and C = 1 / (c_tilde (2 - (rho+1)^2)^2). Evaluated in closed
    form; C(1) = 1.64604 agrees with the rounded coefficient 1.646 used by
    the measurement bounds to four significant figures.
    """
    _check_positive(c_tilde=c_tilde)
    rho = 2.0 / (math.e ** 3 - 1.0)
    C = 1.0 / (c_tilde * (2.0 - (rho + 1.0) ** 2) ** 2)
    return CoveringConstant(C=C, rho=rho)
