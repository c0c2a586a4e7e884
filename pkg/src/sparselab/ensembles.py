"""Random measurement matrices, random sparse signals, and the sign map.

Matrix ensembles have independent mean-zero entries. Gaussian and Bernoulli
(Rademacher, +-1 with equal probability) entries both have subgaussian
moment-generating-function constant c = 1/2; the Bernoulli ensemble also
carries the norm-concentration constant c_tilde = 1/12 valid on deviation
thresholds t in (0, 1). The same c_tilde is used as the Gaussian default,
which satisfies the identical concentration inequality on that range.

Signal sampling is an experiment-harness choice: the recovery certificate
depends on a signal only through its support and sign pattern, so magnitudes
are irrelevant in certificate-mode experiments. Defaults are uniform random
support, unit magnitudes, and Rademacher signs; a uniform-phase sign model
produces complex signals.
"""

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .rng import generator

RAW = "raw"
ROWS_SCALED = "rows_scaled_by_inverse_sqrt_m"
_NORMALIZATIONS = (RAW, ROWS_SCALED)

#: Subgaussian MGF constant shared by Gaussian and Rademacher entries:
#: E exp(lambda X) <= exp(c lambda^2) with c = 1/2.
SUBGAUSSIAN_C = 0.5
#: Norm-concentration exponent constant for +-1 entries (valid for t < 1).
BERNOULLI_CTILDE = 1.0 / 12.0

SIGN_MODULUS_TOL = 1e-12


@dataclass(frozen=True)
class EnsembleSpec:
    """Description of a random-matrix distribution.

    ``sampler`` (custom kind only) is a callable ``(rng, shape) -> ndarray``
    producing independent mean-zero variates; it must be a module-level
    function if the spec is to cross process boundaries (parallel workers).
    """

    kind: str
    subgaussian_c: float = SUBGAUSSIAN_C
    concentration_ctilde: Optional[float] = None
    normalization: str = RAW
    sampler: Optional[Callable] = None

    def __post_init__(self):
        if self.kind not in ("gaussian", "bernoulli", "custom"):
            raise ValueError(f"unknown ensemble kind {self.kind!r}")
        if not self.subgaussian_c > 0:
            raise ValueError("subgaussian_c must be positive")
        if self.concentration_ctilde is not None and not self.concentration_ctilde > 0:
            raise ValueError("concentration_ctilde must be positive")
        if self.normalization not in _NORMALIZATIONS:
            raise ValueError(f"unknown normalization {self.normalization!r}")
        if self.kind in ("gaussian", "bernoulli") and self.subgaussian_c != SUBGAUSSIAN_C:
            raise ValueError(f"{self.kind} entries have subgaussian_c = 1/2")
        if self.kind == "bernoulli" and self.concentration_ctilde not in (None, BERNOULLI_CTILDE):
            raise ValueError("bernoulli entries have concentration_ctilde = 1/12")


def gaussian(normalization: str = RAW) -> EnsembleSpec:
    """Independent standard normal entries."""
    return EnsembleSpec("gaussian", SUBGAUSSIAN_C, BERNOULLI_CTILDE, normalization)


def bernoulli(normalization: str = RAW) -> EnsembleSpec:
    """Independent +-1 entries with equal probability."""
    return EnsembleSpec("bernoulli", SUBGAUSSIAN_C, BERNOULLI_CTILDE, normalization)


def custom(sampler: Callable, subgaussian_c: float,
           concentration_ctilde: Optional[float] = None,
           normalization: str = RAW) -> EnsembleSpec:
    """Ensemble with caller-supplied entry sampler.

    Concentration experiments additionally require unit-variance entries
    (rows of the matrix must be isotropic); this is the caller's contract.
    """
    if sampler is None:
        raise ValueError("custom ensemble requires a sampler")
    return EnsembleSpec("custom", subgaussian_c, concentration_ctilde,
                        normalization, sampler)


def scalar_sampler(spec: EnsembleSpec) -> Callable:
    """Sampler ``(rng, shape) -> ndarray`` for a single matrix entry's law."""
    if spec.kind == "gaussian":
        return lambda rng, shape: rng.standard_normal(shape)
    if spec.kind == "bernoulli":
        return lambda rng, shape: (
            rng.integers(0, 2, size=shape).astype(np.float64) * 2.0 - 1.0
        )
    if spec.sampler is None:
        raise ValueError("custom ensemble requires a sampler")
    return spec.sampler


def sample_matrix(spec: EnsembleSpec, m: int, N: int, seed: int) -> np.ndarray:
    """Draw an m x N matrix with independent entries per ``spec``.

    Deterministic for fixed (spec, m, N, seed); identical calls return
    bit-identical matrices.
    """
    if m < 1 or N < 1:
        raise ValueError(f"matrix dimensions must be positive, got {m}x{N}")
    rng = generator(seed)
    A = np.asarray(scalar_sampler(spec)(rng, (m, N)))
    if A.shape != (m, N):
        raise ValueError(f"sampler returned shape {A.shape}, expected {(m, N)}")
    if not np.iscomplexobj(A):
        A = A.astype(np.float64, copy=False)
    if spec.normalization == ROWS_SCALED:
        A = A / np.sqrt(m)
    return A


@dataclass(frozen=True)
class SignalSpec:
    """Description of a random sparse-signal distribution.

    support: "uniform" (uniform random s-subset) or an explicit index set.
    signs:   "rademacher" (+-1), "uniform_phase" (unit complex, uniform
             angle), or an explicit sequence of unit-modulus values.
    magnitudes: "unit", a (low, high) tuple for uniform draws, or an
             explicit sequence of positive values.
    """

    dimension: int
    sparsity: int
    support: Union[str, Sequence[int]] = "uniform"
    signs: Union[str, Sequence] = "rademacher"
    magnitudes: Union[str, tuple, Sequence[float]] = "unit"

    def __post_init__(self):
        N, s = self.dimension, self.sparsity
        if N < 1:
            raise ValueError("dimension must be positive")
        if not 0 <= s <= N:
            raise ValueError(f"sparsity must lie in [0, {N}], got {s}")
        if not isinstance(self.support, str):
            sup = np.asarray(self.support, dtype=np.int64)
            if sup.size != s or len(set(sup.tolist())) != s:
                raise ValueError(f"explicit support must have exactly {s} distinct indices")
            if sup.size and (sup.min() < 0 or sup.max() >= N):
                raise ValueError("support indices out of range")
        elif self.support != "uniform":
            raise ValueError(f"unknown support model {self.support!r}")
        if isinstance(self.signs, str):
            if self.signs not in ("rademacher", "uniform_phase"):
                raise ValueError(f"unknown sign model {self.signs!r}")
        else:
            sg = np.asarray(self.signs)
            if sg.size != s:
                raise ValueError(f"explicit signs must have length {s}")
            if sg.size and np.max(np.abs(np.abs(sg) - 1.0)) > SIGN_MODULUS_TOL:
                raise ValueError("explicit sign entries must have modulus 1")
        if isinstance(self.magnitudes, str):
            if self.magnitudes != "unit":
                raise ValueError(f"unknown magnitude model {self.magnitudes!r}")
        elif isinstance(self.magnitudes, tuple) and len(self.magnitudes) == 2:
            lo, hi = self.magnitudes
            if not 0 < lo <= hi:
                raise ValueError("uniform magnitude range must satisfy 0 < low <= high")
        else:
            mag = np.asarray(self.magnitudes, dtype=np.float64)
            if mag.size != s:
                raise ValueError(f"explicit magnitudes must have length {s}")
            if mag.size and mag.min() <= 0:
                raise ValueError("explicit magnitudes must be positive")


@dataclass(frozen=True)
class SparseSignal:
    """A sparse vector with its support set and restricted sign vector.

    ``x`` is float64 when the sign model is real, complex128 otherwise.
    """

    x: np.ndarray
    support: np.ndarray
    signs: np.ndarray


def sample_signal(spec: SignalSpec, seed: int) -> SparseSignal:
    """Draw a sparse signal per ``spec``; deterministic in the seed."""
    rng = generator(seed)
    N, s = spec.dimension, spec.sparsity

    if isinstance(spec.support, str):
        support = np.sort(rng.choice(N, size=s, replace=False).astype(np.int64))
    else:
        support = np.sort(np.asarray(spec.support, dtype=np.int64))

    if isinstance(spec.signs, str):
        if spec.signs == "rademacher":
            signs = rng.integers(0, 2, size=s).astype(np.float64) * 2.0 - 1.0
        else:
            signs = np.exp(2j * np.pi * rng.random(s))
    else:
        signs = np.asarray(spec.signs)
        signs = signs.astype(np.complex128 if np.iscomplexobj(signs) else np.float64)

    if isinstance(spec.magnitudes, str):
        magnitudes = np.ones(s)
    elif isinstance(spec.magnitudes, tuple) and len(spec.magnitudes) == 2:
        magnitudes = rng.uniform(spec.magnitudes[0], spec.magnitudes[1], size=s)
    else:
        magnitudes = np.asarray(spec.magnitudes, dtype=np.float64)

    x = np.zeros(N, dtype=signs.dtype if s else np.float64)
    x[support] = signs * magnitudes
    return SparseSignal(x=x, support=support, signs=signs)


def sgn(x) -> np.ndarray:
    """Entrywise sign map x_j / |x_j|, with 0 at zero entries."""
    x = np.asarray(x)
    out = np.zeros(x.shape, dtype=np.result_type(x.dtype, np.float64))
    nz = x != 0
    out[nz] = x[nz] / np.abs(x[nz])
    return out


def mgf_check(spec_or_sampler, c: float, lambdas=(-1.0, -0.5, 0.5, 1.0),
              draws: int = 10 ** 6, seed: int = 0):
    """Empirical moment-generating-function check for a scalar variate.

    For each lambda, estimates E exp(lambda X) over ``draws`` samples and
    compares against the subgaussian envelope exp(c lambda^2). Returns a
    list of rows (lam, empirical, bound, stderr, ok) where ok means the
    empirical mean does not exceed the bound by more than 3 standard errors.
    """
    if isinstance(spec_or_sampler, EnsembleSpec):
        sampler = scalar_sampler(spec_or_sampler)
    else:
        sampler = spec_or_sampler
    rng = generator(seed)
    chunk = 10 ** 6
    n_lam = len(lambdas)
    total = np.zeros(n_lam)
    total_sq = np.zeros(n_lam)
    remaining = draws
    while remaining > 0:
        k = min(chunk, remaining)
        x = np.asarray(sampler(rng, k))
        for j, lam in enumerate(lambdas):
            e = np.exp(lam * x)
            total[j] += e.sum()
            total_sq[j] += (e * e).sum()
        remaining -= k
    rows = []
    for j, lam in enumerate(lambdas):
        mean = total[j] / draws
        var = max(total_sq[j] / draws - mean * mean, 0.0)
        stderr = np.sqrt(var / draws)
        bound = np.exp(c * lam * lam)
        rows.append((lam, float(mean), float(bound), float(stderr),
                     bool(mean <= bound + 3 * stderr)))
    return rows
