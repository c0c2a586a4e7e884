"""Seeded Monte Carlo harness for recovery rates and tail-bound checks.

Every trial derives its own seed from (master_seed, purpose, trial index),
so results are identical for any worker count and across runs. Success
counts come with 95% Wilson intervals; comparisons against theoretical
bounds use a 3-standard-error binomial slack with the point estimate
floored at 1/n, since the bounds are population statements and the checks
are finite-sample.

The ``verify_*`` tables report whether each empirical frequency stays below
its bound plus slack; they never raise on a statistical violation, leaving
the verdict to the caller (the test suite treats violations as failures).
"""

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from joblib import Parallel, delayed

from . import bounds as bounds_mod
from .certify import fuchs_certificate
from .ensembles import (EnsembleSpec, SignalSpec, sample_matrix,
                        sample_signal, scalar_sampler)
from .rng import derive_seed, generator
from .solver import SolverOptions, basis_pursuit

MODES = ("certificate", "solver", "both")
#: a solve counts as recovery when ||z - x|| <= RECOVERY_RTOL * max(1, ||x||):
#: well above solver tolerance, well below typical nonzero magnitudes.
RECOVERY_RTOL = 1e-4
_Z95 = 1.959963984540054
_CHUNK_ELEMENTS = 4_000_000


class TrialError(RuntimeError):
    """A sampler or solver error occurred in one Monte Carlo trial."""

    def __init__(self, index: int, message: str):
        super().__init__(f"trial {index}: {message}")
        self.index = index


@dataclass(frozen=True)
class RateEstimate:
    successes: int
    trials: int
    rate: float
    wilson_low: float
    wilson_high: float


@dataclass(frozen=True)
class TrialRecord:
    index: int
    success: bool
    certificate_holds: Optional[bool] = None
    max_correlation: Optional[float] = None
    sigma_min: Optional[float] = None
    solver_recovered: Optional[bool] = None
    recovery_error: Optional[float] = None


@dataclass(frozen=True)
class ExperimentConfig:
    ensemble: EnsembleSpec
    signal: SignalSpec
    m: int
    trials: int
    master_seed: int
    mode: str = "certificate"
    workers: int = 1

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.m < 1:
            raise ValueError("m must be positive")
        if self.trials < 1:
            raise ValueError("trials must be positive")
        if self.workers < 1:
            raise ValueError("workers must be positive")

    @property
    def N(self) -> int:
        return self.signal.dimension

    @property
    def s(self) -> int:
        return self.signal.sparsity


@dataclass(frozen=True)
class TailRow:
    threshold: float
    frequency: float
    bound: float
    slack: float
    within_bound: bool


@dataclass(frozen=True)
class ConcentrationRow:
    t: float
    frequency: float
    bound_subgaussian: float
    slack: float
    within_subgaussian: bool
    bound_bernoulli: Optional[float] = None
    within_bernoulli: Optional[bool] = None


@dataclass(frozen=True)
class GramCheck:
    m: int
    delta: float
    eps: float
    estimate: RateEstimate


@dataclass(frozen=True)
class PhaseGrid:
    m_values: tuple
    s_values: tuple
    cells: tuple           # cells[i_s][i_m] is a RateEstimate
    overlay_bound: Optional[str] = None
    overlay_eps: Optional[float] = None
    overlay_m: Optional[tuple] = None  # per s; None marks a bound error


def wilson_interval(successes: int, trials: int, z: float = _Z95):
    """95% Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise ValueError("trials must be positive")
    p = successes / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1.0 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def rate_estimate(successes: int, trials: int) -> RateEstimate:
    low, high = wilson_interval(successes, trials)
    return RateEstimate(successes=successes, trials=trials,
                        rate=successes / trials, wilson_low=low, wilson_high=high)


def binomial_slack(successes: int, trials: int, z: float = 3.0) -> float:
    """z standard errors sqrt(p(1-p)/n) with p floored at 1/n."""
    p = max(successes / trials, 1.0 / trials)
    return z * math.sqrt(p * (1.0 - p) / trials)


def _run_trial(cfg: ExperimentConfig, index: int,
               solver_options: Optional[SolverOptions]) -> TrialRecord:
    try:
        A = sample_matrix(cfg.ensemble, cfg.m, cfg.N,
                          derive_seed(cfg.master_seed, "trial", index, "matrix"))
        sig = sample_signal(cfg.signal,
                            derive_seed(cfg.master_seed, "trial", index, "signal"))
        cert_holds = max_corr = sigma_min = None
        recovered = recovery_error = None
        if cfg.mode in ("certificate", "both"):
            cert = fuchs_certificate(A, sig.support, sig.signs)
            cert_holds = cert.holds
            max_corr = cert.max_correlation
            sigma_min = cert.sigma_min
        if cfg.mode in ("solver", "both"):
            y = A @ sig.x
            report = basis_pursuit(A, y, solver_options)
            x_scale = max(1.0, float(np.linalg.norm(sig.x)))
            recovery_error = float(np.linalg.norm(report.z - sig.x)) / x_scale
            recovered = bool(report.converged and recovery_error <= RECOVERY_RTOL)
        if cfg.mode == "certificate":
            success = bool(cert_holds)
        elif cfg.mode == "solver":
            success = bool(recovered)
        else:
            success = bool(cert_holds and recovered)
        return TrialRecord(index=index, success=success,
                           certificate_holds=cert_holds, max_correlation=max_corr,
                           sigma_min=sigma_min, solver_recovered=recovered,
                           recovery_error=recovery_error)
    except TrialError:
        raise
    except Exception as exc:
        raise TrialError(index, f"{type(exc).__name__}: {exc}") from exc


def recovery_probability(cfg: ExperimentConfig, return_trials: bool = False,
                         solver_options: Optional[SolverOptions] = None):
    """Empirical probability that a fresh (matrix, signal) pair is recovered.

    Success per trial is the certificate verdict (certificate mode), the
    solve-and-compare verdict (solver mode), or their conjunction (both).
    Deterministic in ``cfg.master_seed`` regardless of ``cfg.workers``.
    """
    if cfg.workers == 1:
        records = [_run_trial(cfg, i, solver_options) for i in range(cfg.trials)]
    else:
        records = Parallel(n_jobs=cfg.workers)(
            delayed(_run_trial)(cfg, i, solver_options) for i in range(cfg.trials)
        )
    records.sort(key=lambda r: r.index)
    estimate = rate_estimate(sum(r.success for r in records), cfg.trials)
    if return_trials:
        return estimate, records
    return estimate


def default_signal(N: int, s: int) -> SignalSpec:
    """Harness default: uniform support, Rademacher signs, unit magnitudes."""
    return SignalSpec(dimension=N, sparsity=s)


def phase_grid(ensemble: EnsembleSpec, N: int, s_values: Sequence[int],
               m_values: Sequence[int], trials: int, master_seed: int,
               mode: str = "certificate", overlay_bound: Optional[str] = None,
               overlay_eps: Optional[float] = None, workers: int = 1) -> PhaseGrid:
    """Empirical recovery rates over an (m, s) grid, with an optional
    theoretical-measurement overlay per sparsity level.

    Cell seeds derive from (master_seed, m, s), so refining one axis leaves
    the shared cells unchanged. Overlay cells where the bound's denominator
    is nonpositive record None and the experiment proceeds.
    """
    s_values = tuple(int(s) for s in s_values)
    m_values = tuple(int(m) for m in m_values)
    if not s_values or not m_values:
        raise ValueError("s_values and m_values must be nonempty")
    cells = []
    for s in s_values:
        row = []
        for m in m_values:
            cfg = ExperimentConfig(
                ensemble=ensemble, signal=default_signal(N, s), m=m,
                trials=trials, master_seed=derive_seed(master_seed, "phase", m, s),
                mode=mode, workers=workers,
            )
            row.append(recovery_probability(cfg))
        cells.append(tuple(row))
    overlay = None
    if overlay_bound is not None:
        if overlay_eps is None:
            raise ValueError("overlay_bound requires overlay_eps")
        overlay = []
        for s in s_values:
            params = bounds_mod.BoundParams(
                s=s, N=N, eps=overlay_eps, c=ensemble.subgaussian_c,
                c_tilde=ensemble.concentration_ctilde,
            )
            try:
                overlay.append(bounds_mod.min_measurements(overlay_bound, params).m)
            except bounds_mod.NonpositiveDenominatorError:
                overlay.append(None)
        overlay = tuple(overlay)
    return PhaseGrid(m_values=m_values, s_values=s_values, cells=tuple(cells),
                     overlay_bound=overlay_bound, overlay_eps=overlay_eps,
                     overlay_m=overlay)


def verify_smin_tail(m: int, s: int, r_values: Sequence[float], trials: int,
                     master_seed: int):
    """Frequency of sigma_min(B) < 1 - sqrt(s/m) - r for B with independent
    N(0, 1/m) entries, against the bound exp(-m r^2 / 2)."""
    if s > m:
        raise ValueError(f"s must be <= m, got s={s}, m={m}")
    r_values = [float(r) for r in r_values]
    if any(r < 0 for r in r_values):
        raise ValueError("r values must be nonnegative")
    rng = generator(derive_seed(master_seed, "smin-tail"))
    thresholds = np.array([1.0 - math.sqrt(s / m) - r for r in r_values])
    counts = np.zeros(len(r_values), dtype=np.int64)
    chunk = max(1, _CHUNK_ELEMENTS // (m * s))
    remaining = trials
    while remaining > 0:
        k = min(chunk, remaining)
        B = rng.standard_normal((k, m, s)) / math.sqrt(m)
        smin = np.linalg.svd(B, compute_uv=False)[..., -1]
        counts += (smin[:, None] < thresholds[None, :]).sum(axis=0)
        remaining -= k
    rows = []
    for r, cnt in zip(r_values, counts):
        bound = bounds_mod.tail_bound("gaussian_smin_B1",
                                      bounds_mod.BoundParams(m=m, r=r))
        freq = cnt / trials
        slack = binomial_slack(int(cnt), trials)
        rows.append(TailRow(threshold=r, frequency=freq, bound=bound,
                            slack=slack, within_bound=bool(freq <= bound + slack)))
    return rows


def verify_sum_tail(ensemble: EnsembleSpec, coefficients, t_values: Sequence[float],
                    trials: int, master_seed: int):
    """Frequency of |sum_j a_j X_j| >= t for independent entries X_j of the
    ensemble, against 2 exp(-t^2 / (4 c ||a||^2))."""
    a = np.asarray(coefficients, dtype=np.float64)
    if a.ndim != 1 or a.size == 0:
        raise ValueError("coefficients must be a nonempty 1-d real array")
    t_values = [float(t) for t in t_values]
    if any(t < 0 for t in t_values):
        raise ValueError("t values must be nonnegative")
    sampler = scalar_sampler(ensemble)
    a_norm = float(np.linalg.norm(a))
    rng = generator(derive_seed(master_seed, "sum-tail"))
    counts = np.zeros(len(t_values), dtype=np.int64)
    chunk = max(1, _CHUNK_ELEMENTS // a.size)
    remaining = trials
    while remaining > 0:
        k = min(chunk, remaining)
        Z = np.abs(np.asarray(sampler(rng, (k, a.size))) @ a)
        counts += (Z[:, None] >= np.array(t_values)[None, :]).sum(axis=0)
        remaining -= k
    rows = []
    for t, cnt in zip(t_values, counts):
        bound = bounds_mod.tail_bound(
            "subgaussian_sum_D1",
            bounds_mod.BoundParams(c=ensemble.subgaussian_c, a_norm=a_norm, t=t))
        freq = cnt / trials
        slack = binomial_slack(int(cnt), trials)
        rows.append(TailRow(threshold=t, frequency=freq, bound=bound,
                            slack=slack, within_bound=bool(freq <= bound + slack)))
    return rows


def verify_concentration(ensemble: EnsembleSpec, m: int, N: int,
                         t_values: Sequence[float], trials: int, master_seed: int,
                         use_bernoulli_refinement: bool = False):
    """Frequency of | ||Ax/sqrt(m)||^2 - 1 | > t over fresh unit vectors x
    (uniform on the sphere) and fresh matrices, against 2 exp(-c_tilde m t^2)
    and optionally the sharper +-1-entry form on t in (0, 1).

    Requires unit-variance entries so that the scaled rows are isotropic;
    the built-in ensembles satisfy this, custom samplers must.
    """
    if use_bernoulli_refinement and ensemble.kind != "bernoulli":
        raise ValueError("the refined concentration bound applies to the "
                         "bernoulli ensemble only")
    if ensemble.concentration_ctilde is None:
        raise ValueError("ensemble has no concentration constant configured")
    t_values = [float(t) for t in t_values]
    if any(t < 0 for t in t_values):
        raise ValueError("t values must be nonnegative")
    if use_bernoulli_refinement and any(not 0 < t < 1 for t in t_values):
        raise ValueError("the refined bound is defined for t in (0, 1) only")
    sampler = scalar_sampler(ensemble)
    rng_matrix = generator(derive_seed(master_seed, "concentration", "matrix"))
    rng_vector = generator(derive_seed(master_seed, "concentration", "vector"))
    counts = np.zeros(len(t_values), dtype=np.int64)
    chunk = max(1, _CHUNK_ELEMENTS // (m * N))
    remaining = trials
    while remaining > 0:
        k = min(chunk, remaining)
        A = np.asarray(sampler(rng_matrix, (k, m, N)))
        x = rng_vector.standard_normal((k, N))
        x /= np.linalg.norm(x, axis=1, keepdims=True)
        Ax = np.einsum("kmn,kn->km", A, x) / math.sqrt(m)
        dev = np.abs((Ax * Ax).sum(axis=1) - 1.0)
        counts += (dev[:, None] > np.array(t_values)[None, :]).sum(axis=0)
        remaining -= k
    rows = []
    for t, cnt in zip(t_values, counts):
        bound_sub = bounds_mod.tail_bound(
            "concentration_E1",
            bounds_mod.BoundParams(c_tilde=ensemble.concentration_ctilde, m=m, t=t))
        freq = cnt / trials
        slack = binomial_slack(int(cnt), trials)
        bound_bern = within_bern = None
        if use_bernoulli_refinement:
            bound_bern = bounds_mod.tail_bound(
                "bernoulli_concentration_2_6", bounds_mod.BoundParams(m=m, t=t))
            within_bern = bool(freq <= bound_bern + slack)
        rows.append(ConcentrationRow(
            t=t, frequency=freq, bound_subgaussian=bound_sub, slack=slack,
            within_subgaussian=bool(freq <= bound_sub + slack),
            bound_bernoulli=bound_bern, within_bernoulli=within_bern))
    return rows


def verify_gram(ensemble: EnsembleSpec, s: int, delta: float, eps: float,
                trials: int, master_seed: int) -> GramCheck:
    """Rate of ||A_S* A_S - Id|| <= delta at the bound's own measurement
    count, for A_S an s-column submatrix with entries scaled by 1/sqrt(m).

    Entries are i.i.d., so the distribution of A_S does not depend on which
    s columns form S; the first s columns are used.
    """
    mb = bounds_mod.min_measurements(
        "gram_E_2",
        bounds_mod.BoundParams(s=s, delta=delta, eps=eps,
                               c_tilde=ensemble.concentration_ctilde))
    m = mb.m
    sampler = scalar_sampler(ensemble)
    rng = generator(derive_seed(master_seed, "gram"))
    successes = 0
    chunk = max(1, _CHUNK_ELEMENTS // (m * s))
    remaining = trials
    while remaining > 0:
        k = min(chunk, remaining)
        A = np.asarray(sampler(rng, (k, m, s)))
        G = np.einsum("kmi,kmj->kij", A, A) / m
        G -= np.eye(s)[None, :, :]
        dev = np.abs(np.linalg.eigvalsh(G)).max(axis=1)
        successes += int((dev <= delta).sum())
        remaining -= k
    return GramCheck(m=m, delta=delta, eps=eps,
                     estimate=rate_estimate(successes, trials))
