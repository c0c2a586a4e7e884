"""sparselab: a desk-scale laboratory for sparse recovery from random
measurements.

The pieces: random measurement ensembles and sparse-signal samplers
(:mod:`sparselab.ensembles`), dense linear-algebra contracts
(:mod:`sparselab.linalg`), closed-form measurement and tail bounds
(:mod:`sparselab.bounds`), the exact-recovery certificate
(:mod:`sparselab.certify`), equality-constrained l1 minimization with
exhaustive small-instance oracles (:mod:`sparselab.solver`), and a seeded
Monte Carlo harness that checks the bounds empirically
(:mod:`sparselab.experiments`). The ``sparselab`` command drives it all
from the shell.
"""

__version__ = "0.1.0"

from .bounds import (BoundParams, CoveringConstant, MeasurementBound,
                     NonpositiveDenominatorError, covering_constant,
                     min_measurements, tail_bound)
from .certify import CertificateResult, fuchs_certificate, verify_dual_conditions
from .ensembles import (EnsembleSpec, SignalSpec, SparseSignal, bernoulli,
                        custom, gaussian, mgf_check, sample_matrix,
                        sample_signal, sgn)
from .experiments import (ExperimentConfig, GramCheck, PhaseGrid, RateEstimate,
                          TrialRecord, binomial_slack, phase_grid,
                          recovery_probability, verify_concentration,
                          verify_gram, verify_smin_tail, verify_sum_tail,
                          wilson_interval)
from .linalg import (DimensionError, RankDeficiencyError, operator_norm,
                     pseudo_inverse, smallest_singular_value)
from .solver import (InfeasibleProblemError, InstanceTooLargeError,
                     SolveReport, SolverOptions, basis_pursuit,
                     brute_force_l0, brute_force_l1)
from .rng import derive_seed, generator

__all__ = [
    "__version__",
    "BoundParams", "CoveringConstant", "MeasurementBound",
    "NonpositiveDenominatorError", "covering_constant", "min_measurements",
    "tail_bound",
    "CertificateResult", "fuchs_certificate", "verify_dual_conditions",
    "EnsembleSpec", "SignalSpec", "SparseSignal", "bernoulli", "custom",
    "gaussian", "mgf_check", "sample_matrix", "sample_signal", "sgn",
    "ExperimentConfig", "GramCheck", "PhaseGrid", "RateEstimate",
    "TrialRecord", "binomial_slack", "phase_grid", "recovery_probability",
    "verify_concentration", "verify_gram", "verify_smin_tail",
    "verify_sum_tail", "wilson_interval",
    "DimensionError", "RankDeficiencyError", "operator_norm",
    "pseudo_inverse", "smallest_singular_value",
    "InfeasibleProblemError", "InstanceTooLargeError", "SolveReport",
    "SolverOptions", "basis_pursuit", "brute_force_l0", "brute_force_l1",
    "derive_seed", "generator",
]
