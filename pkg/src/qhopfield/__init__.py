"""Simulation and verification toolkit for the transverse-field Hopfield model.

Exact quantum free energies on small qubit systems, Curie-Weiss mean-field
theory with its critical curve, and reproducible disorder-ensemble
experiments for self-averaging, mean-field convergence, and the
Bogolyubov/Duhamel inequalities.
"""

from .disorder import (
    CouplingMatrix,
    Distribution,
    PatternMatrix,
    hebbian_couplings,
    overlap_matrix_a,
    sample_patterns,
    spectral_norm,
)
from .errors import ConfigError, NumericalError, ResourceGuardError
from .experiments import (
    ConvergenceRecord,
    EnsembleSummary,
    NormCheckRecord,
    RetrievalResult,
    VerifySuiteResult,
    run_convergence,
    run_norm_checks,
    run_retrieval,
    run_self_averaging,
    verify_properties,
)
from .meanfield import (
    Branch,
    CriticalPoint,
    FixedPoint,
    MeanFieldSolution,
    asymptote_ratio,
    critical_beta,
    f0,
    fixed_points,
    minimize_f0,
    phase_curve,
)
from .quantum import (
    BogolyubovBounds,
    FieldMode,
    GibbsObservables,
    ModelParams,
    Spectrum,
    apply_hamiltonian,
    block_free_energy,
    bogolyubov_bounds,
    curvature_duhamel,
    dense_hamiltonian,
    diagonal_energies,
    dump_spectrum_csv,
    free_energy,
    gibbs_observables,
    params_from_patterns,
    slq_free_energy,
    spectrum,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # disorder
    "Distribution",
    "PatternMatrix",
    "CouplingMatrix",
    "sample_patterns",
    "hebbian_couplings",
    "overlap_matrix_a",
    "spectral_norm",
    # quantum
    "FieldMode",
    "ModelParams",
    "Spectrum",
    "GibbsObservables",
    "BogolyubovBounds",
    "params_from_patterns",
    "diagonal_energies",
    "apply_hamiltonian",
    "dense_hamiltonian",
    "spectrum",
    "free_energy",
    "gibbs_observables",
    "bogolyubov_bounds",
    "curvature_duhamel",
    "slq_free_energy",
    "block_free_energy",
    "dump_spectrum_csv",
    # meanfield
    "Branch",
    "MeanFieldSolution",
    "CriticalPoint",
    "FixedPoint",
    "f0",
    "minimize_f0",
    "fixed_points",
    "critical_beta",
    "phase_curve",
    "asymptote_ratio",
    # experiments
    "EnsembleSummary",
    "ConvergenceRecord",
    "NormCheckRecord",
    "RetrievalResult",
    "VerifySuiteResult",
    "run_self_averaging",
    "run_convergence",
    "run_retrieval",
    "run_norm_checks",
    "verify_properties",
    # errors
    "ResourceGuardError",
    "NumericalError",
    "ConfigError",
]
