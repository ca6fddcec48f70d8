"""Quantum-covariance-aware PCA preprocessing and benchmarking for
hyperspectral classification.

The package builds classical and quantum (average amplitude-encoded density
matrix) covariance matrices under configurable feature standardization,
partial mean centering, and per-row L2 normalization; analyzes their spectra
and eigenvector fidelities; and benchmarks five PCA preprocessing schemes
with an RBF-kernel SVM under stratified k-fold cross-validation.
"""

__version__ = "0.1.0"

from .covariance import (
    CovariancePair,
    build_pair,
    classical_covariance,
    export_matrix_csv,
    mean_vector,
    quantum_covariance,
)
from .dataio import (
    ClassPairTask,
    HsiCube,
    SpectralDataset,
    flatten_cube,
    load_csv,
    load_npy,
    save_csv,
    select_pair,
    write_npy,
)
from .eigen import (
    EigenDecomposition,
    SpectrumComparison,
    compare_spectra,
    eigendecompose,
    export_spectrum_csv,
    fidelity,
    overlap,
)
from .experiment import (
    CvConfig,
    ExperimentReport,
    ReportRow,
    SpectrumReport,
    SweepRecord,
    default_gamma_grid,
    find_crossing,
    fold_mean_std,
    make_folds,
    run_classification,
    run_gamma_sweep,
    run_spectrum_report,
    sweep_to_csv,
)
from .pca import SCHEMES, SchemePca, canonical_scheme, export_model_csv, scheme_decomposition
from .preprocess import (
    FeatureStats,
    PartialCenteringScaler,
    PipelineConfig,
    fit_stats,
    l2_normalize,
    partial_center,
    run_pipeline,
    standardize,
)
from .svm import SmoSvc, accuracy, rbf_kernel, rbf_kernel_matrix

__all__ = [
    "__version__",
    "ClassPairTask",
    "CovariancePair",
    "CvConfig",
    "EigenDecomposition",
    "ExperimentReport",
    "FeatureStats",
    "HsiCube",
    "PartialCenteringScaler",
    "PipelineConfig",
    "ReportRow",
    "SCHEMES",
    "SchemePca",
    "SmoSvc",
    "SpectralDataset",
    "SpectrumComparison",
    "SpectrumReport",
    "SweepRecord",
    "accuracy",
    "build_pair",
    "canonical_scheme",
    "classical_covariance",
    "compare_spectra",
    "default_gamma_grid",
    "eigendecompose",
    "export_matrix_csv",
    "export_model_csv",
    "export_spectrum_csv",
    "fidelity",
    "find_crossing",
    "fit_stats",
    "flatten_cube",
    "fold_mean_std",
    "l2_normalize",
    "load_csv",
    "load_npy",
    "make_folds",
    "mean_vector",
    "overlap",
    "partial_center",
    "quantum_covariance",
    "rbf_kernel",
    "rbf_kernel_matrix",
    "run_classification",
    "run_gamma_sweep",
    "run_pipeline",
    "run_spectrum_report",
    "save_csv",
    "scheme_decomposition",
    "select_pair",
    "standardize",
    "sweep_to_csv",
    "write_npy",
]
