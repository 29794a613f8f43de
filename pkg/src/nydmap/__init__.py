"""Diffusion maps with Nystrom-accelerated eigendecomposition.

The pipeline: build a Gaussian kernel on the data, normalize it into the
symmetric diffusion operator, take its top eigenpairs either exactly or
through a Nystrom sketch (uniform column sampling or Gaussian random
projections with subspace iterations), and embed the points by eigenvector
columns weighted with sqrt(lambda^t).

Typical use::

    from nydmap import (
        generate_helix, gaussian_kernel_matrix, degree_vector,
        deterministic_model, diffusion_map,
    )

    X = generate_helix(2000, noise_std=0.05, seed=0)
    K = gaussian_kernel_matrix(X, sigma=0.5)
    deg = degree_vector(X, sigma=0.5)
    model = deterministic_model(K, deg, d=50)
    emb = diffusion_map(model, t=1.0)

The ``nydmap`` console script exposes the benchmark harness; see
``nydmap --help``.
"""

__version__ = "0.1.0"

from .datasets import (
    DataMatrix,
    LorenzParams,
    generate_helix,
    generate_swiss_roll,
    integrate_lorenz,
    load_csv,
    lorenz_derivative,
    save_csv,
    subsample_rows,
)
from .embedding import (
    ClusterLabels,
    DiffusionEmbedding,
    diffusion_distance,
    diffusion_map,
    eigenvalue_power,
    kmeans_cluster,
    relative_embedding_error,
)
from .errors import (
    CapacityError,
    ContractError,
    DataFormatError,
    DegeneracyError,
    DimensionError,
    IndexingError,
    IntegrationError,
    NumericError,
    NydmapError,
    ParameterError,
    RankDeficiencyWarning,
    StageFailure,
)
from .kernel import (
    DegreeVector,
    KernelMatrix,
    degree_vector,
    gaussian_kernel_columns,
    gaussian_kernel_matrix,
)
from .nystrom import (
    NystromFactors,
    SketchConfig,
    gaussian_sketch_basis,
    nystrom_eigs,
    project,
    psd_inverse_sqrt,
    sample_columns,
    sketch_model,
)
from .runner import (
    ExperimentConfig,
    ExperimentReport,
    compare_methods,
    load_config_file,
    load_report,
    run_experiment,
)
from .spectral import (
    DiffusionOperator,
    SpectralModel,
    deterministic_model,
    eigendecompose,
    fix_signs,
    markov_matrix,
    recover_markov_eigvecs,
    symmetric_matrix,
)

__all__ = [
    "CapacityError",
    "ClusterLabels",
    "ContractError",
    "DataFormatError",
    "DataMatrix",
    "DegeneracyError",
    "DegreeVector",
    "DiffusionEmbedding",
    "DiffusionOperator",
    "DimensionError",
    "ExperimentConfig",
    "ExperimentReport",
    "IndexingError",
    "IntegrationError",
    "KernelMatrix",
    "LorenzParams",
    "NumericError",
    "NydmapError",
    "NystromFactors",
    "ParameterError",
    "RankDeficiencyWarning",
    "SketchConfig",
    "SpectralModel",
    "StageFailure",
    "compare_methods",
    "degree_vector",
    "deterministic_model",
    "diffusion_distance",
    "diffusion_map",
    "eigendecompose",
    "eigenvalue_power",
    "fix_signs",
    "gaussian_kernel_columns",
    "gaussian_kernel_matrix",
    "gaussian_sketch_basis",
    "generate_helix",
    "generate_swiss_roll",
    "integrate_lorenz",
    "kmeans_cluster",
    "load_config_file",
    "load_csv",
    "load_report",
    "lorenz_derivative",
    "markov_matrix",
    "nystrom_eigs",
    "project",
    "psd_inverse_sqrt",
    "recover_markov_eigvecs",
    "relative_embedding_error",
    "run_experiment",
    "sample_columns",
    "save_csv",
    "sketch_model",
    "subsample_rows",
    "symmetric_matrix",
]
