"""Multi-domain semi-supervised manifold alignment.

Linear (SSMA), kernelized (KEMA) and reduced-rank (REKEMA) alignment of any
number of labeled-plus-unlabeled domains into a shared latent space, with
out-of-sample projection, closed-form inversion into linear-kernel domains,
and finite-sample spectral stability diagnostics.
"""

__version__ = "0.1.0"

from .align import (
    AlignmentModel,
    AlignmentProblem,
    choose_representatives,
    fit_kema,
    fit_rekema,
    fit_ssma,
    invert,
    project,
)
from .dataset import DomainDataset, load_csv, save_csv
from .estimators import KEMA, REKEMA, SSMA
from .evaluation import (
    ErrorCurve,
    baseline_curve,
    error_curve,
    knn_classify,
    reconstruction_error,
    ridge_linear_classify,
    sweep_accuracy,
)
from .graphs import GraphConfig, JointGraphs, build_joint_graphs
from .kernels import KernelSpec, kernel_matrix, sigma_heuristic
from .serialize import load_model, save_model
from .stability import BoundsReport, compute_kstar, spectral_bounds
from .toydata import (
    DistortionSpec,
    ToyExperiment,
    apply_distortion,
    experiment_preset,
    gen_spiral,
    make_experiment_data,
)

__all__ = [
    "AlignmentModel",
    "AlignmentProblem",
    "BoundsReport",
    "DistortionSpec",
    "DomainDataset",
    "ErrorCurve",
    "GraphConfig",
    "JointGraphs",
    "KEMA",
    "KernelSpec",
    "REKEMA",
    "SSMA",
    "ToyExperiment",
    "apply_distortion",
    "baseline_curve",
    "build_joint_graphs",
    "choose_representatives",
    "compute_kstar",
    "error_curve",
    "experiment_preset",
    "fit_kema",
    "fit_rekema",
    "fit_ssma",
    "gen_spiral",
    "invert",
    "kernel_matrix",
    "knn_classify",
    "load_csv",
    "load_model",
    "make_experiment_data",
    "project",
    "reconstruction_error",
    "ridge_linear_classify",
    "save_csv",
    "save_model",
    "sigma_heuristic",
    "spectral_bounds",
    "sweep_accuracy",
]
