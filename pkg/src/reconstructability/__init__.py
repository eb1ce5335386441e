"""Reconstructability analysis over finite product spaces."""

from ._kernels import BACKEND
from .decision import (
    DecisionProblem,
    expected_utility,
    maximizing_actions,
    random_decision_problem,
    same_region,
    superior,
)
from .estimation import KlirEstimate, klir_estimate_known_model, klir_estimate_searched
from .lattice import Model, enumerate_models, immediate_refinements, refines
from .maxent import (
    IpfConvergenceError,
    IpfSettings,
    MarginalSet,
    fit_maxent,
    maxent_extension,
    project_model,
    reconstruct,
    reconstructable,
    reconstruction_divergence,
)
from .prob import (
    Distribution,
    Scheme,
    divergence,
    entropy,
    hamming,
    perturb,
    project,
    random_distribution,
    sample_relative_frequency,
)
from .search import SearchSettings, SearchTrace, best_model, classify

__version__ = "0.1.0"
