"""Estimating a joint by reconstructing sampled frequencies from a model."""

from __future__ import annotations

from dataclasses import dataclass

from .lattice import Model
from .maxent import IpfResult, fit_projection
from .prob import Distribution
from .search import SearchSettings, SearchTrace, best_model


@dataclass(frozen=True, eq=False)
class KlirEstimate:
    estimate: Distribution
    model: Model
    raw: Distribution
    trace: SearchTrace | None
    sweeps: int
    residual: float


def _build(p_hat, x, trace, settings) -> KlirEstimate:
    fit: IpfResult = fit_projection(p_hat, x, settings)
    return KlirEstimate(fit.distribution, x, p_hat, trace, fit.sweeps, fit.residual)


def klir_estimate_known_model(
    p_hat: Distribution, x: Model, settings: SearchSettings = SearchSettings()
) -> KlirEstimate:
    """Reconstruct ``p_hat`` from a model fixed in advance."""
    return _build(p_hat, x, None, settings.ipf)


def klir_estimate_searched(
    p_hat: Distribution, settings: SearchSettings = SearchSettings()
) -> KlirEstimate:
    """Pick the best model for ``p_hat`` by search, then reconstruct from it."""
    trace = best_model(p_hat, settings)
    return _build(p_hat, trace.chosen, trace, settings.ipf)
