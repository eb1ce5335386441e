"""Greedy descent through the model lattice."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .lattice import Model, immediate_refinements
from .maxent import DEFAULT_IPF, IpfSettings, reconstruction_divergence
from .prob import Distribution

# Candidates whose divergences differ by less than this are tied and resolved
# by canonical model order; fitting noise sits well below it.
TIE_TOL = 1e-12


@dataclass(frozen=True)
class SearchSettings:
    """``delta`` bounds the accepted divergence increment per step, in bits."""

    delta: float = 0.01
    max_depth: int | None = None
    ipf: IpfSettings = DEFAULT_IPF

    def __post_init__(self):
        if not self.delta >= 0:
            raise ValueError("delta must be non-negative")
        if self.max_depth is not None and self.max_depth < 0:
            raise ValueError("max_depth must be non-negative")


@dataclass(frozen=True)
class SearchTrace:
    """Accepted steps as ``(model, divergence in nats)``.

    ``rejected`` holds the best next candidate when the search stopped on the
    increment threshold rather than at the least model or depth limit.
    """

    steps: tuple[tuple[Model, float], ...]
    rejected: tuple[Model, float] | None = field(default=None)

    @property
    def chosen(self) -> Model:
        return self.steps[-1][0]

    @property
    def divergence(self) -> float:
        return self.steps[-1][1]


def best_model(p: Distribution, settings: SearchSettings = SearchSettings()) -> SearchTrace:
    current = Model.greatest(p.scheme)
    d_current = 0.0
    steps = [(current, d_current)]
    limit = settings.delta * math.log(2)
    while not current.is_least:
        if settings.max_depth is not None and len(steps) > settings.max_depth:
            break
        scored = [
            (reconstruction_divergence(p, y, settings.ipf), y)
            for y in immediate_refinements(current)
        ]
        d_min = min(d for d, _ in scored)
        d_next, nxt = next((d, y) for d, y in scored if d <= d_min + TIE_TOL)
        if d_next - d_current > limit:
            return SearchTrace(tuple(steps), (nxt, d_next))
        # refinement can only raise the divergence; clamp fitting noise
        current, d_current = nxt, max(d_next, d_current)
        steps.append((current, d_current))
    return SearchTrace(tuple(steps))


def classify(p: Distribution, settings: SearchSettings = SearchSettings()) -> Model:
    """The model whose class O(X) contains ``p``."""
    return best_model(p, settings).chosen
