"""Maximum-entropy extension of a set of marginals.

Iterative proportional fitting from the uniform table is the single general
route.  The closed-form junction product for decomposable models is kept as
an independent check on it.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np
from scipy.optimize import linprog

from . import _kernels
from .lattice import Model
from .prob import (
    Distribution,
    Scheme,
    SchemeError,
    divergence,
    marginal_table,
)


class IpfConvergenceError(ArithmeticError):
    def __init__(self, sweeps: int, residual: float):
        super().__init__(sweeps, residual)
        self.sweeps = sweeps
        self.residual = residual

    def __str__(self):
        return (
            f"proportional fitting did not converge in {self.sweeps} sweeps "
            f"(residual {self.residual:.3e})"
        )


@dataclass(frozen=True)
class IpfSettings:
    tolerance: float = 1e-10
    max_sweeps: int = 1000

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be at least 1")


DEFAULT_IPF = IpfSettings()


@dataclass(frozen=True, eq=False)
class MarginalSet:
    """Projections of one joint onto the components of a model.

    Only ``project_model`` builds these, so the marginals are always
    mutually consistent.
    """

    model: Model
    marginals: tuple[Distribution, ...]


@dataclass(frozen=True, eq=False)
class IpfResult:
    distribution: Distribution
    sweeps: int
    residual: float


def project_model(p: Distribution, x: Model) -> MarginalSet:
    if x.scheme != p.scheme:
        raise SchemeError("model and distribution are over different schemes")
    marginals = []
    for comp in x.components:
        sub, marg = marginal_table(p, comp)
        marginals.append(Distribution(sub, marg / marg.sum()))
    return MarginalSet(x, tuple(marginals))


@lru_cache(maxsize=512)
def _cell_maps(model: Model) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-component maps from joint cell to marginal cell, their offsets
    into the stacked marginal vector, and the stacked (global) maps."""
    scheme = model.scheme
    coords = np.indices(scheme.shape).reshape(len(scheme.shape), -1)
    maps, offsets = [], [0]
    for key in model.key:
        sub_shape = tuple(scheme.shape[i] for i in key)
        maps.append(np.ravel_multi_index(coords[list(key)], sub_shape))
        offsets.append(offsets[-1] + int(np.prod(sub_shape)))
    maps = np.ascontiguousarray(np.array(maps, dtype=np.int64))
    offsets = np.array(offsets, dtype=np.int64)
    stacked = (maps + offsets[:-1, None]).ravel()
    for a in (maps, offsets, stacked):
        a.flags.writeable = False
    return maps, offsets, stacked


def feasible_support(model: Model, targets: np.ndarray) -> np.ndarray:
    """Cells that are positive in at least one joint with these marginals.

    Solved as one LP over the cone ``{q >= 0 : A q = lam * targets}``:
    maximizing ``sum(min(q, 1))`` lets every cell that can be positive reach
    1 at once, so the optimum marks exactly the maximal support.
    """
    maps, offsets, _ = _cell_maps(model)
    n_cells, n_rows = maps.shape[1], int(offsets[-1])
    incidence = np.zeros((n_rows, n_cells))
    for k in range(maps.shape[0]):
        incidence[offsets[k] + maps[k], np.arange(n_cells)] = 1.0
    eye = np.eye(n_cells)
    res = linprog(
        c=np.concatenate([np.zeros(n_cells), -np.ones(n_cells), [0.0]]),
        A_ub=np.hstack([-eye, eye, np.zeros((n_cells, 1))]),
        b_ub=np.zeros(n_cells),
        A_eq=np.hstack([incidence, np.zeros((n_rows, n_cells)), -targets[:, None]]),
        b_eq=np.zeros(n_rows),
        bounds=[(0, None)] * n_cells + [(0, 1)] * n_cells + [(0, None)],
        method="highs",
    )
    if res.status != 0:
        raise ArithmeticError(f"support LP failed: {res.message}")
    return res.x[n_cells:2 * n_cells] > 0.5


def _fit(model: Model, targets: np.ndarray, settings: IpfSettings) -> IpfResult:
    scheme = model.scheme
    maps, offsets, _ = _cell_maps(model)
    q = np.full(scheme.size, 1.0 / scheme.size)
    sweeps, residual = _kernels.ipf_fit(
        q, maps, targets, offsets, settings.tolerance, settings.max_sweeps
    )
    if residual >= settings.tolerance:
        # Slow convergence means the extension set forces zeros that no
        # single marginal shows; refit from uniform on the feasible support.
        support = feasible_support(model, targets)
        if np.any(~support & (q > 0)):
            q = np.where(support, 1.0 / support.sum(), 0.0)
            more, residual = _kernels.ipf_fit(
                q, maps, targets, offsets, settings.tolerance, settings.max_sweeps
            )
            sweeps += more
    if residual >= settings.tolerance:
        raise IpfConvergenceError(sweeps, residual)
    return IpfResult(Distribution.normalized(scheme, q), sweeps, residual)


def fit_maxent(ms: MarginalSet, settings: IpfSettings = DEFAULT_IPF) -> IpfResult:
    """Maximum-entropy joint with the given marginals, with fit diagnostics."""
    targets = np.concatenate([m.probs for m in ms.marginals])
    return _fit(ms.model, targets, settings)


def fit_projection(p: Distribution, x: Model, settings: IpfSettings = DEFAULT_IPF) -> IpfResult:
    """``fit_maxent(project_model(p, x))`` without materializing the marginals."""
    if x.scheme != p.scheme:
        raise SchemeError("model and distribution are over different schemes")
    maps, offsets, stacked = _cell_maps(x)
    targets = np.bincount(
        stacked, weights=np.tile(p.probs, maps.shape[0]), minlength=offsets[-1]
    )
    return _fit(x, targets, settings)


def maxent_extension(ms: MarginalSet, settings: IpfSettings = DEFAULT_IPF) -> Distribution:
    return fit_maxent(ms, settings).distribution


def reconstruct(p: Distribution, x: Model, settings: IpfSettings = DEFAULT_IPF) -> Distribution:
    """Shorthand for the maximum-entropy extension of ``p``'s projection on ``x``."""
    return fit_projection(p, x, settings).distribution


def reconstructable(
    p: Distribution, x: Model, tol: float = 1e-8, settings: IpfSettings = DEFAULT_IPF
) -> bool:
    j = reconstruct(p, x, settings)
    return bool(np.max(np.abs(p.probs - j.probs)) < tol)


def reconstruction_divergence(
    p: Distribution, x: Model, settings: IpfSettings = DEFAULT_IPF, base: float | None = None
) -> float:
    return divergence(p, reconstruct(p, x, settings), base)


# -- decomposable models -----------------------------------------------------


def is_decomposable(x: Model) -> bool:
    """Graham reduction: drop vertices in one edge, drop contained edges, repeat."""
    edges = [set(c) for c in x.sets]
    changed = True
    while changed:
        changed = False
        for e in edges:
            lonely = {v for v in e if sum(v in f for f in edges) == 1}
            if lonely:
                e -= lonely
                changed = True
        kept = []
        for i, e in enumerate(edges):
            if not e:
                changed = True
                continue
            if any(e < f or (e == f and j < i) for j, f in enumerate(edges) if j != i):
                changed = True
                continue
            kept.append(e)
        edges = kept
    return not edges


def running_intersection_order(x: Model) -> list[frozenset] | None:
    """Order components so each one's overlap with its predecessors sits in a
    single predecessor; ``None`` if no such order exists."""
    comps = list(x.sets)
    for start in range(len(comps)):
        order = [comps[start]]
        rest = comps[:start] + comps[start + 1:]
        while rest:
            seen = frozenset().union(*order)
            for i, c in enumerate(rest):
                if any(c & seen <= prev for prev in order):
                    order.append(rest.pop(i))
                    break
            else:
                break
        if not rest:
            return order
    return None


def junction_product(ms: MarginalSet) -> Distribution:
    """Closed-form extension: clique marginals over separator marginals.

    Only valid for decomposable models; ``0/0`` cells are set to 0.
    """
    model = ms.model
    order = running_intersection_order(model)
    if order is None:
        raise ValueError(f"model {model} is not decomposable")
    scheme = model.scheme
    by_comp = {frozenset(c): m for c, m in zip(model.components, ms.marginals)}
    table = np.ones(scheme.shape)
    seen = frozenset()
    for comp in order:
        table = table * _broadcast(scheme, by_comp[comp])
        sep = comp & seen
        if sep:
            sub, sep_marg = marginal_table(by_comp[comp], sep)
            denom = _broadcast(scheme, Distribution.normalized(sub, sep_marg))
            table = np.divide(table, denom, out=np.zeros(scheme.shape), where=denom > 0)
        seen |= comp
    return Distribution.normalized(scheme, table)


def _broadcast(scheme: Scheme, marg: Distribution) -> np.ndarray:
    shape = [c if n in marg.scheme.names else 1 for n, c in scheme.variables]
    return marg.probs.reshape(shape)


# -- extension-set moves and the penalized-roughness check -------------------


def free_interactions(x: Model) -> list[tuple[str, ...]]:
    """Minimal variable sets contained in no component of ``x``.

    An alternating-sign move on the cells of such a set leaves every
    component marginal of ``x`` unchanged.
    """
    names = x.scheme.names
    found = []
    for r in range(2, len(names) + 1):
        for combo in combinations(names, r):
            s = frozenset(combo)
            if any(s <= c for c in x.sets):
                continue
            if any(set(f) < s for f in found):
                continue
            found.append(combo)
    return found


def marginal_preserving_move(
    p: Distribution, x: Model, rng: np.random.Generator, size: float | None = None
) -> Distribution:
    """One random member of the extension set of ``p``'s projection on ``x``.

    Picks a free interaction, two values per variable in it, a setting of the
    remaining variables, and adds ``+-delta`` over that sub-cube with sign
    the parity of the chosen values.  ``delta`` is drawn within the range
    keeping every cell non-negative (or clipped to it when ``size`` is given).
    """
    free = free_interactions(x)
    if not free:
        return p
    scheme = p.scheme
    inter = free[rng.integers(len(free))]
    idx = []
    signs = np.ones(1)
    for name, card in scheme.variables:
        if name in inter:
            pair = rng.choice(card, size=2, replace=False)
            idx.append(pair)
            signs = np.multiply.outer(signs, np.array([1.0, -1.0]))
        else:
            idx.append(np.array([rng.integers(card)]))
    mesh = np.ix_(*idx)
    signs = signs.reshape([len(i) for i in idx])
    table = np.array(p.table())
    cells = table[mesh]
    hi = np.min(cells[signs < 0])
    lo = -np.min(cells[signs > 0])
    delta = rng.uniform(lo, hi) if size is None else float(np.clip(size, lo, hi))
    table[mesh] = np.clip(cells + delta * signs, 0.0, None)
    return Distribution.normalized(scheme, table)


def penalized_optimality_check(
    p_hat: Distribution,
    x: Model,
    rng: np.random.Generator,
    samples: int = 100,
    moves: int = 3,
    tol: float = 1e-12,
    settings: IpfSettings = DEFAULT_IPF,
) -> bool:
    """Whether the reconstruction is closest to the uniform centroid among
    sampled members of its extension set."""
    j = reconstruct(p_hat, x, settings)
    centroid = Distribution.uniform(p_hat.scheme)
    d_j = divergence(j, centroid)
    for _ in range(samples):
        q = j
        for _ in range(moves):
            q = marginal_preserving_move(q, x, rng)
        if divergence(q, centroid) < d_j - tol:
            return False
    return True
