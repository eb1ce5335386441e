"""Distributions over finite product spaces.

Cells of ``dom(V)`` are indexed row-major with the last listed variable
varying fastest, so a distribution's ``probs`` vector reshapes directly to an
array of shape ``scheme.shape`` in C order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

SUM_TOL = 1e-12
FILE_SUM_TOL = 1e-9


class SchemeError(ValueError):
    """Raised for invalid variable names, subsets or mismatched schemes."""


@dataclass(frozen=True)
class Scheme:
    """An ordered set of named finite variables."""

    variables: tuple[tuple[str, int], ...]

    def __post_init__(self):
        variables = tuple((str(name), int(card)) for name, card in self.variables)
        object.__setattr__(self, "variables", variables)
        if not variables:
            raise SchemeError("a scheme needs at least one variable")
        names = [name for name, _ in variables]
        if len(set(names)) != len(names):
            raise SchemeError(f"duplicate variable names in {names}")
        for name, card in variables:
            if card < 2:
                raise SchemeError(f"variable {name!r} has cardinality {card} < 2")

    @classmethod
    def binary(cls, k: int, prefix: str = "v") -> "Scheme":
        return cls(tuple((f"{prefix}{i + 1}", 2) for i in range(k)))

    @classmethod
    def of(cls, *cards: int, prefix: str = "v") -> "Scheme":
        return cls(tuple((f"{prefix}{i + 1}", c) for i, c in enumerate(cards)))

    @cached_property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.variables)

    @cached_property
    def shape(self) -> tuple[int, ...]:
        return tuple(card for _, card in self.variables)

    @cached_property
    def size(self) -> int:
        return math.prod(self.shape)

    @cached_property
    def _positions(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.names)}

    def position(self, name: str) -> int:
        try:
            return self._positions[name]
        except KeyError:
            raise SchemeError(f"unknown variable {name!r}") from None

    def sub(self, names: Iterable[str]) -> "Scheme":
        """The subscheme on ``names``, ordered as in this scheme."""
        positions = sorted({self.position(n) for n in names})
        if not positions:
            raise SchemeError("a subscheme must be non-empty")
        return Scheme(tuple(self.variables[i] for i in positions))

    def is_subscheme_of(self, other: "Scheme") -> bool:
        return set(self.variables) <= set(other.variables)

    def to_json(self) -> list[dict]:
        return [{"name": n, "cardinality": c} for n, c in self.variables]

    @classmethod
    def from_json(cls, obj: Sequence[dict]) -> "Scheme":
        return cls(tuple((v["name"], v["cardinality"]) for v in obj))


@dataclass(frozen=True, eq=False)
class Distribution:
    """A probability table over a scheme.

    ``probs`` is stored as a read-only float64 vector in cell order.
    """

    scheme: Scheme
    probs: np.ndarray

    def __post_init__(self):
        probs = np.array(self.probs, dtype=np.float64).reshape(-1)
        if probs.size != self.scheme.size:
            raise ValueError(
                f"expected {self.scheme.size} cells, got {probs.size}"
            )
        if not np.all(np.isfinite(probs)) or probs.min() < 0:
            raise ValueError("probabilities must be finite and non-negative")
        total = probs.sum()
        if abs(total - 1.0) > SUM_TOL:
            raise ValueError(f"probabilities sum to {total!r}, not 1")
        probs.flags.writeable = False
        object.__setattr__(self, "probs", probs)

    @classmethod
    def normalized(cls, scheme: Scheme, weights) -> "Distribution":
        """Build a distribution from non-negative weights (e.g. counts)."""
        w = np.asarray(weights, dtype=np.float64).reshape(-1)
        total = w.sum()
        if not total > 0:
            raise ValueError("weights must have positive total mass")
        return cls(scheme, w / total)

    @classmethod
    def uniform(cls, scheme: Scheme) -> "Distribution":
        return cls(scheme, np.full(scheme.size, 1.0 / scheme.size))

    @classmethod
    def point_mass(cls, scheme: Scheme, cell: int) -> "Distribution":
        probs = np.zeros(scheme.size)
        probs[cell] = 1.0
        return cls(scheme, probs)

    def table(self) -> np.ndarray:
        return self.probs.reshape(self.scheme.shape)

    def allclose(self, other: "Distribution", atol: float = 1e-12) -> bool:
        _check_same(self, other)
        return bool(np.max(np.abs(self.probs - other.probs)) <= atol)

    def __repr__(self):
        return f"Distribution({list(self.scheme.names)}, {self.probs.tolist()})"


def _check_same(p: Distribution, q: Distribution) -> None:
    if p.scheme != q.scheme:
        raise SchemeError(f"scheme mismatch: {p.scheme.names} vs {q.scheme.names}")


def marginal_table(p: Distribution, names: Iterable[str]) -> tuple[Scheme, np.ndarray]:
    sub = p.scheme.sub(names)
    keep = {p.scheme.position(n) for n in sub.names}
    drop = tuple(i for i in range(len(p.scheme.variables)) if i not in keep)
    return sub, p.table().sum(axis=drop).reshape(-1)


def project(p: Distribution, names: Iterable[str]) -> Distribution:
    """Marginal of ``p`` over the variables in ``names``."""
    sub, marg = marginal_table(p, names)
    return Distribution(sub, marg / marg.sum())


def _log(x, base):
    return np.log(x) if base is None else np.log(x) / math.log(base)


def entropy(p: Distribution, base: float | None = None) -> float:
    """Shannon entropy with ``0 log 0 = 0``; natural log unless ``base`` is given."""
    nz = p.probs[p.probs > 0]
    return float(-np.sum(nz * _log(nz, base)))


def divergence(p: Distribution, q: Distribution, base: float | None = None) -> float:
    """Directed divergence ``sum p log(p/q)``; ``math.inf`` if ``q`` misses p's support."""
    _check_same(p, q)
    mask = p.probs > 0
    if np.any(q.probs[mask] == 0):
        return math.inf
    pm = p.probs[mask]
    d = float(np.sum(pm * _log(pm / q.probs[mask], base)))
    return max(d, 0.0)


def hamming(p: Distribution, q: Distribution) -> float:
    """Sum of absolute cell deviations (the L1 distance)."""
    _check_same(p, q)
    return float(np.sum(np.abs(p.probs - q.probs)))


def sample_counts(p: Distribution, n: int, rng: np.random.Generator) -> np.ndarray:
    if n < 1:
        raise ValueError("need at least one observation")
    # Renormalize against float drift; multinomial rejects sums above 1.
    return rng.multinomial(n, p.probs / p.probs.sum())


def sample_relative_frequency(
    p: Distribution, n: int, rng: np.random.Generator
) -> Distribution:
    """Relative frequencies of ``n`` independent draws from ``p``."""
    counts = sample_counts(p, n, rng)
    return Distribution(p.scheme, counts / n)


def random_distribution(scheme: Scheme, rng: np.random.Generator) -> Distribution:
    """A flat-Dirichlet draw: normalized independent unit exponentials."""
    return Distribution.normalized(scheme, rng.standard_exponential(scheme.size))


def perturb(p0: Distribution, epsilon: float, rng: np.random.Generator) -> Distribution:
    """Shift every cell by ``+epsilon`` or ``-epsilon``, clamp at 0, renormalize."""
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    signs = rng.choice(np.array([-1.0, 1.0]), size=p0.scheme.size)
    return perturb_with_signs(p0, epsilon, signs)


def perturb_with_signs(p0: Distribution, epsilon: float, signs) -> Distribution:
    if epsilon == 0:
        return p0
    shifted = np.clip(p0.probs + epsilon * np.asarray(signs, dtype=np.float64), 0.0, None)
    if shifted.sum() <= 0:
        raise ValueError("perturbation removed all probability mass")
    return Distribution.normalized(p0.scheme, shifted)


# -- file format -------------------------------------------------------------


def distribution_from_json(obj: dict) -> Distribution:
    """Parse a distribution file object.

    An all-integer ``probs`` list is read as counts and normalized.
    """
    scheme = Scheme.from_json(obj["variables"])
    raw = obj["probs"]
    if len(raw) != scheme.size:
        raise ValueError(f"expected {scheme.size} cells, got {len(raw)}")
    if any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in raw):
        raise ValueError("probs must be numbers")
    if all(isinstance(x, int) for x in raw):
        if min(raw) < 0:
            raise ValueError("counts must be non-negative")
        return Distribution.normalized(scheme, raw)
    probs = np.array(raw, dtype=np.float64)
    total = probs.sum()
    if abs(total - 1.0) > FILE_SUM_TOL:
        raise ValueError(f"probabilities sum to {total!r}, not 1")
    if abs(total - 1.0) > SUM_TOL:
        probs = probs / total
    return Distribution(scheme, probs)


def distribution_to_json(p: Distribution) -> dict:
    return {"variables": p.scheme.to_json(), "probs": [float(x) for x in p.probs]}


def read_distribution(path) -> Distribution:
    with open(path) as fh:
        return distribution_from_json(json.load(fh))


def dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def write_distribution(p: Distribution, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(distribution_to_json(p)))
