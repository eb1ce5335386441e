"""Hypergraph models and the refinement lattice."""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable

from .prob import Scheme, SchemeError

MAX_ENUM_VARIABLES = 5


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class Model:
    """A covering antichain of variable subsets of ``scheme``.

    Components are stored as tuples of variable names in scheme order and
    sorted by their scheme positions; this canonical order decides ties
    everywhere downstream.
    """

    scheme: Scheme
    components: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        pos = {n: i for i, n in enumerate(self.scheme.names)}
        comps = set()
        for comp in self.components:
            comp = frozenset(comp)
            if not comp:
                raise ModelError("empty component")
            unknown = comp - pos.keys()
            if unknown:
                raise SchemeError(f"unknown variable(s) {sorted(unknown)}")
            comps.add(comp)
        if set().union(*comps) != set(pos):
            raise ModelError("components do not cover every variable")
        for a in comps:
            for b in comps:
                if a < b:
                    raise ModelError(f"{sorted(a)} is contained in {sorted(b)}")
        keyed = sorted(tuple(sorted(pos[n] for n in c)) for c in comps)
        canon = tuple(tuple(self.scheme.names[i] for i in k) for k in keyed)
        object.__setattr__(self, "components", canon)

    @classmethod
    def of(cls, scheme: Scheme, components: Iterable[Iterable[str]]) -> "Model":
        return cls(scheme, tuple(tuple(c) for c in components))

    @classmethod
    def greatest(cls, scheme: Scheme) -> "Model":
        return cls(scheme, (scheme.names,))

    @classmethod
    def least(cls, scheme: Scheme) -> "Model":
        return cls(scheme, tuple((n,) for n in scheme.names))

    @cached_property
    def key(self) -> tuple[tuple[int, ...], ...]:
        pos = {n: i for i, n in enumerate(self.scheme.names)}
        return tuple(tuple(pos[n] for n in c) for c in self.components)

    @cached_property
    def sets(self) -> tuple[frozenset, ...]:
        return tuple(frozenset(c) for c in self.components)

    @property
    def is_least(self) -> bool:
        return all(len(c) == 1 for c in self.components)

    @property
    def is_greatest(self) -> bool:
        return len(self.components) == 1 and len(self.components[0]) == len(
            self.scheme.names
        )

    def __lt__(self, other: "Model") -> bool:
        # canonical total order, not refinement
        return self.key < other.key

    def __str__(self):
        return "{" + ", ".join("{" + ",".join(c) + "}" for c in self.components) + "}"

    def to_json(self) -> list[list[str]]:
        return [list(c) for c in self.components]


def refines(x: Model, y: Model) -> bool:
    """``x <= y``: every component of ``x`` lies inside some component of ``y``."""
    if x.scheme != y.scheme:
        raise SchemeError("models are over different schemes")
    return all(any(a <= b for b in y.sets) for a in x.sets)


def _antichain(sets: Iterable[frozenset]) -> list[frozenset]:
    sets = set(sets)
    return [s for s in sets if not any(s < t for t in sets)]


def immediate_refinements(x: Model) -> list[Model]:
    """Models covered by ``x`` in the refinement lattice, canonically ordered."""
    if x.is_least:
        raise ModelError("the least model has no refinements")
    candidates = set()
    for comp in x.sets:
        if len(comp) < 2:
            continue
        rest = [c for c in x.sets if c != comp]
        replaced = rest + [comp - {v} for v in comp]
        candidates.add(Model.of(x.scheme, _antichain(replaced)))
    covers = [
        y for y in candidates
        if not any(z != y and refines(y, z) for z in candidates)
    ]
    return sorted(covers)


def enumerate_models(scheme: Scheme) -> list[Model]:
    """Every covering antichain over the scheme's variables."""
    names = scheme.names
    k = len(names)
    if k > MAX_ENUM_VARIABLES:
        raise ModelError(f"refusing to enumerate models over {k} > {MAX_ENUM_VARIABLES} variables")
    subsets = [
        frozenset(c) for r in range(k, 0, -1) for c in combinations(names, r)
    ]
    full = frozenset(names)
    found = []

    def extend(start, chosen, covered):
        if covered == full:
            found.append(Model.of(scheme, chosen))
        for i in range(start, len(subsets)):
            s = subsets[i]
            # subsets come in non-increasing size, so only containment in
            # an earlier (larger or equal) choice can break the antichain
            if any(s <= c for c in chosen):
                continue
            extend(i + 1, chosen + [s], covered | s)

    extend(0, [], frozenset())
    return sorted(found)


def height(scheme: Scheme) -> int:
    """Length of the longest chain from ``{V}`` down to the least model."""
    best = {Model.greatest(scheme): 0}
    frontier = [Model.greatest(scheme)]
    while frontier:
        nxt = []
        for m in frontier:
            if m.is_least:
                continue
            for y in immediate_refinements(m):
                d = best[m] + 1
                if d > best.get(y, -1):
                    best[y] = d
                    nxt.append(y)
        frontier = nxt
    return best[Model.least(scheme)]


def model_from_json(scheme: Scheme, obj) -> Model:
    if not isinstance(obj, list) or not all(isinstance(c, list) for c in obj):
        raise ModelError("a model file is a list of lists of variable names")
    return Model.of(scheme, obj)


def read_model(scheme: Scheme, path) -> Model:
    with open(path) as fh:
        return model_from_json(scheme, json.load(fh))


def model_dumps(model: Model) -> str:
    return json.dumps(model.to_json()) + "\n"
