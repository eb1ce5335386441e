"""Expected-utility decisions over the cells of a product space."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .prob import Distribution, Scheme, SchemeError


@dataclass(frozen=True, eq=False)
class DecisionProblem:
    """Utilities ``utilities[i, c]`` of action ``actions[i]`` in cell ``c``."""

    scheme: Scheme
    actions: tuple[str, ...]
    utilities: np.ndarray

    def __post_init__(self):
        actions = tuple(str(a) for a in self.actions)
        if not actions:
            raise ValueError("a decision problem needs at least one action")
        if len(set(actions)) != len(actions):
            raise ValueError("duplicate action names")
        u = np.array(self.utilities, dtype=np.float64)
        if u.ndim != 2 or u.shape != (len(actions), self.scheme.size):
            raise ValueError(
                f"utilities must have shape ({len(actions)}, {self.scheme.size})"
            )
        u.flags.writeable = False
        object.__setattr__(self, "actions", actions)
        object.__setattr__(self, "utilities", u)

    def _check(self, p: Distribution):
        if p.scheme != self.scheme:
            raise SchemeError("distribution is over a different scheme")

    def expected_utilities(self, p: Distribution) -> np.ndarray:
        self._check(p)
        return self.utilities @ p.probs


def expected_utility(dp: DecisionProblem, action: str, p: Distribution) -> float:
    try:
        i = dp.actions.index(action)
    except ValueError:
        raise KeyError(f"unknown action {action!r}") from None
    dp._check(p)
    return float(dp.utilities[i] @ p.probs)


def maximizing_actions(dp: DecisionProblem, p: Distribution) -> frozenset[str]:
    # exact comparison: ties are faces of the regions, not rounding slack
    eu = dp.expected_utilities(p)
    best = eu.max()
    return frozenset(a for a, e in zip(dp.actions, eu) if e >= best)


def same_region(dp: DecisionProblem, p: Distribution, q: Distribution) -> bool:
    """Whether some action maximizes expected utility under both ``p`` and ``q``."""
    return bool(maximizing_actions(dp, p) & maximizing_actions(dp, q))


def superior(
    dp: DecisionProblem, p_true: Distribution, est_i: Distribution, est_j: Distribution
) -> bool:
    return same_region(dp, p_true, est_i) and not same_region(dp, p_true, est_j)


def random_decision_problem(
    scheme: Scheme, m: int, rng: np.random.Generator
) -> DecisionProblem:
    """``m`` actions with i.i.d. uniform [0, 1] utilities."""
    if m < 1:
        raise ValueError("need at least one action")
    return DecisionProblem(
        scheme, tuple(f"a{i + 1}" for i in range(m)), rng.random((m, scheme.size))
    )


def problem_from_json(scheme: Scheme, obj: dict) -> DecisionProblem:
    return DecisionProblem(scheme, tuple(obj["actions"]), obj["utilities"])


def problem_to_json(dp: DecisionProblem) -> dict:
    return {
        "actions": list(dp.actions),
        "utilities": [[float(u) for u in row] for row in dp.utilities],
    }


def read_problem(scheme: Scheme, path) -> DecisionProblem:
    with open(path) as fh:
        return problem_from_json(scheme, json.load(fh))
