import json
from itertools import chain, combinations

import pytest

from reconstructability.lattice import (
    Model,
    ModelError,
    enumerate_models,
    height,
    immediate_refinements,
    model_dumps,
    model_from_json,
    refines,
)
from reconstructability.prob import Scheme

from conftest import model


def _powerset(items, min_size=1):
    return chain.from_iterable(combinations(items, r) for r in range(min_size, len(items) + 1))


def brute_force_models(names):
    """Every covering antichain of non-empty subsets, by exhaustive search."""
    subsets = [frozenset(s) for s in _powerset(names)]
    found = set()
    for family in _powerset(subsets):
        if frozenset().union(*family) != frozenset(names):
            continue
        if any(a < b for a in family for b in family):
            continue
        found.add(frozenset(family))
    return found


def brute_refines(x, y):
    return all(any(a <= b for b in y) for a in x)


class TestModel:
    def test_canonical_order(self, scheme3):
        a = model(scheme3, "v3,v2", "v1")
        b = model(scheme3, "v1", "v2,v3")
        assert a == b
        assert str(a) == "{{v1}, {v2,v3}}"

    @pytest.mark.parametrize("comps", [
        [["v1", "v2"]],                       # v3 uncovered
        [["v1", "v2"], ["v1"], ["v3"]],       # not an antichain
        [["v1", "v9"], ["v2", "v3"]],         # unknown variable
        [[], ["v1", "v2", "v3"]],             # empty component
    ])
    def test_invalid(self, scheme3, comps):
        with pytest.raises(ValueError):
            Model.of(scheme3, comps)

    def test_duplicate_components_collapse(self, scheme3):
        assert model(scheme3, "v1,v2", "v2,v1", "v3") == model(scheme3, "v1,v2", "v3")

    def test_extremes(self, scheme3):
        assert Model.greatest(scheme3).is_greatest
        assert Model.least(scheme3).is_least
        assert len(Model.least(scheme3).components) == 3


class TestEnumeration:
    def test_three_variables(self, scheme3):
        assert len(enumerate_models(scheme3)) == 9

    @pytest.mark.parametrize("k, count", [(1, 1), (2, 2), (3, 9), (4, 114)])
    def test_counts_match_brute_force(self, k, count):
        scheme = Scheme.binary(k)
        models = enumerate_models(scheme)
        assert len(models) == count
        assert {frozenset(m.sets) for m in models} == brute_force_models(scheme.names)

    def test_sorted_and_unique(self):
        models = enumerate_models(Scheme.binary(4))
        assert models == sorted(models)
        assert len(set(models)) == len(models)

    def test_too_many_variables(self):
        with pytest.raises(ValueError):
            enumerate_models(Scheme.binary(6))


class TestRefinement:
    def test_order_matches_brute_force(self):
        models = enumerate_models(Scheme.binary(3))
        for x in models:
            for y in models:
                assert refines(x, y) == brute_refines(x.sets, y.sets)

    def test_partial_order(self):
        models = enumerate_models(Scheme.binary(3))
        for x in models:
            assert refines(Model.least(x.scheme), x)
            assert refines(x, Model.greatest(x.scheme))
            for y in models:
                if refines(x, y) and refines(y, x):
                    assert x == y

    @pytest.mark.parametrize("k", [2, 3, 4])
    def test_immediate_refinements_are_covers(self, k):
        # y covers x iff x < y with nothing strictly between
        models = enumerate_models(Scheme.binary(k))
        for y in models:
            if y.is_least:
                continue
            below = [x for x in models if x != y and refines(x, y)]
            covers = {
                x for x in below
                if not any(z != x and refines(x, z) for z in below)
            }
            assert set(immediate_refinements(y)) == covers

    def test_loop_refinements(self, scheme3, loop3):
        expected = {
            model(scheme3, "v1,v2", "v1,v3"),
            model(scheme3, "v1,v2", "v2,v3"),
            model(scheme3, "v1,v3", "v2,v3"),
        }
        assert set(immediate_refinements(loop3)) == expected

    def test_least_has_none(self, scheme3):
        with pytest.raises(ModelError):
            immediate_refinements(Model.least(scheme3))

    @pytest.mark.parametrize("k, h", [(1, 0), (2, 1), (3, 4)])
    def test_height(self, k, h):
        assert height(Scheme.binary(k)) == h


class TestModelFile:
    def test_round_trip(self, scheme3, loop3):
        text = model_dumps(loop3)
        assert model_dumps(model_from_json(scheme3, json.loads(text))) == text

    def test_canonicalized_on_read(self, scheme3):
        m = model_from_json(scheme3, [["v3", "v2"], ["v1"]])
        assert model_dumps(m) == '[["v1"], ["v2", "v3"]]\n'

    def test_rejects_object(self, scheme3):
        with pytest.raises(ModelError):
            model_from_json(scheme3, {"components": [["v1", "v2", "v3"]]})
