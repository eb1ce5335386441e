import os
import subprocess
import sys

import numpy as np
import pytest

from reconstructability import _kernels
from reconstructability.lattice import enumerate_models
from reconstructability.maxent import _cell_maps
from reconstructability.prob import Scheme, random_distribution

needs_cython = pytest.mark.skipif(
    "cython" not in _kernels.BACKENDS, reason="compiled kernel not built"
)


def _problem(scheme, model, rng):
    maps, offsets, stacked = _cell_maps(model)
    p = random_distribution(scheme, rng).probs
    targets = np.bincount(stacked, weights=np.tile(p, maps.shape[0]), minlength=offsets[-1])
    return maps, offsets, targets


class TestBackends:
    @needs_cython
    @pytest.mark.parametrize("cards", [(2, 2, 2), (3, 2, 2), (2, 3, 2, 2)])
    def test_backends_agree(self, cards, rng):
        scheme = Scheme.of(*cards)
        for model in enumerate_models(scheme):
            maps, offsets, targets = _problem(scheme, model, rng)
            results = {}
            for name, fit in _kernels.BACKENDS.items():
                q = np.full(scheme.size, 1.0 / scheme.size)
                sweeps, residual = fit(q, maps, targets, offsets, 1e-12, 500)
                results[name] = (q, sweeps, residual)
            qp, sp, _ = results["python"]
            qc, sc, _ = results["cython"]
            assert sp == sc
            np.testing.assert_allclose(qc, qp, rtol=0, atol=1e-14)

    @pytest.mark.parametrize("name", sorted(_kernels.BACKENDS))
    def test_already_fitted_takes_no_sweeps(self, name, rng):
        scheme = Scheme.binary(3)
        model = enumerate_models(scheme)[0]
        maps, offsets, targets = _problem(scheme, model, rng)
        q = np.full(scheme.size, 1.0 / scheme.size)
        _kernels.BACKENDS[name](q, maps, targets, offsets, 1e-12, 500)
        assert _kernels.BACKENDS[name](q, maps, targets, offsets, 1e-10, 500)[0] == 0

    @pytest.mark.parametrize("name", sorted(_kernels.BACKENDS))
    def test_sweep_cap(self, name):
        # forced zeros make the loop fit converge sublinearly
        scheme = Scheme.binary(3)
        loop = [m for m in enumerate_models(scheme) if len(m.components) == 3
                and all(len(c) == 2 for c in m.components)][0]
        maps, offsets, _ = _cell_maps(loop)
        p = np.array([0.5, 0, 0, 0, 0, 0, 0, 0.5])
        targets = np.bincount(
            (maps + offsets[:-1, None]).ravel(), weights=np.tile(p, 3), minlength=offsets[-1]
        )
        # a target no joint reaches: sum of the first marginal exceeds 1
        targets = targets.copy()
        targets[0] += 0.1
        q = np.full(8, 1 / 8)
        sweeps, residual = _kernels.BACKENDS[name](q, maps, targets, offsets, 1e-10, 7)
        assert sweeps == 7
        assert residual > 1e-10


class TestSelection:
    def _backend_in_subprocess(self, env):
        out = subprocess.run(
            [sys.executable, "-c", "import reconstructability as r; print(r.BACKEND)"],
            env={**os.environ, **env}, capture_output=True, text=True, check=True,
        )
        return out.stdout.strip()

    def test_env_forces_fallback(self):
        assert self._backend_in_subprocess({"RECONSTRUCTABILITY_PURE": "1"}) == "python"

    def test_default_prefers_compiled(self):
        env = dict(os.environ)
        env.pop("RECONSTRUCTABILITY_PURE", None)
        out = subprocess.run(
            [sys.executable, "-c", "import reconstructability as r; print(r.BACKEND)"],
            env=env, capture_output=True, text=True, check=True,
        ).stdout.strip()
        assert out == ("cython" if "cython" in _kernels.BACKENDS else "python")
