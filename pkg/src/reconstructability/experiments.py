"""Seeded Monte Carlo tables on small-sample reconstruction.

Every trial draws from its own generators, seeded by ``(master seed, table,
trial, purpose, ...)`` so a table is reproducible bit-for-bit and trials may
run in any order or process.  Reduction always happens in trial order.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from enum import IntEnum

import numpy as np
from scipy.stats import chi2

from .decision import random_decision_problem, same_region
from .estimation import klir_estimate_known_model, klir_estimate_searched
from .lattice import Model, enumerate_models
from .maxent import DEFAULT_IPF, IpfSettings, reconstruct
from .prob import (
    Distribution,
    Scheme,
    divergence,
    hamming,
    perturb,
    random_distribution,
    sample_relative_frequency,
)
from .search import SearchSettings


class Purpose(IntEnum):
    DISTRIBUTION = 1
    MODEL = 2
    PERTURBATION = 3
    SAMPLE = 4
    UTILITIES = 5


# Threshold scale for searched tables: a one-degree-of-freedom likelihood-ratio
# test at the 5% level stops when 2 n ln(2) * increment_bits > chi2(1, 0.95).
LR_DELTA_PER_N = float(chi2.ppf(0.95, 1) / (2 * np.log(2)))

TABLES = ("klir-effect", "perturbation", "decision", "model-sweep", "bishop")
_TABLE_TAG = {name: i + 1 for i, name in enumerate(TABLES)}


def stream(seed: int, table: str, trial: int, purpose: Purpose, *extra: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence([seed, _TABLE_TAG[table], trial, int(purpose), *extra])
    )


@dataclass(frozen=True)
class ExperimentConfig:
    """Parameters of one table.

    ``models`` lists the candidate models as lists of variable-name lists;
    tables with a fixed model use the first entry, the others pick among
    them per trial.
    """

    name: str
    cardinalities: tuple[int, ...] = (2, 2, 2)
    models: tuple[tuple[tuple[str, ...], ...], ...] = ()
    trials: int = 1000
    n_values: tuple[int, ...] = (5, 10, 40, 500, 5000)
    epsilon_values: tuple[float, ...] = (0.0,)
    acts_per_matrix: int = 10
    matrices_per_distribution: int = 1
    master_seed: int = 0
    delta: float = 0.01
    delta_per_n: float | None = None
    ipf_tolerance: float = DEFAULT_IPF.tolerance
    ipf_max_sweeps: int = 10_000
    workers: int = 1

    def __post_init__(self):
        if self.name not in TABLES:
            raise ValueError(f"unknown experiment {self.name!r}; choose from {TABLES}")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not self.n_values or min(self.n_values) < 1:
            raise ValueError("n_values must be non-empty and positive")
        if min(self.epsilon_values, default=0) < 0:
            raise ValueError("epsilons must be non-negative")
        if self.delta_per_n is not None and not self.delta_per_n >= 0:
            raise ValueError("delta_per_n must be non-negative")
        if self.acts_per_matrix < 1 or self.matrices_per_distribution < 1:
            raise ValueError("need at least one act and one matrix")
        object.__setattr__(
            self, "models", tuple(tuple(tuple(c) for c in m) for m in self.models)
        )

    @property
    def scheme(self) -> Scheme:
        return Scheme.of(*self.cardinalities)

    def model_list(self) -> list[Model]:
        scheme = self.scheme
        if self.models:
            return [Model.of(scheme, m) for m in self.models]
        return [m for m in enumerate_models(scheme) if not m.is_greatest]

    def search(self, n: int) -> SearchSettings:
        """Search settings for samples of size ``n``.

        With ``delta_per_n`` set the threshold is ``delta_per_n / n`` bits,
        otherwise the fixed ``delta``.
        """
        delta = self.delta if self.delta_per_n is None else self.delta_per_n / n
        return SearchSettings(delta=delta, ipf=self.ipf)

    @property
    def ipf(self) -> IpfSettings:
        return IpfSettings(self.ipf_tolerance, self.ipf_max_sweeps)

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, obj: dict) -> "ExperimentConfig":
        obj = dict(obj)
        for key in ("cardinalities", "n_values", "epsilon_values"):
            if key in obj:
                obj[key] = tuple(obj[key])
        if "models" in obj:
            obj["models"] = tuple(tuple(tuple(c) for c in m) for m in obj["models"])
        return cls(**obj)


def default_config(name: str, **overrides) -> ExperimentConfig:
    """Table layouts matching the published experiments."""
    loop = (("v1", "v2"), ("v1", "v3"), ("v2", "v3"))
    base = {
        "klir-effect": dict(
            models=((("v1", "v2"), ("v3",)),),
            n_values=(5, 10, 40, 500, 5000, 50000),
        ),
        "perturbation": dict(
            epsilon_values=(0.015, 0.05, 0.1), delta_per_n=LR_DELTA_PER_N,
        ),
        "decision": dict(
            models=((("v1",), ("v2",), ("v3",)),), trials=4000,
        ),
        "model-sweep": dict(
            epsilon_values=(0.0, 0.015, 0.05, 0.1),
            matrices_per_distribution=4,
            delta_per_n=LR_DELTA_PER_N,
        ),
        "bishop": dict(cardinalities=(3, 2, 2), models=(loop,), trials=100, n_values=(1000,)),
    }[name]
    base.update(overrides)
    return ExperimentConfig(name=name, **base)


@dataclass(frozen=True)
class TableResult:
    """Rows keyed by ``n``; one numeric column per label."""

    name: str
    row_label: str
    columns: tuple[str, ...]
    rows: tuple[tuple[int, tuple[float, ...]], ...]
    trials: int
    cases: int
    master_seed: int
    config: dict = field(default_factory=dict, compare=False)

    def column(self, label: str) -> np.ndarray:
        i = self.columns.index(label)
        return np.array([vals[i] for _, vals in self.rows])

    def row(self, n: int) -> dict[str, float]:
        for key, vals in self.rows:
            if key == n:
                return dict(zip(self.columns, vals))
        raise KeyError(n)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(
            f"# experiment={self.name} master_seed={self.master_seed} "
            f"trials={self.trials} cases={self.cases}\n"
        )
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([self.row_label, *self.columns])
        for key, vals in self.rows:
            writer.writerow([key, *(_fmt(v) for v in vals)])
        return buf.getvalue()

    def to_text(self) -> str:
        header = [self.row_label, *self.columns]
        body = [[str(k), *(f"{v:.4f}" for v in vals)] for k, vals in self.rows]
        widths = [max(len(r[i]) for r in [header, *body]) for i in range(len(header))]
        lines = [
            f"{self.name}: master_seed={self.master_seed} trials={self.trials} cases={self.cases}",
            "  ".join(h.rjust(w) for h, w in zip(header, widths)),
        ]
        lines += ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in body]
        return "\n".join(lines) + "\n"


def _fmt(v: float) -> str:
    return format(v, ".17g")


# -- per-trial work ------------------------------------------------------------


def gen_reconstructable(
    x: Model, rng: np.random.Generator, settings: IpfSettings = DEFAULT_IPF
) -> Distribution:
    """A random distribution made reconstructable from ``x`` by construction."""
    return reconstruct(random_distribution(x.scheme, rng), x, settings)


def _trial_klir_effect(cfg: ExperimentConfig, t: int) -> np.ndarray:
    x = cfg.model_list()[0]
    p = gen_reconstructable(x, stream(cfg.master_seed, cfg.name, t, Purpose.DISTRIBUTION), cfg.ipf)
    out = np.empty((len(cfg.n_values), 2))
    for i, n in enumerate(cfg.n_values):
        p_hat = sample_relative_frequency(p, n, stream(cfg.master_seed, cfg.name, t, Purpose.SAMPLE, n))
        est = klir_estimate_known_model(p_hat, x, cfg.search(n)).estimate
        out[i] = hamming(p, p_hat), hamming(p, est)
    return out


def _trial_perturbation(cfg: ExperimentConfig, t: int) -> np.ndarray:
    models = cfg.model_list()
    pick = stream(cfg.master_seed, cfg.name, t, Purpose.MODEL).integers(len(models))
    p0 = gen_reconstructable(
        models[pick], stream(cfg.master_seed, cfg.name, t, Purpose.DISTRIBUTION), cfg.ipf
    )
    out = np.empty((len(cfg.n_values), len(cfg.epsilon_values)))
    for j, eps in enumerate(cfg.epsilon_values):
        p = perturb(p0, eps, stream(cfg.master_seed, cfg.name, t, Purpose.PERTURBATION, j))
        for i, n in enumerate(cfg.n_values):
            rng = stream(cfg.master_seed, cfg.name, t, Purpose.SAMPLE, j, n)
            p_hat = sample_relative_frequency(p, n, rng)
            est = klir_estimate_searched(p_hat, cfg.search(n)).estimate
            out[i, j] = hamming(p, est) < hamming(p, p_hat)
    return out


def _trial_decision(cfg: ExperimentConfig, t: int) -> np.ndarray:
    x = cfg.model_list()[0]
    p = gen_reconstructable(x, stream(cfg.master_seed, cfg.name, t, Purpose.DISTRIBUTION), cfg.ipf)
    urng = stream(cfg.master_seed, cfg.name, t, Purpose.UTILITIES)
    problems = [
        random_decision_problem(x.scheme, cfg.acts_per_matrix, urng)
        for _ in range(cfg.matrices_per_distribution)
    ]
    out = np.zeros((len(cfg.n_values), 2))
    for i, n in enumerate(cfg.n_values):
        p_hat = sample_relative_frequency(p, n, stream(cfg.master_seed, cfg.name, t, Purpose.SAMPLE, n))
        est = klir_estimate_known_model(p_hat, x, cfg.search(n)).estimate
        for dp in problems:
            out[i] += same_region(dp, p, p_hat), same_region(dp, p, est)
    return out


def _trial_model_sweep(cfg: ExperimentConfig, t: int) -> np.ndarray:
    models = cfg.model_list()
    x0 = models[t % len(models)]
    p0 = gen_reconstructable(x0, stream(cfg.master_seed, cfg.name, t, Purpose.DISTRIBUTION), cfg.ipf)
    urng = stream(cfg.master_seed, cfg.name, t, Purpose.UTILITIES)
    problems = [
        random_decision_problem(x0.scheme, cfg.acts_per_matrix, urng)
        for _ in range(cfg.matrices_per_distribution)
    ]
    # net count of cases won by the reconstruction over the raw frequencies
    out = np.zeros((len(cfg.n_values), len(cfg.epsilon_values)))
    for j, eps in enumerate(cfg.epsilon_values):
        p = perturb(p0, eps, stream(cfg.master_seed, cfg.name, t, Purpose.PERTURBATION, j))
        for i, n in enumerate(cfg.n_values):
            rng = stream(cfg.master_seed, cfg.name, t, Purpose.SAMPLE, j, n)
            p_hat = sample_relative_frequency(p, n, rng)
            est = klir_estimate_searched(p_hat, cfg.search(n)).estimate
            for dp in problems:
                out[i, j] += int(same_region(dp, p, est)) - int(same_region(dp, p, p_hat))
    return out


def _trial_bishop(cfg: ExperimentConfig, t: int) -> np.ndarray:
    x = cfg.model_list()[0]
    p = gen_reconstructable(x, stream(cfg.master_seed, cfg.name, t, Purpose.DISTRIBUTION), cfg.ipf)
    out = np.empty((len(cfg.n_values), 1))
    for i, n in enumerate(cfg.n_values):
        p_hat = sample_relative_frequency(p, n, stream(cfg.master_seed, cfg.name, t, Purpose.SAMPLE, n))
        est = klir_estimate_known_model(p_hat, x, cfg.search(n)).estimate
        out[i, 0] = divergence(p, est) < divergence(p, p_hat)
    return out


_TRIALS = {
    "klir-effect": _trial_klir_effect,
    "perturbation": _trial_perturbation,
    "decision": _trial_decision,
    "model-sweep": _trial_model_sweep,
    "bishop": _trial_bishop,
}


def _run_chunk(cfg: ExperimentConfig, trials: range) -> list[np.ndarray]:
    fn = _TRIALS[cfg.name]
    return [fn(cfg, t) for t in trials]


def _run_trials(cfg: ExperimentConfig) -> np.ndarray:
    """Per-trial results stacked in trial order, shape ``(trials, rows, cols)``."""
    if cfg.workers <= 1:
        return np.array(_run_chunk(cfg, range(cfg.trials)))
    bounds = np.linspace(0, cfg.trials, cfg.workers * 4 + 1).astype(int)
    chunks = [range(a, b) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
        parts = list(pool.map(_run_chunk, [cfg] * len(chunks), chunks))
    return np.array([r for part in parts for r in part])


def _reduce(per_trial: np.ndarray) -> np.ndarray:
    total = np.zeros(per_trial.shape[1:])
    for r in per_trial:
        total += r
    return total


def _result(cfg, columns, values, cases) -> TableResult:
    rows = tuple(
        (int(n), tuple(float(v) for v in vals)) for n, vals in zip(cfg.n_values, values)
    )
    return TableResult(
        cfg.name, "n", tuple(columns), rows, cfg.trials, cases, cfg.master_seed, cfg.to_json()
    )


def _eps_labels(cfg) -> list[str]:
    return [f"eps={e:g}" for e in cfg.epsilon_values]


def run_klir_effect_table(cfg: ExperimentConfig) -> TableResult:
    """Mean Hamming distances of raw frequencies and of their reconstruction."""
    means = _reduce(_run_trials(cfg)) / cfg.trials
    return _result(cfg, ["h_raw", "h_reconstructed"], means, cfg.trials)


def run_perturbation_table(cfg: ExperimentConfig) -> TableResult:
    """Percent of trials where the searched reconstruction beats raw frequencies."""
    pct = 100.0 * _reduce(_run_trials(cfg)) / cfg.trials
    return _result(cfg, _eps_labels(cfg), pct, cfg.trials)


def run_decision_table(cfg: ExperimentConfig) -> TableResult:
    """Counts of cases where raw / reconstructed estimates share an optimal act
    with the truth, plus the same counts scaled to 1000 cases."""
    counts = _reduce(_run_trials(cfg))
    cases = cfg.trials * cfg.matrices_per_distribution
    values = np.hstack([counts, 1000.0 * counts / cases])
    return _result(
        cfg, ["raw_match", "reconstructed_match", "raw_per_1000", "reconstructed_per_1000"],
        values, cases,
    )


def run_model_sweep_table(cfg: ExperimentConfig) -> TableResult:
    """Percentage-point advantage of the searched reconstruction in decisions."""
    cases = cfg.trials * cfg.matrices_per_distribution
    diff = 100.0 * _reduce(_run_trials(cfg)) / cases
    return _result(cfg, _eps_labels(cfg), diff, cases)


def run_bishop_replication(cfg: ExperimentConfig) -> TableResult:
    """Trials where the reconstruction is divergence-closer to the truth."""
    return _result(cfg, ["closer_count"], _reduce(_run_trials(cfg)), cfg.trials)


RUNNERS = {
    "klir-effect": run_klir_effect_table,
    "perturbation": run_perturbation_table,
    "decision": run_decision_table,
    "model-sweep": run_model_sweep_table,
    "bishop": run_bishop_replication,
}


def run(cfg: ExperimentConfig) -> TableResult:
    return RUNNERS[cfg.name](cfg)


def load_config(path, **overrides) -> ExperimentConfig:
    with open(path) as fh:
        obj = json.load(fh)
    cfg = ExperimentConfig.from_json(obj)
    return replace(cfg, **overrides) if overrides else cfg
