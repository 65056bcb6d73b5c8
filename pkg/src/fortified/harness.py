"""Replicate runs, success classification and failure-probability statistics."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .de import DEConfig, RunRecord, de_minimize
from .fortification import fortify
from .functions import BoxDomain, KnownOptimum, ObjectiveFunction, get_function, optimum_by_label

_MASK64 = (1 << 64) - 1
_GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    """The SplitMix64 output function applied to state ``x + gamma``."""
    z = (x + _GOLDEN_GAMMA) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def run_seed(master_seed: int, run_index: int) -> int:
    """Seed of run ``run_index``: output number ``run_index + 1`` of a
    SplitMix64 stream started at ``master_seed``."""
    if master_seed < 0 or run_index < 0:
        raise ValueError("master_seed and run_index must be non-negative")
    return splitmix64((master_seed + run_index * _GOLDEN_GAMMA) & _MASK64)


@dataclass(frozen=True)
class SuccessCriterion:
    target_value: float
    value_tolerance: float = 0.01
    near_radius: float = 1.0

    def __post_init__(self):
        if not self.value_tolerance > 0 or not self.near_radius > 0:
            raise ValueError("value_tolerance and near_radius must be positive")


@dataclass(frozen=True)
class Problem:
    """Picklable recipe for a (possibly fortified) registered test function.

    Calling it returns a fresh objective with its own evaluation counter, so
    it can be used directly as the objective factory of :func:`run_replicates`.
    """

    function: str = "branin"
    bump_optimum: Optional[int] = None
    epsilon: float = 1.0
    amplitude: float = 10.0

    def build(self) -> tuple[ObjectiveFunction, list[KnownOptimum]]:
        base, optima = get_function(self.function)
        if self.bump_optimum is None:
            return base, optima
        return fortify(base, optima, self.bump_optimum, self.epsilon, self.amplitude)

    def __call__(self) -> ObjectiveFunction:
        return self.build()[0]

    @property
    def optima(self) -> list[KnownOptimum]:
        return self.build()[1]

    @property
    def target_value(self) -> float:
        objective, optima = self.build()
        if self.bump_optimum is None:
            return min(o.value for o in optima)
        # base(center) - A/e, never a hard-coded constant
        return objective.fortified_optimum_value

    def criterion(self, value_tolerance: float = 0.01, near_radius: float = 1.0) -> SuccessCriterion:
        return SuccessCriterion(self.target_value, value_tolerance, near_radius)


@dataclass(frozen=True)
class ReplicateSummary:
    n_runs: int
    n_failures: int
    failure_percent: float
    per_optimum_percent: tuple[float, ...]
    mean_total_evals: float
    mean_de_evals: float
    mean_polish_evals: float
    outcome_bits: tuple[bool, ...]

    @property
    def failure_fraction(self) -> float:
        return self.n_failures / self.n_runs


def classify_run(
    record: RunRecord, optima: Sequence[KnownOptimum], criterion: SuccessCriterion
) -> tuple[bool, Optional[int]]:
    """``(success, nearest_label)``; the label is None when no optimum is within ``near_radius``."""
    if not optima:
        raise ValueError("optima must be non-empty")
    success = record.best_f - criterion.target_value <= criterion.value_tolerance
    dist, label = min((math.dist(record.best_x, o.location), o.label) for o in optima)
    return success, (label if dist <= criterion.near_radius else None)


def _run_block(args) -> list[RunRecord]:
    factory, config, master_seed, start, stop = args
    records = []
    for i in range(start, stop):
        seed = run_seed(master_seed, i)
        records.append(de_minimize(factory(), replace(config, seed=seed), np.random.default_rng(seed)))
    return records


def run_records(
    objective_factory: Callable[[], ObjectiveFunction],
    config: DEConfig,
    n: int,
    master_seed: int,
    workers: int = 1,
) -> list[RunRecord]:
    """``n`` independent runs in run-index order.

    Run ``i`` is seeded with ``run_seed(master_seed, i)`` and gets a fresh
    objective, so the result does not depend on ``workers``.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if workers <= 1:
        return _run_block((objective_factory, config, master_seed, 0, n))
    n_blocks = min(n, workers * 4)
    edges = np.linspace(0, n, n_blocks + 1).astype(int)
    jobs = [(objective_factory, config, master_seed, int(a), int(b)) for a, b in zip(edges[:-1], edges[1:])]
    records = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for block in pool.map(_run_block, jobs):
            records.extend(block)
    return records


def summarize(
    records: Sequence[RunRecord], optima: Sequence[KnownOptimum], criterion: SuccessCriterion
) -> ReplicateSummary:
    n = len(records)
    if n == 0:
        raise ValueError("no records to summarize")
    bits = []
    near = {o.label: 0 for o in optima}
    for rec in records:
        success, label = classify_run(rec, optima, criterion)
        bits.append(not success)
        if label is not None:
            near[label] += 1
    n_fail = sum(bits)
    return ReplicateSummary(
        n_runs=n,
        n_failures=n_fail,
        failure_percent=100.0 * n_fail / n,
        per_optimum_percent=tuple(100.0 * near[o.label] / n for o in optima),
        mean_total_evals=float(np.mean([r.total_evals for r in records])),
        mean_de_evals=float(np.mean([r.de_evals for r in records])),
        mean_polish_evals=float(np.mean([r.polish_evals for r in records])),
        outcome_bits=tuple(bits),
    )


def run_replicates(
    objective_factory: Callable[[], ObjectiveFunction],
    optima: Sequence[KnownOptimum],
    config: DEConfig,
    criterion: SuccessCriterion,
    n: int,
    master_seed: int,
    workers: int = 1,
) -> ReplicateSummary:
    records = run_records(objective_factory, config, n, master_seed, workers)
    return summarize(records, optima, criterion)


def sigma_fail(p: float, n: int) -> float:
    """Standard deviation of the failure count in the form p * sqrt(p n (1-p)).

    Not the textbook binomial value; see :func:`binomial_std` for that.
    """
    if not 0 <= p <= 1 or n < 1:
        raise ValueError("need 0 <= p <= 1 and n >= 1")
    return p * math.sqrt(p * n * (1 - p))


def binomial_std(p: float, n: int) -> float:
    """Standard deviation of the number of failures in ``n`` Bernoulli(p) runs."""
    if not 0 <= p <= 1 or n < 1:
        raise ValueError("need 0 <= p <= 1 and n >= 1")
    return math.sqrt(n * p * (1 - p))


def failure_fraction_stderr(p: float, n: int) -> float:
    return binomial_std(p, n) / n


def required_runs(p: float, accuracy: float = 0.01) -> int:
    """Runs needed so that ``sigma_fail(p, n) == accuracy * n``: ceil(p^3 (1-p) / accuracy^2)."""
    if not 0 < p < 1 or not accuracy > 0:
        raise ValueError("need 0 < p < 1 and accuracy > 0")
    # round first so that exact products (p = 0.5 -> 625) are not bumped by float noise
    return math.ceil(round(p**3 * (1 - p) / accuracy**2, 9))


def ball_volume(radius: float, dim: int) -> float:
    return math.pi ** (dim / 2) / math.gamma(dim / 2 + 1) * radius**dim


def bump_hit_probability(
    population: int,
    dim: int,
    epsilon: float,
    domain: BoxDomain,
    center: Optional[Sequence[float]] = None,
) -> tuple[float, float]:
    """``(p_single, p_none)`` for uniformly placed initial members.

    ``p_single`` is the chance one member lands inside the bump support (ball
    volume over box volume); ``p_none = (1 - p_single) ** population`` is the
    chance that none of ``population`` members do. ``population`` is the
    actual member count.
    """
    if dim != domain.dim:
        raise ValueError(f"dim={dim} does not match the {domain.dim}-D domain")
    if population < 1 or not epsilon > 0:
        raise ValueError("population must be >= 1 and epsilon > 0")
    radius = 1.0 / epsilon
    if center is None:
        fits = bool(np.all(domain.widths >= 2 * radius))
    else:
        c = np.asarray(center, dtype=float)
        fits = bool(np.all(c - radius >= domain.lower_array) and np.all(c + radius <= domain.upper_array))
    if not fits:
        raise ValueError("bump support ball is not contained in the domain")
    p_single = ball_volume(radius, dim) / domain.volume
    return p_single, (1.0 - p_single) ** population


def bump_hit_for_problem(problem: Problem, config: DEConfig) -> tuple[float, float]:
    objective, optima = problem.build()
    if problem.bump_optimum is None:
        raise ValueError("problem has no bump")
    center = optimum_by_label(optima, problem.bump_optimum).location
    d = objective.domain.dim
    return bump_hit_probability(config.population_size(d), d, problem.epsilon, objective.domain, center)
