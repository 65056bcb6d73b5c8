"""Differential evolution (best/1/bin) with a bounded quasi-Newton polish.

The DE phase always spends exactly ``NP * (max_iter + 1)`` evaluations, where
``NP = pop * d``: one evaluation per initial Latin-hypercube member plus one
trial per member per generation. There is no convergence-based stopping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .functions import BoxDomain, ObjectiveFunction

MIN_POPULATION = 4


@dataclass(frozen=True)
class DEConfig:
    """Settings for one DE run.

    ``pop`` is a multiplier: the population holds ``pop * d`` individuals.
    ``mutation_range`` is the interval the per-generation scale factor is
    drawn from (dither).
    """

    pop: int = 10
    max_iter: int = 20
    polish: bool = True
    mutation_range: tuple[float, float] = (0.5, 1.0)
    crossover_prob: float = 0.7
    seed: Optional[int] = None

    def population_size(self, dim: int) -> int:
        return self.pop * dim

    def de_budget(self, dim: int) -> int:
        return self.population_size(dim) * (self.max_iter + 1)

    def validate(self, dim: int):
        if self.pop < 1 or self.max_iter < 1:
            raise ValueError(f"pop and max_iter must be positive (pop={self.pop}, max_iter={self.max_iter})")
        npop = self.population_size(dim)
        if npop < MIN_POPULATION:
            raise ValueError(
                f"population pop*d = {self.pop}*{dim} = {npop} is below the minimum of {MIN_POPULATION} "
                "needed for best/1 donor selection"
            )
        lo, hi = self.mutation_range
        if not 0 < lo <= hi < 2:
            raise ValueError(f"mutation_range must lie within (0, 2), got {self.mutation_range}")
        if not 0 <= self.crossover_prob <= 1:
            raise ValueError(f"crossover_prob must lie in [0, 1], got {self.crossover_prob}")


@dataclass(frozen=True)
class RunRecord:
    best_x: tuple[float, ...]
    best_f: float
    de_evals: int
    polish_evals: int
    total_evals: int
    seed_used: Optional[int] = None
    de_best_f: float = math.nan


def latin_hypercube(n: int, domain: BoxDomain, rng: np.random.Generator) -> np.ndarray:
    """``n`` points, one per equal-width stratum along every axis.

    Points are jittered uniformly inside their stratum and the stratum order
    is permuted independently per axis.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    d = domain.dim
    u = (rng.random((n, d)) + np.arange(n)[:, None]) / n
    for j in range(d):
        u[:, j] = u[rng.permutation(n), j]
    return domain.lower_array + u * domain.widths


def fd_gradient(objective: ObjectiveFunction, x: np.ndarray, fx: float, lower, upper, rel_step: float = 1e-8):
    """Forward-difference gradient; steps backwards where a forward step would leave the box."""
    g = np.empty(x.size)
    probe = x.copy()
    for i in range(x.size):
        h = rel_step * max(1.0, abs(x[i]))
        if x[i] + h > upper[i]:
            h = -h
        probe[i] = x[i] + h
        g[i] = (objective(probe) - fx) / h
        probe[i] = x[i]
    return g


def _max_feasible_step(x, p, lo, hi) -> float:
    """Largest alpha with x + alpha * p inside the box."""
    amax = math.inf
    for xi, pi, l, h in zip(x, p, lo, hi):
        if pi > 0:
            amax = min(amax, (h - xi) / pi)
        elif pi < 0:
            amax = min(amax, (l - xi) / pi)
    return max(amax, 0.0)


def quasi_newton_polish(
    objective: ObjectiveFunction,
    x0,
    domain: Optional[BoxDomain] = None,
    *,
    gtol: float = 1e-8,
    ftol: float = 2.2e-9,
    max_iter: int = 100,
    rel_step: float = 1e-8,
    max_line_steps: int = 20,
    c1: float = 1e-3,
    c2: float = 0.9,
) -> tuple[np.ndarray, float, int]:
    """Bounded BFGS descent from ``x0``; returns ``(x, f, evals)``.

    The first step aims at the box projection of ``x0 - g``. Later steps use
    the BFGS direction with components that push against an active bound
    dropped, capped so the iterate stays inside the box. The line search
    looks for a weak Wolfe point (sufficient decrease ``c1``, curvature
    ``c2``), doubling the step while the slope stays steep and bisecting once
    a bracket is found.

    Stops when the projected gradient inf-norm drops below ``gtol``, when an
    accepted step improves f by less than ``ftol`` relative, when the line
    search fails, or after ``max_iter`` iterations. ``evals`` counts every
    objective call, the initial evaluation of ``x0`` and finite-difference
    probes included.
    """
    domain = domain or objective.domain
    lo, hi = domain.lower_array, domain.upper_array
    start = objective.eval_count

    x = np.clip(np.asarray(x0, dtype=float), lo, hi)
    f = objective(x)
    g = fd_gradient(objective, x, f, lo, hi, rel_step)
    n = x.size
    H = np.eye(n)
    first = True

    for _ in range(max_iter):
        at_lo = x <= lo
        at_hi = x >= hi
        pg = np.where((at_lo & (g > 0)) | (at_hi & (g < 0)), 0.0, g)
        if np.max(np.abs(pg)) <= gtol:
            break

        if first:
            # no curvature yet: aim at the projected full gradient step
            p = np.clip(x - g, lo, hi) - x
            amax = 1.0
        else:
            p = -H @ g
            p[(at_lo & (p < 0)) | (at_hi & (p > 0))] = 0.0
            if g @ p >= 0:
                H = np.eye(n)
                p = -pg
            amax = _max_feasible_step(x, p, lo, hi)
        slope = g @ p
        if amax <= 0 or slope >= 0:
            break
        alpha = min(1.0, amax)

        a_lo, a_hi = 0.0, math.inf
        accepted = None
        for _ in range(max_line_steps):
            x_new = np.clip(x + alpha * p, lo, hi)
            f_new = objective(x_new)
            if f_new > f + c1 * alpha * slope:
                a_hi = alpha
            else:
                g_new = fd_gradient(objective, x_new, f_new, lo, hi, rel_step)
                accepted = (x_new, f_new, g_new)
                if g_new @ p >= c2 * slope or alpha >= amax:
                    break
                a_lo = alpha
            if a_hi < math.inf:
                if accepted is not None and a_hi - a_lo <= 1e-3 * a_hi:
                    break
                alpha = 0.5 * (a_lo + a_hi)
            else:
                alpha = min(2.0 * alpha, amax)
        if accepted is None:
            break
        x_new, f_new, g_new = accepted

        s = x_new - x
        y = g_new - g
        sy = s @ y
        if sy > 1e-10 * np.linalg.norm(s) * np.linalg.norm(y):
            if first:
                H = np.eye(n) * (sy / (y @ y))
            rho = 1.0 / sy
            Hy = H @ y
            H = H + ((sy + y @ Hy) * rho * rho) * np.outer(s, s) - rho * (np.outer(Hy, s) + np.outer(s, Hy))
        first = False

        converged = (f - f_new) <= ftol * max(abs(f), abs(f_new), 1.0)
        x, f, g = x_new, f_new, g_new
        if converged:
            break

    return x, f, objective.eval_count - start


def de_minimize(
    objective: ObjectiveFunction,
    config: DEConfig,
    rng: Optional[np.random.Generator] = None,
    callback: Optional[Callable[[int, np.ndarray, np.ndarray], None]] = None,
) -> RunRecord:
    """Minimize ``objective`` over its box with best/1/bin DE.

    Trials replace their parent immediately when strictly better, and the
    current best is tracked as it changes within a generation. Out-of-box
    trial coordinates are resampled uniformly inside the bounds. If
    ``config.polish`` is set, the best point is handed to
    :func:`quasi_newton_polish` and its result kept when it improves.

    ``callback(generation, population, energies)`` is called after the
    initial population (generation 0) and after every generation.
    """
    domain = objective.domain
    d = domain.dim
    config.validate(d)
    if rng is None:
        rng = np.random.default_rng(config.seed)
    lo, hi = domain.lower_array, domain.upper_array
    width = domain.widths
    npop = config.population_size(d)
    cr = config.crossover_prob
    mlo, mhi = config.mutation_range

    start = objective.eval_count
    population = latin_hypercube(npop, domain, rng)
    energies = np.array([objective(ind) for ind in population])
    best = int(np.argmin(energies))
    if callback is not None:
        callback(0, population, energies)

    for gen in range(1, config.max_iter + 1):
        scale = rng.uniform(mlo, mhi)
        # all randomness for the generation is drawn up front, in a fixed order
        r0 = rng.integers(0, npop - 1, size=npop)
        r1 = rng.integers(0, npop - 2, size=npop)
        cross = rng.random((npop, d)) < cr
        cross[np.arange(npop), rng.integers(0, d, size=npop)] = True
        repair = rng.random((npop, d))

        for i in range(npop):
            # two distinct indices, both different from i
            a = int(r0[i])
            if a >= i:
                a += 1
            b = int(r1[i])
            first_ex, second_ex = (i, a) if i < a else (a, i)
            if b >= first_ex:
                b += 1
            if b >= second_ex:
                b += 1
            donor = population[best] + scale * (population[a] - population[b])
            trial = np.where(cross[i], donor, population[i])
            bad = (trial < lo) | (trial > hi)
            if bad.any():
                trial[bad] = lo[bad] + repair[i, bad] * width[bad]
            f = objective(trial)
            if f < energies[i]:
                population[i] = trial
                energies[i] = f
                if f < energies[best]:
                    best = i
        if callback is not None:
            callback(gen, population, energies)

    de_evals = objective.eval_count - start
    best_x = population[best].copy()
    best_f = float(energies[best])
    de_best_f = best_f
    polish_evals = 0
    if config.polish:
        px, pf, polish_evals = quasi_newton_polish(objective, best_x, domain)
        if pf < best_f:
            best_x, best_f = px, float(pf)

    return RunRecord(
        best_x=tuple(float(v) for v in best_x),
        best_f=best_f,
        de_evals=de_evals,
        polish_evals=polish_evals,
        total_evals=de_evals + polish_evals,
        seed_used=config.seed,
        de_best_f=de_best_f,
    )
