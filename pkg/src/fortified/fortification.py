"""Compactly supported radial bumps subtracted at chosen optima."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .functions import KnownOptimum, ObjectiveFunction, optimum_by_label

PEAK = math.exp(-1.0)


class OverlappingSupportError(ValueError):
    """A bump's support reaches another registered optimum or another bump."""


def bump_phi(r: float, epsilon: float) -> float:
    """exp(-1/(1 - (eps*r)^2)) inside radius 1/eps, exactly 0 outside.

    The peak value at r = 0 is 1/e.
    """
    er = epsilon * r
    if er < 1.0:
        return math.exp(-1.0 / (1.0 - er * er))
    return 0.0


@dataclass(frozen=True)
class BumpSpec:
    center: tuple[float, ...]
    epsilon: float
    amplitude: float = 10.0

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if not self.amplitude > 0:
            raise ValueError(f"amplitude must be positive, got {self.amplitude}")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))

    @property
    def radius(self) -> float:
        return 1.0 / self.epsilon

    @property
    def depth(self) -> float:
        return self.amplitude * PEAK

    def __call__(self, x) -> float:
        return self.amplitude * bump_phi(math.dist(x, self.center), self.epsilon)


class FortifiedFunction(ObjectiveFunction):
    """Base objective minus one or more bumps.

    Counts one evaluation per call. The base evaluator is used directly, so
    the base object's own counter is not touched.
    """

    def __init__(self, base: ObjectiveFunction, bumps: Sequence[BumpSpec]):
        bumps = list(bumps)
        if not bumps:
            raise ValueError("at least one bump is required")
        for b in bumps:
            if len(b.center) != base.domain.dim:
                raise ValueError("bump center dimension does not match the domain")
            if not base.domain.contains(b.center):
                raise ValueError(f"bump center {b.center} lies outside the domain")
        self.base = base
        self.bumps = bumps
        base_eval = base.evaluator

        def evaluator(x):
            value = base_eval(x)
            for b in bumps:
                er = b.epsilon * math.dist(x, b.center)
                if er < 1.0:
                    value = value - b.amplitude * math.exp(-1.0 / (1.0 - er * er))
            return value

        name = base.name + "+bump" if base.name else "fortified"
        super().__init__(base.domain, evaluator, name=name)
        self.fortified_optimum_value = min(float(base_eval(np.asarray(b.center))) - b.depth for b in bumps)


def _check_supports(bumps: Sequence[BumpSpec], optima: Sequence[KnownOptimum], owners: Sequence[int]):
    for b, owner in zip(bumps, owners):
        for opt in optima:
            if opt.label == owner:
                continue
            dist = math.dist(b.center, opt.location)
            if b.radius >= dist:
                raise OverlappingSupportError(
                    f"bump at optimum {owner} has radius {b.radius:g} but optimum {opt.label} "
                    f"is only {dist:.4g} away"
                )
    for i in range(len(bumps)):
        for j in range(i + 1, len(bumps)):
            dist = math.dist(bumps[i].center, bumps[j].center)
            if bumps[i].radius + bumps[j].radius >= dist:
                raise OverlappingSupportError(f"bumps {i} and {j} have overlapping supports")


def fortify(
    base: ObjectiveFunction,
    optima: Sequence[KnownOptimum],
    target_label: int,
    epsilon: float = 1.0,
    amplitude: float = 10.0,
) -> tuple[FortifiedFunction, list[KnownOptimum]]:
    """Subtract ``amplitude * phi`` centred on the optimum ``target_label``.

    Returns the fortified objective and an updated optima list where only the
    target's value is lowered (by ``amplitude / e``). Passing an already
    fortified function adds another bump.
    """
    target = optimum_by_label(optima, target_label)
    bump = BumpSpec(target.location, epsilon, amplitude)

    if isinstance(base, FortifiedFunction):
        root, existing = base.base, list(base.bumps)
    else:
        root, existing = base, []
    bumps = existing + [bump]

    owners = []
    for b in bumps:
        nearest = min(optima, key=lambda o: math.dist(o.location, b.center))
        owners.append(nearest.label)
    _check_supports(bumps, optima, owners)

    fortified = FortifiedFunction(root, bumps)
    new_optima = [
        KnownOptimum(o.location, float(fortified.evaluator(np.asarray(o.location))), o.label) for o in optima
    ]
    return fortified, new_optima


def slice_1d(
    fortified: ObjectiveFunction,
    fixed_dim: int,
    fixed_value: float,
    sweep_range: tuple[float, float],
    n_points: int,
) -> list[tuple[float, float]]:
    """Equally spaced samples along the free axis of a 2-D function.

    Samples go through the raw evaluator so no evaluation counter moves.
    """
    domain = fortified.domain
    if domain.dim != 2:
        raise ValueError("slice_1d supports 2-D functions only")
    if fixed_dim not in (0, 1):
        raise ValueError(f"fixed_dim must be 0 or 1, got {fixed_dim}")
    if n_points < 2:
        raise ValueError("n_points must be at least 2")
    free = 1 - fixed_dim
    lo, hi = float(sweep_range[0]), float(sweep_range[1])
    if not lo < hi:
        raise ValueError("sweep_range must be increasing")
    if lo < domain.lower[free] or hi > domain.upper[free]:
        raise ValueError(f"sweep range {sweep_range} leaves the domain [{domain.lower[free]}, {domain.upper[free]}]")
    if not domain.lower[fixed_dim] <= fixed_value <= domain.upper[fixed_dim]:
        raise ValueError(f"fixed value {fixed_value} lies outside the domain")

    out = []
    x = np.empty(2)
    x[fixed_dim] = fixed_value
    for coord in np.linspace(lo, hi, n_points):
        x[free] = coord
        out.append((float(coord), float(fortified.evaluator(x))))
    return out
