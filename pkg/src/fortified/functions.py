"""Box-bounded test functions and registries of their known optima."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np


@dataclass(frozen=True)
class BoxDomain:
    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        lower = tuple(float(v) for v in self.lower)
        upper = tuple(float(v) for v in self.upper)
        if len(lower) == 0 or len(lower) != len(upper):
            raise ValueError("lower and upper must have equal, non-zero length")
        if any(lo >= hi for lo, hi in zip(lower, upper)):
            raise ValueError("every lower bound must be strictly below its upper bound")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def lower_array(self) -> np.ndarray:
        return np.array(self.lower)

    @property
    def upper_array(self) -> np.ndarray:
        return np.array(self.upper)

    @property
    def widths(self) -> np.ndarray:
        return self.upper_array - self.lower_array

    @property
    def volume(self) -> float:
        return float(np.prod(self.widths))

    def contains(self, x, tol: float = 0.0) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower_array - tol) and np.all(x <= self.upper_array + tol))


@dataclass(frozen=True)
class BraninParams:
    a: float = 1.0
    b: float = 5.1 / (4 * math.pi**2)
    c: float = 5 / math.pi
    r: float = 6.0
    s: float = 10.0
    t: float = 1 / (8 * math.pi)


@dataclass(frozen=True)
class KnownOptimum:
    location: tuple[float, ...]
    value: float
    label: int


class ObjectiveFunction:
    """A deterministic scalar function on a box, counting every call.

    Each optimization run should own its instance; the counter is the only
    mutable state.
    """

    def __init__(self, domain: BoxDomain, evaluator: Callable[[np.ndarray], float], name: str = ""):
        self.domain = domain
        self.evaluator = evaluator
        self.name = name
        self.eval_count = 0

    def __call__(self, x) -> float:
        self.eval_count += 1
        return float(self.evaluator(x))

    def reset_count(self):
        self.eval_count = 0

    def __repr__(self):
        return f"{type(self).__name__}(name={self.name!r}, dim={self.domain.dim}, eval_count={self.eval_count})"


_DEFAULT_BRANIN = BraninParams()


def branin_hoo(x: Sequence[float], params: BraninParams = _DEFAULT_BRANIN) -> float:
    x1, x2 = float(x[0]), float(x[1])
    p = params
    return p.a * (x2 - p.b * x1 * x1 + p.c * x1 - p.r) ** 2 + p.s * (1 - p.t) * math.cos(x1) + p.s


BRANIN_DOMAIN = BoxDomain((-5.0, 0.0), (10.0, 15.0))

# printed precision; values are recomputed from these locations
BRANIN_OPTIMA_LOCATIONS = (
    (-math.pi, 12.275),
    (math.pi, 2.275),
    (9.42478, 2.475),
)


def branin_registry(params: BraninParams = _DEFAULT_BRANIN) -> tuple[ObjectiveFunction, list[KnownOptimum]]:
    """Branin-Hoo on [-5, 10] x [0, 15] with its three global optima (labels 1-3)."""

    def evaluator(x):
        return branin_hoo(x, params)

    objective = ObjectiveFunction(BRANIN_DOMAIN, evaluator, name="branin")
    optima = [
        KnownOptimum(location=loc, value=branin_hoo(loc, params), label=i + 1)
        for i, loc in enumerate(BRANIN_OPTIMA_LOCATIONS)
    ]
    return objective, optima


REGISTRY: dict[str, Callable[[], tuple[ObjectiveFunction, list[KnownOptimum]]]] = {
    "branin": branin_registry,
}


def get_function(name: str) -> tuple[ObjectiveFunction, list[KnownOptimum]]:
    """Fresh objective (own counter) plus optima for a registered function name."""
    try:
        factory = REGISTRY[name]
    except KeyError:
        raise ValueError(f"unknown function {name!r}; available: {sorted(REGISTRY)}") from None
    return factory()


def optimum_by_label(optima: Sequence[KnownOptimum], label: int) -> KnownOptimum:
    for opt in optima:
        if opt.label == label:
            return opt
    raise ValueError(f"no optimum with label {label}; labels are {[o.label for o in optima]}")
