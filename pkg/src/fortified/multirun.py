"""Multiple-short-runs analysis: group outcomes and compare with p**m."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


@dataclass(frozen=True)
class MultiRunSummary:
    m: int
    n_groups: int
    observed_failure_percent: float
    predicted_failure_percent: float
    evals_per_group: float


def independent_prediction(p: float, m: int) -> float:
    """Failure probability of m independent runs, each failing with probability p."""
    if not 0 <= p <= 1:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if m < 1:
        raise ValueError(f"m must be at least 1, got {m}")
    return p**m


def group_failures(outcomes: Sequence[bool], m: int) -> tuple[int, float]:
    """Split ``outcomes`` (True = failure) into consecutive groups of ``m``.

    A trailing partial group is dropped. Returns the number of groups and the
    fraction of them in which every run failed.
    """
    if m < 1:
        raise ValueError(f"m must be at least 1, got {m}")
    n = len(outcomes)
    if m > n:
        raise ValueError(f"group size {m} exceeds the {n} available outcomes")
    n_groups = n // m
    grid = np.asarray(outcomes[: n_groups * m], dtype=bool).reshape(n_groups, m)
    return n_groups, float(np.count_nonzero(grid.all(axis=1))) / n_groups


def multirun_table(outcomes: Sequence[bool], mean_evals: float, m_values: Iterable[int]) -> list[MultiRunSummary]:
    """One summary per group size.

    The prediction uses the single-run failure fraction of the same outcome
    list; evaluations per group are ``m * mean_evals``.
    """
    _, p_hat = group_failures(outcomes, 1)
    rows = []
    for m in m_values:
        n_groups, observed = group_failures(outcomes, m)
        rows.append(
            MultiRunSummary(
                m=m,
                n_groups=n_groups,
                observed_failure_percent=100.0 * observed,
                predicted_failure_percent=100.0 * independent_prediction(p_hat, m),
                evals_per_group=m * mean_evals,
            )
        )
    return rows


# Outcome lines use '1' for a successful run and '0' for a failure.


def format_outcome_line(failures: Sequence[bool]) -> str:
    return "".join("0" if failed else "1" for failed in failures)


def parse_outcome_line(line: str) -> list[bool]:
    """Inverse of :func:`format_outcome_line`; dashes and whitespace are ignored."""
    out = []
    for ch in line:
        if ch == "0":
            out.append(True)
        elif ch == "1":
            out.append(False)
        elif ch in "- \t\r\n":
            continue
        else:
            raise ValueError(f"unexpected character {ch!r} in outcome line")
    return out
