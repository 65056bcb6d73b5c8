"""Table generators and CSV/Markdown rendering with embedded run manifests."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

from . import __version__
from .de import DEConfig
from .fortification import fortify, slice_1d
from .functions import get_function
from .harness import Problem, run_records, summarize
from .multirun import multirun_table

logger = logging.getLogger(__name__)

DEFAULT_SEED = 20190710

# (pop, max_iter, polish)
TABLE1_ROWS = [
    (10, 20, False),
    (10, 10, False),
    (10, 10, True),
    (5, 5, False),
    (5, 5, True),
    (2, 2, False),
    (2, 2, True),
]

TABLE2_ROWS = [
    (10, 20, False),
    (20, 10, False),
    (20, 10, True),
    (40, 5, False),
    (40, 5, True),
    (50, 4, False),
    (50, 4, True),
    (80, 5, False),
    (80, 5, True),
    (100, 4, True),
    (125, 3, True),
    (165, 2, True),
    (330, 2, True),
]

PRESETS = {"table1": (TABLE1_ROWS, None), "table2": (TABLE2_ROWS, 1)}


@dataclass
class ExperimentManifest:
    command: str
    function: str
    bump: Optional[dict]
    settings: list
    n_runs: int
    master_seed: int
    value_tolerance: float = 0.01
    near_radius: float = 1.0
    mutation_range: tuple = (0.5, 1.0)
    crossover_prob: float = 0.7
    extra: dict = field(default_factory=dict)
    version: str = __version__

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, separators=(",", ":"))


@dataclass
class TableDocument:
    manifest: ExperimentManifest
    columns: list[str]
    rows: list[list[str]]
    notes: list[str] = field(default_factory=list)

    def render(self, fmt: str = "csv") -> str:
        if fmt == "csv":
            return self.to_csv()
        if fmt == "md":
            return self.to_markdown()
        raise ValueError(f"unknown format {fmt!r}")

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# manifest: {self.manifest.to_json()}\n")
        for note in self.notes:
            buf.write(f"# note: {note}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        writer.writerows(self.rows)
        return buf.getvalue()

    def to_markdown(self) -> str:
        lines = [f"<!-- manifest: {self.manifest.to_json()} -->"]
        lines += [f"<!-- note: {note} -->" for note in self.notes]
        widths = [len(c) for c in self.columns]
        for row in self.rows:
            widths = [max(w, len(v)) for w, v in zip(widths, row)]

        def fmt_row(cells):
            return "| " + " | ".join(c.ljust(w) for c, w in zip(cells, widths)) + " |"

        lines.append(fmt_row(self.columns))
        lines.append("|" + "|".join("-" * (w + 2) for w in widths) + "|")
        lines += [fmt_row(r) for r in self.rows]
        return "\n".join(lines) + "\n"


def _pct(v: float) -> str:
    return f"{v:.1f}"


def _bump_dict(problem: Problem) -> Optional[dict]:
    if problem.bump_optimum is None:
        return None
    return {"optimum": problem.bump_optimum, "epsilon": problem.epsilon, "amplitude": problem.amplitude}


def cmd_table(
    rows: Sequence[tuple[int, int, bool]],
    problem: Problem,
    n_runs: int = 1000,
    master_seed: int = DEFAULT_SEED,
    workers: int = 1,
    base_config: DEConfig = DEConfig(),
    value_tolerance: float = 0.01,
    near_radius: float = 1.0,
) -> TableDocument:
    """Failure percentage, mean evaluations and per-optimum split for each setting row.

    A row whose configuration is invalid gets an error note instead of results;
    the remaining rows still run.
    """
    optima = problem.optima
    criterion = problem.criterion(value_tolerance, near_radius)
    dim = problem().domain.dim
    columns = ["algorithm", "pop", "max_iter", "percent_failures", "average_evals"]
    columns += [f"percent_near_opt{o.label}" for o in optima]
    columns.append("note")

    out_rows = []
    for pop, max_iter, polish in rows:
        algo = "DE/BFGS" if polish else "DE"
        config = DEConfig(
            pop=pop,
            max_iter=max_iter,
            polish=polish,
            mutation_range=base_config.mutation_range,
            crossover_prob=base_config.crossover_prob,
        )
        try:
            config.validate(dim)
            records = run_records(problem, config, n_runs, master_seed, workers)
        except ValueError as exc:
            logger.warning("row pop=%s max_iter=%s skipped: %s", pop, max_iter, exc)
            out_rows.append([algo, str(pop), str(max_iter), "", ""] + [""] * len(optima) + [f"error: {exc}"])
            continue
        s = summarize(records, optima, criterion)
        out_rows.append(
            [algo, str(pop), str(max_iter), _pct(s.failure_percent), f"{s.mean_total_evals:.1f}"]
            + [_pct(v) for v in s.per_optimum_percent]
            + [""]
        )

    manifest = ExperimentManifest(
        command="table",
        function=problem.function,
        bump=_bump_dict(problem),
        settings=[list(r) for r in rows],
        n_runs=n_runs,
        master_seed=master_seed,
        value_tolerance=value_tolerance,
        near_radius=near_radius,
        mutation_range=tuple(base_config.mutation_range),
        crossover_prob=base_config.crossover_prob,
    )
    return TableDocument(manifest, columns, out_rows)


def _multirun_layout(rows) -> tuple[list[str], list[list[str]]]:
    columns = ["quantity"] + [str(r.m) for r in rows]
    body = [
        ["percent_failures"] + [_pct(r.observed_failure_percent) for r in rows],
        ["percent_expected_if_independent"] + [_pct(r.predicted_failure_percent) for r in rows],
        ["estimated_function_evaluations"] + [f"{r.evals_per_group:.1f}" for r in rows],
    ]
    return columns, body


@dataclass
class MultirunResult:
    document: TableDocument
    outcome_bits: tuple[bool, ...]
    mean_total_evals: float


def cmd_multirun(
    problem: Problem,
    config: DEConfig = DEConfig(pop=2, max_iter=2, polish=True),
    n_runs: int = 100_800,
    m_max: int = 10,
    master_seed: int = DEFAULT_SEED,
    workers: int = 1,
    value_tolerance: float = 0.01,
    near_radius: float = 1.0,
) -> MultirunResult:
    """Observed vs independent-prediction failure percentages for group sizes 1..m_max."""
    if m_max < 1:
        raise ValueError("m_max must be at least 1")
    if m_max > n_runs:
        raise ValueError(f"m_max={m_max} exceeds n_runs={n_runs}")
    notes = []
    uneven = [m for m in range(2, m_max + 1) if n_runs % m]
    if uneven:
        msg = f"n_runs={n_runs} is not divisible by m in {uneven}; trailing runs are dropped for those m"
        logger.warning(msg)
        notes.append(msg)

    records = run_records(problem, config, n_runs, master_seed, workers)
    summary = summarize(records, problem.optima, problem.criterion(value_tolerance, near_radius))
    rows = multirun_table(summary.outcome_bits, summary.mean_total_evals, range(1, m_max + 1))

    columns, body = _multirun_layout(rows)
    manifest = ExperimentManifest(
        command="multirun",
        function=problem.function,
        bump=_bump_dict(problem),
        settings=[[config.pop, config.max_iter, config.polish]],
        n_runs=n_runs,
        master_seed=master_seed,
        value_tolerance=value_tolerance,
        near_radius=near_radius,
        mutation_range=tuple(config.mutation_range),
        crossover_prob=config.crossover_prob,
        extra={"m_max": m_max},
    )
    return MultirunResult(TableDocument(manifest, columns, body, notes), summary.outcome_bits, summary.mean_total_evals)


def analyze_outcomes(outcomes: Sequence[bool], mean_evals: float, m_max: int) -> TableDocument:
    """Multi-run table from a persisted outcome line, without re-running anything."""
    rows = multirun_table(outcomes, mean_evals, range(1, m_max + 1))
    columns, body = _multirun_layout(rows)
    manifest = ExperimentManifest(
        command="analyze",
        function="",
        bump=None,
        settings=[],
        n_runs=len(outcomes),
        master_seed=-1,
        extra={"m_max": m_max, "mean_evals": mean_evals},
    )
    return TableDocument(manifest, columns, body)


def cmd_slice(
    function: str = "branin",
    bump_optimum: int = 1,
    epsilons: Sequence[float] = (1.0, 2.0),
    amplitude: float = 10.0,
    x1: float = -math.pi,
    n_points: int = 151,
) -> TableDocument:
    """Values along x2 at fixed x1 for the base function and one fortified column per epsilon."""
    base, optima = get_function(function)
    lo, hi = base.domain.lower[1], base.domain.upper[1]
    columns_data = [slice_1d(base, 0, x1, (lo, hi), n_points)]
    columns = ["coordinate", "base"]
    for eps in epsilons:
        fortified, _ = fortify(base, optima, bump_optimum, eps, amplitude)
        columns_data.append(slice_1d(fortified, 0, x1, (lo, hi), n_points))
        columns.append(f"epsilon={eps:g}")
    rows = []
    for i in range(n_points):
        rows.append([repr(columns_data[0][i][0])] + [repr(col[i][1]) for col in columns_data])
    manifest = ExperimentManifest(
        command="slice",
        function=function,
        bump={"optimum": bump_optimum, "epsilons": list(epsilons), "amplitude": amplitude} if epsilons else None,
        settings=[],
        n_runs=0,
        master_seed=-1,
        extra={"x1": x1, "n_points": n_points},
    )
    return TableDocument(manifest, columns, rows)
