"""Per-round records, lifetime milestones and multi-seed aggregation."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np

from .core import ScenarioConfig

TRACE_COLUMNS = (
    "round",
    "alive",
    "dead",
    "chs_elected",
    "pkts_to_ch",
    "pkts_to_bs",
    "energy_dissipated_j",
    "energy_harvested_j",
)


@dataclass(frozen=True)
class RoundReport:
    """State at the end of one round. Packet and energy fields are cumulative."""

    round: int
    alive: int
    dead: int
    chs_elected: int
    pkts_to_ch: int
    pkts_to_bs: int
    energy_dissipated_j: float
    energy_harvested_j: float

    def as_tuple(self) -> tuple:
        return dataclasses.astuple(self)


@dataclass
class SimulationTrace:
    config: ScenarioConfig
    reports: list = field(default_factory=list)

    def __len__(self):
        return len(self.reports)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.reports])

    @property
    def summary(self) -> "LifetimeSummary":
        return summarize(self)


@dataclass(frozen=True)
class LifetimeSummary:
    first_node_death: float
    half_nodes_death: float
    last_node_death: float
    total_pkts_to_bs: float
    total_pkts_to_ch: float


def summarize(trace: SimulationTrace) -> LifetimeSummary:
    """Death milestones and packet totals.

    A milestone that is never reached is reported as ``rounds_max``.
    """
    if not trace.reports:
        raise ValueError("cannot summarize an empty trace")
    n = trace.config.num_nodes
    sentinel = trace.config.rounds_max

    def first_round(threshold):
        return next((r.round for r in trace.reports if r.dead >= threshold), sentinel)

    last = trace.reports[-1]
    return LifetimeSummary(
        first_node_death=first_round(1),
        half_nodes_death=first_round(math.ceil(n / 2)),
        last_node_death=first_round(n),
        total_pkts_to_bs=last.pkts_to_bs,
        total_pkts_to_ch=last.pkts_to_ch,
    )


def percent_improvement(base: LifetimeSummary, other: LifetimeSummary) -> float:
    """Relative lifetime gain of `other` over `base`, in percent."""
    if base.last_node_death <= 0:
        raise ValueError("baseline lifetime must be positive")
    return 100.0 * (other.last_node_death - base.last_node_death) / base.last_node_death


@dataclass
class SeedAggregate:
    """Element-wise statistics of several runs of one scenario.

    Shorter traces are extended with their final state (a dead network stays
    dead) so that all runs cover the same rounds.
    """

    config: ScenarioConfig
    rounds: np.ndarray
    median: dict
    mean: dict
    summaries: list
    summary: LifetimeSummary

    def median_reports(self) -> list:
        return [
            RoundReport(*(self.median[c][i] if c != "round" else int(self.rounds[i]) for c in TRACE_COLUMNS))
            for i in range(len(self.rounds))
        ]


def _strip_seed(cfg: ScenarioConfig) -> ScenarioConfig:
    return cfg.replace(seed=0)


def aggregate_seeds(traces) -> SeedAggregate:
    traces = list(traces)
    if not traces:
        raise ValueError("no traces to aggregate")
    base = _strip_seed(traces[0].config)
    for t in traces[1:]:
        if _strip_seed(t.config) != base:
            raise ValueError("traces come from different scenarios")

    length = max(len(t) for t in traces)
    start = min((t.reports[0].round for t in traces if t.reports), default=0)
    rounds = np.arange(start, start + length)
    cols = TRACE_COLUMNS[1:]
    stacked = {c: np.zeros((len(traces), length)) for c in cols}
    for row, t in enumerate(traces):
        if not t.reports:
            continue
        for c in cols:
            v = np.array([getattr(r, c) for r in t.reports], dtype=float)
            stacked[c][row, : len(v)] = v
            stacked[c][row, len(v):] = v[-1]
    median = {c: np.median(stacked[c], axis=0) for c in cols}
    mean = {c: stacked[c].mean(axis=0) for c in cols}

    summaries = [summarize(t) for t in traces if t.reports]
    fields = [f.name for f in dataclasses.fields(LifetimeSummary)]
    summary = LifetimeSummary(*(float(np.median([getattr(s, f) for s in summaries])) for f in fields))
    return SeedAggregate(base, rounds, median, mean, summaries, summary)
