"""Scenario files, trace CSVs and multi-variant comparisons.

Scenario file format (UTF-8)::

    # anything after '#' is a comment
    num_nodes = 100
    bs_pos = 50, 175
    protocol = LeachC
    setup_costs = true

Every key is a :class:`ScenarioConfig` field; missing keys keep their
defaults. Errors carry the offending line number.
"""

from __future__ import annotations

import csv
import dataclasses
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from .core import CONFIG_FIELDS, ConfigError, Position, Protocol, ScenarioConfig
from .engine import run
from .metrics import TRACE_COLUMNS, RoundReport, SimulationTrace, aggregate_seeds, percent_improvement

_TRUE = {"true", "yes", "on", "1"}
_FALSE = {"false", "no", "off", "0"}
_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(ScenarioConfig)}
_INT_COLUMNS = {"round", "alive", "dead", "chs_elected", "pkts_to_ch", "pkts_to_bs"}

SUMMARY_COLUMNS = (
    "variant",
    "seeds",
    "first_node_death",
    "half_nodes_death",
    "last_node_death",
    "total_pkts_to_bs",
    "total_pkts_to_ch",
    "improvement_vs_leach_pct",
)


def _convert(key: str, raw: str):
    kind = _FIELD_TYPES[key]
    if kind == "bool":
        low = raw.lower()
        if low in _TRUE:
            return True
        if low in _FALSE:
            return False
        raise ValueError(f"expected a boolean, got {raw!r}")
    if kind == "int":
        return int(raw, 0)
    if kind == "float":
        v = float(raw)
        if not math.isfinite(v):
            raise ValueError(f"expected a finite number, got {raw!r}")
        return v
    if kind == "Position":
        parts = [p for p in raw.strip("()[] ").replace(",", " ").split() if p]
        if len(parts) != 2:
            raise ValueError(f"expected 'x, y', got {raw!r}")
        return Position(float(parts[0]), float(parts[1]))
    if kind == "Protocol":
        return Protocol.parse(raw)
    raise AssertionError(f"unhandled field type {kind}")


def parse_config(text: str) -> ScenarioConfig:
    """Parse a scenario file body into a validated config."""
    values, where = {}, {}
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line.strip()!r}")
        key, raw = (s.strip() for s in body.split("=", 1))
        if key not in _FIELD_TYPES:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r} (first set on line {where[key]})")
        if not raw:
            raise ConfigError(f"line {lineno}: missing value for {key!r}")
        try:
            values[key] = _convert(key, raw)
        except (ValueError, ConfigError) as exc:
            raise ConfigError(f"line {lineno}: {key}: {exc}") from None
        where[key] = lineno
    try:
        return ScenarioConfig(**values)
    except ConfigError as exc:
        key = str(exc).split(":", 1)[0]
        prefix = f"line {where[key]}: " if key in where else ""
        raise ConfigError(prefix + str(exc)) from None


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror or exc}") from None
    try:
        return parse_config(text)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def format_config(config: ScenarioConfig) -> str:
    """Inverse of :func:`parse_config`: every field, one per line."""
    lines = []
    for key in CONFIG_FIELDS:
        v = getattr(config, key)
        if isinstance(v, bool):
            s = "true" if v else "false"
        elif isinstance(v, Protocol):
            s = v.value
        elif isinstance(v, Position):
            s = f"{v.x!r}, {v.y!r}"
        else:
            s = repr(v)
        lines.append(f"{key} = {s}")
    return "\n".join(lines) + "\n"


def _fmt(column: str, v) -> str:
    if column in _INT_COLUMNS and float(v).is_integer():
        return str(int(v))
    return format(float(v), ".9g")


def _atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def trace_csv_text(reports) -> str:
    rows = [",".join(TRACE_COLUMNS)]
    for r in reports:
        rows.append(",".join(_fmt(c, getattr(r, c)) for c in TRACE_COLUMNS))
    return "\n".join(rows) + "\n"


def emit_trace_csv(trace, path) -> Path:
    """Write a trace (or any sequence of RoundReports) as CSV, atomically."""
    reports = trace.reports if isinstance(trace, SimulationTrace) else list(trace)
    path = Path(path)
    try:
        _atomic_write(path, trace_csv_text(reports))
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from None
    return path


def read_trace_csv(path) -> list:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != TRACE_COLUMNS:
            raise ValueError(f"{path}: unexpected header {header}")
        out = []
        for row in reader:
            vals = [int(v) if c == "round" else float(v) for c, v in zip(TRACE_COLUMNS, row)]
            out.append(RoundReport(*vals))
    return out


def gnuplot_script(csv_paths: dict, column: str = "alive", title: str | None = None) -> str:
    """gnuplot commands plotting one trace column for several labelled CSV files."""
    if column not in TRACE_COLUMNS[1:]:
        raise ValueError(f"unknown column {column!r}")
    col = TRACE_COLUMNS.index(column) + 1
    plots = ", \\\n     ".join(
        f"'{Path(p).name}' using 1:{col} with lines title '{label}'" for label, p in csv_paths.items()
    )
    return (
        "set datafile separator ','\n"
        "set key autotitle columnhead\n"
        f"set title '{title or column}'\n"
        "set xlabel 'round'\n"
        f"set ylabel '{column}'\n"
        f"plot {plots}\n"
    )


@dataclass
class RunRequest:
    config: ScenarioConfig = field(default_factory=ScenarioConfig)
    seeds: list = field(default_factory=lambda: [0])
    output_dir: Path = Path(".")
    compare_list: list | None = None
    gnuplot: bool = False

    def __post_init__(self):
        if not self.seeds:
            raise ConfigError("seeds: at least one seed is required")
        self.output_dir = Path(self.output_dir)
        if self.compare_list is not None:
            self.compare_list = [Protocol.parse(p) for p in self.compare_list]


@dataclass
class ComparisonRow:
    variant: Protocol
    seeds: int
    first_node_death: float
    half_nodes_death: float
    last_node_death: float
    total_pkts_to_bs: float
    total_pkts_to_ch: float
    improvement_vs_leach_pct: float | None


@dataclass
class ComparisonReport:
    rows: list
    files: list

    def row(self, variant) -> ComparisonRow:
        v = Protocol.parse(variant)
        return next(r for r in self.rows if r.variant is v)

    def table(self) -> str:
        head = f"{'variant':<20}{'first':>8}{'half':>8}{'last':>8}{'pkts_bs':>10}{'pkts_ch':>10}{'vs LEACH':>10}"
        lines = [head]
        for r in self.rows:
            imp = "" if r.improvement_vs_leach_pct is None else f"{r.improvement_vs_leach_pct:+.1f}%"
            lines.append(f"{r.variant.label:<20}{r.first_node_death:>8.0f}{r.half_nodes_death:>8.0f}"
                         f"{r.last_node_death:>8.0f}{r.total_pkts_to_bs:>10.0f}{r.total_pkts_to_ch:>10.0f}{imp:>10}")
        return "\n".join(lines)


def summary_csv_text(rows) -> str:
    out = [",".join(SUMMARY_COLUMNS)]
    for r in rows:
        imp = "" if r.improvement_vs_leach_pct is None else format(r.improvement_vs_leach_pct, ".9g")
        out.append(",".join([r.variant.value, str(r.seeds)]
                            + [format(float(getattr(r, c)), ".9g") for c in SUMMARY_COLUMNS[2:7]] + [imp]))
    return "\n".join(out) + "\n"


def compare(config: ScenarioConfig, variants, seeds) -> tuple:
    """Run every variant over every seed. Returns (rows, {variant: SeedAggregate}).

    The LEACH baseline is always simulated (if not requested, it is run but
    not reported) so every row carries its improvement over LEACH.
    """
    variants = [Protocol.parse(v) for v in variants]
    aggregates = {}
    for v in dict.fromkeys(variants + [Protocol.LEACH]):
        cfg = config.replace(protocol=v)
        aggregates[v] = aggregate_seeds(run(cfg, seed=s) for s in seeds)
    base = aggregates[Protocol.LEACH].summary
    rows = []
    for v in variants:
        s = aggregates[v].summary
        imp = percent_improvement(base, s) if base.last_node_death > 0 else None
        rows.append(ComparisonRow(v, len(seeds), s.first_node_death, s.half_nodes_death, s.last_node_death,
                                  s.total_pkts_to_bs, s.total_pkts_to_ch, imp))
    return rows, aggregates


def run_compare(request: RunRequest) -> ComparisonReport:
    """Run a comparison and write one median trace per variant plus ``summary.csv``.

    All simulation happens before any file is touched, and each file is
    written via temp-file-and-rename, so a failure leaves no partial files.
    """
    out = request.output_dir
    variants = request.compare_list or [request.config.protocol]
    rows, aggregates = compare(request.config, variants, request.seeds)

    texts = {}
    for v in variants:
        texts[f"{v.value}.csv"] = trace_csv_text(aggregates[v].median_reports())
    texts["summary.csv"] = summary_csv_text(rows)
    if request.gnuplot:
        texts["plot_alive.gp"] = gnuplot_script({v.label: f"{v.value}.csv" for v in variants}, "alive")

    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc.strerror or exc}") from None
    written = []
    try:
        for name, text in texts.items():
            _atomic_write(out / name, text)
            written.append(out / name)
    except OSError as exc:
        for p in written:
            p.unlink(missing_ok=True)
        raise OSError(f"cannot write into {out}: {exc.strerror or exc}") from None
    return ComparisonReport(rows, written)
