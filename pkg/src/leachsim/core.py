"""Shared domain types: geometry, radio constants, nodes and scenario configuration."""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional


class ConfigError(ValueError):
    """Raised when a scenario or geometry violates its invariants."""


class Position(NamedTuple):
    x: float
    y: float


def distance(a, b) -> float:
    """Euclidean distance between two (x, y) points."""
    return math.hypot(a[0] - b[0], a[1] - b[1])


def midpoint(a, b) -> Position:
    return Position((a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0)


@dataclass(frozen=True)
class RadioParams:
    """First-order radio constants, all per bit (amplifier per bit per m^2)."""

    e_elec_tx: float = 50e-9
    e_elec_rx: float = 50e-9
    eps_fs: float = 100e-12
    e_da: float = 50e-12

    def __post_init__(self):
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if not (isinstance(v, (int, float)) and v > 0 and math.isfinite(v)):
                raise ConfigError(f"{f.name} must be a positive finite number, got {v!r}")


class Role(enum.IntEnum):
    UNASSIGNED = 0
    MEMBER = 1
    CLUSTER_HEAD = 2


class Protocol(str, enum.Enum):
    """The seven protocol variants."""

    LEACH = "Leach"
    LEACH_C = "LeachC"
    SLEACH_C = "SLeachC"
    SLEACH_D = "SLeachD"
    MULTIHOP = "MultiHopLeach"
    MLEACH = "MLeach"
    LEACH_SC = "LeachSC"

    @classmethod
    def parse(cls, text) -> "Protocol":
        """Accepts the tag, the member name or common spellings (``leach-c``, ``multi-hop``)."""
        if isinstance(text, cls):
            return text
        key = str(text).strip().lower().replace("-", "").replace("_", "").replace(" ", "")
        for p in cls:
            if key in (p.value.lower(), p.name.lower().replace("_", "")):
                return p
        aliases = {"multihop": cls.MULTIHOP, "mleach": cls.MLEACH, "multihopleach": cls.MULTIHOP}
        if key in aliases:
            return aliases[key]
        raise ConfigError(f"unknown protocol {text!r}; expected one of {[p.value for p in cls]}")

    @property
    def centralized(self) -> bool:
        return self in (Protocol.LEACH_C, Protocol.SLEACH_C)

    @property
    def solar_aware(self) -> bool:
        return self in (Protocol.SLEACH_C, Protocol.SLEACH_D)

    @property
    def label(self) -> str:
        return _LABELS[self]


_LABELS = {
    Protocol.LEACH: "LEACH",
    Protocol.LEACH_C: "LEACH-C",
    Protocol.SLEACH_C: "sLEACH-Centralized",
    Protocol.SLEACH_D: "sLEACH-Distributed",
    Protocol.MULTIHOP: "Multi-hop LEACH",
    Protocol.MLEACH: "M-LEACH",
    Protocol.LEACH_SC: "LEACH-SC",
}


@dataclass
class Node:
    """Read-only snapshot of one sensor node (the simulator stores nodes column-wise)."""

    id: int
    pos: Position
    velocity: tuple
    residual_energy: float
    initial_energy: float
    is_solar: bool
    alive: bool
    role: Role
    eligible: bool
    cluster_of: Optional[int]


@dataclass(frozen=True)
class ScenarioConfig:
    """Complete description of one experiment.

    Every field is also a key of the ``key = value`` scenario file format.
    Radio constants are flattened into the config so a file can override them.
    """

    num_nodes: int = 100
    field_width: float = 100.0
    field_height: float = 100.0
    bs_pos: Position = Position(50.0, 175.0)
    protocol: Protocol = Protocol.LEACH
    p_ch: float = 0.1
    packet_bits_data: int = 200
    packet_bits_agg: int = 200
    packet_bits_query: int = 200
    initial_energy: float = 0.5
    rounds_max: int = 5000
    frames_per_round: int = 8
    seed: int = 0
    solar_fraction: float = 0.5
    harvest_j_per_round: float = 0.01
    sun_cycle_rounds: int = 200
    sun_fraction: float = 0.5
    v_max: float = 1.0
    ch_radio_range: float = 100.0
    mleach_range: float = 30.0
    setup_costs: bool = True
    orphans_direct: bool = False
    downward_query: bool = False
    anneal_iters: int = 200
    e_elec_tx: float = 50e-9
    e_elec_rx: float = 50e-9
    eps_fs: float = 100e-12
    e_da: float = 50e-12

    def __post_init__(self):
        object.__setattr__(self, "protocol", Protocol.parse(self.protocol))
        object.__setattr__(self, "bs_pos", Position(float(self.bs_pos[0]), float(self.bs_pos[1])))
        self.validate()

    def validate(self) -> None:
        def need(cond, key, msg):
            if not cond:
                raise ConfigError(f"{key}: {msg} (got {getattr(self, key)!r})")

        need(isinstance(self.num_nodes, int) and self.num_nodes >= 1, "num_nodes", "must be an integer >= 1")
        need(self.field_width > 0, "field_width", "must be > 0")
        need(self.field_height > 0, "field_height", "must be > 0")
        need(all(math.isfinite(c) for c in self.bs_pos), "bs_pos", "must be finite")
        need(0 < self.p_ch < 1, "p_ch", "must lie strictly between 0 and 1")
        for key in ("packet_bits_data", "packet_bits_agg", "packet_bits_query"):
            need(isinstance(getattr(self, key), int) and getattr(self, key) >= 0, key, "must be an integer >= 0")
        need(self.initial_energy > 0, "initial_energy", "must be > 0")
        need(isinstance(self.rounds_max, int) and self.rounds_max >= 0, "rounds_max", "must be an integer >= 0")
        need(isinstance(self.frames_per_round, int) and self.frames_per_round >= 1, "frames_per_round",
             "must be an integer >= 1")
        need(isinstance(self.seed, int) and 0 <= self.seed < 2**64, "seed", "must be a 64-bit unsigned integer")
        need(0 <= self.solar_fraction <= 1, "solar_fraction", "must lie in [0, 1]")
        need(self.harvest_j_per_round >= 0, "harvest_j_per_round", "must be >= 0")
        need(isinstance(self.sun_cycle_rounds, int) and self.sun_cycle_rounds >= 1, "sun_cycle_rounds",
             "must be an integer >= 1")
        need(0 <= self.sun_fraction <= 1, "sun_fraction", "must lie in [0, 1]")
        need(self.v_max >= 0, "v_max", "must be >= 0")
        need(self.ch_radio_range > 0, "ch_radio_range", "must be > 0")
        need(self.mleach_range > 0, "mleach_range", "must be > 0")
        need(isinstance(self.anneal_iters, int) and self.anneal_iters >= 0, "anneal_iters", "must be an integer >= 0")
        self.radio  # validates the four radio constants

    @property
    def radio(self) -> RadioParams:
        try:
            return RadioParams(self.e_elec_tx, self.e_elec_rx, self.eps_fs, self.e_da)
        except ConfigError as exc:
            raise ConfigError(str(exc)) from None

    @property
    def epoch_len(self) -> int:
        return epoch_length(self.p_ch)

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)


def epoch_length(p: float) -> int:
    """Rounds per rotation epoch, ceil(1/p) guarded against float noise (1/(1/3) > 3)."""
    return max(1, math.ceil(1.0 / p - 1e-9))


@dataclass
class EpochState:
    round: int = 0
    epoch_len: int = 10
    chs_this_metaround: int = 0
    metaround_start: int = 0

    def at_boundary(self) -> bool:
        return self.round % self.epoch_len == 0


CONFIG_FIELDS = tuple(f.name for f in dataclasses.fields(ScenarioConfig))
