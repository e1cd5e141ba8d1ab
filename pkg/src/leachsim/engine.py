"""Round-based simulation driver.

Randomness comes from four independent PCG64 streams derived with
``numpy.random.SeedSequence(seed).spawn(4)``, in this order:

0. deployment  - node positions
1. election    - one uniform per node per distributed election
2. mobility    - speeds and waypoints (M-LEACH only)
3. annealing   - proposals of the centralized head optimiser

so a run is a pure function of (config, seed), and changing the protocol
never changes where nodes are placed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from . import protocols as P
from .core import EpochState, Node, Position, Protocol, Role, ScenarioConfig
from .metrics import RoundReport, SimulationTrace


@dataclass
class Streams:
    deployment: np.random.Generator
    election: np.random.Generator
    mobility: np.random.Generator
    annealing: np.random.Generator

    @classmethod
    def from_seed(cls, seed: int) -> "Streams":
        children = np.random.SeedSequence(seed).spawn(4)
        return cls(*(np.random.Generator(np.random.PCG64(s)) for s in children))


@dataclass
class NetworkState:
    """Column-wise node storage plus round bookkeeping."""

    config: ScenarioConfig
    x: np.ndarray
    y: np.ndarray
    energy: np.ndarray
    initial: np.ndarray
    dissipated: np.ndarray
    harvested: np.ndarray
    alive: np.ndarray
    eligible: np.ndarray
    is_solar: np.ndarray
    speed: np.ndarray
    wx: np.ndarray
    wy: np.ndarray
    cluster_of: np.ndarray
    epoch: EpochState
    assignment: P.ClusterAssignment = None
    pkts_to_ch: int = 0
    pkts_to_bs: int = 0
    chs_elected: int = 0
    speed_epoch: int = -1
    alive_at_election: int = 0

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def role(self) -> np.ndarray:
        """Per-node Role under the current assignment."""
        role = np.full(self.n, Role.UNASSIGNED, dtype=np.int8)
        role[self.cluster_of >= 0] = Role.MEMBER
        role[self.assignment.ch_ids] = Role.CLUSTER_HEAD
        return role

    @property
    def positions(self) -> np.ndarray:
        return np.column_stack((self.x, self.y))

    def node(self, i: int, role=None) -> Node:
        c = int(self.cluster_of[i])
        role = self.role if role is None else role
        return Node(
            id=i,
            pos=Position(float(self.x[i]), float(self.y[i])),
            velocity=(float(self.speed[i]),
                      math.atan2(self.wy[i] - self.y[i], self.wx[i] - self.x[i])
                      if np.isfinite(self.wx[i]) else 0.0),
            residual_energy=float(self.energy[i]),
            initial_energy=float(self.initial[i]),
            is_solar=bool(self.is_solar[i]),
            alive=bool(self.alive[i]),
            role=Role(int(role[i])),
            eligible=bool(self.eligible[i]),
            cluster_of=None if c < 0 else c,
        )

    @property
    def nodes(self) -> list:
        role = self.role
        return [self.node(i, role) for i in range(self.n)]

    def dist(self, i: int, j: int) -> float:
        return math.hypot(self.x[i] - self.x[j], self.y[i] - self.y[j])

    def charge(self, i: int, cost: float) -> bool:
        """Charge one action to node i under the death rule."""
        if not self.alive[i]:
            return False
        return bool(K.spend(self.energy, self.dissipated, self.alive, i, cost))

    def charge_tx(self, i: int, bits: float, d: float) -> bool:
        c = self.config
        return self.charge(i, c.e_elec_tx * bits + c.eps_fs * bits * d * d)

    def alive_count(self) -> int:
        return int(self.alive.sum())

    def ledger_error(self) -> float:
        """initial + harvested - residual - dissipated; zero up to rounding."""
        return (math.fsum(self.initial) + math.fsum(self.harvested)
                - math.fsum(self.energy) - math.fsum(self.dissipated))


def deploy(config: ScenarioConfig, rng: np.random.Generator | None = None) -> NetworkState:
    """Scatter nodes uniformly over the field; the lowest ids carry solar panels."""
    if rng is None:
        rng = Streams.from_seed(config.seed).deployment
    n = config.num_nodes
    x = rng.uniform(0.0, config.field_width, n)
    y = rng.uniform(0.0, config.field_height, n)
    solar = np.zeros(n, dtype=bool)
    solar[: int(math.floor(config.solar_fraction * n + 1e-9))] = True
    energy = np.full(n, float(config.initial_energy))
    return NetworkState(
        config=config,
        x=x,
        y=y,
        energy=energy,
        initial=energy.copy(),
        dissipated=np.zeros(n),
        harvested=np.zeros(n),
        alive=np.ones(n, dtype=bool),
        eligible=np.ones(n, dtype=bool),
        is_solar=solar,
        speed=np.zeros(n),
        wx=np.full(n, np.nan),
        wy=np.full(n, np.nan),
        cluster_of=np.full(n, P.UNCLUSTERED, dtype=np.int64),
        epoch=EpochState(0, config.epoch_len, 0, 0),
        assignment=P.ClusterAssignment.empty(n),
    )


def is_sunny(round_index: int, config: ScenarioConfig) -> bool:
    return (round_index % config.sun_cycle_rounds) < config.sun_fraction * config.sun_cycle_rounds


def solar_active(state: NetworkState) -> np.ndarray:
    """Nodes harvesting this round. Only the solar-aware protocols use their panels."""
    cfg = state.config
    if not cfg.protocol.solar_aware or not is_sunny(state.epoch.round, cfg):
        return np.zeros(state.n, dtype=bool)
    return state.is_solar & state.alive


def solar_step(state: NetworkState, config: ScenarioConfig | None = None) -> float:
    """Recharge live solar nodes during daylight, capped at their initial energy.

    Returns the energy harvested this round. Dead nodes stay dead.
    """
    config = config or state.config
    if config.harvest_j_per_round <= 0 or not config.protocol.solar_aware \
            or not is_sunny(state.epoch.round, config):
        return 0.0
    return K.harvest(state.energy, state.initial, state.harvested, state.alive, state.is_solar,
                     config.harvest_j_per_round)


def mobility_step(state: NetworkState, config: ScenarioConfig | None, rng: np.random.Generator,
                  fraction: float = 1.0) -> None:
    """Random-waypoint motion for M-LEACH: `fraction` of one round's travel.

    Speeds are drawn uniformly from [0, v_max] once per epoch; a node that
    reaches its waypoint stops there and draws a new one.
    """
    config = config or state.config
    if config.protocol is not Protocol.MLEACH:
        return
    n = state.n
    epoch_index = state.epoch.round // state.epoch.epoch_len
    if state.speed_epoch != epoch_index:
        state.speed = rng.uniform(0.0, config.v_max, n) if config.v_max > 0 else np.zeros(n)
        state.speed_epoch = epoch_index
    fresh = ~np.isfinite(state.wx)
    if fresh.any():
        state.wx[fresh] = rng.uniform(0.0, config.field_width, fresh.sum())
        state.wy[fresh] = rng.uniform(0.0, config.field_height, fresh.sum())

    step = state.speed * fraction
    dx = state.wx - state.x
    dy = state.wy - state.y
    d = np.hypot(dx, dy)
    arrive = state.alive & (d <= step)
    go = state.alive & ~arrive & (step > 0)
    scale = np.divide(step, d, out=np.zeros(n), where=go)
    state.x = np.where(arrive, state.wx, state.x + dx * scale)
    state.y = np.where(arrive, state.wy, state.y + dy * scale)
    np.clip(state.x, 0.0, config.field_width, out=state.x)
    np.clip(state.y, 0.0, config.field_height, out=state.y)
    k = int(arrive.sum())
    if k:
        state.wx[arrive] = rng.uniform(0.0, config.field_width, k)
        state.wy[arrive] = rng.uniform(0.0, config.field_height, k)


def begin_round(state: NetworkState, r: int) -> None:
    ep = state.epoch
    ep.round = r
    if r % ep.epoch_len == 0:
        state.eligible[:] = state.alive
        ep.chs_this_metaround = 0
        ep.metaround_start = r


_JOIN_MODE = {
    Protocol.LEACH_SC: K.JOIN_MIDPOINT,
    Protocol.MLEACH: K.JOIN_MLEACH,
}


def _elect(state: NetworkState, variant: Protocol, config: ScenarioConfig, streams: Streams) -> np.ndarray:
    if variant.centralized:
        return P.elect_chs_centralized(state, config.p_ch, variant.solar_aware, streams.annealing,
                                       iters=config.anneal_iters)
    if variant is Protocol.MLEACH:
        return P.mleach_elect(state.speed, state.energy, state.alive, config.p_ch)
    return P.elect_chs_distributed(state, variant, streams.election)


def run_setup_phase(state: NetworkState, variant: Protocol, config: ScenarioConfig,
                    streams: Streams) -> P.ClusterAssignment:
    """Elect heads, charge the control traffic and form clusters.

    Control traffic (when ``config.setup_costs``): every head advertises once
    at the distance of the farthest live node, every other node hears every
    advertisement, every member sends a join request. The centralized
    variants additionally make every node report to the sink and hear the
    sink's head announcement.
    """
    l_c = config.packet_bits_data
    charge = config.setup_costs
    bsx, bsy = config.bs_pos
    radio = (config.e_elec_tx, config.e_elec_rx, config.eps_fs)
    if variant.centralized and charge:
        K.charge_status(state.x, state.y, state.energy, state.dissipated, state.alive,
                        bsx, bsy, l_c, *radio, True)

    state.alive_at_election = state.alive_count()
    elected = np.asarray(_elect(state, variant, config, streams), dtype=np.int64)
    state.chs_elected = len(elected)

    if variant.centralized and charge:
        K.charge_status(state.x, state.y, state.energy, state.dissipated, state.alive,
                        bsx, bsy, l_c, *radio, False)

    chs = K.setup_phase(state.x, state.y, state.energy, state.dissipated, state.alive,
                        elected, state.cluster_of, _JOIN_MODE.get(variant, K.JOIN_RSSI),
                        bsx, bsy, config.mleach_range ** 2, l_c,
                        config.e_elec_tx, config.e_elec_rx, config.eps_fs,
                        charge)

    if variant is Protocol.MULTIHOP:
        nxt, hop = K.route_hops(chs, state.x, state.y, bsx, bsy, config.ch_radio_range ** 2)
        routes = dict(zip(chs.tolist(), nxt.tolist()))
        hops = dict(zip(chs.tolist(), hop.tolist()))
    else:
        routes, hops = P.direct_routes(chs), {}
    assignment = P.ClusterAssignment(chs, state.cluster_of, routes, hops)
    state.assignment = assignment
    return assignment


def _solar_handovers(state: NetworkState, assignment: P.ClusterAssignment) -> None:
    active = solar_active(state)
    if not active.any() or len(assignment.ch_ids) == 0:
        return
    heads, changed = K.solar_handovers(assignment.ch_ids, state.cluster_of, state.alive,
                                       active, state.energy)
    if changed:
        assignment.ch_ids = heads
        assignment.routes = P.direct_routes(heads)
        assignment.hops = {}


def _mobile_handovers(state: NetworkState, assignment: P.ClusterAssignment) -> int:
    cfg = state.config
    if len(assignment.ch_ids) == 0:
        return 0
    return K.mobile_handovers(state.x, state.y, state.energy, state.dissipated, state.alive,
                              state.cluster_of, assignment.ch_ids, cfg.mleach_range ** 2,
                              float(cfg.packet_bits_data), cfg.e_elec_tx, cfg.eps_fs)


def run_steady_phase(state: NetworkState, assignment: P.ClusterAssignment,
                     config: ScenarioConfig, streams: Streams | None = None) -> tuple:
    """Data frames of one round; returns (packets delivered to heads, aggregates at the sink)."""
    variant = config.protocol
    if variant.solar_aware:
        _solar_handovers(state, assignment)
    if config.downward_query and len(assignment.ch_ids):
        K.downward_query(state.x, state.y, state.energy, state.dissipated, state.alive,
                         state.cluster_of, assignment.ch_ids, config.packet_bits_query,
                         config.e_elec_tx, config.e_elec_rx, config.eps_fs)
    frames = config.frames_per_round
    bsx, bsy = config.bs_pos
    order, nxt = P.forwarding_order(assignment.routes, assignment.hops)
    args = (float(config.packet_bits_data), float(config.packet_bits_agg),
            config.e_elec_tx, config.e_elec_rx, config.eps_fs, config.e_da, config.orphans_direct)
    if variant is not Protocol.MLEACH or streams is None:
        total_ch, total_bs = K.steady_frames(state.x, state.y, state.energy, state.dissipated, state.alive,
                                             state.cluster_of, order, nxt, bsx, bsy, *args, frames)
    else:
        total_ch = total_bs = 0
        for _ in range(frames):
            if len(order) == 0 and not config.orphans_direct:
                break
            mobility_step(state, config, streams.mobility, 1.0 / (frames + 1))
            _mobile_handovers(state, assignment)
            to_ch, to_bs = K.steady_frame(state.x, state.y, state.energy, state.dissipated, state.alive,
                                          state.cluster_of, order, nxt, bsx, bsy, *args)
            total_ch += to_ch
            total_bs += to_bs
    state.pkts_to_ch += total_ch
    state.pkts_to_bs += total_bs
    return total_ch, total_bs


class Simulation:
    """Steppable simulation of one (config, seed) pair."""

    def __init__(self, config: ScenarioConfig, seed: int | None = None):
        if seed is not None:
            config = config.replace(seed=seed)
        self.config = config
        self.streams = Streams.from_seed(config.seed)
        self.state = deploy(config, self.streams.deployment)
        self.round = 0

    @property
    def finished(self) -> bool:
        return self.round >= self.config.rounds_max or not self.state.alive.any()

    def step(self) -> RoundReport:
        cfg, st = self.config, self.state
        r = self.round
        begin_round(st, r)
        solar_step(st, cfg)
        if cfg.protocol is Protocol.MLEACH:
            mobility_step(st, cfg, self.streams.mobility, 1.0 / (cfg.frames_per_round + 1))
        assignment = run_setup_phase(st, cfg.protocol, cfg, self.streams)
        run_steady_phase(st, assignment, cfg, self.streams)
        alive = st.alive_count()
        self.round += 1
        return RoundReport(
            round=r,
            alive=alive,
            dead=st.n - alive,
            chs_elected=st.chs_elected,
            pkts_to_ch=st.pkts_to_ch,
            pkts_to_bs=st.pkts_to_bs,
            energy_dissipated_j=float(st.dissipated.sum()),
            energy_harvested_j=float(st.harvested.sum()),
        )

    def run(self) -> SimulationTrace:
        trace = SimulationTrace(self.config)
        while not self.finished:
            trace.reports.append(self.step())
        return trace


def run(config: ScenarioConfig, seed: int | None = None) -> SimulationTrace:
    """Simulate until every node is dead or ``rounds_max`` rounds have run."""
    return Simulation(config, seed).run()
