"""Cluster-head election, cluster joining, routing and handover rules.

Each protocol variant is a combination of one election rule, one join rule
and (optionally) a steady-state adjustment:

=================  =====================  ==============  ======================
variant            election               join            steady state
=================  =====================  ==============  ======================
Leach              LEACH threshold        nearest head    direct to sink
LeachC             sink, annealed         nearest head    direct to sink
SLeachC            sink, solar preferred  nearest head    solar handover
SLeachD            solar threshold        nearest head    solar handover
MultiHopLeach      LEACH threshold        nearest head    min-hop head relays
MLeach             slowest, richest       richest in      mobility + handover
                                          range
LeachSC            LEACH threshold        nearest to      direct to sink
                                          midpoint
=================  =====================  ==============  ======================

Ties are always broken by the lowest node id.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .core import Protocol, epoch_length

UNCLUSTERED = K.UNCLUSTERED
BS = K.TO_BS

SOLAR_FACTOR = 4.0
ANNEAL_T0 = 0.05
ANNEAL_T_END = 1e-3
ANNEAL_RESTARTS = 19
ANNEAL_BUDGET = 54000
ANNEAL_CONFIRM = 99


@dataclass
class ClusterAssignment:
    ch_ids: np.ndarray
    cluster_of: np.ndarray
    routes: dict = field(default_factory=dict)
    hops: dict = field(default_factory=dict)

    @property
    def membership(self) -> dict:
        """Member id -> head id for every clustered non-head node."""
        return {int(i): int(c) for i, c in enumerate(self.cluster_of) if c >= 0 and c != i}

    def members_of(self, ch: int) -> np.ndarray:
        idx = np.flatnonzero(self.cluster_of == ch)
        return idx[idx != ch]

    @classmethod
    def empty(cls, n: int) -> "ClusterAssignment":
        return cls(np.empty(0, dtype=np.int64), np.full(n, UNCLUSTERED, dtype=np.int64), {})


def leach_threshold(p: float, r: int, eligible: bool) -> float:
    """Rotation threshold: rises from p to 1 across the epoch so every node serves once."""
    if not eligible:
        return 0.0
    denom = 1.0 - p * (r % epoch_length(p))
    if denom <= 0.0:
        return 1.0
    return min(1.0, max(0.0, p / denom))


def sleach_threshold(p: float, is_solar: bool, cheads: int, num_nodes: int) -> float:
    """Solar-weighted threshold: solar nodes get 4x the base probability, battery nodes 1/4."""
    if cheads >= num_nodes:
        return 1.0
    sf = SOLAR_FACTOR if is_solar else 1.0 / SOLAR_FACTOR
    return min(1.0, max(0.0, sf * p / (1.0 - cheads / num_nodes)))


def optimal_ch_count(p: float, alive_count: int) -> int:
    """max(1, round(p * alive)) with halves rounded up."""
    return max(1, int(math.floor(p * alive_count + 0.5)))


def elect_chs_distributed(state, variant: Protocol, rng: np.random.Generator) -> np.ndarray:
    """Self-election by coin flip against the variant's threshold.

    One uniform is drawn per node (dead or alive) so the election stream stays
    aligned across rounds. Elected nodes leave the eligible set until the
    epoch resets.
    """
    draws = rng.random(state.n)
    p = state.config.p_ch
    if variant is Protocol.SLEACH_D:
        cheads = state.epoch.chs_this_metaround
        total = state.config.num_nodes
        t = np.where(state.is_solar,
                     sleach_threshold(p, True, cheads, total),
                     sleach_threshold(p, False, cheads, total))
    else:
        t = leach_threshold(p, state.epoch.round, True)
    ids = np.flatnonzero(state.alive & state.eligible & (draws < t))
    state.eligible[ids] = False
    state.epoch.chs_this_metaround += len(ids)
    return ids


def optimiser_chains(n_points: int, n_cand: int, k: int, restarts: int = ANNEAL_RESTARTS,
                     budget: int = ANNEAL_BUDGET) -> int:
    """Searches for one instance: the annealing chain plus as many descent
    restarts as the work budget (n_cand * n_points * k each) allows, at most `restarts`."""
    if n_cand <= k:
        return 1
    return 1 + min(restarts, budget // (n_cand * n_points * k))


def _optimise(px, py, cand, k, rng, iters, restarts, budget) -> tuple:
    chains = optimiser_chains(len(px), len(cand), k, restarts, budget)
    u = rng.random((iters, 3))
    v = rng.random((chains - 1, len(cand)))
    return K.anneal_medoids(px, py, cand, k, u, v, ANNEAL_CONFIRM, ANNEAL_T0, ANNEAL_T_END)


def anneal_medoids(points, k: int, rng: np.random.Generator, candidates=None, iters: int = 200,
                   restarts: int = ANNEAL_RESTARTS, budget: int = ANNEAL_BUDGET) -> tuple:
    """Choose k of `candidates` (default: all points) minimising sum of squared
    distances from every point to its nearest chosen one.

    One annealing chain of `iters` proposals from a greedy start, then swap
    descent restarts from random subsets as the budget allows (see
    :func:`optimiser_chains`).
    Returns (sorted indices into `points`, cost).
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    cand = np.arange(len(pts)) if candidates is None else np.asarray(candidates, dtype=np.int64)
    if k < 1 or k > len(cand):
        raise ValueError(f"k must lie in [1, {len(cand)}], got {k}")
    px = np.ascontiguousarray(pts[:, 0])
    py = np.ascontiguousarray(pts[:, 1])
    return _optimise(px, py, cand, k, rng, iters, restarts, budget)


def elect_chs_centralized(state, p: float, solar_aware: bool, rng: np.random.Generator, iters: int = 200,
                          restarts: int = ANNEAL_RESTARTS, budget: int = ANNEAL_BUDGET) -> np.ndarray:
    """Sink-side election over nodes at or above the mean residual energy.

    With `solar_aware`, the candidate pool narrows to solar nodes when enough
    of them clear the energy bar. If fewer than k nodes clear it, the k richest
    live nodes are used instead, so the head count is always k.
    """
    k = optimal_ch_count(p, int(state.alive.sum()))
    ids, cand = K.centralized_candidates(state.energy, state.alive, state.is_solar, bool(solar_aware), k)
    if len(ids) == 0:
        return ids
    local, _ = _optimise(state.x[ids], state.y[ids], cand, k, rng, iters, restarts, budget)
    return ids[local]


def mleach_elect(speed, energy, alive, p: float) -> np.ndarray:
    """Top-k live nodes by (speed ascending, residual energy descending, id)."""
    ids = np.flatnonzero(np.asarray(alive))
    if len(ids) == 0:
        return ids
    k = optimal_ch_count(p, len(ids))
    order = np.lexsort((ids, -np.asarray(energy)[ids], np.asarray(speed)[ids]))
    return np.sort(ids[order[:k]])


def _ch_arrays(ch_ids, positions):
    chs = np.array(sorted(int(c) for c in ch_ids), dtype=np.int64)
    pos = np.asarray(positions, dtype=float)
    if pos.ndim == 1 or isinstance(positions, dict):
        raise TypeError("positions must be an (n, 2) array indexed by node id")
    return chs, np.ascontiguousarray(pos[:, 0]), np.ascontiguousarray(pos[:, 1])


def join_by_rssi(node_pos, ch_ids, positions) -> int:
    """Head with the strongest signal, i.e. the nearest one."""
    chs, x, y = _ch_arrays(ch_ids, positions)
    if len(chs) == 0:
        return UNCLUSTERED
    j = K.nearest_ch(float(node_pos[0]), float(node_pos[1]), x, y, chs, np.ones(len(x), dtype=bool))
    return int(chs[j])


def join_by_midpoint(node_pos, ch_ids, positions, bs_pos) -> int:
    """Head closest to the point halfway between the node and the sink."""
    chs, x, y = _ch_arrays(ch_ids, positions)
    if len(chs) == 0:
        return UNCLUSTERED
    mx = (float(node_pos[0]) + bs_pos[0]) * 0.5
    my = (float(node_pos[1]) + bs_pos[1]) * 0.5
    j = K.nearest_ch(mx, my, x, y, chs, np.ones(len(x), dtype=bool))
    return int(chs[j])


def mleach_join(node_pos, ch_ids, positions, energy, radio_range: float) -> int:
    """Richest head within `radio_range`, falling back to the nearest head."""
    chs, x, y = _ch_arrays(ch_ids, positions)
    if len(chs) == 0:
        return UNCLUSTERED
    e = np.ascontiguousarray(np.asarray(energy, dtype=float))
    j = K.richest_ch_in_range(float(node_pos[0]), float(node_pos[1]), x, y, e, chs,
                              np.ones(len(x), dtype=bool), float(radio_range) ** 2)
    return int(chs[j])


def mleach_handover(state, member: int, new_ch: int) -> bool:
    """Move `member` to `new_ch` with a DIS-JOIN to the old head and a JOIN-REQ to the new one.

    Each message is one data-sized transmission charged to the member. The
    DIS-JOIN is skipped when the old head is already dead. Returns True when
    the membership changed.
    """
    old = int(state.cluster_of[member])
    if new_ch == old or new_ch == member:
        return False
    bits = state.config.packet_bits_data
    if old >= 0 and old != member and state.alive[old]:
        if not state.charge_tx(member, bits, state.dist(member, old)):
            state.cluster_of[member] = UNCLUSTERED
            return True
    if state.charge_tx(member, bits, state.dist(member, new_ch)) and state.alive[new_ch]:
        state.cluster_of[member] = new_ch
    else:
        state.cluster_of[member] = UNCLUSTERED
    return True


def sleach_handover(cluster_members, current_ch: int, solar_active, energy) -> int:
    """Hand the head role to the best-charged solar-active member if the head is not harvesting.

    `solar_active` and `energy` are indexed by node id.
    """
    if solar_active[current_ch]:
        return int(current_ch)
    best = int(current_ch)
    best_e = -1.0
    for m in sorted(int(i) for i in cluster_members):
        if m != current_ch and solar_active[m] and energy[m] > best_e:
            best, best_e = m, energy[m]
    return best


def _route_hops(ch_ids, positions, bs_pos, radio_range):
    chs, x, y = _ch_arrays(ch_ids, positions)
    nxt, hop = K.route_hops(chs, np.ascontiguousarray(x), np.ascontiguousarray(y),
                            float(bs_pos[0]), float(bs_pos[1]), float(radio_range) ** 2)
    routes = {int(c): int(h) for c, h in zip(chs, nxt)}
    hops = {int(c): int(h) for c, h in zip(chs, hop)}
    return routes, hops


def multihop_route(ch_ids, positions, bs_pos, radio_range: float) -> dict:
    """Next hop (another head or `BS`) for every head on a minimum-hop path to the sink.

    Links exist between heads no more than `radio_range` apart, and from a
    head to the sink when the sink is within range. Among equally short paths
    the nearest next hop wins. Heads with no path send straight to the sink.
    """
    return _route_hops(ch_ids, positions, bs_pos, radio_range)[0]


def direct_routes(ch_ids) -> dict:
    return {int(c): BS for c in ch_ids}


def forwarding_order(routes: dict, hops: dict | None = None):
    """Heads sorted so every relay comes after all heads that forward through it."""
    chs = sorted(routes)
    if not hops and all(routes[c] == BS for c in chs):
        return np.array(chs, dtype=np.int64), np.full(len(chs), BS, dtype=np.int64)
    if hops:
        chs.sort(key=lambda c: -hops.get(c, 0))
    order = np.array(chs, dtype=np.int64)
    nxt = np.array([routes[c] for c in chs], dtype=np.int64)
    return order, nxt
