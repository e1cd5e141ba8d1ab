import itertools

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from leachsim import Protocol, ScenarioConfig, deploy
from leachsim import protocols as P

coord = st.floats(0, 100, allow_nan=False)
pts = st.lists(st.tuples(coord, coord), min_size=1, max_size=12)


def state_with(n=100, **kw):
    cfg = ScenarioConfig(num_nodes=n, **kw)
    return deploy(cfg, np.random.default_rng(7))


# --- thresholds -------------------------------------------------------------

def test_leach_threshold_examples():
    assert P.leach_threshold(0.1, 0, True) == pytest.approx(0.1)
    assert P.leach_threshold(0.1, 5, False) == 0.0
    assert P.leach_threshold(0.37, 0, False) == 0.0
    assert P.leach_threshold(0.1, 9, True) == pytest.approx(1.0)


@given(st.floats(0.01, 0.99), st.integers(0, 10_000))
def test_leach_threshold_in_unit_interval(p, r):
    t = P.leach_threshold(p, r, True)
    assert 0.0 <= t <= 1.0
    assert t >= min(p, 1.0) - 1e-12


def test_sleach_threshold_examples():
    assert P.sleach_threshold(0.1, True, 0, 100) == pytest.approx(0.4)
    assert P.sleach_threshold(0.1, False, 0, 100) == pytest.approx(0.025)
    assert P.sleach_threshold(0.1, True, 50, 100) == pytest.approx(0.8)
    assert P.sleach_threshold(0.1, False, 100, 100) == 1.0


@given(st.floats(0.001, 0.2), st.integers(0, 50), st.integers(100, 500))
def test_sleach_solar_to_battery_ratio(p, cheads, n):
    s = P.sleach_threshold(p, True, cheads, n)
    b = P.sleach_threshold(p, False, cheads, n)
    assume(s < 1.0)
    assert s / b == pytest.approx(16.0, rel=1e-12)


def test_optimal_ch_count():
    assert P.optimal_ch_count(0.1, 100) == 10
    assert P.optimal_ch_count(0.1, 4) == 1
    assert P.optimal_ch_count(0.1, 0) == 1
    assert P.optimal_ch_count(0.1, 25) == 3
    assert P.optimal_ch_count(0.1, 24) == 2


# --- distributed election ---------------------------------------------------

def test_distributed_all_ineligible_elects_nobody():
    st_ = state_with()
    st_.eligible[:] = False
    assert len(P.elect_chs_distributed(st_, Protocol.LEACH, np.random.default_rng(0))) == 0


def test_distributed_last_round_of_epoch_elects_everyone_eligible():
    st_ = state_with()
    st_.epoch.round = 9
    st_.eligible[::3] = False
    ids = P.elect_chs_distributed(st_, Protocol.LEACH, np.random.default_rng(0))
    assert set(ids) == {i for i in range(100) if i % 3}
    assert not st_.eligible.any()
    assert st_.epoch.chs_this_metaround == len(ids)


def test_distributed_mean_head_count_matches_binomial():
    counts = []
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        st_ = state_with()
        counts.append(len(P.elect_chs_distributed(st_, Protocol.LEACH, rng)))
    # Binomial(100, 0.1): mean 10, standard error of the 1000-trial mean ~0.095
    assert 8 <= np.mean(counts) <= 12
    assert abs(np.mean(counts) - 10) < 0.5


def test_sleach_distributed_prefers_solar():
    solar = battery = 0
    rng = np.random.default_rng(3)
    for _ in range(300):
        st_ = state_with(solar_fraction=0.5)
        ids = P.elect_chs_distributed(st_, Protocol.SLEACH_D, rng)
        solar += int(np.sum(ids < 50))
        battery += int(np.sum(ids >= 50))
    # expected 0.4*50 vs 0.025*50 per trial
    assert solar / 300 == pytest.approx(20, abs=1.0)
    assert battery / 300 == pytest.approx(1.25, abs=0.3)


def test_dead_nodes_never_elected():
    st_ = state_with()
    st_.epoch.round = 9
    st_.alive[:50] = False
    ids = P.elect_chs_distributed(st_, Protocol.LEACH, np.random.default_rng(1))
    assert ids.min() >= 50


# --- centralized election ---------------------------------------------------

def centralized_state(xy, energy=None, solar=None):
    n = len(xy)
    st_ = state_with(n=n, solar_fraction=0.0)
    xy = np.asarray(xy, dtype=float)
    st_.x[:] = xy[:, 0]
    st_.y[:] = xy[:, 1]
    if energy is not None:
        st_.energy[:] = energy
    if solar is not None:
        st_.is_solar[:] = solar
    return st_


def test_centralized_single_node():
    st_ = centralized_state([(3, 4)])
    assert list(P.elect_chs_centralized(st_, 0.1, False, np.random.default_rng(0))) == [0]


def test_centralized_square_tie_goes_to_lowest_id():
    st_ = centralized_state([(0, 0), (10, 0), (0, 10), (10, 10)])
    assert list(P.elect_chs_centralized(st_, 0.1, False, np.random.default_rng(5))) == [0]


def sq_cost(xy, chosen):
    xy = np.asarray(xy, dtype=float)
    d2 = ((xy[:, None, :] - xy[None, list(chosen), :]) ** 2).sum(-1)
    return d2.min(axis=1).sum()


def test_centralized_collinear_near_optimal():
    xy = [(10.0 * i, 0.0) for i in range(10)]
    st_ = centralized_state(xy)
    chs = P.elect_chs_centralized(st_, 0.2, False, np.random.default_rng(11))
    best = min(sq_cost(xy, c) for c in itertools.combinations(range(10), 2))
    assert len(chs) == 2
    assert sq_cost(xy, chs) <= 1.05 * best


def test_centralized_tops_up_with_richest_when_few_clear_the_mean():
    st_ = state_with()
    st_.energy[:] = 0.01
    st_.energy[[40, 60, 80]] = 5.0    # only three nodes at or above the mean
    chs = P.elect_chs_centralized(st_, 0.1, False, np.random.default_rng(0))
    # k = 10 candidates: the three rich nodes, then the lowest ids among the ties
    assert list(chs) == [0, 1, 2, 3, 4, 5, 6, 40, 60, 80]


@given(st.lists(st.floats(0.01, 1.0), min_size=12, max_size=40), st.integers(0, 2**32 - 1))
def test_centralized_never_skips_richer_for_poorer(energies, seed):
    n = len(energies)
    rng = np.random.default_rng(seed)
    st_ = centralized_state(rng.uniform(0, 100, (n, 2)), energy=energies)
    chs = set(P.elect_chs_centralized(st_, 0.1, False, rng).tolist())
    e = np.asarray(energies)
    mean = e.mean()
    below = [i for i in chs if e[i] < mean * (1 - 1e-12)]
    above_unselected = [i for i in range(n) if e[i] >= mean and i not in chs]
    assert not (below and above_unselected)


def test_centralized_solar_preference():
    rng = np.random.default_rng(4)
    xy = rng.uniform(0, 100, (40, 2))
    solar = np.arange(40) < 20
    st_ = centralized_state(xy, solar=solar)
    chs = P.elect_chs_centralized(st_, 0.1, True, np.random.default_rng(1))
    assert all(solar[c] for c in chs)
    chs_plain = P.elect_chs_centralized(st_, 0.1, False, np.random.default_rng(1))
    assert len(chs_plain) == len(chs) == 4


def test_anneal_rejects_bad_k():
    with pytest.raises(ValueError):
        P.anneal_medoids(np.zeros((3, 2)), 4, np.random.default_rng(0))


# --- M-LEACH election -------------------------------------------------------

def test_mleach_elect_examples():
    energy = np.array([0.1, 0.5, 0.3, 0.4])
    assert list(P.mleach_elect(np.zeros(4), energy, np.ones(4, bool), 0.5)) == [1, 3]
    speed = np.array([0.5, 0.0, 0.7, 0.9])
    assert list(P.mleach_elect(speed, np.ones(4), np.ones(4, bool), 0.25)) == [1]


def test_mleach_elect_matches_sort_oracle(rng):
    speed = rng.uniform(0, 1, 100).round(1)          # coarse speeds force ties
    energy = rng.uniform(0, 0.5, 100).round(2)
    alive = rng.uniform(size=100) > 0.1
    got = P.mleach_elect(speed, energy, alive, 0.1)
    live = [i for i in range(100) if alive[i]]
    k = max(1, int(np.floor(0.1 * len(live) + 0.5)))
    want = sorted(sorted(live, key=lambda i: (speed[i], -energy[i], i))[:k])
    assert list(got) == want


# --- joins ------------------------------------------------------------------

def positions(*xy):
    return np.array(xy, dtype=float)


def test_join_by_rssi_examples():
    pos = positions((0, 0), (10, 0), (20, 0))
    assert P.join_by_rssi((0, 0), [1, 2], pos) == 1
    assert P.join_by_rssi((10, 0), [1, 2], pos) == 1
    pos = positions((50, 50), (40, 40), (60, 60))
    assert P.join_by_rssi((50, 50), [2, 1], pos) == 1
    assert P.join_by_rssi((1, 1), [], pos) == P.UNCLUSTERED


def test_join_by_midpoint_examples():
    pos = positions((0, 0), (40, 40), (80, 80))
    assert P.join_by_midpoint((0, 0), [1, 2], pos, (100, 100)) == 1
    pos = positions((30, 30), (20, 20), (70, 70))
    assert P.join_by_midpoint((30, 30), [1, 2], pos, (30, 30)) == 1
    pos = positions((0, 0), (50, 50), (10, 10))
    assert P.join_by_midpoint((0, 0), [1, 2], pos, (100, 100)) == 1
    assert P.join_by_midpoint((0, 0), [], pos, (100, 100)) == P.UNCLUSTERED


def test_mleach_join_examples():
    pos = positions((0, 0), (10, 0), (0, 15), (90, 90))
    energy = np.array([0.5, 0.3, 0.4, 0.9])
    assert P.mleach_join((0, 0), [1], pos, energy, 30) == 1
    assert P.mleach_join((0, 0), [1, 2, 3], pos, energy, 30) == 2
    assert P.mleach_join((0, 0), [3, 2], pos, energy, 5) == 2


@given(pts, coord, coord, st.floats(-500, 500), st.floats(-500, 500))
def test_rssi_translation_invariant(xy, px, py, dx, dy):
    pos = np.array(xy)
    chs = list(range(len(xy)))
    a = P.join_by_rssi((px, py), chs, pos)
    shifted = pos + (dx, dy)
    # float rounding can flip a near-tie; only compare when the winner is clear
    d = np.hypot(pos[:, 0] - px, pos[:, 1] - py)
    srt = np.sort(d)
    assume(len(d) == 1 or srt[1] - srt[0] > 1e-6)
    assert P.join_by_rssi((px + dx, py + dy), chs, shifted) == a


@given(pts, coord, coord, coord, coord, st.floats(-500, 500), st.floats(-500, 500))
def test_midpoint_translation_invariant(xy, px, py, bx, by, dx, dy):
    pos = np.array(xy)
    chs = list(range(len(xy)))
    a = P.join_by_midpoint((px, py), chs, pos, (bx, by))
    mx, my = (px + bx) / 2, (py + by) / 2
    srt = np.sort(np.hypot(pos[:, 0] - mx, pos[:, 1] - my))
    assume(len(srt) == 1 or srt[1] - srt[0] > 1e-6)
    assert P.join_by_midpoint((px + dx, py + dy), chs, pos + (dx, dy), (bx + dx, by + dy)) == a


# --- handovers --------------------------------------------------------------

def handover_state():
    st_ = state_with(n=4, protocol="MLeach")
    st_.x[:] = [0, 10, 20, 0]
    st_.y[:] = [0, 0, 0, 0]
    st_.cluster_of[:] = [1, 1, 2, 3]
    return st_


def test_mleach_handover_charges_two_messages():
    st_ = handover_state()
    before = st_.energy[0]
    assert P.mleach_handover(st_, 0, 2)
    assert st_.cluster_of[0] == 2
    disjoin = 50e-9 * 200 + 100e-12 * 200 * 10 ** 2
    joinreq = 50e-9 * 200 + 100e-12 * 200 * 20 ** 2
    assert before - st_.energy[0] == pytest.approx(disjoin + joinreq, rel=1e-12)


def test_mleach_handover_same_head_is_free():
    st_ = handover_state()
    e = st_.energy.copy()
    assert not P.mleach_handover(st_, 0, 1)
    assert np.array_equal(e, st_.energy)


def test_mleach_handover_skips_disjoin_to_dead_head():
    st_ = handover_state()
    st_.alive[1] = False
    before = st_.energy[0]
    P.mleach_handover(st_, 0, 2)
    assert before - st_.energy[0] == pytest.approx(50e-9 * 200 + 100e-12 * 200 * 400, rel=1e-12)


def test_sleach_handover_examples():
    active = np.array([False, True, False, True])
    energy = np.array([0.4, 0.2, 0.5, 0.3])
    assert P.sleach_handover([1, 2], 0, active, energy) == 1
    assert P.sleach_handover([1, 3, 2], 0, active, energy) == 3
    assert P.sleach_handover([0, 2], 1, active, energy) == 1
    assert P.sleach_handover([2], 0, active, energy) == 0


# --- multi-hop routing ------------------------------------------------------

def test_route_single_head():
    pos = positions((0, 0), (90, 90))
    assert P.multihop_route([1], pos, (500, 500), 10) == {1: P.BS}


def test_route_collinear_two_hops():
    pos = positions((100, 50), (60, 50))
    assert P.multihop_route([0, 1], pos, (20, 50), 45) == {0: 1, 1: P.BS}


def test_route_all_in_range_go_direct():
    pos = positions((10, 10), (20, 20), (30, 30))
    assert P.multihop_route([0, 1, 2], pos, (20, 30), 100) == {0: P.BS, 1: P.BS, 2: P.BS}


def test_route_prefers_nearest_relay():
    pos = positions((0, 0), (30, 5), (31, -5), (60, 0))
    r = P.multihop_route([0, 1, 2, 3], pos, (90, 0), 35)
    assert r[0] == 1 and r[1] == 3 and r[2] == 3 and r[3] == P.BS


@given(st.lists(st.tuples(coord, coord), min_size=1, max_size=15, unique=True),
       st.floats(5, 80), coord, st.floats(100, 200))
def test_routes_are_min_hop_and_acyclic(xy, rng_m, bx, by):
    pos = np.array(xy)
    chs = list(range(len(xy)))
    routes, hops = P._route_hops(chs, pos, (bx, by), rng_m)
    d = lambda a, b: np.hypot(*(np.asarray(a) - np.asarray(b)))
    for c in chs:
        seen, cur = set(), c
        while cur != P.BS:                       # terminates at the sink
            assert cur not in seen
            seen.add(cur)
            cur = routes[cur]
        if hops[c] == 0:
            continue                             # no path: direct fallback
        for o in chs:                            # Bellman optimality on the unit-weight graph
            if o != c and hops[o] > 0 and d(pos[c], pos[o]) <= rng_m:
                assert hops[c] <= hops[o] + 1
        if d(pos[c], (bx, by)) <= rng_m:
            assert hops[c] == 1 and routes[c] == P.BS
        else:
            nxt = routes[c]
            assert hops[nxt] == hops[c] - 1 and d(pos[c], pos[nxt]) <= rng_m


def test_forwarding_order_puts_relays_last():
    order, nxt = P.forwarding_order({0: 1, 1: 2, 2: P.BS, 5: P.BS}, {0: 3, 1: 2, 2: 1, 5: 1})
    assert list(order) == [0, 1, 2, 5]
    assert list(nxt) == [1, 2, P.BS, P.BS]
