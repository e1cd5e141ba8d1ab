import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from leachsim import ConfigError, RadioParams
from leachsim import radio as R

P = RadioParams()
approx = lambda v: pytest.approx(v, rel=1e-12, abs=1e-18)


def geom(**kw):
    base = dict(n=100, k=10, l_c=200, l_a=200, l_bs=0, d_to_bs=0.0, d_to_ch=0.0)
    base.update(kw)
    return R.ClusterGeometry(**base)


# --- single actions ---------------------------------------------------------

def test_tx_examples():
    assert R.tx_energy(P, 200, 10) == approx(12.0e-6)
    assert R.tx_energy(P, 0, 37.0) == 0.0
    assert R.tx_energy(P, 200, 0) == approx(10.0e-6)


def test_rx_examples():
    assert R.rx_energy(P, 200) == approx(10.0e-6)
    assert R.rx_energy(P, 0) == 0.0
    assert R.rx_energy(P, 2000) == approx(100.0e-6)


def test_agg_examples():
    assert R.agg_energy(P, 2000) == approx(1.0e-7)
    assert R.agg_energy(P, 0) == 0.0
    assert R.agg_energy(P, 200) == approx(1.0e-8)


@pytest.mark.parametrize("call", [
    lambda: R.tx_energy(P, -1, 1), lambda: R.tx_energy(P, 1, -1),
    lambda: R.rx_energy(P, -5), lambda: R.agg_energy(P, -5),
])
def test_negative_inputs_rejected(call):
    with pytest.raises(ValueError):
        call()


# --- closed forms ------------------------------------------------------------

def test_ch_upward_examples():
    assert R.ch_upward_energy(P, geom(d_to_bs=100)) == approx(3.001e-4)
    assert R.ch_upward_energy(P, geom(n=10, k=10, l_c=0, l_a=0)) == 0.0
    assert R.ch_upward_energy(P, geom(d_to_bs=50)) == approx(1.501e-4)


def test_member_upward_examples():
    assert R.member_upward_energy(P, 200, 20) == approx(18.0e-6)
    assert R.member_upward_energy(P, 0, 20) == 0.0
    assert R.member_upward_energy(P, 200, 10) == approx(12.0e-6)


def test_cluster_upward_examples():
    assert R.cluster_upward_energy(P, geom(d_to_bs=100, d_to_ch=20)) == approx(4.621e-4)
    single = geom(n=10, k=10, d_to_bs=30, d_to_ch=20)
    assert R.cluster_upward_energy(P, single) == R.ch_upward_energy(P, single)
    assert R.cluster_upward_energy(P, geom()) == approx(1.901e-4)


def test_downward_examples():
    g = geom(l_bs=200, d_to_ch=20)
    assert R.ch_downward_energy(P, g) == approx(2.62e-4)
    assert R.ch_downward_energy(P, geom(l_bs=0, d_to_ch=20)) == 0.0
    assert R.ch_downward_energy(P, geom(n=10, k=10, l_bs=200, d_to_ch=20)) == approx(10e-6)
    assert R.cluster_downward_energy(P, g) == approx(3.52e-4)
    assert R.cluster_downward_energy(P, geom(l_bs=0)) == 0.0
    assert R.cluster_downward_energy(P, geom(n=10, k=10, l_bs=200)) == approx(10e-6)


def test_totals_examples():
    g = geom(l_bs=200, d_to_bs=100, d_to_ch=20)
    assert R.cluster_total_energy(P, g) == approx(8.141e-4)
    assert R.network_total_energy(P, g) == approx(8.141e-3)
    zero = geom(l_c=0, l_a=0, l_bs=0, d_to_bs=40, d_to_ch=10)
    assert R.network_total_energy(P, zero) == 0.0
    one = geom(n=30, k=1, l_bs=200, d_to_bs=60, d_to_ch=15)
    assert R.network_total_energy(P, one) == R.cluster_total_energy(P, one)


@pytest.mark.parametrize("kw", [dict(n=5, k=10), dict(k=0), dict(d_to_bs=-1.0), dict(l_c=-1)])
def test_invalid_geometry(kw):
    with pytest.raises(ConfigError):
        geom(**kw)


# --- linear two-head model --------------------------------------------------

def lin(m, la=200, lb=200):
    return R.LinearScenario(m=m, l_a=la, l_b=lb)


def test_linear_examples():
    # A: 10e-6 + 100e-12*200*(2*25)**2 = 60e-6; B: 10e-6 + 100e-12*200*25**2 = 22.5e-6
    assert R.linear_direct_cost(P, lin(25)) == approx(82.5e-6)
    assert R.linear_direct_cost(P, lin(25, 0, 0)) == 0.0
    assert R.linear_direct_cost(P, lin(0)) == approx(20e-6)
    assert R.linear_multihop_cost(P, lin(25)) == approx(77.5e-6)
    assert R.linear_multihop_cost(P, lin(25, 0, 0)) == 0.0
    assert R.linear_multihop_cost(P, lin(0)) == approx(40e-6)


def test_breakeven_examples():
    assert R.multihop_breakeven_m(P, 200, 200) == pytest.approx(22.36, abs=0.01)
    tiny = RadioParams(e_elec_tx=1e-30, e_elec_rx=1e-30, eps_fs=100e-12, e_da=50e-12)
    assert R.multihop_breakeven_m(tiny, 200, 200) == pytest.approx(0.0, abs=1e-6)
    assert R.linear_multihop_cost(P, lin(30)) < R.linear_direct_cost(P, lin(30))
    assert R.linear_multihop_cost(P, lin(15)) > R.linear_direct_cost(P, lin(15))
    with pytest.raises(ValueError):
        R.multihop_breakeven_m(P, 0, 200)


# --- independent oracle: per-node summation over an explicit cluster ---------

def brute_force_cluster(n, k, l_c, l_a, l_bs, d_bs, d_ch, e_tx=50e-9, e_rx=50e-9, eps=100e-12, e_da=50e-12):
    """Walk every node of one cluster and add up what it pays, action by action."""
    size = int(round(n / k))
    up = np.zeros(size)
    down = np.zeros(size)
    head = 0
    for m in range(1, size):
        up[m] += l_c * e_tx + l_c * eps * d_ch ** 2      # member sends its reading
        up[head] += l_c * e_rx                           # head hears it
    up[head] += e_da * size * l_c                        # head fuses all readings incl. its own
    up[head] += l_a * e_tx + l_a * eps * d_bs ** 2        # head reports to the sink
    down[head] += l_bs * e_rx                            # head hears the sink...
    for m in range(1, size):
        down[head] += l_bs * e_rx                        # ...once per member (as the closed form books it)
        down[head] += l_bs * e_tx + l_bs * eps * d_ch ** 2
        down[m] += l_bs * e_rx
    return math.fsum(up), math.fsum(down)


@given(st.integers(1, 20), st.integers(1, 12), st.integers(0, 4000), st.integers(0, 4000),
       st.integers(0, 4000), st.floats(0, 300), st.floats(0, 100))
def test_closed_forms_match_brute_force(k, size, l_c, l_a, l_bs, d_bs, d_ch):
    n = k * size
    g = R.ClusterGeometry(n=n, k=k, l_c=l_c, l_a=l_a, l_bs=l_bs, d_to_bs=d_bs, d_to_ch=d_ch)
    up, down = brute_force_cluster(n, k, l_c, l_a, l_bs, d_bs, d_ch)
    assert R.cluster_upward_energy(P, g) == pytest.approx(up, rel=1e-12, abs=1e-20)
    assert R.cluster_downward_energy(P, g) == pytest.approx(down, rel=1e-12, abs=1e-20)
    assert R.network_total_energy(P, g) == pytest.approx(k * (up + down), rel=1e-12, abs=1e-20)


# --- properties ---------------------------------------------------------------

bits = st.floats(1, 1e5)
dist = st.floats(0, 1e3)


@given(bits, bits, dist)
def test_tx_monotone_in_bits(b1, b2, d):
    lo, hi = sorted((b1, b2))
    assert R.tx_energy(P, lo, d) <= R.tx_energy(P, hi, d)


@given(bits, dist, dist)
def test_tx_monotone_in_distance(b, d1, d2):
    lo, hi = sorted((d1, d2))
    assert R.tx_energy(P, b, lo) <= R.tx_energy(P, b, hi)


@given(bits, dist)
def test_tx_rx_linear(b, d):
    assert R.tx_energy(P, 2 * b, d) == pytest.approx(2 * R.tx_energy(P, b, d), rel=1e-14)
    assert R.rx_energy(P, 3 * b) == pytest.approx(3 * R.rx_energy(P, b), rel=1e-14)


@given(st.integers(1, 20), st.integers(1, 20), dist, dist)
def test_decompositions_exact(k, size, d_bs, d_ch):
    g = R.ClusterGeometry(n=k * size, k=k, l_c=200, l_a=200, l_bs=200, d_to_bs=d_bs, d_to_ch=d_ch)
    assert R.cluster_upward_energy(P, g) == (R.ch_upward_energy(P, g)
                                             + (size - 1) * R.member_upward_energy(P, 200, d_ch))
    assert R.network_total_energy(P, g) == k * R.cluster_total_energy(P, g)


@given(st.floats(0, 200), st.floats(1, 4000), st.floats(0, 4000))
def test_breakeven_separates_regimes(m, la, lb):
    m_star = R.multihop_breakeven_m(P, la, lb)
    s = lin(m, la, lb)
    if m > m_star * (1 + 1e-9):
        assert R.linear_multihop_cost(P, s) < R.linear_direct_cost(P, s)
    elif m < m_star * (1 - 1e-9):
        assert R.linear_multihop_cost(P, s) > R.linear_direct_cost(P, s)
