"""First-order radio model and closed-form cluster energy budgets.

All transmissions use the free-space amplifier (cost grows with d**2);
there is no multipath regime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import ConfigError, RadioParams

DEFAULT_RADIO = RadioParams()


def _check_nonneg(**values):
    for name, v in values.items():
        if v < 0:
            raise ValueError(f"{name} must be non-negative, got {v!r}")


def tx_energy(params: RadioParams, bits: float, d: float) -> float:
    """Energy to transmit `bits` over `d` metres."""
    _check_nonneg(bits=bits, d=d)
    return params.e_elec_tx * bits + params.eps_fs * bits * d * d


def rx_energy(params: RadioParams, bits: float) -> float:
    _check_nonneg(bits=bits)
    return params.e_elec_rx * bits


def agg_energy(params: RadioParams, bits_total: float) -> float:
    """Energy for a cluster head to fuse `bits_total` bits of sensed data."""
    _check_nonneg(bits_total=bits_total)
    return params.e_da * bits_total


@dataclass(frozen=True)
class ClusterGeometry:
    """Idealised uniform network: `n` nodes in `k` equal clusters.

    ``d_to_ch`` is the representative member-to-head distance.
    """

    n: float
    k: float
    l_c: float
    l_a: float
    l_bs: float = 0
    d_to_bs: float = 0.0
    d_to_ch: float = 0.0

    def __post_init__(self):
        if self.n < 1 or self.k < 1:
            raise ConfigError(f"n and k must be >= 1 (n={self.n}, k={self.k})")
        if self.n / self.k < 1:
            raise ConfigError(f"n/k must be >= 1 (n={self.n}, k={self.k})")
        for name in ("l_c", "l_a", "l_bs", "d_to_bs", "d_to_ch"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0")

    @property
    def cluster_size(self) -> float:
        return self.n / self.k


@dataclass(frozen=True)
class LinearScenario:
    """Two heads A and B on a line with the sink, spaced `m` apart (A is 2m out)."""

    m: float
    l_a: float
    l_b: float

    def __post_init__(self):
        if self.m < 0:
            raise ConfigError("m must be >= 0")
        if self.l_a < 0 or self.l_b < 0:
            raise ConfigError("bit counts must be >= 0")


def ch_upward_energy(params: RadioParams, g: ClusterGeometry) -> float:
    """Head's share of one upward pass: receive members, fuse, send to the sink."""
    size = g.cluster_size
    return ((size - 1) * rx_energy(params, g.l_c)
            + agg_energy(params, size * g.l_c)
            + tx_energy(params, g.l_a, g.d_to_bs))


def member_upward_energy(params: RadioParams, l_c: float, d_to_ch: float) -> float:
    return tx_energy(params, l_c, d_to_ch)


def cluster_upward_energy(params: RadioParams, g: ClusterGeometry) -> float:
    members = g.cluster_size - 1
    return ch_upward_energy(params, g) + members * member_upward_energy(params, g.l_c, g.d_to_ch)


def ch_downward_energy(params: RadioParams, g: ClusterGeometry) -> float:
    """Head receives the sink's instructions and relays one copy to each member."""
    size = g.cluster_size
    return size * rx_energy(params, g.l_bs) + (size - 1) * tx_energy(params, g.l_bs, g.d_to_ch)


def cluster_downward_energy(params: RadioParams, g: ClusterGeometry) -> float:
    return ch_downward_energy(params, g) + (g.cluster_size - 1) * rx_energy(params, g.l_bs)


def cluster_total_energy(params: RadioParams, g: ClusterGeometry) -> float:
    return cluster_upward_energy(params, g) + cluster_downward_energy(params, g)


def network_total_energy(params: RadioParams, g: ClusterGeometry) -> float:
    return cluster_total_energy(params, g) * g.k


def linear_direct_cost(params: RadioParams, s: LinearScenario) -> float:
    """Both heads send straight to the sink; A is twice as far as B."""
    return tx_energy(params, s.l_a, 2 * s.m) + tx_energy(params, s.l_b, s.m)


def linear_multihop_cost(params: RadioParams, s: LinearScenario) -> float:
    """A hands its aggregate to B, which forwards both aggregates to the sink."""
    return (tx_energy(params, s.l_a, s.m)
            + rx_energy(params, s.l_a)
            + tx_energy(params, s.l_a + s.l_b, s.m))


def multihop_breakeven_m(params: RadioParams, l_a: float, l_b: float) -> float:
    """Spacing above which relaying through B is cheaper than sending direct.

    Multihop minus direct is ``l_a*(e_tx + e_rx) - 2*eps*l_a*m**2``, so the
    crossover is independent of both payloads.
    """
    if l_a <= 0:
        raise ValueError("l_a must be > 0")
    _check_nonneg(l_b=l_b)
    return math.sqrt((params.e_elec_tx + params.e_elec_rx) / (2.0 * params.eps_fs))
