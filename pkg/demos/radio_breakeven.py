"""Where does relaying through a second cluster head start to pay off?

Two heads sit on a line toward the sink, the near one m metres closer than
the far one, which is 2m from the sink. Sending direct costs one long
transmission. Relaying costs two short ones plus an extra receive. The d^2
amplifier term makes the long hop grow fast, so past some distance the
relay wins.

    python demos/radio_breakeven.py
"""

import numpy as np

from leachsim import RadioParams, radio

params = RadioParams()
m_star = radio.multihop_breakeven_m(params, 200, 200)
print(f"break-even spacing: {m_star:.2f} m\n")

print(f"{'m':>6} {'direct uJ':>11} {'relay uJ':>11}  winner")
for m in np.arange(5, 45, 5.0):
    s = radio.LinearScenario(m=float(m), l_a=200, l_b=200)
    d, h = radio.linear_direct_cost(params, s), radio.linear_multihop_cost(params, s)
    print(f"{m:6.0f} {d * 1e6:11.2f} {h * 1e6:11.2f}  {'relay' if h < d else 'direct'}")

# per-cluster budget for the default field: 100 nodes, 10 clusters
g = radio.ClusterGeometry(n=100, k=10, l_c=200, l_a=200, l_bs=0, d_to_bs=125, d_to_ch=20)
print(f"\none cluster, one frame: {radio.cluster_total_energy(params, g) * 1e3:.3f} mJ "
      f"(head alone {radio.ch_upward_energy(params, g) * 1e3:.3f} mJ)")
