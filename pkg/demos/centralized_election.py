"""The centralized head picker against brute force.

LEACH-C style election chooses k heads among the above-average-energy nodes
so that the sum of squared member-to-nearest-head distances is small. On a
small instance all k-subsets can be enumerated, which shows how close the
annealer gets.

    python demos/centralized_election.py
"""

from itertools import combinations

import numpy as np

from leachsim import protocols as P


def cost(pts, heads):
    d2 = ((pts[:, None, :] - pts[None, heads, :]) ** 2).sum(-1)
    return d2.min(axis=1).sum()


rng = np.random.default_rng(7)
pts = rng.uniform(0, 100, size=(30, 2))
k = 3

heads, found = P.anneal_medoids(pts, k, np.random.default_rng(0))
best = min(combinations(range(len(pts)), k), key=lambda h: cost(pts, list(h)))

print("annealer :", [int(h) for h in heads], f"cost {cost(pts, list(heads)):.1f}")
print("optimum  :", list(best), f"cost {cost(pts, list(best)):.1f}")
print(f"ratio    : {cost(pts, list(heads)) / cost(pts, list(best)):.4f}")
