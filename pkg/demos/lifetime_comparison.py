"""Run all seven protocols on the default field and compare node lifetimes.

Prints the per-variant medians over a handful of seeds and a coarse
alive-nodes curve for each. Use more seeds for stable numbers; the
acceptance suite uses 20.

    python demos/lifetime_comparison.py [n_seeds]
"""

import sys

from leachsim import Protocol, ScenarioConfig
from leachsim.io import compare

n_seeds = int(sys.argv[1]) if len(sys.argv) > 1 else 5
rows, aggregates = compare(ScenarioConfig(), list(Protocol), range(n_seeds))

print(f"{'variant':<20}{'first':>7}{'half':>7}{'last':>7}{'vs LEACH':>10}")
for r in rows:
    print(f"{r.variant.label:<20}{r.first_node_death:7.0f}{r.half_nodes_death:7.0f}"
          f"{r.last_node_death:7.0f}{r.improvement_vs_leach_pct:+9.1f}%")

checkpoints = [0, 250, 500, 1000, 1500, 2500, 4999]
print("\nalive nodes (median trace) at rounds", checkpoints)
for v, agg in aggregates.items():
    reports = agg.median_reports()
    alive = [reports[t].alive if t < len(reports) else 0 for t in checkpoints]
    print(f"{v.label:<20}", " ".join(f"{a:5.0f}" for a in alive))
