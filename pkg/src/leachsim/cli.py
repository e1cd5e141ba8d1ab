"""Command-line front end: ``leachsim run | compare | energy-calc``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import radio
from .core import ConfigError, Protocol, RadioParams, ScenarioConfig
from .engine import run
from .io import RunRequest, emit_trace_csv, load_config, run_compare


def _config(path) -> ScenarioConfig:
    return load_config(path) if path else ScenarioConfig()


def cmd_run(args) -> int:
    cfg = _config(args.config)
    if args.protocol:
        cfg = cfg.replace(protocol=Protocol.parse(args.protocol))
    seeds = args.seed or [cfg.seed]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for s in seeds:
        trace = run(cfg, seed=s)
        path = emit_trace_csv(trace, out / f"{cfg.protocol.value}_seed{s}.csv")
        sm = trace.summary
        print(f"{cfg.protocol.label} seed={s} rounds={len(trace)} first={sm.first_node_death} "
              f"half={sm.half_nodes_death} last={sm.last_node_death} "
              f"pkts_bs={sm.total_pkts_to_bs} pkts_ch={sm.total_pkts_to_ch} -> {path}")
    return 0


def cmd_compare(args) -> int:
    cfg = _config(args.config)
    protocols = [p for p in args.protocols.split(",") if p.strip()] if args.protocols else list(Protocol)
    request = RunRequest(config=cfg, seeds=list(range(args.seed_start, args.seed_start + args.seeds)),
                         output_dir=args.out, compare_list=protocols, gnuplot=args.gnuplot)
    report = run_compare(request)
    print(report.table())
    for p in report.files:
        print(f"wrote {p}")
    return 0


def _radio_from(args) -> RadioParams:
    return RadioParams(args.e_elec_tx, args.e_elec_rx, args.eps_fs, args.e_da)


def cmd_energy(args) -> int:
    params = _radio_from(args)
    g = radio.ClusterGeometry(n=args.n, k=args.k, l_c=args.l_c, l_a=args.l_a, l_bs=args.l_bs,
                              d_to_bs=args.d_bs, d_to_ch=args.d_ch)
    rows = [
        ("ch_upward", radio.ch_upward_energy(params, g)),
        ("member_upward", radio.member_upward_energy(params, g.l_c, g.d_to_ch)),
        ("cluster_upward", radio.cluster_upward_energy(params, g)),
        ("ch_downward", radio.ch_downward_energy(params, g)),
        ("cluster_downward", radio.cluster_downward_energy(params, g)),
        ("cluster_total", radio.cluster_total_energy(params, g)),
        ("network_total", radio.network_total_energy(params, g)),
    ]
    for name, v in rows:
        print(f"{name:<18} {v:.9g} J")
    m_star = radio.multihop_breakeven_m(params, args.l_a, args.l_b)
    print(f"{'breakeven_m':<18} {m_star:.9g} m")
    if args.sweep:
        start, stop, step = args.sweep
        print("m,direct_j,multihop_j,winner")
        for m in np.arange(start, stop + step / 2, step):
            s = radio.LinearScenario(m=float(m), l_a=args.l_a, l_b=args.l_b)
            d, h = radio.linear_direct_cost(params, s), radio.linear_multihop_cost(params, s)
            print(f"{m:.9g},{d:.9g},{h:.9g},{'multihop' if h < d else 'direct' if d < h else 'tie'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="leachsim", description="Round-based LEACH-family WSN simulator.")
    sub = ap.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="simulate one protocol and write per-seed trace CSVs")
    r.add_argument("--config", help="scenario file (key = value lines); defaults if omitted")
    r.add_argument("--protocol", help="override the protocol tag, e.g. LeachC")
    r.add_argument("--seed", type=int, nargs="+", help="one or more seeds (default: the config's seed)")
    r.add_argument("--out", default=".", help="output directory (default: current directory)")
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("compare", help="run several protocols over seeds; write median traces and a summary")
    c.add_argument("--config", help="scenario file; defaults if omitted")
    c.add_argument("--protocols", help="comma-separated tags (default: all seven)")
    c.add_argument("--seeds", type=int, default=20, help="number of seeds (default 20)")
    c.add_argument("--seed-start", type=int, default=0, help="first seed (default 0)")
    c.add_argument("--out", required=True, help="output directory")
    c.add_argument("--gnuplot", action="store_true", help="also write a gnuplot script for the alive curves")
    c.set_defaults(func=cmd_compare)

    e = sub.add_parser("energy-calc", help="closed-form cluster energies and the multi-hop break-even")
    e.add_argument("--n", type=float, default=100, help="nodes")
    e.add_argument("--k", type=float, default=10, help="clusters")
    e.add_argument("--l-c", type=float, default=200, help="member packet bits")
    e.add_argument("--l-a", type=float, default=200, help="aggregate packet bits")
    e.add_argument("--l-b", type=float, default=200, help="second head's aggregate bits (linear model)")
    e.add_argument("--l-bs", type=float, default=0, help="downward query bits")
    e.add_argument("--d-bs", type=float, default=125, help="head to sink distance (m)")
    e.add_argument("--d-ch", type=float, default=20, help="member to head distance (m)")
    e.add_argument("--sweep", type=float, nargs=3, metavar=("START", "STOP", "STEP"),
                   help="print direct vs multi-hop cost for m in [START, STOP]")
    d = RadioParams()
    e.add_argument("--e-elec-tx", type=float, default=d.e_elec_tx)
    e.add_argument("--e-elec-rx", type=float, default=d.e_elec_rx)
    e.add_argument("--eps-fs", type=float, default=d.eps_fs)
    e.add_argument("--e-da", type=float, default=d.e_da)
    e.set_defaults(func=cmd_energy)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"leachsim: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
