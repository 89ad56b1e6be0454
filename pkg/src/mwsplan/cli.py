"""Command-line entry point: ``mwsplan {osnr,qot,plan,sweep}``."""

from __future__ import annotations

import argparse
import logging
import sys
from contextlib import nullcontext
from dataclasses import replace
from pathlib import Path

import numpy as np

from mwsplan import qot, rcsa, study, txchain
from mwsplan.netmodel import Scenario, bundled_topology, load_demands, load_topology, make_config


def _topology(arg):
    if arg in ("germany", "eu"):
        return bundled_topology(arg)
    return load_topology(arg)


def _output(path):
    if path in (None, "-"):
        return nullcontext(sys.stdout)
    return open(path, "w", newline="")


def _scenario(kind, penalty_db, lines, fsr_ghz):
    if kind == "sws":
        return Scenario.sws()
    if kind == "flex":
        return Scenario.flex(penalty_db, lines)
    return Scenario.fixed(penalty_db, lines, fsr_ghz)


def parse_scenarios(text, lines=4, fsr_ghz=150.0):
    """Parse ``"sws,flex:1,flex:3,fixed:1"`` into scenarios."""
    out = []
    for item in filter(None, (t.strip() for t in text.split(","))):
        kind, _, pen = item.partition(":")
        if kind not in ("sws", "flex", "fixed"):
            raise argparse.ArgumentTypeError(f"unknown scenario {item!r}")
        default = {"sws": 0.0, "flex": 1.0, "fixed": 1.0}[kind]
        out.append(_scenario(kind, float(pen) if pen else default, lines, fsr_ghz))
    return out


def _floats(text):
    return [float(t) for t in text.split(",") if t.strip()]


def cmd_osnr(args):
    arch = txchain.TxArchitecture(
        scheme=args.scheme, ca_cap_dbm=args.ca_cap, nf_db=args.nf, demux_loss_db=args.demux_loss,
        mux_loss_db=args.mux_loss, modulation_loss_db=args.mod_loss,
        insertion_loss_db=args.insertion_loss, launch_dbm=args.launch)
    if args.scheme == "sws":
        source = txchain.LightSourceSpec.sws(args.ocnr, args.p_line)
    else:
        source = txchain.LightSourceSpec.mws(args.ocnr, args.p_line, args.lines)
    start = args.start if args.start is not None else (args.p_line if args.axis == "p_line" else args.ocnr)
    stop = args.stop if args.stop is not None else start
    values, osnr = txchain.sweep_osnr_tx(source, arch, args.axis, start, stop, args.step)
    with _output(args.output) as fh:
        txchain.write_sweep_csv(values, osnr, arch.scheme, fh)


def cmd_qot(args):
    config = make_config(args.sr, args.modulation)
    config = replace(config, required_snr_db=qot.required_snr(config))
    osnr = txchain.sws_reference_osnr() if args.osnr_tx is None else args.osnr_tx
    launch = qot.LaunchSpec(args.psd)
    spans = [args.span_km] * args.spans
    achieved = qot.path_snr(spans, config, launch, osnr)
    print(f"config={config.label} net_rate_gbps={config.net_rate_gbps:g} osnr_tx_db={osnr:.3f}")
    print(f"achieved_snr_db={achieved:.3f}")
    print(f"required_snr_db={config.required_snr_db:.3f}")
    print(f"feasible={'yes' if achieved >= config.required_snr_db else 'no'}")


def cmd_plan(args):
    topo = _topology(args.topology)
    demands = load_demands(args.demands, topo)
    scenario = _scenario(args.scenario, args.penalty_db, args.lines, args.fsr_ghz)
    plan = rcsa.plan_all(topo, demands, scenario, k=args.k)
    with _output(args.output) as fh:
        rcsa.write_plan_csv(plan, fh, lasers=study.laser_count(plan, args.laser_grouping))


def cmd_sweep(args):
    topo = _topology(args.topology)
    weights = study.load_weights(args.weights) if args.weights else None
    if args.random_weights:
        rng = np.random.default_rng(args.seed)
        weights = {n: float(w) for n, w in zip(topo.node_ids, rng.integers(1, 11, len(topo.nodes)))}
    scenarios = parse_scenarios(args.scenarios, args.lines, args.fsr_ghz)
    if args.art_max is None:
        grid = study.sweep_to_saturation(topo, args.art_step, weights)
    else:
        grid = study.art_grid(args.art_min, args.art_max, args.art_step)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = study.run_sweep(topo, scenarios, grid, weights, args.laser_grouping, args.workers)
    with open(out / "results.csv", "w", newline="") as fh:
        study.write_results_csv(rows, fh)
    penalty_art = args.penalty_art if args.penalty_art is not None else grid[len(grid) // 2]
    prow = study.penalty_sweep(topo, penalty_art, _floats(args.penalty_grid), args.lines, weights, args.workers)
    with open(out / "penalty.csv", "w", newline="") as fh:
        study.write_penalty_csv(prow, fh)
    print(f"wrote {len(rows)} rows to {out / 'results.csv'} and {len(prow)} rows to {out / 'penalty.csv'}")


def build_parser():
    p = argparse.ArgumentParser(prog="mwsplan", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    o = sub.add_parser("osnr", help="transmit OSNR of a transmitter chain, optionally swept")
    o.add_argument("--scheme", choices=[s.value for s in txchain.Scheme], default="joint")
    o.add_argument("--ocnr", type=float, default=45.0, help="source OCNR [dB]")
    o.add_argument("--p-line", type=float, default=-10.0, help="power per line [dBm]")
    o.add_argument("--lines", type=int, default=4)
    o.add_argument("--axis", choices=["p_line", "ocnr"], default="p_line")
    o.add_argument("--start", type=float)
    o.add_argument("--stop", type=float)
    o.add_argument("--step", type=float, default=1.0)
    o.add_argument("--ca-cap", type=float, default=26.0, help="comb amplifier output cap [dBm]")
    o.add_argument("--nf", type=float, default=5.0, help="amplifier noise figure [dB]")
    o.add_argument("--demux-loss", type=float, default=5.0)
    o.add_argument("--mux-loss", type=float, default=5.0)
    o.add_argument("--mod-loss", type=float, default=5.0)
    o.add_argument("--insertion-loss", type=float, default=23.0)
    o.add_argument("--launch", type=float, default=0.0, help="launch power per carrier [dBm]")
    o.add_argument("-o", "--output")
    o.set_defaults(func=cmd_osnr)

    q = sub.add_parser("qot", help="achieved and required SNR of one configuration")
    q.add_argument("--spans", type=int, required=True)
    q.add_argument("--span-km", type=float, default=80.0)
    q.add_argument("--sr", type=float, required=True, help="symbol rate [GBd]")
    q.add_argument("--modulation", choices=["QPSK", "16QAM", "64QAM"], required=True)
    q.add_argument("--osnr-tx", type=float, help="transmit OSNR [dB]; default is the SWS reference")
    q.add_argument("--psd", type=float, default=qot.DEFAULT_LAUNCH.psd_dbm_ghz, help="launch PSD [dBm/GHz]")
    q.set_defaults(func=cmd_qot)

    for name, helptext in (("plan", "plan a demand file"), ("sweep", "sweep scenarios over ART")):
        s = sub.add_parser(name, help=helptext)
        s.add_argument("--lines", type=int, default=4)
        s.add_argument("--fsr-ghz", type=float, default=150.0)
        s.add_argument("--laser-grouping", choices=["source", "pair"], default="source")
        if name == "plan":
            s.add_argument("topology", help="topology JSON file, or 'germany' / 'eu'")
            s.add_argument("demands", help="demands CSV (src,dst,gbps)")
            s.add_argument("--scenario", choices=["sws", "flex", "fixed"], default="sws")
            s.add_argument("--penalty-db", type=float, default=0.0)
            s.add_argument("--k", type=int, default=3)
            s.add_argument("-o", "--output")
            s.set_defaults(func=cmd_plan)
        else:
            s.add_argument("--topology", default="germany")
            s.add_argument("--weights", help="node,weight CSV overriding topology weights")
            s.add_argument("--art-min", type=float, default=10000.0)
            s.add_argument("--art-max", type=float, help="default: sweep until SWS saturates")
            s.add_argument("--art-step", type=float, default=10000.0)
            s.add_argument("--scenarios", default="sws,flex:1,flex:3,fixed:1")
            s.add_argument("--penalty-grid", default="0,0.5,1,1.5,2,2.5,3")
            s.add_argument("--penalty-art", type=float, help="ART of the penalty sweep; default mid-grid")
            s.add_argument("--seed", type=int, default=0, help="only used with --random-weights")
            s.add_argument("--random-weights", action="store_true")
            s.add_argument("--workers", type=int)
            s.add_argument("--out-dir", default=".")
            s.set_defaults(func=cmd_sweep)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "plan" and args.scenario == "sws" and args.penalty_db:
        raise SystemExit("the SWS scenario takes no --penalty-db")
    args.func(args)


if __name__ == "__main__":
    main()
