"""Command line entry point: build, sweep, verify, oracle."""

from __future__ import annotations

import argparse
import json
import sys

from . import lab
from .builder import FAMILIES, BuildConfig, build
from .graph import SimpleGraph
from .oracle import empirical_containment, exact_c4_spanning_probability, exact_containment_probability
from .planar import RotationMap, verify_spanning_maximal


def _read_json(path):
    with open(path) as fh:
        return json.load(fh)


def cmd_build(args) -> int:
    cfg = BuildConfig(delta=args.delta, epsilon=args.epsilon, sub_layers=args.sub_layers,
                      shared_layers=args.shared_layers)
    out = build(args.family, args.n, args.g, args.p, args.seed, cfg)
    if args.trace:
        out.write_trace(args.trace)
    if out.success and args.emit:
        with open(args.emit, "w") as fh:
            fh.write(out.rmap.dumps())
    if args.emit_host and out.host is not None:
        with open(args.emit_host, "w") as fh:
            fh.write(out.host.dumps())
    print(json.dumps(out.summary(), sort_keys=True, default=str))
    return 0 if out.success else 1


def cmd_sweep(args) -> int:
    try:
        cfg = lab.ExperimentConfig.load(args.config)
    except lab.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    log = None if args.quiet else (lambda s: print(s, file=sys.stderr, flush=True))
    result = lab.run_sweep(cfg, log=log)
    lab.export(result, args.out, "csv")
    if args.json:
        lab.export(result, args.json, "json")
    if result.fit:
        print(f"alpha_hat={result.fit.alpha:.4f} +- {result.fit.stderr:.4f}")
    return 0


def cmd_verify(args) -> int:
    rmap = RotationMap.from_json(_read_json(args.map))
    host = SimpleGraph.from_json(_read_json(args.host))
    report = verify_spanning_maximal(rmap, host, args.g)
    print(json.dumps(report.to_json(), sort_keys=True))
    return 0 if report.passed else 1


def cmd_oracle(args) -> int:
    res = {"n": args.n, "g": args.g, "p": args.p}
    if args.n == 4 and args.g == 4:
        res["exact"] = float(exact_c4_spanning_probability(args.p))
    elif args.n <= 5:
        res["exact"] = float(exact_containment_probability(args.n, args.g, args.p).probability)
    est = empirical_containment(args.n, args.g, args.p, args.trials, args.seed)
    res.update(empirical=est.fraction, successes=est.successes, trials=est.trials,
               wilson=[est.lo, est.hi])
    print(json.dumps(res, sort_keys=True))
    return 0


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="girthplanar",
                                 description="Spanning maximal planar subgraphs of given girth in G(n, p).")
    sub = ap.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="run one randomized construction")
    b.add_argument("--family", choices=FAMILIES, required=True)
    b.add_argument("--g", type=int, required=True)
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--p", type=float, required=True)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--emit", help="write the rotation map (JSON) on success")
    b.add_argument("--emit-host", help="write the host graph G(n, p) (JSON)")
    b.add_argument("--trace", help="write per-stage records (JSON lines)")
    b.add_argument("--delta", type=float)
    b.add_argument("--epsilon", type=float)
    b.add_argument("--sub-layers", type=int, default=4)
    b.add_argument("--shared-layers", action="store_true",
                   help="diagnostic: every stage reads the same G(n, p)")
    b.set_defaults(func=cmd_build)

    s = sub.add_parser("sweep", help="Monte Carlo sweep over (n, p)")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True, help="CSV output")
    s.add_argument("--json", help="full nested JSON output")
    s.add_argument("--quiet", action="store_true")
    s.set_defaults(func=cmd_sweep)

    v = sub.add_parser("verify", help="check a map against a host graph")
    v.add_argument("--map", required=True)
    v.add_argument("--host", required=True)
    v.add_argument("--g", type=int, required=True)
    v.set_defaults(func=cmd_verify)

    o = sub.add_parser("oracle", help="exact and empirical containment at tiny n")
    o.add_argument("--n", type=int, default=4)
    o.add_argument("--g", type=int, default=4)
    o.add_argument("--p", type=float, required=True)
    o.add_argument("--trials", type=int, default=100_000)
    o.add_argument("--seed", type=int, default=0)
    o.set_defaults(func=cmd_oracle)
    return ap


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
