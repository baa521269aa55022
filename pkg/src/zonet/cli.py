"""Command-line entry point: analyze, enumerate, pipeline and catalog."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction

from zonet.network.core import NetworkError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_ANALYSIS = 2


class _Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _vector(text: str) -> list[Fraction]:
    try:
        return [Fraction(part.strip()) for part in text.split(",") if part.strip()]
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a comma-separated list of rationals: {text!r}") from None


def _dump(data) -> None:
    json.dump(data, sys.stdout, indent=2, ensure_ascii=False)
    sys.stdout.write("\n")


def cmd_analyze(args) -> int:
    from zonet.pipeline import UsageError, analyze_network, load_network_source

    try:
        net = load_network_source(args.file)
    except FileNotFoundError as exc:
        raise _Usage(str(exc)) from None
    try:
        report = analyze_network(net, args.kappa, args.c)
    except UsageError as exc:
        raise _Usage(str(exc)) from None
    if args.headline:
        print(report["headline"])
    else:
        _dump(report)
    return EXIT_OK


def cmd_enumerate(args) -> int:
    from zonet.network.enumeration import (
        Filters,
        count_by_convention,
        enumerate_networks,
        sample_networks,
    )

    items = [part for f in args.filter for part in f.split(",")]
    try:
        filters = Filters.parse(items, canonical=args.canonical)
    except ValueError as exc:
        raise _Usage(str(exc)) from None
    if args.counts:
        counts = count_by_convention(args.species, args.reactions, rank=filters.rank)
        _dump(counts)
        return EXIT_OK
    try:
        if args.sample is not None:
            nets = sample_networks(args.species, args.reactions, args.sample, filters, seed=args.seed)
        else:
            nets = enumerate_networks(args.species, args.reactions, filters)
        shown = 0
        for net in nets:
            if args.limit is not None and shown >= args.limit:
                break
            print(net.one_line())
            shown += 1
    except ValueError as exc:
        raise _Usage(str(exc)) from None
    if args.limit is None or shown < args.limit:
        print(f"# {shown} networks ({filters.describe()})", file=sys.stderr)
    return EXIT_OK


def cmd_pipeline(args) -> int:
    from zonet.pipeline import ConfigError, load_config, run_pipeline

    try:
        cfg = load_config(args.config)
        if args.workers is not None:
            if args.workers < 1:
                raise ConfigError("--workers must be at least 1")
            cfg.workers = args.workers
        cfg.effective_workers()
    except ConfigError as exc:
        raise _Usage(str(exc)) from None

    def progress(rec):
        if args.verbose:
            print(f"{rec.index}\t{rec.stage}\t{rec.canonical}", file=sys.stderr)

    report = run_pipeline(cfg, on_record=progress)
    _dump(report.summary)
    return EXIT_OK


def cmd_catalog(args) -> int:
    from zonet.fluxcone import extreme_rays
    from zonet.lowdim import (
        CATALOG_CLASSES,
        classify_conservation_pair,
        example_names,
        load_catalog,
        load_example,
        subnetwork_sweep,
    )
    from zonet.network.stoich import stoichiometric_data
    from zonet.sign import fast_sign_report

    rows = []
    for name, net in load_catalog().items():
        sd = stoichiometric_data(net)
        rays = extreme_rays(sd)
        row = {
            "name": name,
            "class": CATALOG_CLASSES[name],
            "reactions": net.m,
            "maximum": classify_conservation_pair(sd).to_json(),
            "t": rays.t,
            "sign": fast_sign_report(sd, rays).verdict,
            "network": net.one_line(),
        }
        if args.sweep:
            row["sweep"] = subnetwork_sweep(net).to_json()
        rows.append(row)
    examples = [{"name": n, "network": load_example(n).one_line()} for n in example_names()]
    if args.json:
        _dump({"catalog": rows, "examples": examples})
        return EXIT_OK
    for row in rows:
        mx = row["maximum"]
        line = f"{row['name']:5} {row['class']}  (a,b)=({mx['a']},{mx['b']})  m={row['reactions']:2}  t={row['t']:3}  {row['sign']}"
        if args.sweep:
            line += "  sweep " + json.dumps(row["sweep"]["outcomes"])
        print(line)
    print()
    for ex in examples:
        print(f"{ex['name']}: {ex['network']}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="zonet", description="Multistationarity analysis of small zero-one reaction networks.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", help="full report for one network")
    a.add_argument("file", help="network file, inline text or a bundled name such as example5 or g35")
    a.add_argument("--kappa", type=_vector, help="rate constants, e.g. 1,3,2,1,1 or 5765/16,...")
    a.add_argument("--c", type=_vector, help="total constants, one per conservation law")
    a.add_argument("--headline", action="store_true", help="print only the one-line verdict")
    a.set_defaults(func=cmd_analyze)

    e = sub.add_parser("enumerate", help="list zero-one networks")
    e.add_argument("--species", type=int, required=True)
    e.add_argument("--reactions", type=int, required=True)
    e.add_argument("--filter", action="append", default=[], help="rank=R, positive-flux, nontrivial, canonical")
    e.add_argument("--canonical", action="store_true", help="one network per species-permutation orbit")
    e.add_argument("--counts", action="store_true", help="print labeled and canonical counts per filter stage")
    e.add_argument("--limit", type=int)
    e.add_argument("--sample", type=int, help="draw this many random networks instead")
    e.add_argument("--seed", type=int, default=0)
    e.set_defaults(func=cmd_enumerate)

    pl = sub.add_parser("pipeline", help="screen a family of networks for multistationarity")
    pl.add_argument("--config", required=True, help="TOML or JSON config")
    pl.add_argument("--workers", type=int, help="worker processes (ZONET_WORKERS overrides)")
    pl.set_defaults(func=cmd_pipeline)

    c = sub.add_parser("catalog", help="print the bundled maximum networks and examples")
    c.add_argument("--sweep", action="store_true", help="also run the exhaustive subnetwork sweep")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_catalog)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except _Usage as exc:
        print(f"zonet: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NetworkError, ValueError, ArithmeticError) as exc:
        print(f"zonet: analysis error: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS


if __name__ == "__main__":
    sys.exit(main())
