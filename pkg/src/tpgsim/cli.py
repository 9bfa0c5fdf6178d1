"""Command line front end.

    tpg figure1 --out results/
    tpg all --out results/ --threads 4
    tpg evolve --xi 0.3 --engine classical --cutoff 12 --out state.tpgs
    tpg analyze state.tpgs

Exit codes: 0 on success, 2 for configuration or usage problems, 3 when a
truncation audit fails and a larger cutoff is needed.
"""

import argparse
import json
import sys
from dataclasses import fields

from .errors import ConfigError, TpgError, TruncationError, UsageError
from .experiments import (ExperimentConfig, analyze_snapshot,
                          evolve_snapshot, run_all, run_figure1, run_figure2,
                          run_figure3, run_figure4)

_FIGURES = {"figure1": run_figure1, "figure2": run_figure2,
            "figure3": run_figure3, "figure4": run_figure4}


def _add_common(parser):
    parser.add_argument("--config", metavar="FILE",
                        help="JSON file of ExperimentConfig fields")
    parser.add_argument("--out", metavar="DIR",
                        help="output directory (default: results)")
    parser.add_argument("--engine", choices=("quantized", "classical"),
                        help="pump treatment for the triple process")
    parser.add_argument("--xi-max", type=float, dest="xi_max",
                        help="upper end of the interaction-strength grid")
    parser.add_argument("--cutoff", type=int, dest="triplet_cutoff",
                        help="per-mode Fock cutoff of the signal modes")
    parser.add_argument("--pump-cutoff", type=int, dest="pump_cutoff",
                        help="Fock cutoff of the quantized pump mode")
    parser.add_argument("--threads", type=int,
                        help="worker threads for `all` (default 1)")
    parser.add_argument("--seed", type=int, help="base RNG seed")
    parser.add_argument("--no-cache", action="store_true",
                        help="recompute even when a cache entry matches")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="tpg",
        description="Triple-photon generation datasets and state tools")
    sub = parser.add_subparsers(dest="command")
    for name in ("figure1", "figure2", "figure3", "figure4", "all"):
        p = sub.add_parser(name, help="compute the %s dataset" % name
                           if name != "all" else "compute every figure")
        _add_common(p)

    p = sub.add_parser("evolve", help="evolve a full-space state to a "
                       "snapshot file")
    _add_common(p)
    p.add_argument("--xi", type=float, required=True,
                   help="dimensionless interaction strength")
    p.add_argument("--method", choices=("auto", "dense", "krylov"),
                   default="auto")

    p = sub.add_parser("analyze", help="print the measures of a snapshot")
    p.add_argument("snapshot", help="path to a .tpgs file")
    return parser


def _config_from_args(args):
    if getattr(args, "config", None):
        config = ExperimentConfig.from_file(args.config)
    else:
        config = ExperimentConfig()
    overrides = {}
    for f in fields(ExperimentConfig):
        value = getattr(args, f.name, None)
        if value is not None:
            overrides[f.name] = value
    if getattr(args, "out", None):
        overrides["out_dir"] = args.out
    if getattr(args, "no_cache", False):
        overrides["use_cache"] = False
    if getattr(args, "command", None) == "evolve" and not getattr(
            args, "config", None):
        # snapshot evolution holds the full tensor product in memory, so the
        # figure-sweep cutoffs are far too large for it; use full-space-sized
        # defaults unless the user pinned them
        overrides.setdefault("triplet_cutoff", 24)
        overrides.setdefault("pump_cutoff", 48)
    if overrides:
        data = config.__dict__.copy()
        data.update(overrides)
        config = ExperimentConfig.from_dict(data)
    return config


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command is None:
            raise UsageError("no command given; see tpg --help")
        if args.command == "analyze":
            report = analyze_snapshot(args.snapshot)
            json.dump(report, sys.stdout, indent=2, sort_keys=True)
            sys.stdout.write("\n")
            return 0
        config = _config_from_args(args)
        if args.command == "evolve":
            out = getattr(args, "out", None) or "state.tpgs"
            manifest = evolve_snapshot(config, args.xi, out,
                                       method=args.method)
            print("wrote %s (norm %.12f)" % (out, manifest["norm"]))
            return 0
        if args.command == "all":
            manifests = run_all(config)
            for name in sorted(manifests):
                print("%s: %d files" % (name, len(manifests[name]["files"])))
            return 0
        manifest = _FIGURES[args.command](config)
        print("%s: %d files in %s" % (args.command,
                                      len(manifest["files"]),
                                      config.out_dir))
        return 0
    except (ConfigError, UsageError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except TruncationError as exc:
        msg = "truncation: %s" % exc
        if exc.suggested_cutoff:
            msg += " (try cutoff %d)" % exc.suggested_cutoff
        print(msg, file=sys.stderr)
        return 3
    except TpgError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
