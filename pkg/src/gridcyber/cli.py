"""Command-line front end.

Subcommands: ``generate``, ``metrics``, ``compare``, ``export``.  Failures print
one line ``ErrorClass: message`` on stderr and exit 2 (settings), 3 (input) or
4 (generation).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from .errors import GridCyberError, SettingsError
from .pipeline import (GENERATORS, Settings, comparison_table, run_compare, run_export, run_generate,
                       run_metrics)
from .wan import DEFAULT_PROFILE, DegreeProfile, InvalidProfile


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # single-line, exit 2
        raise SettingsError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gridcyber", description="Synthetic cyber-physical grid models.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="build and write a model from a settings file")
    g.add_argument("--settings", required=True)
    g.add_argument("--topology", choices=["star", "radial", "statistics"])
    g.add_argument("--utilities", type=int)
    g.add_argument("--bas", type=int)
    g.add_argument("--seed", type=int)
    g.add_argument("--output")
    g.add_argument("--format", choices=["dot", "graphml"], default="graphml",
                   help="format of the per-site LAN graph exports")
    g.add_argument("--no-lan-graphs", action="store_true")

    m = sub.add_parser("metrics", help="recompute the report of a written model")
    m.add_argument("model_dir", nargs="?")
    m.add_argument("--settings")
    m.add_argument("--output")
    m.add_argument("--literal", action="store_true",
                   help="divide pair-distance sums by node count instead of pair count")

    c = sub.add_parser("compare", help="statistics-based graphs against Havel-Hakimi and Chung-Lu")
    c.add_argument("--settings")
    c.add_argument("--nodes", type=int, nargs="+", default=[50, 500])
    c.add_argument("--seeds", type=int, default=10)
    c.add_argument("--generators", nargs="+", choices=list(GENERATORS), default=list(GENERATORS))
    c.add_argument("--profile", help="degree profile JSON (overrides the settings file)")
    c.add_argument("--output", help="also write the rows as JSON")

    e = sub.add_parser("export", help="export the WAN graph or one site's LAN")
    e.add_argument("model_dir", nargs="?")
    e.add_argument("--settings")
    e.add_argument("--format", choices=["dot", "graphml"], default="dot")
    e.add_argument("--site", help="site key such as sub12, utl2 or ba1")
    e.add_argument("--output")
    return p


def _model_dir(args) -> Path:
    if args.model_dir:
        return Path(args.model_dir)
    if args.settings:
        return Path(Settings.load(args.settings).output_dir)
    raise SettingsError("give a model directory or --settings")


def _cmd_generate(args) -> int:
    settings = Settings.load(args.settings).with_overrides(
        topology=args.topology, n_utilities=args.utilities, n_bas=args.bas, seed=args.seed,
        output_dir=args.output)
    res = run_generate(settings, graph_format=args.format, export_lans=not args.no_lan_graphs)
    print(res.report.table(), end="")
    print(f"wrote {len(res.model_files)} model files and {len(res.graph_files)} graph files to {res.output_dir}")
    return 0


def _cmd_metrics(args) -> int:
    report, dest = run_metrics(_model_dir(args), args.output, literal=args.literal)
    print(report.table(), end="")
    print(f"wrote {dest}")
    return 0


def _cmd_compare(args) -> int:
    profile = DEFAULT_PROFILE
    source = args.profile
    if source is None and args.settings:
        prof = Settings.load(args.settings).degree_profile
        source = str(prof) if prof else None
    if source:
        try:
            profile = DegreeProfile.load(source)
        except InvalidProfile as exc:
            raise SettingsError(str(exc)) from None
    if args.seeds < 1:
        raise SettingsError("--seeds must be positive")
    rows = run_compare(args.nodes, args.seeds, args.generators, profile)
    print(comparison_table(rows), end="")
    if args.output:
        Path(args.output).write_text(json.dumps([r.to_dict() for r in rows], indent=1) + "\n", encoding="utf-8")
    return 0


def _cmd_export(args) -> int:
    src = _model_dir(args)
    out = args.output or str(src / (f"{args.site or 'wan'}.{args.format}"))
    path = run_export(src, args.format, out, args.site)
    print(f"wrote {path}")
    return 0


COMMANDS = {"generate": _cmd_generate, "metrics": _cmd_metrics, "compare": _cmd_compare,
            "export": _cmd_export}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except GridCyberError as exc:
        msg = " ".join(str(exc).split())
        print(f"{type(exc).__name__}: {msg}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
