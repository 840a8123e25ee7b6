"""deltasob command line.

Exit codes: 0 when every check holds, 1 when a check is violated, 2 on a
usage or configuration error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import FAMILIES, ConfigError, load_config
from .errors import DomainError
from .sweeps import SUITES

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value file")
    common.add_argument("--out", help="CSV path; the figure goes to <out>.png and metadata to <out>.meta.json")
    common.add_argument("--seed", type=int)
    common.add_argument("--dims", help="comma-separated dimensions, e.g. 2,3,4")
    common.add_argument("--family", choices=FAMILIES)
    common.add_argument("--tol", type=float)
    common.add_argument("--jobs", type=int, help="worker processes")
    common.add_argument("--no-plot", action="store_true", help="skip the figure")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override any config key")

    p = _Parser(prog="deltasob", description="Green-potential rearrangement checks and sharpness sweeps.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in SUITES:
        sub.add_parser(name, parents=[common])
    return p


def _overrides(args) -> dict:
    ov = {}
    for key in ("seed", "family", "tol", "jobs", "out"):
        val = getattr(args, key)
        if val is not None:
            ov[key] = val
    if args.dims is not None:
        ov["dims"] = args.dims  # parsed as a list, so "" gives an empty list
    if args.no_plot:
        ov["plot"] = False
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        ov[k.strip().replace("-", "_")] = v
    return ov


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        ov = _overrides(args)
        unknown = [k for k in ov if k not in _config_keys()]
        if unknown:
            raise ConfigError(f"unknown key(s): {', '.join(unknown)}")
        cfg = load_config(args.config, ov)
    except ConfigError as e:
        print(f"deltasob: config error: {e}", file=sys.stderr)
        return EXIT_USAGE

    try:
        rep = SUITES[args.command](cfg)
    except DomainError as e:
        print(f"deltasob: {e}", file=sys.stderr)
        return EXIT_USAGE

    if cfg.out:
        out = Path(cfg.out)
        rep.write_csv(out)
        rep.write_meta(out.with_name(out.name + ".meta.json"))
        if cfg.plot:
            from .plotting import render

            render(rep, out.with_name(out.name + ".png"))
    else:
        rep.write_rows(sys.stdout)

    status = "ok" if rep.ok else "VIOLATION"
    print(f"{args.command}: {len(rep.rows)} rows, {status}, {rep.wall_time:.2f} s, config {rep.config_hash}",
          file=sys.stderr)
    for msg in rep.failures[:20]:
        print(f"  {msg}", file=sys.stderr)
    if len(rep.failures) > 20:
        print(f"  ... {len(rep.failures) - 20} more", file=sys.stderr)
    return EXIT_OK if rep.ok else EXIT_VIOLATION


def _config_keys():
    import dataclasses

    from .config import RunConfig

    return {f.name for f in dataclasses.fields(RunConfig)}


if __name__ == "__main__":
    sys.exit(main())
