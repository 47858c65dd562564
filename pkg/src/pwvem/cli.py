"""Command-line experiment driver.

Runs one experiment series per invocation.  Parameters come from an optional
``key = value`` config file plus flags; flags override file values, and the
fully resolved config is echoed into the output directory.

Examples
--------
    pwvem --experiment table1 --k 20 --p 13 --out results/table1
    pwvem --config run.cfg --k 40
    pwvem --experiment singular --xi 1,3/2,2/3 --out results/singular
"""

from __future__ import annotations

import argparse
import sys

from .experiments import EXPERIMENTS, config_from_values, parse_config_file


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="pwvem",
        description="Plane-wave virtual element experiments on the unit square.",
    )
    ap.add_argument("--config", help="config file with 'key = value' lines")
    ap.add_argument("--experiment", choices=EXPERIMENTS,
                    help="experiment series to run")
    ap.add_argument("--k", type=float, help="wave number")
    ap.add_argument("--p", help="comma-separated odd direction counts, e.g. 3,5,7")
    ap.add_argument("--mesh", help="comma-separated mesh specs: tri:<n>, "
                                   "voronoi:<cells>, or a mesh file path")
    ap.add_argument("--variant", help="comma-separated: PWVEM, PUM, GRAD")
    ap.add_argument("--out", help="output directory (default ./out)")
    ap.add_argument("--offset", type=float,
                    help="direction fan offset angle in radians (default 0)")
    ap.add_argument("--seed", type=int, help="random seed (default 1)")
    ap.add_argument("--lloyd", type=int,
                    help="Lloyd relaxation sweeps for Voronoi meshes (default 10)")
    ap.add_argument("--xi", help="comma-separated Bessel orders, fractions "
                                 "allowed, e.g. 1,3/2,2/3")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    values: dict = {}
    try:
        if args.config:
            values.update(parse_config_file(args.config))
        for key in ("experiment", "k", "p", "mesh", "variant", "out",
                    "offset", "seed", "lloyd", "xi"):
            val = getattr(args, key)
            if val is not None:
                values[key] = val
        values.setdefault("out", "out")
        config = config_from_values(values)
    except (ValueError, OSError) as exc:
        print(f"pwvem: usage error: {exc}", file=sys.stderr)
        return 2

    from .experiments import run

    try:
        rows = run(config)
    except Exception as exc:  # module errors carry (element, h, k, p) context
        print(f"pwvem: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    print(f"{config.experiment}: wrote {len(rows)} result rows to {config.out}/")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
