"""Command-line front end: ``hpminimal {verify,angle,sequence,gauge,scan}``."""

from __future__ import annotations

import argparse
import sys
import traceback

from .report import COMMANDS, ConfigError, ExitCode, RunConfig, emit_report, run


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _grid(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WxH, got {text!r}")


def _cell(text: str) -> tuple[float, float, float, float]:
    vals = _floats(text)
    if len(vals) != 4:
        raise argparse.ArgumentTypeError("expected four numbers a,b,c,d")
    return vals


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(ExitCode.CONFIG_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--variant", choices=("clifford", "companion"), default="clifford")
    common.add_argument("--lift-variant", choices=("interleaved", "full-even", "full-signed"))
    common.add_argument("--n", type=int, default=2, help="quaternionic dimension")
    common.add_argument("--m", type=int, help="top exponent index (scan)")
    common.add_argument("--theta", type=_floats, help="angles of an exponential family")
    common.add_argument("--weights", type=_floats, help="weights of an exponential family")
    common.add_argument("--grid", type=_grid, default=(9, 9), metavar="WxH")
    common.add_argument("--cell", type=_cell, metavar="a,b,c,d")
    common.add_argument("--tol", type=float)
    common.add_argument("--depth", type=int)
    common.add_argument("--trials", type=int, default=20)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", "--json", dest="out", metavar="PATH",
                        help="write the JSON report here instead of stdout")
    common.add_argument("--csv", metavar="PATH", help="write the pointwise grid table")
    common.add_argument("--timings", action="store_true",
                        help="include wall-clock timings (breaks byte-identical reports)")
    parser = _Parser(prog="hpminimal", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=ns.command, variant=ns.variant, lift_variant=ns.lift_variant, n=ns.n, m=ns.m,
        thetas=ns.theta, weights=ns.weights, resolution=ns.grid, cell=ns.cell, tol=ns.tol,
        depth=ns.depth, trials=ns.trials, seed=ns.seed, out=ns.out, csv=ns.csv,
        timings=ns.timings,
    )


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(ns)
        code, result = run(cfg)
    except ConfigError as exc:
        print(f"hpminimal: configuration error: {exc}", file=sys.stderr)
        return int(ExitCode.CONFIG_ERROR)
    except Exception:  # noqa: BLE001 - every failure maps to an exit code
        traceback.print_exc()
        return int(ExitCode.INTERNAL_ERROR)
    if not cfg.out:
        sys.stdout.buffer.write(emit_report(result, "json"))
    return int(code)


if __name__ == "__main__":
    sys.exit(main())
