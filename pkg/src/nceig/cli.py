"""Command-line interface.

Subcommands: ``solve``, ``convergence``, ``quad`` and ``parse``.  Exit codes:
0 ok, 2 configuration, 3 kernel, 4 eigensolver, 5 tracking.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import __version__
from .assembly import assemble
from .eigensolver import eigenvalues
from .errors import ConfigError, KernelSyntaxError, NceigError
from .kernels import BUILTINS, Kernel, format_expr, parse_kernel
from .mesh import uniform_partition
from .quadrature import gauss_rule
from .spectrum import convergence_study, default_margin, essential_band, isolated_eigenvalues

KERNEL_HELP = """\
kernel expressions:
  built-ins: gaussian = exp(-(u-x)^2), cauchy = 1/(1+(u-x)^2)
  variables x and u; numbers like 2, 0.5, 1e-3
  operators + - * / and ^ (or **, right-associative); unary minus
  functions exp sin cos sqrt abs log, e.g. "exp(-(u-x)^2)"
  implicit multiplication ("2x") is not accepted
"""

PRESETS = {
    "example1": {"kernel": "gaussian", "alpha": 1.0, "interval": (-2.0, 2.0), "r": 2,
                 "schedule": [10, 20, 40, 80, 160]},
    "example2": {"kernel": "cauchy", "alpha": 1.0, "interval": (-4.0, 4.0), "r": 2,
                 "schedule": [10, 20, 40, 80, 160]},
}

DEFAULTS = {"alpha": 1.0, "r": 2, "track": 2, "margin": None, "ref_n": "fine", "format": "table"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(f"{self.prog}: error: {message}") from None


def _ref_value(text: str):
    text = text.strip().lower()
    if text in ("fine", "richardson"):
        return text
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected an integer, 'fine' or 'richardson'") from None


def _add_problem_args(p: argparse.ArgumentParser):
    p.add_argument("--kernel", help="built-in name or expression in x and u")
    p.add_argument("--alpha", type=float, help="coefficient of the integral part (default 1)")
    p.add_argument("--interval", type=float, nargs=2, metavar=("A", "B"))
    p.add_argument("--r", type=int, help="Gauss points per subinterval (default 2)")
    p.add_argument("--margin", type=float, help="distance from the essential band for isolation")
    p.add_argument("--format", choices=["table", "csv", "json"])
    p.add_argument("--output", "-o", help="write to this file instead of standard output")
    p.add_argument("--config", help="key=value file; command-line flags take precedence")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="nceig",
        description="Degenerate kernel eigenvalues of alpha*int k(x,u) f(u) du - x^2 f(x).",
        epilog=KERNEL_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS,
                        help="log tracking diagnostics")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="eigenvalues at a single mesh size", parents=[common],
                       epilog=KERNEL_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    _add_problem_args(p)
    p.add_argument("--n", type=int, help="number of subintervals")

    p = sub.add_parser("convergence", help="mesh-refinement error/ratio table", parents=[common],
                       epilog=KERNEL_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    _add_problem_args(p)
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--schedule", type=int, nargs="+", metavar="N")
    p.add_argument("--track", type=int, help="number of eigenvalues to track (default 2)")
    p.add_argument("--ref-n", type=_ref_value, dest="ref_n",
                   help="reference mesh n, 'fine' (4x finest, default) or 'richardson'")

    p = sub.add_parser("quad", help="print Gauss-Legendre nodes and weights")
    p.add_argument("--r", type=int, required=True)

    p = sub.add_parser("parse", help="validate a kernel expression and print its canonical form")
    p.add_argument("expr")
    return parser


_CONFIG_KEYS = {
    "kernel": str,
    "alpha": float,
    "interval": lambda s: tuple(float(v) for v in s.split()),
    "r": int,
    "n": int,
    "schedule": lambda s: [int(v) for v in s.replace(",", " ").split()],
    "track": int,
    "margin": float,
    "ref_n": _ref_value,
    "format": str,
    "output": str,
    "preset": str,
}


def read_config(path: str) -> dict:
    values = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _CONFIG_KEYS[key](value)
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}") from None
    return values


def resolve(args: argparse.Namespace) -> dict:
    """Merge defaults < preset < config file < flags."""
    cfg = dict(DEFAULTS)
    file_values = read_config(args.config) if getattr(args, "config", None) else {}
    preset = getattr(args, "preset", None) or file_values.get("preset")
    if preset:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}")
        cfg.update(PRESETS[preset])
    cfg.update({k: v for k, v in file_values.items() if k != "preset"})
    cfg.update({k: v for k, v in vars(args).items() if v is not None and k in _CONFIG_KEYS})

    if cfg.get("kernel") is None:
        raise ConfigError("--kernel is required")
    if cfg.get("interval") is None:
        raise ConfigError("--interval A B is required")
    a, b = cfg["interval"]
    if not a < b:
        raise ConfigError(f"invalid interval: need A < B, got {a} {b}")
    if cfg["r"] < 1:
        raise ConfigError("--r must be >= 1")
    if cfg["format"] not in ("table", "csv", "json"):
        raise ConfigError(f"unknown format {cfg['format']!r}")
    if cfg.get("margin") is not None and not cfg["margin"] > 0:
        raise ConfigError("--margin must be positive")
    return cfg


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_solve(args) -> int:
    cfg = resolve(args)
    if cfg.get("schedule") is not None:
        raise ConfigError("solve takes --n, not --schedule")
    if cfg.get("n") is None:
        raise ConfigError("--n is required")
    kernel = Kernel.from_string(cfg["kernel"])
    a, b = cfg["interval"]
    part = uniform_partition(a, b, cfg["n"])
    matrix = assemble(kernel, cfg["alpha"], part, gauss_rule(cfg["r"]))
    spec = eigenvalues(matrix)
    band = essential_band(a, b)
    margin = cfg["margin"] if cfg.get("margin") is not None else default_margin(band)
    iso = isolated_eigenvalues(spec, band, margin)

    fmt = cfg["format"]
    if fmt == "json":
        text = json.dumps({
            "kernel": kernel.source,
            "alpha": cfg["alpha"],
            "interval": [a, b],
            "r": cfg["r"],
            "n": cfg["n"],
            "N_h": spec.size,
            "band": [band.lo, band.hi],
            "margin": margin,
            "sweeps": spec.sweeps,
            "eigenvalues": [[z.real, z.imag] for z in spec.eigenvalues],
            "isolated": [[z.real, z.imag] for z in iso],
        }, indent=2) + "\n"
    elif fmt == "csv":
        isoset = set(iso)
        lines = ["index,re,im,isolated"]
        lines += [f"{i},{z.real:.17g},{z.imag:.17g},{int(z in isoset)}"
                  for i, z in enumerate(spec.eigenvalues, start=1)]
        text = "\n".join(lines) + "\n"
    else:
        lines = [
            f"# kernel={kernel.source} alpha={cfg['alpha']} interval=[{a}, {b}] r={cfg['r']} n={cfg['n']} N_h={spec.size}",
            f"# essential band [{band.lo}, {band.hi}], margin {margin:.6g}",
            f"isolated ({len(iso)}):",
        ]
        lines += [f"  {z.real: .12f} {z.imag:+.3e}j" for z in iso]
        lines.append(f"all eigenvalues ({spec.size}):")
        lines += [f"  {z.real: .12f} {z.imag:+.3e}j" for z in spec.eigenvalues]
        text = "\n".join(lines) + "\n"
    _emit(text, cfg.get("output"))
    return 0


def cmd_convergence(args) -> int:
    cfg = resolve(args)
    if cfg.get("n") is not None:
        raise ConfigError("convergence takes --schedule, not --n")
    schedule = cfg.get("schedule")
    if not schedule or len(schedule) < 2:
        raise ConfigError("--schedule needs at least two levels")
    kernel = Kernel.from_string(cfg["kernel"])
    report = convergence_study(
        kernel,
        cfg["alpha"],
        cfg["interval"],
        cfg["r"],
        schedule,
        track_count=cfg["track"],
        reference=cfg["ref_n"],
        margin=cfg.get("margin"),
    )
    fmt = cfg["format"]
    text = {"table": report.to_table, "csv": report.to_csv, "json": lambda: report.to_json() + "\n"}[fmt]()
    _emit(text, cfg.get("output"))
    return 0


def cmd_quad(args) -> int:
    rule = gauss_rule(args.r)
    print(f"# {rule.order}-point Gauss-Legendre rule on [-1, 1]")
    print("node,weight")
    for t, w in zip(rule.nodes, rule.weights):
        print(f"{t!r},{w!r}")
    return 0


def cmd_parse(args) -> int:
    text = args.expr.strip()
    if text in BUILTINS:
        text = BUILTINS[text][1]
    print(format_expr(parse_kernel(text)))
    return 0


COMMANDS = {"solve": cmd_solve, "convergence": cmd_convergence, "quad": cmd_quad, "parse": cmd_parse}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if isinstance(exc.code, str):
            print(exc.code, file=sys.stderr)
            return 2
        return exc.code if isinstance(exc.code, int) else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except KernelSyntaxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if exc.text:
            print(f"  {exc.text}\n  {' ' * exc.offset}^", file=sys.stderr)
        return exc.exit_code
    except NceigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
