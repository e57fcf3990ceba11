"""Command line: ``ratsos certify | verify | bench``.

Exit codes: 0 success, 1 usage or parse error, 2 negative witness (certify)
or certificate mismatch (verify), 3 honest failure (budget exhausted).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, fields
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence

from .bench import parse_suite, run_bench, to_json as bench_json, to_tsv
from .certificate import Certificate, parse_certificate, serialize, verify_exact
from .certify import MODES, CertifyConfig, certify
from .errors import (
    CertificationError,
    ConfigError,
    NotNonNegative,
    ParseError,
    RatSosError,
    SdpaFormatError,
    SolverError,
)
from .external import make_solver
from .multivsos import STRATEGIES
from .parse import parse_poly_with_vars

EXIT_OK, EXIT_USAGE, EXIT_NEGATIVE, EXIT_FAILURE = 0, 1, 2, 3

log = logging.getLogger("ratsos")


@dataclass
class CliConfig:
    mode: str = "auto"
    epsilon_init: Fraction = Fraction(1)
    precision_bits: int = 53
    solver: str = "internal"
    fallback: bool = False
    solver_timeout: float = 600.0
    output_format: str = "flat-list"
    seed: int = 0
    strategy: str = "cholesky"
    max_epsilon_halvings: int = 20
    max_precision_escalations: int = 2

    def certify_config(self) -> CertifyConfig:
        return CertifyConfig(
            mode=self.mode,
            epsilon_init=self.epsilon_init,
            precision_bits=self.precision_bits,
            seed=self.seed,
            strategy=self.strategy,
            max_epsilon_halvings=self.max_epsilon_halvings,
            max_precision_escalations=self.max_precision_escalations,
            solver=make_solver(self.solver, self.solver_timeout, self.fallback),
        )


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def _add_search_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--epsilon", type=_rational, help="initial perturbation (default 1)")
    p.add_argument("--precision", type=int, help="initial bits of SDP / root precision (default 53)")
    p.add_argument("--solver", help="internal (default) or sdpa:PATH for an SDPA-compatible executable")
    p.add_argument("--fallback", action="store_true", default=None, help="use the internal solver if the external one fails")
    p.add_argument("--solver-timeout", type=float, help="seconds per external solver call")
    p.add_argument("--strategy", choices=STRATEGIES, help="multivariate rounding strategy")
    p.add_argument("--seed", type=int, help="seed of the randomized negativity search")
    p.add_argument("--config", type=Path, help="JSON file with default option values")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ratsos", description="Exact rational sum-of-squares certificates.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("certify", help="compute and check a certificate")
    c.add_argument("input", help="polynomial expression, or a file containing one")
    c.add_argument("--mode", choices=MODES)
    c.add_argument("--format", dest="output_format", choices=("flat-list", "json"))
    c.add_argument("--vars", help="comma-separated variable order (default: order of first appearance)")
    _add_search_options(c)

    v = sub.add_parser("verify", help="check a certificate file exactly")
    v.add_argument("file", type=Path)
    v.add_argument("--target", help="polynomial the certificate must expand to (overrides the file header)")

    b = sub.add_parser("bench", help="run a benchmark suite")
    b.add_argument("--suite", required=True, help="paper-examples or random-sos(n,d,count)")
    b.add_argument("--out", type=Path, help="write the TSV report here (default: stdout)")
    b.add_argument("--json", type=Path, help="also write the report as JSON")
    _add_search_options(b)
    return parser


_OPTION_FIELDS = {
    "mode": "mode", "epsilon": "epsilon_init", "precision": "precision_bits", "solver": "solver",
    "fallback": "fallback", "solver_timeout": "solver_timeout", "output_format": "output_format",
    "seed": "seed", "strategy": "strategy",
}


def load_config(args: argparse.Namespace) -> CliConfig:
    """Defaults, then the --config file, then explicit flags."""
    values = {}
    path = getattr(args, "config", None)
    if path is not None:
        try:
            data = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config file {path}: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        known = {f.name for f in fields(CliConfig)}
        for key, val in data.items():
            if key not in known:
                raise ConfigError(f"unknown config key {key!r}")
            values[key] = Fraction(str(val)) if key == "epsilon_init" else val
    for opt, name in _OPTION_FIELDS.items():
        val = getattr(args, opt, None)
        if val is not None:
            values[name] = val
    cfg = CliConfig(**values)
    if cfg.mode not in MODES or cfg.strategy not in STRATEGIES or cfg.output_format not in ("flat-list", "json"):
        raise ConfigError("invalid mode, strategy or format in config")
    return cfg


def _read_input(text: str) -> str:
    p = Path(text)
    try:
        if p.is_file():
            return p.read_text()
    except OSError:
        pass
    return text


def _format_point(names: Sequence[str], point) -> str:
    return ", ".join(f"{v} = {c}" for v, c in zip(names, point))


def cmd_certify(args: argparse.Namespace) -> int:
    cfg = load_config(args)
    declared = [v.strip() for v in args.vars.split(",") if v.strip()] if args.vars else None
    f, names = parse_poly_with_vars(_read_input(args.input), declared)
    try:
        cert = certify(f, names, cfg.certify_config())
    except NotNonNegative as e:
        print("not nonnegative")
        print("witness: " + _format_point(names, e.witness))
        print(f"value: {e.value}")
        return EXIT_NEGATIVE
    except (CertificationError, SolverError) as e:
        print(f"ratsos: no certificate: {e}", file=sys.stderr)
        return EXIT_FAILURE
    if not verify_exact(cert).verified:
        # unreachable unless the pipeline is broken; never print an unchecked certificate
        print("ratsos: internal error: certificate failed the final check", file=sys.stderr)
        return EXIT_FAILURE
    sys.stdout.write(serialize(cert, cfg.output_format))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    try:
        text = args.file.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read {args.file}: {e}") from e
    cert: Certificate = parse_certificate(text, args.target)
    if cert.target is None:
        raise ConfigError("the certificate has no target polynomial; pass --target")
    res = verify_exact(cert)
    if res.verified:
        print("verified")
        return EXIT_OK
    print("mismatch")
    print("target - certificate = " + res.diff_poly(len(cert.variables)).format(cert.variables))
    return EXIT_NEGATIVE


def cmd_bench(args: argparse.Namespace) -> int:
    cfg = load_config(args)
    instances = parse_suite(args.suite, cfg.seed)
    rows = run_bench(instances, cfg.certify_config())
    tsv = to_tsv(rows)
    if args.out is not None:
        args.out.write_text(tsv)
    else:
        sys.stdout.write(tsv)
    if args.json is not None:
        args.json.write_text(bench_json(rows))
    return EXIT_OK if all(r.success for r in rows) else EXIT_FAILURE


COMMANDS = {"certify": cmd_certify, "verify": cmd_verify, "bench": cmd_bench}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ParseError, SdpaFormatError, ConfigError) as e:
        print(f"ratsos: {e}", file=sys.stderr)
        return EXIT_USAGE
    except RatSosError as e:
        print(f"ratsos: {e}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
