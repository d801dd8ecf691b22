"""``onticfock`` command line: verify, report, demo.

Exit codes: 0 success, 1 check failure, 2 usage or configuration error.
"""

import argparse
import sys

import numpy as np

from . import __version__, cogwheel, fermions
from .errors import ConfigError, OnticError
from .fock import make_boson_mode
from .verify import Report, RunConfig, load_config, run_suite
from .verify.config import SUITES

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _suites(values):
    names = []
    for v in values or []:
        names += [s.strip() for s in v.split(",") if s.strip()]
    return names


def build_config(args) -> RunConfig:
    """Config file (if any) with command-line flags layered on top."""
    cfg = load_config(args.config) if args.config else RunConfig()
    if args.suite:
        cfg.suites = _suites(args.suite)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.workers is not None:
        cfg.workers = args.workers
    if args.dim is not None:
        cfg.cogwheel.dims = [args.dim]
        cfg.cogwheel.evolution_dims = [args.dim]
    if args.dim is not None or args.modes is not None or args.families is not None:
        b = cfg.bosons
        for key in ("scalar_real", "scalar_complex", "vector"):
            triples = []
            for F, M, D in getattr(b, key):
                t = [
                    args.families if args.families is not None else F,
                    args.modes if args.modes is not None else M,
                    args.dim if args.dim is not None else D,
                ]
                if t not in triples:
                    triples.append(t)
            setattr(b, key, triples)
    if args.K is not None:
        cfg.fermion.K = list(args.K)
    if args.tol is not None:
        if not args.tol > 0:
            raise ConfigError("tolerance must be > 0", "--tol")
        cfg.tolerances.override_all(args.tol)
    if args.out is not None:
        cfg.output.path = args.out
    if args.format is not None:
        cfg.output.format = args.format
    if args.expected_fail_policy is not None:
        cfg.expected_fail_policy = args.expected_fail_policy
    return cfg.validate()


def cmd_verify(args) -> int:
    cfg = build_config(args)
    report = run_suite(cfg)
    if cfg.output.path:
        text = report.to_json() if cfg.output.format == "json" else report.to_csv()
        with open(cfg.output.path, "w") as fh:
            fh.write(text)
    if not args.quiet:
        sys.stdout.write(report.to_table())
    return EXIT_OK if report.success else EXIT_FAIL


def cmd_report(args) -> int:
    try:
        with open(args.file) as fh:
            report = Report.from_json(fh.read())
    except OSError as exc:
        print(f"error: cannot read report: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, KeyError, TypeError) as exc:
        print(f"error: malformed report {args.file}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.format == "csv":
        sys.stdout.write(report.to_csv())
    elif args.format == "json":
        sys.stdout.write(report.to_json())
    else:
        sys.stdout.write(report.to_table())
    return EXIT_OK


def _demo_coherent(args):
    z, zp = complex(args.z), complex(args.zp)
    dim = args.dim or 30
    num = cogwheel.coherent_overlap(dim, z, zp)
    exact = cogwheel.coherent_overlap_closed_form(z, zp)
    print(f"truncated Fock dimension: {dim}")
    print(f"|<z|z'>| numerical   : {abs(num):.6f}")
    print(f"|<z|z'>| closed form : {abs(exact):.6f}   (exp(-|z|^2/2 - |z'|^2/2 + conj(z) z'))")
    print(f"|difference|         : {abs(num - exact):.3e}")


def _demo_nilpotency(args):
    rep = cogwheel.fermion_phase_constraint_demo(args.n_max)
    print("Fourier projection of c^dag phase states onto occupation n "
          "(boson control in brackets):")
    for n in sorted(rep["projection_norms"]):
        print(f"  n={n}: {rep['projection_norms'][n]:.3e}   [{rep['bosonic_control_norms'][n]:.3e}]")
    print("  comparison: (c^dag)^2 = 0 forces every n >= 2 projection to vanish")


def _demo_dirac(args):
    rep = fermions.bosonic_dirac_failure_demo(args.dim or 4, args.K)
    print(f"bosonic modes, D={rep['dim']}, K={rep['K']}")
    for name in ("bosonic", "fermionic_control"):
        r = rep[name]
        print(f"  {name:<18} max|{{B_i,B_j^dag}} - delta_ij| = {r['car_deviation']:.3e}  "
              f"max|{{B_0,B_1}}| = {r['pair_anticommutator']:.3e}  "
              f"max off-diagonal Gram = {r['gram_offdiag']:.3e}")
    print("  comparison: anticommuting site operators need delta_ij and vanishing pair terms")


def _demo_commutator(args):
    dim = args.dim or 4
    a, adag, _ = make_boson_mode(dim)
    comm = a.commutator(adag).toarray()
    dev = np.abs(comm - np.eye(dim))
    print(f"D={dim}: diag([A, A^dag]) = {np.real(np.diag(comm)).round(12).tolist()}")
    print(f"  max|[A, A^dag] - I| = {dev.max():.6g}; top entry 1 - D = {comm[-1, -1].real:.6g}")
    print("  comparison: untruncated [a, a^dag] = I; truncation leaves 1 - D on the top level")


DEMOS = {
    "coherent-overlap": _demo_coherent,
    "fermion-nilpotency": _demo_nilpotency,
    "bosonic-dirac-failure": _demo_dirac,
    "truncated-commutator": _demo_commutator,
}


def cmd_demo(args) -> int:
    fn = DEMOS.get(args.name)
    if fn is None:
        print(f"error: unknown demo {args.name!r}; choose from {', '.join(DEMOS)}", file=sys.stderr)
        return EXIT_USAGE
    fn(args)
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="onticfock", description="Ontic-basis verification harness.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("--suite", action="append", metavar="NAME",
                   help=f"suite to run (repeatable or comma separated): {', '.join(SUITES)}")
    v.add_argument("--config", metavar="PATH", help="TOML config; flags override its values")
    v.add_argument("--dim", type=int, help="truncation D for cogwheel and boson suites")
    v.add_argument("--modes", type=int, help="momentum points M for boson suites")
    v.add_argument("--families", type=int, help="field families F for boson suites")
    v.add_argument("--K", type=int, action="append", help="fermion ring half-size (repeatable)")
    v.add_argument("--tol", type=float, help="override every tolerance")
    v.add_argument("--seed", type=int)
    v.add_argument("--workers", type=int)
    v.add_argument("--expected-fail-policy", choices=("confirm", "ignore"))
    v.add_argument("--out", metavar="PATH", help="write the report here")
    v.add_argument("--format", choices=("json", "csv"), help="report file format")
    v.add_argument("-q", "--quiet", action="store_true", help="suppress the summary table")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("report", help="render a JSON report")
    r.add_argument("file")
    r.add_argument("--format", choices=("table", "csv", "json"), default="table")
    r.set_defaults(func=cmd_report)

    d = sub.add_parser("demo", help="run a single demonstrator")
    d.add_argument("name", help=", ".join(DEMOS))
    d.add_argument("--z", default="1", help="coherent amplitude z (complex literal)")
    d.add_argument("--zp", default="-1", help="coherent amplitude z'")
    d.add_argument("--dim", type=int, help="truncation dimension (demo-specific default)")
    d.add_argument("--K", type=int, default=2)
    d.add_argument("--n-max", type=int, default=4)
    d.set_defaults(func=cmd_demo)
    return p


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except (ConfigError, OnticError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
