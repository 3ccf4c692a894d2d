"""Command-line interface: ``lienard-audit <command> [options]``."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from typing import Sequence

import numpy as np

from .audit import AuditConfig, render_report, run_full_audit
from .errors import LienardAuditError, NearPole
from .exact import default_branch, solve_c
from .factorization import bernoulli_ode, bernoulli_solution, parse_sign
from .lienard import skeleton_grid, vdp_rhs, write_skeleton_csv
from .num_core import StepperConfig, fd_derivative, integrate_second_order
from .symmetry import char_roots, general_ansatz, invariance_audit, make_generators


def parse_complex(text: str) -> complex:
    """``"RE,IM"`` or a single real number."""
    parts = [p.strip() for p in str(text).split(",")]
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected RE,IM but got {text!r}")


def _cx(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _jsonable(v):
    if isinstance(v, complex):
        return _cx(v)
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _dump(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, allow_nan=False) + "\n"


class _Output:
    """Writes to ``--out`` when given, else stdout."""

    def __init__(self, path: str | None):
        self.path = path

    def __enter__(self):
        self.fh = open(self.path, "w", newline="") if self.path else sys.stdout
        return self.fh

    def __exit__(self, *exc):
        if self.path:
            self.fh.close()


def _say(args, msg: str) -> None:
    if not args.quiet:
        print(msg, file=sys.stderr)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_roots(args) -> int:
    target = -5.0 * parse_sign(args.branch)
    roots = solve_c(args.branch)
    if args.json:
        sys.stdout.write(_dump({
            "branch": args.branch,
            "roots": roots,
            "residuals": [abs(c * (c * c - 1.0) - target) for c in roots],
        }))
    else:
        for c in roots:
            print(f"{c.real!r} {c.imag!r}")
    return 0


def cmd_exact(args) -> int:
    sys.stdout.write(_dump(default_branch(args.branch, args.root_index).to_dict()))
    return 0


def cmd_integrate(args) -> int:
    if args.n < 2:
        raise SystemExit("--n must be at least 2")
    t_out = np.linspace(0.0, args.t1, args.n)
    tr = integrate_second_order(lambda t, z, v: vdp_rhs(args.eps, t, z, v),
                                args.z0, args.v0, (0.0, args.t1), StepperConfig(), t_out)
    with _Output(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "z_re", "z_im", "dz_re", "dz_im"])
        for t, z, dz in zip(tr.t, tr.z, tr.dz):
            w.writerow([repr(float(v)) for v in (t, z.real, z.imag, dz.real, dz.imag)])
    return 0


def cmd_skeleton(args) -> int:
    b = default_branch(args.branch, args.root_index)
    nodes = skeleton_grid(b.coeffs, (args.ymin, args.ymax), (args.pmin, args.pmax), args.n, args.t)
    with _Output(args.out) as fh:
        write_skeleton_csv(nodes, fh)
    return 0


def cmd_bernoulli(args) -> int:
    if args.n < 2:
        raise SystemExit("--n must be at least 2")
    b = default_branch(args.branch, args.root_index)
    Y = bernoulli_solution(b.coeffs, args.sign, args.t0)
    ode = bernoulli_ode(b.coeffs, args.sign)
    skipped = 0
    with _Output(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "Y_re", "Y_im", "residual"])
        for t in np.linspace(args.t0, args.t1, args.n):
            t = float(t)
            try:
                y = Y(t)
                r = abs(ode(t, y, fd_derivative(Y, t, 1)))
            except NearPole:
                skipped += 1
                continue
            w.writerow([repr(t), repr(y.real), repr(y.imag), repr(r)])
    if skipped:
        _say(args, f"skipped {skipped} node(s) at the pole")
    return 0


def cmd_symmetry(args) -> int:
    b = default_branch(args.branch, args.root_index)
    if args.general_ansatz:
        fields = {"general": general_ansatz()}
    else:
        F1 = b.F1()
        X1, X2 = make_generators(F1, *char_roots(F1, b.G()))
        fields = {"X1": X1, "X2": X2}
    out = {"branch": b.branch, "fields": {}}
    for name, v in fields.items():
        audit = invariance_audit(v, b.coeffs)
        out["fields"][name] = {
            "xi": str(v.xi),
            "eta": str(v.eta),
            "passed": audit.passed,
            "max_numeric": audit.max_numeric,
            "groups": audit.report(),
        }
    sys.stdout.write(_dump(out))
    return 0


def cmd_audit(args) -> int:
    cfg = AuditConfig(branch=args.branch, root_index=args.root_index, kappa=args.kappa,
                      tol=args.tol, seed=args.seed, timings=args.timings)
    report = run_full_audit(cfg)
    with _Output(args.out) as fh:
        fh.write(render_report(report, args.format))
    if not report.ok:
        _say(args, "gated checks failed: " + ", ".join(c.id for c in report.checks if c.status == "FAIL"))
    return 0 if report.ok else 1


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _branch(p):
    p.add_argument("--branch", choices=("upper", "lower"), default="upper")
    p.add_argument("--root-index", type=int, default=0, choices=(0, 1, 2))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help="JSON file; keys mirror flags")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="lienard-audit", parents=[common],
                                     description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("roots", parents=[common], help="roots of the amplitude cubic")
    p.add_argument("--branch", choices=("upper", "lower"), default="upper")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_roots)

    p = sub.add_parser("exact", parents=[common], help="exact-orbit branch record")
    _branch(p)
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("integrate", parents=[common], help="integrate the complex oscillator")
    p.add_argument("--eps", type=parse_complex, default=1.0 + 0j)
    p.add_argument("--z0", type=parse_complex, default=1.0 + 0j)
    p.add_argument("--v0", type=parse_complex, default=1j)
    p.add_argument("--t1", type=float, default=20.0)
    p.add_argument("--n", type=int, default=201)
    p.add_argument("--out")
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("skeleton", parents=[common], help="Q = Y'' over the (Y, P) plane")
    _branch(p)
    p.add_argument("--ymin", type=float, default=-2.0)
    p.add_argument("--ymax", type=float, default=2.0)
    p.add_argument("--pmin", type=float, default=-2.0)
    p.add_argument("--pmax", type=float, default=2.0)
    p.add_argument("--n", type=int, default=21)
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_skeleton)

    p = sub.add_parser("bernoulli", parents=[common], help="closed-form Bernoulli samples")
    _branch(p)
    p.add_argument("--sign", choices=("+", "-"), default="+")
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--t1", type=float, default=3.0)
    p.add_argument("--n", type=int, default=31)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bernoulli)

    p = sub.add_parser("symmetry", parents=[common], help="determining-system report")
    _branch(p)
    p.add_argument("--general-ansatz", action="store_true")
    p.set_defaults(func=cmd_symmetry)

    p = sub.add_parser("audit", parents=[common], help="full derivation audit")
    _branch(p)
    p.add_argument("--kappa", type=parse_complex, default=None)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--format", choices=("json", "table"), default="json")
    p.add_argument("--timings", action="store_true", help="include wall time per check")
    p.add_argument("--out")
    p.set_defaults(func=cmd_audit)
    return parser


_COMPLEX_KEYS = {"eps", "z0", "v0", "kappa"}


def _config_defaults(path: str) -> dict:
    with open(path) as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise SystemExit(f"{path}: expected a JSON object")
    out = {}
    for key, value in raw.items():
        key = key.replace("-", "_")
        if key in _COMPLEX_KEYS and value is not None:
            value = complex(*value) if isinstance(value, list) else parse_complex(value)
        out[key] = value
    return out


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        # explicit flags win over file values, which win over built-in defaults
        defaults = _config_defaults(args.config)
        for action in parser._subparsers._group_actions:
            for sp in action.choices.values():
                sp.set_defaults(**defaults)
        parser.set_defaults(**defaults)
        args = parser.parse_args(argv)
    for name, default in (("seed", 0), ("quiet", False)):
        if not hasattr(args, name):
            setattr(args, name, default)
    try:
        return args.func(args)
    except (LienardAuditError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
