"""Command-line front end: grid tables, law tables, empirical comparisons,
and the numerical verification suite, all emitted as deterministic CSV.

Exit codes: 0 success, 1 usage error, 2 numerical-verification failure or
sieve memory guard.
"""

import argparse
import math
import sys

import numpy as np

from .arith import build_spf_sieve, euler_factor_identity, mean_distribution
from .errors import GridRangeError, QuadratureError, SieveLimitError
from .gridfun import EULER, build_omega, build_rho, build_rho_k, convolve
from .law import (
    LimitLaw,
    Piece,
    arcsine_cdf,
    make_law_table,
    piece_of,
    simplex_log_closed,
    simplex_log_integral,
    tail_integral,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERIC = 2

DEFAULT_H = 1e-3
DEFAULT_VGRID = "0:1:0.05"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


class _Once(argparse.Action):
    """Store a value, rejecting repeated occurrences of the same flag."""

    def __call__(self, parser, namespace, values, option_string=None):
        seen = getattr(namespace, "_seen_flags", None)
        if seen is None:
            seen = set()
            setattr(namespace, "_seen_flags", seen)
        if self.dest in seen:
            parser.error(f"duplicate flag {option_string}")
        seen.add(self.dest)
        setattr(namespace, self.dest, values)


def _parse_grid(spec, parser):
    try:
        start, stop, step = (float(p) for p in spec.split(":"))
    except ValueError:
        parser.error(f"cannot parse grid spec {spec!r}; expected start:stop:step")
    if step <= 0.0:
        parser.error("grid step must be positive")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    if count < 1 or stop < start:
        parser.error(f"grid spec {spec!r} yields no points")
    grid = start + step * np.arange(count)
    grid = np.minimum(grid, stop)
    return np.unique(grid)


def _fmt(x):
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.10g}"


def _write_csv(path, comment_lines, header, rows):
    lines = [f"# {c}" for c in comment_lines]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(c) for c in row))
    text = "\n".join(lines) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)


def _default_u_max(u):
    return max(u, 12.0) + 40.0


def _build_law(u, h, u_max, tol=1e-10):
    rho_half = build_rho_k(0.5, u_max, h)
    omega = build_omega(max(u + 1.0, 15.0), h)
    return LimitLaw(rho_half, omega, tol=tol)


# -- law ----------------------------------------------------------------------


def _cmd_law(args, parser):
    if args.u < 1.0:
        parser.error("--u must be at least 1")
    if args.tol <= 0.0:
        parser.error("--tol must be positive")
    v_grid = _parse_grid(args.v_grid, parser)
    if v_grid[0] < 0.0 or v_grid[-1] > 1.0:
        parser.error("--v-grid must lie inside [0, 1]")
    u_max = args.u_max if args.u_max is not None else _default_u_max(args.u)
    law = _build_law(args.u, args.h, u_max, tol=args.tol)
    closed = (1.0 < args.u <= 2.0) and not args.no_closed
    table = make_law_table(law, args.u, v_grid, closed=closed, asymptotic=args.asymptotic)
    header = ["u", "v", "F_quad"]
    if closed:
        header.append("F_closed")
    if args.asymptotic:
        header.append("F_asymptotic")
    rows = []
    for i, v in enumerate(table.v):
        row = [args.u, v, table.f_quad[i]]
        if closed:
            row.append(table.f_closed[i])
        if args.asymptotic:
            row.append(table.f_asymptotic[i])
        rows.append(row)
    _write_csv(
        args.out,
        [f"smoothdiv law u={_fmt(args.u)} h={_fmt(args.h)} u_max={_fmt(u_max)}"],
        header,
        rows,
    )
    return EXIT_NUMERIC if table.failures else EXIT_OK


# -- closed -------------------------------------------------------------------


def _cmd_closed(args, parser):
    if not 1.0 < args.u <= 2.0:
        parser.error("--u must lie in (1, 2] for the closed form")
    v_grid = _parse_grid(args.v_grid, parser)
    if v_grid[0] < 0.0 or v_grid[-1] > 1.0:
        parser.error("--v-grid must lie inside [0, 1]")
    rows = []
    for v in v_grid:
        piece = piece_of(args.u, v)
        rows.append([args.u, v, LimitLaw.cdf_closed_piece(args.u, v, piece)])
    _write_csv(
        args.out,
        [f"smoothdiv closed u={_fmt(args.u)}"],
        ["u", "v", "F_closed"],
        rows,
    )
    return EXIT_OK


# -- special ------------------------------------------------------------------


def _cmd_special(args, parser):
    u_max = args.u_max
    if u_max < 2.0:
        parser.error("--u-max must be at least 2")
    spec = args.w_grid if args.w_grid else f"0:{u_max:g}:0.05"
    w_grid = _parse_grid(spec, parser)
    if w_grid[-1] > u_max + 1e-9:
        parser.error("--w-grid reaches past --u-max")
    kinds = ["rho", "rho_half", "rho2", "omega"] if args.kind == "all" else [args.kind]
    grids = {}
    if "rho" in kinds:
        grids["rho"] = build_rho(u_max, args.h)
    if "rho_half" in kinds:
        grids["rho_half"] = build_rho_k(0.5, u_max, args.h)
    if "rho2" in kinds:
        grids["rho2"] = build_rho_k(2.0, u_max, args.h)
    if "omega" in kinds:
        grids["omega"] = build_omega(u_max, args.h)
    rows = []
    for w in w_grid:
        rows.append([w] + [grids[k](float(w)) for k in kinds])
    _write_csv(
        args.out,
        [f"smoothdiv special h={_fmt(args.h)} u_max={_fmt(u_max)}"],
        ["w"] + kinds,
        rows,
    )
    return EXIT_OK


# -- empirical / compare ------------------------------------------------------


def _resolve_xy(args, parser):
    if args.x is None:
        parser.error("--x is required")
    if args.x < 1:
        parser.error("--x must be positive")
    if args.y is not None:
        y = args.y
        if y <= 1.0:
            parser.error("--y must exceed 1")
        u_eff = math.log(args.x) / math.log(y) if args.x > 1 else 1.0
    elif args.u is not None:
        if args.u < 1.0:
            parser.error("--u must be at least 1")
        y = args.x ** (1.0 / args.u)
        u_eff = args.u
    else:
        parser.error("either --y or --u is required")
    return y, max(u_eff, 1.0)


def _cmd_empirical(args, parser):
    y, u_eff = _resolve_xy(args, parser)
    v_grid = _parse_grid(args.v_grid, parser)
    if v_grid[0] < 0.0 or v_grid[-1] > 1.0:
        parser.error("--v-grid must lie inside [0, 1]")
    sieve = build_spf_sieve(max(args.x, 2))
    emp = mean_distribution(args.x, y, v_grid, sieve)
    u_max = args.u_max if args.u_max is not None else _default_u_max(u_eff)
    law = _build_law(u_eff, args.h, u_max)
    rows = []
    for i, v in enumerate(v_grid):
        fq = law.cdf(u_eff, float(v))
        rows.append([args.x, y, u_eff, v, emp.values[i], fq, abs(emp.values[i] - fq)])
    _write_csv(
        args.out,
        [
            f"smoothdiv empirical x={args.x} y={_fmt(y)} u={_fmt(u_eff)} "
            f"h={_fmt(args.h)} u_max={_fmt(u_max)}"
        ],
        ["x", "y", "u", "v", "empirical", "F_quad", "abs_err"],
        rows,
    )
    return EXIT_OK


def _cmd_compare(args, parser):
    if args.u < 1.0:
        parser.error("--u must be at least 1")
    try:
        xs = [int(p) for p in args.x_list.split(",") if p]
    except ValueError:
        parser.error(f"cannot parse --x-list {args.x_list!r}")
    if not xs or any(x < 2 for x in xs):
        parser.error("--x-list needs integers >= 2")
    v_grid = _parse_grid(args.v_grid, parser)
    sieve = build_spf_sieve(max(xs))
    if args.law == "arcsine":
        ref = arcsine_cdf(v_grid)
    else:
        u_max = args.u_max if args.u_max is not None else _default_u_max(args.u)
        law = _build_law(args.u, args.h, u_max)
        ref = np.array([law.cdf(args.u, float(v)) for v in v_grid])
    rows = []
    for x in xs:
        y = x ** (1.0 / args.u)
        emp = mean_distribution(x, y, v_grid, sieve)
        sup = float(np.max(np.abs(emp.values - ref)))
        rows.append([x, y, args.u, sup])
    _write_csv(
        args.out,
        [f"smoothdiv compare u={_fmt(args.u)} law={args.law}"],
        ["x", "y", "u", "sup_abs_err"],
        rows,
    )
    return EXIT_OK


# -- verify -------------------------------------------------------------------


class _VerifyContext:
    def __init__(self, h):
        self.h = h
        self._cache = {}

    def get(self, name):
        if name not in self._cache:
            builders = {
                "rho": lambda: build_rho(46.0, self.h),
                "rho_half": lambda: build_rho_k(0.5, 46.0, self.h),
                "rho2": lambda: build_rho_k(2.0, 12.0, self.h),
                "omega": lambda: build_omega(15.0, self.h),
            }
            if name == "law":
                self._cache[name] = LimitLaw(self.get("rho_half"), self.get("omega"))
            else:
                self._cache[name] = builders[name]()
        return self._cache[name]


def _check_rho_at_2(ctx):
    return abs(ctx.get("rho")(2.0) - (1.0 - math.log(2.0)))


def _check_rho_half_closed(ctx):
    gf = ctx.get("rho_half")
    w = 1.0 + np.arange(0, gf.n + 1) / gf.n
    closed = (1.0 - np.log(np.sqrt(w) + np.sqrt(w - 1.0))) / np.sqrt(math.pi * w)
    return float(np.max(np.abs(gf(w) - closed)))


def _check_omega_step(ctx):
    om = ctx.get("omega")
    return abs(om(2.5) - (1.0 + math.log(1.5)) / 2.5)


def _check_mass_rho(ctx):
    return abs(ctx.get("rho").integrate(0.0, 40.0) - math.exp(EULER.gamma))


def _check_mass_rho_half(ctx):
    return abs(ctx.get("rho_half").integrate(0.0, 40.0) - EULER.e_half_gamma)


def _check_conv_sqrt(ctx):
    rho = ctx.get("rho")
    rho_half = ctx.get("rho_half")
    us = np.arange(0.25, 10.25, 0.25)
    return max(abs(convolve(rho_half, rho_half, float(u)) - rho(float(u))) for u in us)


def _check_conv_square(ctx):
    rho = ctx.get("rho")
    rho2 = ctx.get("rho2")
    us = np.arange(0.25, 10.25, 0.25)
    return max(abs(convolve(rho, rho, float(u)) - rho2(float(u))) for u in us)


def _check_buchstab(ctx):
    om = ctx.get("omega")
    v = 10.0 + np.arange(0, 5 * om.n + 1) / om.n
    return float(np.max(np.abs(om(v) - EULER.e_neg_gamma)))


def _check_arcsine(ctx):
    law = ctx.get("law")
    vs = np.linspace(0.0, 1.0, 101)
    return max(abs(law.cdf(1.0, float(v)) - arcsine_cdf(float(v))) for v in vs)


def _check_closed_agreement(ctx):
    law = ctx.get("law")
    vs = np.linspace(0.0, 1.0, 41)
    worst = 0.0
    for u in (1.25, 1.5, 1.75, 2.0):
        for v in vs:
            worst = max(worst, abs(law.cdf(u, float(v)) - law.cdf_closed(u, float(v))))
    return worst


def _check_piece_continuity(ctx):
    worst = 0.0
    for u in (1.25, 1.5, 1.75, 2.0):
        b1 = (u - 1.0) / u
        b2 = 1.0 / u
        worst = max(
            worst,
            abs(
                LimitLaw.cdf_closed_piece(u, b1, Piece.P1)
                - LimitLaw.cdf_closed_piece(u, b1, Piece.P2)
            ),
            abs(
                LimitLaw.cdf_closed_piece(u, b2, Piece.P2)
                - LimitLaw.cdf_closed_piece(u, b2, Piece.P3)
            ),
        )
    return worst


def _check_tail_recurrence(ctx):
    gf = ctx.get("rho_half")
    worst = 0.0
    for w in (1.0, 2.0, 5.0):
        lhs = tail_integral(gf, w) - tail_integral(gf, w + 1.0)
        rhs = 2.0 * (w + 1.0) * gf(w + 1.0)
        worst = max(worst, abs(lhs - rhs))
    return worst


def _check_euler_identity(ctx):
    return max(abs(euler_factor_identity(p) - 1.0) for p in (2, 3, 5, 7))


def _check_simplex(ctx):
    return max(
        abs(simplex_log_integral(xi) - simplex_log_closed(xi)) for xi in (0.1, 0.5, 0.9)
    )


_VERIFY_CHECKS = [
    ("rho at 2 equals 1-log2", 1e-8, _check_rho_at_2),
    ("rho_half on [1,2] vs closed form", 1e-6, _check_rho_half_closed),
    ("omega method-of-steps at 2.5", 1e-8, _check_omega_step),
    ("mass integral rho = e^gamma", 1e-6, _check_mass_rho),
    ("mass integral rho_half = e^(gamma/2)", 1e-6, _check_mass_rho_half),
    ("convolution ρ_half∗ρ_half=ρ", 1e-6, _check_conv_sqrt),
    ("convolution ρ∗ρ=ρ₂", 1e-6, _check_conv_square),
    ("buchstab limit e^-gamma", 1e-6, _check_buchstab),
    ("arcsine reduction at u=1", 1e-8, _check_arcsine),
    ("closed form agreement on (1,2]", 1e-6, _check_closed_agreement),
    ("closed form piece continuity", 1e-12, _check_piece_continuity),
    ("tail recurrence", 1e-8, _check_tail_recurrence),
    ("euler factor identity B(1)H(1)=1", 1e-12, _check_euler_identity),
    ("simplex log integral vs closed form", 1e-5, _check_simplex),
]


def _cmd_verify(args, parser):
    selected = [
        (name, tol, fn)
        for (name, tol, fn) in _VERIFY_CHECKS
        if args.only is None or args.only.lower() in name.lower()
    ]
    if not selected:
        parser.error(f"--only {args.only!r} matches no checks")
    ctx = _VerifyContext(args.h)
    failed = 0
    for name, tol, fn in selected:
        if args.tolerance is not None:
            tol = args.tolerance
        err = fn(ctx)
        ok = err <= tol
        failed += 0 if ok else 1
        status = "PASS" if ok else "FAIL"
        print(f"{name}: {status} (max_err={err:.3e}, tol={tol:.1e})")
    print(f"verify: {len(selected) - failed}/{len(selected)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_NUMERIC


# -- parser -------------------------------------------------------------------


def _add_common(sp, *, v_grid=True):
    sp.add_argument("--h", type=float, default=DEFAULT_H, action=_Once,
                    help="grid step (default 1e-3)")
    sp.add_argument("--out", type=str, default=None, action=_Once,
                    help="output CSV path (default stdout)")
    if v_grid:
        sp.add_argument("--v-grid", type=str, default=DEFAULT_VGRID, action=_Once,
                        help="v grid as start:stop:step")


def build_parser():
    parser = _Parser(prog="smoothdiv",
                     description="smooth-divisor distribution toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("law", parents=[], help="law table by quadrature")
    sp.add_argument("--u", type=float, required=True, action=_Once)
    sp.add_argument("--u-max", type=float, default=None, action=_Once)
    sp.add_argument("--tol", type=float, default=1e-10, action=_Once,
                    help="quadrature panel tolerance")
    sp.add_argument("--asymptotic", action="store_true")
    sp.add_argument("--no-closed", action="store_true")
    _add_common(sp)
    sp.set_defaults(func=_cmd_law)

    sp = sub.add_parser("closed", help="closed-form law table for 1<u<=2")
    sp.add_argument("--u", type=float, required=True, action=_Once)
    _add_common(sp)
    sp.set_defaults(func=_cmd_closed)

    sp = sub.add_parser("special", help="tabulate the special functions")
    sp.add_argument("--kind", choices=["rho", "rho_half", "rho2", "omega", "all"],
                    default="all", action=_Once)
    sp.add_argument("--u-max", type=float, default=12.0, action=_Once)
    sp.add_argument("--w-grid", type=str, default=None, action=_Once)
    _add_common(sp, v_grid=False)
    sp.set_defaults(func=_cmd_special)

    sp = sub.add_parser("empirical", help="empirical mean distribution vs the law")
    sp.add_argument("--x", type=int, default=None, action=_Once)
    sp.add_argument("--y", type=float, default=None, action=_Once)
    sp.add_argument("--u", type=float, default=None, action=_Once)
    sp.add_argument("--u-max", type=float, default=None, action=_Once)
    _add_common(sp)
    sp.set_defaults(func=_cmd_empirical)

    sp = sub.add_parser("compare", help="sup distance to the law along growing x")
    sp.add_argument("--u", type=float, required=True, action=_Once)
    sp.add_argument("--x-list", type=str, required=True, action=_Once,
                    help="comma-separated x values")
    sp.add_argument("--law", choices=["quad", "arcsine"], default="quad",
                    action=_Once)
    sp.add_argument("--u-max", type=float, default=None, action=_Once)
    _add_common(sp)
    sp.set_defaults(func=_cmd_compare)

    sp = sub.add_parser("verify", help="run the numerical invariant suite")
    sp.add_argument("--only", type=str, default=None, action=_Once,
                    help="run only checks whose name contains this substring")
    sp.add_argument("--tolerance", type=float, default=None, action=_Once,
                    help="override every check tolerance")
    sp.add_argument("--h", type=float, default=DEFAULT_H, action=_Once)
    sp.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except SieveLimitError as exc:
        print(f"smoothdiv: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (QuadratureError, GridRangeError) as exc:
        print(f"smoothdiv: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
