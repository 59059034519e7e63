"""Command-line interface.

Exit codes: 0 success, 2 bad parameters or point, 3 inconsistent exact
data, 4 non-positive h, 5 unknown projection, 6 not elliptic, 7 ODE
blow-up (the partial table is still written).
"""

from __future__ import annotations

import argparse
import math
import os
import re
import sys
from typing import Optional
from xml.sax.saxutils import escape

import numpy as np

from . import __version__
from .errors import BlowUp, InconsistentExactData, NonPositiveH, NotElliptic, ParameterError, PoleExcluded
from .fibration import fibration_map, leaf_spread, monodromy, regularity, stereographic
from .foliations import (
    FoliationKind,
    classify_leaf,
    elliptic_condition,
    flow_arrays,
    knot_info,
    lattice,
    leaf_surface_arrays,
    torus_angles,
)
from .frame import TWO_PI, FramePoint, HopfParams, J_matrix, sample_points
from .metrics import HSpec, MetricFamily, is_vaisman, lee_form, lee_vector, point_tensors, verify_lck
from .numerics import DEFAULT_TOLERANCES, ToleranceConfig, integrate_potential
from .reports import ClassifyReport, VerifyReport, dump

EXIT_PARAMS = 2
EXIT_INCONSISTENT = 3
EXIT_NONPOSITIVE_H = 4
EXIT_PROJECTION = 5
EXIT_NOT_ELLIPTIC = 6
EXIT_BLOWUP = 7

PROJECTIONS = ("torus-angles", "stereo")
DEFAULT_POINT = (0.0, 0.6, 0.0, 0.0, 0.8)
OUTPUT_DIR_ENV = "HOPFLCK_OUTPUT_DIR"


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------------------
# parsing helpers


def parse_complex(text: str) -> complex:
    """Decimal complex literal such as "2", "2i", "-1.5+0.25i" or "3-i"."""
    s = text.strip().replace(" ", "").replace("I", "i").replace("j", "i")
    s = re.sub(r"(^|[+-])i", r"\g<1>1i", s)
    try:
        return complex(s.replace("i", "j"))
    except ValueError as exc:
        raise ParameterError(f"cannot parse complex number {text!r}") from exc


def parse_point(text: Optional[str]) -> FramePoint:
    values = DEFAULT_POINT if text is None else text.split(",")
    try:
        th, r1, i1, r2, i2 = (float(v) for v in values)
    except ValueError as exc:
        raise ParameterError(f"--point needs theta,re1,im1,re2,im2, got {text!r}") from exc
    if not all(math.isfinite(v) for v in (th, r1, i1, r2, i2)):
        raise ParameterError("point coordinates must be finite")
    return FramePoint(th, complex(r1, i1), complex(r2, i2))


def _point_echo(p: FramePoint) -> list[float]:
    return [p.theta, p.xi1.real, p.xi1.imag, p.xi2.real, p.xi2.imag]


def tolerances_from(args) -> ToleranceConfig:
    cfg = DEFAULT_TOLERANCES
    kw = cfg.as_dict()
    if getattr(args, "rational_tol", None) is not None:
        kw["rational_tol"] = args.rational_tol
    if getattr(args, "max_denominator", None) is not None:
        kw["max_denominator"] = args.max_denominator
    if getattr(args, "step", None) is not None:
        kw["derivative_step"] = args.step
    if getattr(args, "tol", None) is not None:
        kw["residual_tol"] = args.tol
    try:
        return ToleranceConfig(**kw)
    except ValueError as exc:
        raise ParameterError(str(exc)) from exc


def params_from(args) -> HopfParams:
    cfg = tolerances_from(args)
    exact = [args.log_mod_ratio, args.arg_alpha_pi, args.arg_beta_pi]
    try:
        if args.alpha is not None or args.beta is not None:
            if args.alpha is None or args.beta is None:
                raise ParameterError("give both --alpha and --beta")
            return HopfParams(parse_complex(args.alpha), parse_complex(args.beta), *exact, tolerances=cfg)
        if any(v is None for v in exact) or args.log_mod_beta is None:
            raise ParameterError(
                "give --alpha/--beta, or all of --log-mod-ratio, --log-mod-beta, --arg-alpha-pi, --arg-beta-pi"
            )
        return HopfParams.exact(args.log_mod_ratio, args.log_mod_beta, *exact[1:], tolerances=cfg)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParameterError(str(exc)) from exc


def _param_parent() -> argparse.ArgumentParser:
    pp = argparse.ArgumentParser(add_help=False)
    g = pp.add_argument_group("parameters")
    g.add_argument("--alpha", help='complex literal, e.g. "2i" or "3+0.5i"')
    g.add_argument("--beta", help="complex literal")
    g.add_argument("--log-mod-ratio", help="log|alpha|/log|beta| as N/D or irr[:value]")
    g.add_argument("--log-mod-beta", type=float, help="log|beta| (exact mode)")
    g.add_argument("--arg-alpha-pi", help="arg(alpha)/pi as N/D or irr[:value]")
    g.add_argument("--arg-beta-pi", help="arg(beta)/pi as N/D or irr[:value]")
    g.add_argument("--rational-tol", type=float, help="rational recognition tolerance")
    g.add_argument("--max-denominator", type=int, help="largest denominator accepted by rational recognition")
    return pp


def _common_parent() -> argparse.ArgumentParser:
    cp = argparse.ArgumentParser(add_help=False)
    cp.add_argument("--tol", type=float, help="numerical tolerance (pass threshold for residual checks)")
    cp.add_argument("--seedless", action="store_true", help="use a regular grid instead of the Halton sequence")
    cp.add_argument("--output", "-o", default="-", help="output file, '-' for standard output")
    return cp


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hopflck",
        description="Locally conformal Kaehler geometry and foliations of Hopf surfaces S^1 x S^3.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    pp, cp = _param_parent(), _common_parent()

    sub.add_parser("classify", parents=[pp, cp], help="classify leaves and the fibration (JSON report)").add_argument(
        "--point", help="generic point theta,re1,im1,re2,im2"
    )

    v = sub.add_parser("verify", parents=[pp, cp], help="check the l.c.K. identities and the Vaisman condition")
    v.add_argument("--h", default="const:2", help="const:C or fourier:a0,a1,b1,...")
    v.add_argument("--samples", type=int, default=200)
    v.add_argument("--vaisman-samples", type=int, default=32)
    v.add_argument("--vaisman-threshold", type=float, default=1e-6)
    v.add_argument("--step", type=float, help="finite-difference step")

    lf = sub.add_parser("leaf", parents=[pp, cp], help="trace a leaf (CSV or SVG)")
    lf.add_argument("--kind", default="lee", help="kernel-lee | lee | anti-lee | plane")
    lf.add_argument("--point", help="theta,re1,im1,re2,im2")
    lf.add_argument("--samples", type=int, default=512)
    lf.add_argument("--t-max", type=float, help="parameter range (default: one period when compact)")
    lf.add_argument("--project", default="torus-angles", help="torus-angles | stereo")
    lf.add_argument("--format", default="csv", choices=("csv", "svg"))

    fb = sub.add_parser("fibrate", parents=[pp, cp], help="evaluate the map to CP^1")
    fb.add_argument("--point", help="theta,re1,im1,re2,im2")
    fb.add_argument("--leaf-samples", type=int, default=16)

    sp = sub.add_parser("solve-potential", parents=[cp], help="integrate L'' = h L' - L'^2 (CSV)")
    sp.add_argument("--h", default="const:2")
    sp.add_argument("--theta0", type=float, default=0.0)
    sp.add_argument("--v0", type=float, help="L'(theta0); default h(theta0)")
    sp.add_argument("--span", default=f"0,{TWO_PI!r}", help="lo,hi")
    sp.add_argument("--samples", type=int, default=257)
    return parser


# ---------------------------------------------------------------------------
# output


def _fmt(x: float) -> str:
    return format(float(x), ".15g")


def _resolve_output(path: str) -> str:
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def write_output(path: str, text: str, stdout=None) -> None:
    if path == "-":
        (stdout or sys.stdout).write(text)
        return
    with open(_resolve_output(path), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _csv(header: list[str], rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(v if isinstance(v, str) else _fmt(v) for v in row))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# classify


def _classify(params: HopfParams, point: FramePoint) -> ClassifyReport:
    foliations = []
    qualifiers: set[str] = set()
    certified = True
    axis_points = {
        "generic": point,
        "xi1-axis": FramePoint(point.theta, 1.0, 0.0),
        "xi2-axis": FramePoint(point.theta, 0.0, 1.0),
    }
    for kind in FoliationKind:
        locations = ("generic",) if kind is FoliationKind.KERNEL_LEE else tuple(axis_points)
        for loc in locations:
            leaf = classify_leaf(params, axis_points[loc], kind)
            if not leaf.certified:
                certified = False
                qualifiers.add(leaf.qualifier)
            foliations.append({"foliation": kind.value, "location": loc, "leaf": leaf.as_dict()})

    knots = []
    for kind in (FoliationKind.LEE_FLOW, FoliationKind.ANTI_LEE_FLOW):
        info = knot_info(params, kind)
        knots.append(
            {
                "foliation": kind.value,
                "value": None if info.value is None else str(info.value),
                "status": info.status,
                "certified": info.certified,
            }
        )

    witness = elliptic_condition(params)
    mono = monodromy(params).as_dict() if witness is not None else None
    orb = regularity(params)
    if not orb.certified:
        certified = False
        qualifiers.add(orb.qualifier)
    return ClassifyReport(
        params=params.describe(),
        tolerances=params.tolerances.as_dict(),
        point=_point_echo(point),
        foliations=foliations,
        knot_types=knots,
        elliptic=witness is not None,
        elliptic_witness=None if witness is None else {"m": witness.m, "n": witness.n, "certified": witness.certified},
        monodromy=mono,
        orbifold=orb.as_dict(),
        certified=certified,
        qualifiers=sorted(q for q in qualifiers if q),
    )


def cmd_classify(args, stdout=None) -> int:
    params = params_from(args)
    report = _classify(params, parse_point(args.point))
    write_output(args.output, dump(report), stdout)
    return 0


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args, stdout=None) -> int:
    params = params_from(args)
    cfg = params.tolerances
    h = HSpec.parse(args.h)
    if args.samples < 1:
        raise ParameterError("--samples must be positive")
    family = MetricFamily(params, h)
    tol = cfg.residual_tol
    lck = verify_lck(family, args.samples, cfg, args.seedless)
    vais = is_vaisman(
        family, args.vaisman_samples, args.vaisman_threshold, cfg.derivative_step, args.seedless
    )

    dual = jinv = 0.0
    for p in sample_points(args.samples, args.seedless):
        t = point_tensors(family, p)
        dual = max(dual, float(np.max(np.abs(t.gram @ lee_vector(family, p) - lee_form(family, p)))))
        J = J_matrix(params, p)
        jinv = max(jinv, float(np.max(np.abs(J.T @ t.gram @ J - t.gram))))

    checks = [
        {"name": "d_omega", "max_residual": lck.max_d_omega, "threshold": tol, "passed": bool(lck.max_d_omega < tol)},
        {
            "name": "d_Omega_minus_omega_wedge_Omega",
            "max_residual": lck.max_d_Omega_residual,
            "threshold": tol,
            "passed": bool(lck.max_d_Omega_residual < tol),
        },
        {"name": "lee_duality", "max_residual": dual, "threshold": 1e-8, "passed": bool(dual < 1e-8)},
        {"name": "J_invariance", "max_residual": jinv, "threshold": 1e-10, "passed": bool(jinv < 1e-10)},
    ]
    report = VerifyReport(
        params=params.describe(),
        tolerances=cfg.as_dict(),
        h=h.describe(),
        samples=args.samples,
        sampling="grid" if args.seedless else "halton",
        lck_residual=lck.max_residual,
        positivity_violations=lck.positivity_violations,
        vaisman=bool(vais.verdict),
        vaisman_residual=vais.max_residual,
        checks=checks,
        passed=all(c["passed"] for c in checks) and lck.positivity_violations == 0,
    )
    write_output(args.output, dump(report), stdout)
    return 0


# ---------------------------------------------------------------------------
# leaf


def _split_wraps(xs, ys, jump: float):
    """Break a polyline wherever consecutive points jump by more than `jump`."""
    pieces, cur = [], [(xs[0], ys[0])]
    for i in range(1, len(xs)):
        if abs(xs[i] - xs[i - 1]) > jump or abs(ys[i] - ys[i - 1]) > jump:
            pieces.append(cur)
            cur = []
        cur.append((xs[i], ys[i]))
    pieces.append(cur)
    return pieces


def _svg(title: str, body: list[str], size: int = 400) -> str:
    head = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">\n'
        f"  <title>{escape(title)}</title>\n"
        f'  <rect x="0" y="0" width="{size}" height="{size}" fill="white" stroke="black"/>\n'
    )
    return head + "".join(f"  {b}\n" for b in body) + "</svg>\n"


def _polylines(pieces, to_px) -> list[str]:
    out = []
    for piece in pieces:
        if len(piece) < 2:
            continue
        pts = " ".join(f"{to_px(x, y)[0]:.4f},{to_px(x, y)[1]:.4f}" for x, y in piece)
        out.append(f'<polyline fill="none" stroke="black" stroke-width="1" points="{pts}"/>')
    return out


def _cloud(xs, ys, to_px) -> list[str]:
    out = []
    for x, y in zip(xs, ys):
        px, py = to_px(x, y)
        out.append(f'<circle cx="{px:.4f}" cy="{py:.4f}" r="1" fill="black"/>')
    return out


def _leaf_samples(params, p0, kind, n, t_max):
    if kind is FoliationKind.LEE_ANTI_LEE_PLANE:
        side = max(2, math.isqrt(n))
        t_span, s_span = t_max
        T, S = np.meshgrid(np.linspace(0, t_span, side), np.linspace(0, s_span, side), indexing="ij")
        th, x1, x2 = leaf_surface_arrays(params, p0, T.ravel(), S.ravel())
        return (T.ravel(), S.ravel()), th, x1, x2
    ts = np.linspace(0.0, t_max, n)
    th, x1, x2 = flow_arrays(params, p0, kind, ts)
    return (ts,), th, x1, x2


def _default_range(params, p0, kind):
    leaf = classify_leaf(params, p0, kind)
    if kind is FoliationKind.LEE_ANTI_LEE_PLANE:
        if leaf.lattice is not None:
            return (leaf.lattice.v[0], leaf.lattice.w[1])
        return (1.0, math.pi / params.log_mod_beta)
    return leaf.period if leaf.period is not None else 10.0


def cmd_leaf(args, stdout=None) -> int:
    if args.project not in PROJECTIONS:
        raise CliError(f"unknown projection {args.project!r}; choose from {', '.join(PROJECTIONS)}", EXIT_PROJECTION)
    params = params_from(args)
    try:
        kind = FoliationKind.parse(args.kind)
    except ValueError as exc:
        raise ParameterError(str(exc)) from exc
    p0 = parse_point(args.point)
    if args.samples < 2:
        raise ParameterError("--samples must be at least 2")

    if kind is FoliationKind.KERNEL_LEE:
        note = "leaf is the 3-sphere slice theta = const; no curve drawn"
        if args.format == "csv":
            text = _csv(["note", "theta"], [[note, p0.theta]])
        else:
            text = _svg(
                f"S3 slice theta={_fmt(p0.theta)}",
                [f'<text x="20" y="200" font-size="14">{escape(note)} (theta = {_fmt(p0.theta)})</text>'],
            )
        write_output(args.output, text, stdout)
        return 0

    if args.t_max is not None:
        if not args.t_max > 0:
            raise ParameterError("--t-max must be positive")
        rng = (args.t_max, args.t_max) if kind is FoliationKind.LEE_ANTI_LEE_PLANE else args.t_max
    else:
        rng = _default_range(params, p0, kind)
    coords, th, x1, x2 = _leaf_samples(params, p0, kind, args.samples, rng)
    param_cols = ["t", "s"] if kind is FoliationKind.LEE_ANTI_LEE_PLANE else ["t"]

    if args.project == "torus-angles":
        a, b = torus_angles(p0, x1, x2)
        names = ["t1", "t2"]
        cols = [a, b]
        lo, hi = 0.0, TWO_PI
    else:
        real4 = np.stack([x1.real, x1.imag, x2.real, x2.imag], axis=-1)
        try:
            y = stereographic(real4)
        except PoleExcluded as exc:
            raise ParameterError(f"leaf passes through the projection pole: {exc}") from exc
        names = ["y1", "y2", "y3"]
        cols = [y[:, 0], y[:, 1], y[:, 2]]
        span = float(np.max(np.abs(y[:, :2]))) * 1.05 or 1.0
        lo, hi = -span, span

    if args.format == "csv":
        rows = zip(*coords, th, *cols)
        text = _csv(param_cols + ["theta"] + names, rows)
    else:
        size = 400

        def to_px(x, yv):
            return (x - lo) / (hi - lo) * size, size - (yv - lo) / (hi - lo) * size

        title = f"{kind.value} leaf, projection {args.project}"
        if kind is FoliationKind.LEE_ANTI_LEE_PLANE:
            body = _cloud(cols[0], cols[1], to_px)
        else:
            jump = math.pi if args.project == "torus-angles" else (hi - lo) / 2
            body = _polylines(_split_wraps(cols[0], cols[1], jump), to_px)
        text = _svg(title, body)
    write_output(args.output, text, stdout)
    return 0


# ---------------------------------------------------------------------------
# fibrate


def cmd_fibrate(args, stdout=None) -> int:
    params = params_from(args)
    p = parse_point(args.point)
    mono = monodromy(params)
    lattice(params)
    image = fibration_map(params, p, mono)
    spread = leaf_spread(params, p, args.leaf_samples, mono)
    text = (
        f"point {image.format()}\n"
        f"fs_spread {_fmt(spread)}\n"
        f"monodromy m={mono.m} n={mono.n} c={mono.monodromy_c}\n"
    )
    write_output(args.output, text, stdout)
    return 0


# ---------------------------------------------------------------------------
# solve-potential


def cmd_solve_potential(args, stdout=None) -> int:
    h = HSpec.parse(args.h)
    try:
        lo, hi = (float(x) for x in args.span.split(","))
    except ValueError as exc:
        raise ParameterError(f"--span needs lo,hi, got {args.span!r}") from exc
    if not lo < hi or not lo <= args.theta0 <= hi:
        raise ParameterError("need lo < hi and theta0 inside the span")
    v0 = h(args.theta0) if args.v0 is None else args.v0
    header = ["theta", "L", "dL", "d2L", "residual", "status"]
    try:
        traj = integrate_potential(h, args.theta0, v0, (lo, hi), DEFAULT_TOLERANCES, args.samples)
        code, status, tail = 0, "ok", []
    except BlowUp as exc:
        traj = exc.trajectory
        code, status = EXIT_BLOWUP, "partial"
        nan = float("nan")
        tail = [[exc.at if exc.at is not None else args.theta0, nan, nan, nan, nan, "blow-up"]]
        print(f"blow-up: {exc}", file=sys.stderr)
    rows = [
        [traj.theta[i], traj.L[i], traj.dL[i], traj.d2L[i], traj.residual[i], status] for i in range(len(traj.theta))
    ]
    write_output(args.output, _csv(header, rows + tail), stdout)
    return code


COMMANDS = {
    "classify": cmd_classify,
    "verify": cmd_verify,
    "leaf": cmd_leaf,
    "fibrate": cmd_fibrate,
    "solve-potential": cmd_solve_potential,
}


def main(argv: Optional[list[str]] = None, stdout=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args, stdout)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except InconsistentExactData as exc:
        print(f"error: inconsistent exact data: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except NonPositiveH as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONPOSITIVE_H
    except NotElliptic as exc:
        print(f"error: not elliptic: {exc}", file=sys.stderr)
        return EXIT_NOT_ELLIPTIC
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAMS
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAMS


if __name__ == "__main__":
    sys.exit(main())
