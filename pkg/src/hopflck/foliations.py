"""Lee and anti-Lee flows, the four canonical foliations, exact leaf
classification, lattices of compact two-dimensional leaves, and a
brute-force period oracle.

Angles are tracked in units of pi where exact data is involved:
a = arg(alpha)/pi, b = arg(beta)/pi and r = log|alpha|/log|beta|.  A Lee
orbit turns theta at -2 turns per unit time and the phases of xi1, xi2 at
a and b turns; an anti-Lee orbit turns the phases at -log|alpha|/pi and
-log|beta|/pi turns per unit time.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import InexactClassification, NotElliptic
from .frame import IRRATIONAL, TWO_PI, FramePoint, HopfParams, sample_points
from .numerics import recognize_rational

AXIS_THRESHOLD = 1e-12


class FoliationKind(enum.Enum):
    KERNEL_LEE = "kernel-lee"
    LEE_FLOW = "lee"
    ANTI_LEE_FLOW = "anti-lee"
    LEE_ANTI_LEE_PLANE = "plane"

    @classmethod
    def parse(cls, text: str) -> "FoliationKind":
        key = text.strip().lower().replace("_", "-")
        aliases = {
            "kernel-lee": cls.KERNEL_LEE,
            "kernellee": cls.KERNEL_LEE,
            "f": cls.KERNEL_LEE,
            "lee": cls.LEE_FLOW,
            "leeflow": cls.LEE_FLOW,
            "lee-flow": cls.LEE_FLOW,
            "anti-lee": cls.ANTI_LEE_FLOW,
            "antilee": cls.ANTI_LEE_FLOW,
            "antileeflow": cls.ANTI_LEE_FLOW,
            "anti-lee-flow": cls.ANTI_LEE_FLOW,
            "plane": cls.LEE_ANTI_LEE_PLANE,
            "leeantileeplane": cls.LEE_ANTI_LEE_PLANE,
            "lee-anti-lee-plane": cls.LEE_ANTI_LEE_PLANE,
        }
        if key not in aliases:
            raise ValueError(f"unknown foliation kind {text!r}")
        return aliases[key]


# ---------------------------------------------------------------------------
# exact-or-recognized scalars


@dataclass(frozen=True)
class Resolved:
    """A quantity that is either a known rational, known irrational
    (value None, certified), or a floating guess (certified False)."""

    value: Optional[Fraction]
    certified: bool

    @property
    def rational(self) -> bool:
        return self.value is not None


def _resolve(declared, numeric: float, params: HopfParams) -> Resolved:
    if isinstance(declared, Fraction):
        return Resolved(declared, True)
    if declared is IRRATIONAL:
        return Resolved(None, True)
    tol = params.tolerances
    return Resolved(recognize_rational(numeric, tol.rational_tol, tol.max_denominator), False)


def arg_alpha_over_pi(params: HopfParams) -> Resolved:
    return _resolve(params.arg_alpha_over_pi, params.arg_alpha / math.pi, params)


def arg_beta_over_pi(params: HopfParams) -> Resolved:
    return _resolve(params.arg_beta_over_pi, params.arg_beta / math.pi, params)


def log_mod_ratio(params: HopfParams) -> Resolved:
    return _resolve(params.log_mod_ratio, params.log_mod_alpha / params.log_mod_beta, params)


def _same_stand_in(params: HopfParams) -> bool:
    """Both arguments declared irrational with the same stand-in value."""
    return (
        params.arg_alpha_over_pi is IRRATIONAL
        and params.arg_beta_over_pi is IRRATIONAL
        and math.isclose(params.arg_alpha, params.arg_beta, rel_tol=1e-13)
    )


def _arg_combination(params: HopfParams, k: int, l: int) -> Resolved:
    """k*a - l*b where a, b are the arguments over pi.

    Declared irrationals are taken to be rationally independent of each
    other and of 1, unless both are declared with identical values.
    """
    a, b = arg_alpha_over_pi(params), arg_beta_over_pi(params)
    if a.rational and b.rational:
        return Resolved(k * a.value - l * b.value, a.certified and b.certified)
    if params.arg_alpha_over_pi is IRRATIONAL and params.arg_beta_over_pi is IRRATIONAL:
        if k == l and _same_stand_in(params):
            return Resolved(Fraction(0), True)
        return Resolved(None, True)
    if a.certified and b.certified:
        # rational + nonzero multiple of an irrational is irrational
        return Resolved(None, True)
    tol = params.tolerances
    x = (k * params.arg_alpha - l * params.arg_beta) / math.pi
    return Resolved(recognize_rational(x, tol.rational_tol, tol.max_denominator), False)


def _frac_lcm(values) -> Fraction:
    """Least positive common multiple of positive rationals."""
    out = None
    for v in values:
        v = abs(Fraction(v))
        if out is None:
            out = v
            continue
        num = math.lcm(out.numerator, v.numerator)
        den = math.gcd(out.denominator, v.denominator)
        out = Fraction(num, den)
    return out


def _within_tolerance_note(params: HopfParams) -> str:
    return f"within tolerance (max_denominator {params.tolerances.max_denominator})"


# ---------------------------------------------------------------------------
# flows


def flow_lee(params: HopfParams, p0: FramePoint, t: float) -> FramePoint:
    return leaf_surface(params, p0, t, 0.0)


def flow_anti_lee(params: HopfParams, p0: FramePoint, s: float) -> FramePoint:
    return leaf_surface(params, p0, 0.0, s)


def leaf_surface(params: HopfParams, p0: FramePoint, t: float, s: float) -> FramePoint:
    ph1 = 2.0 * params.arg_alpha * t - 2.0 * params.log_mod_alpha * s
    ph2 = 2.0 * params.arg_beta * t - 2.0 * params.log_mod_beta * s
    return FramePoint(
        p0.theta_lift - 2.0 * TWO_PI * t,
        p0.xi1 * complex(math.cos(ph1), math.sin(ph1)),
        p0.xi2 * complex(math.cos(ph2), math.sin(ph2)),
    )


def leaf_surface_arrays(params: HopfParams, p0: FramePoint, t, s):
    """Vectorised leaf_surface: returns (theta mod 2pi, xi1, xi2) arrays."""
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    theta = np.mod(p0.theta_lift - 2.0 * TWO_PI * t, TWO_PI)
    xi1 = p0.xi1 * np.exp(1j * (2.0 * params.arg_alpha * t - 2.0 * params.log_mod_alpha * s))
    xi2 = p0.xi2 * np.exp(1j * (2.0 * params.arg_beta * t - 2.0 * params.log_mod_beta * s))
    return theta, xi1, xi2


def flow_arrays(params: HopfParams, p0: FramePoint, kind: FoliationKind, t):
    t = np.asarray(t, dtype=float)
    if kind is FoliationKind.LEE_FLOW:
        return leaf_surface_arrays(params, p0, t, np.zeros_like(t))
    if kind is FoliationKind.ANTI_LEE_FLOW:
        return leaf_surface_arrays(params, p0, np.zeros_like(t), t)
    raise ValueError("only the Lee and anti-Lee foliations are one-dimensional flows")


def point_distance(p: FramePoint, q: FramePoint) -> float:
    """max(angular distance of theta, chordal distance of xi)."""
    return float(_distance_arrays(p, q.theta, q.xi1, q.xi2))


def _distance_arrays(p0: FramePoint, theta, xi1, xi2):
    dth = np.abs(np.mod(np.asarray(theta) - p0.theta + math.pi, TWO_PI) - math.pi)
    chord = np.sqrt(np.abs(xi1 - p0.xi1) ** 2 + np.abs(xi2 - p0.xi2) ** 2)
    return np.maximum(dth, chord)


def torus_angles(p0: FramePoint, xi1, xi2):
    """Phase offsets (t1, t2) in [0, 2pi) of xi1, xi2 relative to p0."""
    t1 = np.mod(np.angle(np.asarray(xi1) * np.conj(p0.xi1)), TWO_PI)
    t2 = np.mod(np.angle(np.asarray(xi2) * np.conj(p0.xi2)), TWO_PI)
    return t1, t2


# ---------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class Lattice:
    """Period lattice of a compact plane-field leaf in the (t, s) plane."""

    v: tuple[float, float]
    w: tuple[float, float]
    l: int
    k: int
    p: int
    q: int
    p_prime: Fraction
    q_prime: Fraction
    b: int
    lattice_c: int

    def as_dict(self) -> dict:
        return {
            "v": list(self.v),
            "w": list(self.w),
            "l": self.l,
            "k": self.k,
            "p": self.p,
            "q": self.q,
            "p_prime": str(self.p_prime),
            "q_prime": str(self.q_prime),
            "b": self.b,
            "lattice_c": self.lattice_c,
        }


@dataclass(frozen=True)
class EllipticWitness:
    m: int
    n: int
    certified: bool = True


@dataclass(frozen=True)
class KnotInfo:
    value: Optional[Fraction]
    status: str  # "rational", "irrational", "degenerate", "unknown"
    certified: bool


@dataclass(frozen=True)
class LeafClass:
    """Outcome of classify_leaf.

    kind is one of Sphere3Slice, CircleCompact, DenseInAxisTorus,
    ToralKnot, DenseIn2Torus, CompactTorus, DenseIn3Torus.  For a
    non-compact Lee leaf, projection describes its image on the torus T
    ("toral-knot" with projection_type, or "dense").
    """

    kind: str
    period: Optional[float] = None
    knot_type: Optional[Fraction] = None
    lattice: Optional[Lattice] = None
    on_axis: Optional[int] = None
    projection: Optional[str] = None
    projection_type: Optional[Fraction] = None
    certified: bool = True
    qualifier: Optional[str] = None
    exact_period: Optional[Fraction] = field(default=None, repr=False)

    COMPACT_KINDS = ("Sphere3Slice", "CircleCompact", "ToralKnot", "CompactTorus")

    @property
    def compact(self) -> bool:
        return self.kind in self.COMPACT_KINDS

    def as_dict(self) -> dict:
        def frac(x):
            return None if x is None else str(x)

        return {
            "kind": self.kind,
            "compact": self.compact,
            "period": self.period,
            "knot_type": frac(self.knot_type),
            "lattice": None if self.lattice is None else self.lattice.as_dict(),
            "on_axis": self.on_axis,
            "projection": self.projection,
            "projection_type": frac(self.projection_type),
            "certified": self.certified,
            "qualifier": self.qualifier,
        }


def _tag(params: HopfParams, leaf: LeafClass, certified: bool, strict: bool) -> LeafClass:
    if certified:
        return leaf
    leaf = replace(leaf, certified=False, qualifier=_within_tolerance_note(params))
    if strict:
        err = InexactClassification(f"{leaf.kind} verdict is {leaf.qualifier}")
        err.verdict = leaf
        raise err
    return leaf


def _lee_period(rates) -> Fraction:
    """Smallest t > 0 with 2t and every a*t integral (rates in turns)."""
    return _frac_lcm([Fraction(1, 2)] + [1 / abs(r) for r in rates if r != 0])


def knot_info(params: HopfParams, kind: FoliationKind) -> KnotInfo:
    if kind is FoliationKind.LEE_FLOW:
        a, b = arg_alpha_over_pi(params), arg_beta_over_pi(params)
        cert = a.certified and b.certified
        if b.rational and b.value == 0:
            return KnotInfo(None, "degenerate", cert)
        if a.rational and a.value == 0:
            return KnotInfo(Fraction(0), "rational", cert)
        if a.rational and b.rational:
            return KnotInfo(a.value / b.value, "rational", cert)
        if cert:
            if _same_stand_in(params):
                return KnotInfo(Fraction(1), "rational", True)
            return KnotInfo(None, "irrational", True)
        tol = params.tolerances
        guess = recognize_rational(params.arg_alpha / params.arg_beta, tol.rational_tol, tol.max_denominator)
        return KnotInfo(guess, "rational" if guess is not None else "unknown", False)
    if kind is FoliationKind.ANTI_LEE_FLOW:
        r = log_mod_ratio(params)
        if r.rational:
            return KnotInfo(r.value, "rational", r.certified)
        return KnotInfo(None, "irrational" if r.certified else "unknown", r.certified)
    raise ValueError("knot types are defined for the Lee and anti-Lee flows only")


def knot_type(params: HopfParams, kind: FoliationKind) -> Optional[Fraction]:
    return knot_info(params, kind).value


def classify_leaf(
    params: HopfParams, p0: FramePoint, kind: FoliationKind, strict: bool = False
) -> LeafClass:
    """Compact/dense verdict for the leaf through p0.

    Verdicts resting on floating rational recognition are tagged with a
    qualifier; with strict=True they raise InexactClassification instead
    (the verdict is attached as .verdict).
    """
    axis = p0.on_axis(AXIS_THRESHOLD)
    if kind is FoliationKind.KERNEL_LEE:
        return LeafClass("Sphere3Slice")

    if kind is FoliationKind.LEE_FLOW:
        a, b = arg_alpha_over_pi(params), arg_beta_over_pi(params)
        if axis is not None:
            c = a if axis == 1 else b
            if c.rational:
                per = _lee_period([c.value])
                leaf = LeafClass("CircleCompact", period=float(per), on_axis=axis, exact_period=per)
            else:
                leaf = LeafClass("DenseInAxisTorus", on_axis=axis)
            return _tag(params, leaf, c.certified, strict)
        cert = a.certified and b.certified
        if a.rational and b.rational:
            per = _lee_period([a.value, b.value])
            return _tag(params, LeafClass("CircleCompact", period=float(per), exact_period=per), cert, strict)
        info = knot_info(params, kind)
        if info.value is not None:
            # one independent irrational direction besides theta
            leaf = LeafClass("DenseIn2Torus", projection="toral-knot", projection_type=info.value)
        elif info.status == "degenerate":
            leaf = LeafClass("DenseIn2Torus", projection="degenerate")
        elif a.rational or b.rational:
            leaf = LeafClass("DenseIn2Torus", projection="dense")
        else:
            leaf = LeafClass("DenseIn3Torus", projection="dense")
        return _tag(params, leaf, cert and info.certified, strict)

    if kind is FoliationKind.ANTI_LEE_FLOW:
        if axis is not None:
            lm = params.log_mod_alpha if axis == 1 else params.log_mod_beta
            return LeafClass("CircleCompact", period=math.pi / lm, on_axis=axis)
        r = log_mod_ratio(params)
        if r.rational:
            per = r.value.numerator * math.pi / params.log_mod_alpha
            leaf = LeafClass("ToralKnot", period=per, knot_type=r.value)
        else:
            leaf = LeafClass("DenseIn2Torus")
        return _tag(params, leaf, r.certified, strict)

    if kind is FoliationKind.LEE_ANTI_LEE_PLANE:
        if axis is not None:
            return LeafClass("CompactTorus", on_axis=axis)
        witness = elliptic_condition(params)
        if witness is None:
            r = log_mod_ratio(params)
            cert = r.certified
            if r.rational:
                cert = cert and _arg_combination(params, r.value.denominator, r.value.numerator).certified
            return _tag(params, LeafClass("DenseIn3Torus"), cert, strict)
        lat = lattice(params, certify=False)
        return _tag(params, LeafClass("CompactTorus", lattice=lat), witness.certified, strict)

    raise ValueError(f"unknown foliation kind {kind!r}")


# ---------------------------------------------------------------------------
# ellipticity and lattices


def _rima(params: HopfParams):
    """(l, k, p/q, certified) with l/k = log ratio and p/q = k a - l b,
    or None if either quantity is irrational."""
    r = log_mod_ratio(params)
    if not r.rational:
        return None, r.certified
    l, k = r.value.numerator, r.value.denominator
    combo = _arg_combination(params, k, l)
    if not combo.rational:
        return None, r.certified and combo.certified
    return (l, k, combo.value), r.certified and combo.certified


def elliptic_condition(params: HopfParams) -> Optional[EllipticWitness]:
    """Minimal (m, n) with alpha^m == beta^n, or None."""
    data, cert = _rima(params)
    if data is None:
        return None
    l, k, pq = data
    p, q = pq.numerator, pq.denominator
    if p == 0:
        j = 1
    elif p % 2 == 0:
        j = q
    else:
        j = 2 * q
    return EllipticWitness(j * k, j * l, cert)


def _bezout_minimal(l: int, k: int) -> tuple[int, int]:
    """(b, c) with b*k - c*l == 1 and the smallest c >= 0."""
    if k == 1:
        return 1, 0
    c = (-pow(l, -1, k)) % k
    b = (1 + c * l) // k
    return b, c


def lattice(params: HopfParams, certify: bool = True, samples: int = 10, tol: float = 1e-9) -> Lattice:
    data, _ = _rima(params)
    if data is None:
        raise NotElliptic("alpha^m = beta^n has no solution in positive integers")
    l, k, pq = data
    p, q = pq.numerator, pq.denominator
    if p == 0:
        p_prime, q_prime = Fraction(0), Fraction(1, 2)
    elif p % 2 == 0:
        p_prime, q_prime = Fraction(p, 2), Fraction(q, 2)
    else:
        p_prime, q_prime = Fraction(p), Fraction(q)
    b, c = _bezout_minimal(l, k)
    b_pi = arg_beta_over_pi(params)
    arg_beta = float(b_pi.value) * math.pi if b_pi.rational else params.arg_beta
    lmb = params.log_mod_beta
    v = (float(q_prime), (float(q_prime) * arg_beta - float(p_prime) * c * math.pi) / lmb)
    w = (0.0, k * math.pi / lmb)
    lat = Lattice(v, w, l, k, p, q, p_prime, q_prime, b, c)
    if certify:
        for p0 in sample_points(samples):
            for t, s in (v, w):
                if point_distance(p0, leaf_surface(params, p0, t, s)) > tol:
                    raise NotElliptic(f"lattice vector ({t}, {s}) is not a period of the leaf")
    return lat


# ---------------------------------------------------------------------------
# brute-force period oracle


def _flow_speed(params: HopfParams, kind: FoliationKind) -> float:
    if kind is FoliationKind.LEE_FLOW:
        return max(2.0 * TWO_PI, 2.0 * max(abs(params.arg_alpha), abs(params.arg_beta)))
    return 2.0 * max(params.log_mod_alpha, params.log_mod_beta)


def period_oracle(
    params: HopfParams,
    p0: FramePoint,
    kind: FoliationKind,
    t_max: float = 100.0,
    grid: Optional[float] = None,
    tol: float = 1e-6,
) -> Optional[float]:
    """Smallest t in (0, t_max] with distance(flow(p0, t), p0) < tol.

    Scans a uniform grid (spacing `grid`, chosen from the flow speed when
    omitted) for sampled local minima that could hide a return, then
    bisects on the sign of the slope of the squared distance.
    """
    speed = _flow_speed(params, kind)
    dt = grid if grid is not None else 0.02 / speed
    ts = np.arange(1, int(math.floor(t_max / dt)) + 1) * dt
    th, x1, x2 = flow_arrays(params, p0, kind, ts)
    d = _distance_arrays(p0, th, x1, x2)
    gate = speed * dt
    interior = np.where((d[1:-1] <= d[:-2]) & (d[1:-1] <= d[2:]) & (d[1:-1] < gate))[0] + 1

    def sq(t):
        th_, a_, b_ = flow_arrays(params, p0, kind, np.array([t]))
        dth = 2.0 * np.sin(0.5 * (th_[0] - p0.theta))
        return dth * dth + abs(a_[0] - p0.xi1) ** 2 + abs(b_[0] - p0.xi2) ** 2

    for i in interior:
        lo, hi = ts[i] - dt, min(ts[i] + dt, t_max)
        eps = 1e-9 * max(1.0, ts[i])
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if sq(mid + eps) - sq(mid - eps) > 0:
                hi = mid
            else:
                lo = mid
            if hi - lo < 1e-13 * max(1.0, mid):
                break
        t_star = 0.5 * (lo + hi)
        th_, a_, b_ = flow_arrays(params, p0, kind, np.array([t_star]))
        if 0 < t_star <= t_max and _distance_arrays(p0, th_, a_, b_)[0] < tol:
            return float(t_star)
    return None

