"""Hopf parameters, points of S^1 x S^3, the quaternionic parallelization
(e1, e2, e3, e4), the diffeomorphism with C^2 - 0 modulo (alpha, beta), and
the transported complex structure J.

Conventions
-----------
* S^3 sits in H via (xi1, xi2) -> xi1 + j conj(xi2); e2, e3, e4 are left
  multiplication by i, j, k.  Real coordinates are
  (a1, a2, a3, a4) = (Re xi1, Im xi1, Re xi2, Im xi2).
* log(alpha), log(beta) are principal logarithms (argument in (-pi, pi]).
  log(alpha/beta) always means log(alpha) - log(beta).
* Frame vectors/covectors are numpy arrays of shape (4,) holding the
  coefficients on e1..e4 (resp. e^1..e^4).
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Optional, Union

import numpy as np

from .errors import InconsistentExactData, ParameterError, SingularBasis
from .numerics import DEFAULT_TOLERANCES, ToleranceConfig, solve_monotone

TWO_PI = 2.0 * math.pi


class Marker(enum.Enum):
    IRRATIONAL = "irr"


IRRATIONAL = Marker.IRRATIONAL
ExactValue = Union[Fraction, Marker, None]

# stand-in numerical values for quantities declared irrational
IRRATIONAL_LOG_RATIO = (1 + math.sqrt(5)) / 2
IRRATIONAL_ARG_ALPHA = (math.sqrt(5) - 1) / 2
IRRATIONAL_ARG_BETA = math.sqrt(2) - 1


def normalize_arg_fraction(a: Fraction) -> Fraction:
    """Reduce a multiple of pi into (-1, 1]."""
    a = Fraction(a)
    return a - 2 * math.ceil((a - 1) / 2)


def _coerce_exact(value) -> ExactValue:
    return parse_exact_token(value)[0]


def parse_exact_token(value) -> tuple[ExactValue, Optional[float]]:
    """Parse "N/D", "irr" or "irr:<stand-in value>".

    Returns the exact value and, for declared irrationals, the optional
    numerical stand-in.
    """
    if value is None or value is IRRATIONAL:
        return value, None
    if isinstance(value, str):
        text = value.strip()
        if text.lower().startswith("irr"):
            _, _, num = text.partition(":")
            return IRRATIONAL, (float(num) if num.strip() else None)
        return Fraction(text), None
    return Fraction(value), None


@dataclass(frozen=True)
class HopfParams:
    """The pair (alpha, beta) with |alpha| >= |beta| > 1.

    Optional exact data: log_mod_ratio = log|alpha| / log|beta| and the
    arguments in units of pi, each either a Fraction or IRRATIONAL.  Exact
    data is authoritative for classification; alpha and beta are
    authoritative for numerics.
    """

    alpha: complex
    beta: complex
    log_mod_ratio: ExactValue = None
    arg_alpha_over_pi: ExactValue = None
    arg_beta_over_pi: ExactValue = None
    tolerances: ToleranceConfig = field(default=DEFAULT_TOLERANCES, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "beta", complex(self.beta))
        for name in ("log_mod_ratio", "arg_alpha_over_pi", "arg_beta_over_pi"):
            object.__setattr__(self, name, _coerce_exact(getattr(self, name)))
        for name in ("arg_alpha_over_pi", "arg_beta_over_pi"):
            val = getattr(self, name)
            if isinstance(val, Fraction):
                object.__setattr__(self, name, normalize_arg_fraction(val))
        ma, mb = abs(self.alpha), abs(self.beta)
        if not (math.isfinite(ma) and math.isfinite(mb)):
            raise ParameterError("alpha and beta must be finite")
        if not mb > 1.0:
            raise ParameterError(f"need |beta| > 1, got |beta| = {mb!r}")
        if ma < mb:
            raise ParameterError(f"need |alpha| >= |beta|, got {ma!r} < {mb!r}")
        self._check_consistency()

    def _check_consistency(self):
        tol = self.tolerances.rational_tol
        r = self.log_mod_ratio
        if isinstance(r, Fraction):
            if r < 1:
                raise InconsistentExactData("log|alpha|/log|beta| must be >= 1")
            actual = self.log_mod_alpha / self.log_mod_beta
            if abs(actual - float(r)) > tol * max(1.0, abs(float(r))):
                raise InconsistentExactData(
                    f"log|alpha|/log|beta| = {actual!r} does not match declared {r}"
                )
        for name, z in (("arg_alpha_over_pi", self.alpha), ("arg_beta_over_pi", self.beta)):
            a = getattr(self, name)
            if isinstance(a, Fraction):
                actual = cmath.phase(z) / math.pi
                diff = abs(actual - float(a))
                diff = min(diff, abs(diff - 2.0))
                if diff > tol:
                    raise InconsistentExactData(f"{name}: arg/pi = {actual!r} does not match declared {a}")

    @classmethod
    def exact(
        cls,
        log_mod_ratio,
        log_mod_beta: float,
        arg_alpha_over_pi,
        arg_beta_over_pi,
        tolerances: ToleranceConfig = DEFAULT_TOLERANCES,
    ) -> "HopfParams":
        """Build parameters from exact data.

        Each exact entry is a Fraction, "N/D", IRRATIONAL, "irr" or
        "irr:<value>".  Declared irrationals use the given stand-in value
        for numerics, or a fixed default one.
        """
        r, r_sub = parse_exact_token(log_mod_ratio)
        a, a_sub = parse_exact_token(arg_alpha_over_pi)
        b, b_sub = parse_exact_token(arg_beta_over_pi)
        if not log_mod_beta > 0:
            raise ParameterError("log|beta| must be positive")
        if r is None or a is None or b is None:
            raise ParameterError("exact mode needs the log ratio and both arguments")

        def stand_in(value, sub, default):
            if value is IRRATIONAL:
                return default if sub is None else sub
            return float(value)

        r_val = stand_in(r, r_sub, IRRATIONAL_LOG_RATIO)
        if r_val < 1:
            raise ParameterError("log|alpha|/log|beta| must be >= 1")
        a_val = stand_in(a if a is IRRATIONAL else normalize_arg_fraction(a), a_sub, IRRATIONAL_ARG_ALPHA)
        b_val = stand_in(b if b is IRRATIONAL else normalize_arg_fraction(b), b_sub, IRRATIONAL_ARG_BETA)
        alpha = cmath.exp(complex(r_val * log_mod_beta, a_val * math.pi))
        beta = cmath.exp(complex(log_mod_beta, b_val * math.pi))
        return cls(alpha, beta, r, a, b, tolerances)

    # numerical views -------------------------------------------------------

    @property
    def log_alpha(self) -> complex:
        return cmath.log(self.alpha)

    @property
    def log_beta(self) -> complex:
        return cmath.log(self.beta)

    @property
    def log_mod_alpha(self) -> float:
        return math.log(abs(self.alpha))

    @property
    def log_mod_beta(self) -> float:
        return math.log(abs(self.beta))

    @property
    def arg_alpha(self) -> float:
        return cmath.phase(self.alpha)

    @property
    def arg_beta(self) -> float:
        return cmath.phase(self.beta)

    @property
    def log_ratio(self) -> complex:
        """log(alpha) - log(beta)."""
        return self.log_alpha - self.log_beta

    @property
    def has_exact_data(self) -> bool:
        return any(
            v is not None for v in (self.log_mod_ratio, self.arg_alpha_over_pi, self.arg_beta_over_pi)
        )

    def equal_moduli(self, tol: float = 1e-12) -> bool:
        if self.log_mod_ratio is not None:
            return self.log_mod_ratio == 1
        return abs(self.log_mod_alpha - self.log_mod_beta) <= tol * self.log_mod_beta

    def describe(self) -> dict:
        def fmt(v):
            if v is None:
                return None
            return "irr" if v is IRRATIONAL else str(v)

        return {
            "alpha": [self.alpha.real, self.alpha.imag],
            "beta": [self.beta.real, self.beta.imag],
            "log_mod_ratio": fmt(self.log_mod_ratio),
            "arg_alpha_over_pi": fmt(self.arg_alpha_over_pi),
            "arg_beta_over_pi": fmt(self.arg_beta_over_pi),
            "exact_mode": self.has_exact_data,
        }


@dataclass(frozen=True)
class FramePoint:
    """(theta, xi1, xi2) in S^1 x S^3.

    theta is stored reduced to [0, 2pi); theta_lift keeps the real value the
    point was built from (needed by to_universal, which lives on R x S^3).
    """

    theta: float
    xi1: complex
    xi2: complex
    theta_lift: Optional[float] = field(default=None, compare=False)

    def __post_init__(self):
        lift = float(self.theta) if self.theta_lift is None else float(self.theta_lift)
        x1, x2 = complex(self.xi1), complex(self.xi2)
        n = math.sqrt(abs(x1) ** 2 + abs(x2) ** 2)
        if not n > 0 or not math.isfinite(n):
            raise ParameterError("(xi1, xi2) must be a nonzero finite vector")
        object.__setattr__(self, "xi1", x1 / n)
        object.__setattr__(self, "xi2", x2 / n)
        object.__setattr__(self, "theta_lift", lift)
        object.__setattr__(self, "theta", float(lift % TWO_PI))

    @property
    def real4(self) -> np.ndarray:
        return np.array([self.xi1.real, self.xi1.imag, self.xi2.real, self.xi2.imag])

    def on_axis(self, threshold: float = 1e-12) -> Optional[int]:
        """1 if xi2 == 0 (the xi1-axis circle), 2 if xi1 == 0, else None."""
        if abs(self.xi2) <= threshold:
            return 1
        if abs(self.xi1) <= threshold:
            return 2
        return None


class UniversalPoint(NamedTuple):
    z1: complex
    z2: complex


class ComplexCoords(NamedTuple):
    """X = Re(u) e2 + Im(u) J e2 + Re(v) e3 + Im(v) J e3."""

    u: complex
    v: complex


# ---------------------------------------------------------------------------
# frame fields and their flows

STRUCTURE_BRACKETS = {
    # [e_i, e_j] for i < j, 1-based, as frame vectors
    (2, 3): np.array([0.0, 0.0, 0.0, -2.0]),
    (2, 4): np.array([0.0, 0.0, 2.0, 0.0]),
    (3, 4): np.array([0.0, -2.0, 0.0, 0.0]),
}


def bracket(i: int, j: int) -> np.ndarray:
    """Constant bracket [e_i, e_j] in the frame."""
    if i == j:
        return np.zeros(4)
    if i < j:
        return STRUCTURE_BRACKETS.get((i, j), np.zeros(4)).copy()
    return -bracket(j, i)


def bracket_table() -> np.ndarray:
    """c[i, j] = [e_{i+1}, e_{j+1}] as frame vectors, shape (4, 4, 4)."""
    c = np.zeros((4, 4, 4))
    for i in range(4):
        for j in range(4):
            c[i, j] = bracket(i + 1, j + 1)
    return c


def frame_fields(p: FramePoint) -> np.ndarray:
    """Ambient components of e1..e4 at p, rows in R x R^4 = (dtheta, a1..a4)."""
    a1, a2, a3, a4 = p.real4
    return np.array(
        [
            [1.0, 0.0, 0.0, 0.0, 0.0],
            [0.0, -a2, a1, -a4, a3],
            [0.0, -a3, a4, a1, -a2],
            [0.0, -a4, -a3, a2, a1],
        ]
    )


def frame_flow(p: FramePoint, frame_index: int, t: float) -> FramePoint:
    """Exact integral curve of e_{frame_index} through p, evaluated at time t."""
    x1, x2 = p.xi1, p.xi2
    if frame_index == 1:
        return FramePoint(p.theta_lift + t, x1, x2)
    c, s = math.cos(t), math.sin(t)
    if frame_index == 2:
        ph = complex(c, s)
        return FramePoint(p.theta_lift, ph * x1, ph * x2)
    if frame_index == 3:
        return FramePoint(p.theta_lift, c * x1 - s * x2.conjugate(), c * x2 + s * x1.conjugate())
    if frame_index == 4:
        return FramePoint(p.theta_lift, c * x1 - 1j * s * x2.conjugate(), c * x2 + 1j * s * x1.conjugate())
    raise ValueError("frame_index must be 1..4")


# ---------------------------------------------------------------------------
# the diffeomorphism F


def to_universal(params: HopfParams, p: FramePoint) -> UniversalPoint:
    th = p.theta_lift
    return UniversalPoint(
        cmath.exp(th * params.log_alpha / TWO_PI) * p.xi1,
        cmath.exp(th * params.log_beta / TWO_PI) * p.xi2,
    )


def from_universal(params: HopfParams, z) -> FramePoint:
    """Inverse of F: solve |z1|^2 x^{log|a|} + |z2|^2 x^{log|b|} = 1 for
    x = exp(-theta/pi).  The returned point keeps the unreduced theta in
    theta_lift."""
    z1, z2 = complex(z[0]), complex(z[1])
    if z1 == 0 and z2 == 0:
        raise ParameterError("z must be nonzero")
    x = solve_monotone(
        abs(z1) ** 2, abs(z2) ** 2, params.log_mod_alpha, params.log_mod_beta, params.tolerances.root_tol
    )
    theta = -math.pi * math.log(x)
    xi1 = cmath.exp(-theta * params.log_alpha / TWO_PI) * z1
    xi2 = cmath.exp(-theta * params.log_beta / TWO_PI) * z2
    return FramePoint(theta, xi1, xi2)


def pushforward(params: HopfParams, p: FramePoint, v) -> np.ndarray:
    """dF applied to a frame vector: the image in C^2 (shape (2,), complex)."""
    th = p.theta_lift
    d = np.array([cmath.exp(th * params.log_alpha / TWO_PI), cmath.exp(th * params.log_beta / TWO_PI)])
    x1, x2 = p.xi1, p.xi2
    cols = np.array(
        [
            [x1 * params.log_alpha / TWO_PI, x2 * params.log_beta / TWO_PI],
            [1j * x1, 1j * x2],
            [-x2.conjugate(), x1.conjugate()],
            [-1j * x2.conjugate(), 1j * x1.conjugate()],
        ]
    )
    return d * (np.asarray(v, dtype=float) @ cols)


# ---------------------------------------------------------------------------
# G and the complex structure


def G_value(params: HopfParams, p: FramePoint) -> complex:
    return abs(p.xi1) ** 2 * params.log_alpha + abs(p.xi2) ** 2 * params.log_beta


def J_matrix(params: HopfParams, p: FramePoint) -> np.ndarray:
    """4x4 real matrix whose columns are J e1 .. J e4 in the frame."""
    G = G_value(params, p)
    re = G.real
    w = p.xi1 * p.xi2
    L = params.log_ratio
    t1 = 1j * w * G.conjugate() * L
    t2 = w * L
    J = np.zeros((4, 4))
    J[:, 0] = [-G.imag / re, abs(G) ** 2 / (TWO_PI * re), -t1.real / (TWO_PI * re), -t1.imag / (TWO_PI * re)]
    J[:, 1] = [-TWO_PI / re, G.imag / re, -t2.real / re, -t2.imag / re]
    J[:, 2] = [0.0, 0.0, 0.0, 1.0]
    J[:, 3] = [0.0, 0.0, -1.0, 0.0]
    return J


def J_apply(params: HopfParams, p: FramePoint, v) -> np.ndarray:
    return J_matrix(params, p) @ np.asarray(v, dtype=float)


def complex_basis_matrix(params: HopfParams, p: FramePoint, J: Optional[np.ndarray] = None) -> np.ndarray:
    """Columns e2, J e2, e3, J e3 written in the frame."""
    if J is None:
        J = J_matrix(params, p)
    C = np.zeros((4, 4))
    C[1, 0] = 1.0
    C[:, 1] = J[:, 1]
    C[2, 2] = 1.0
    C[:, 3] = J[:, 2]
    if np.linalg.cond(C) > 1e12:
        raise SingularBasis("complex basis (e2, Je2, e3, Je3) is numerically singular")
    return C


def complex_coords(params: HopfParams, p: FramePoint, v) -> ComplexCoords:
    x = np.linalg.solve(complex_basis_matrix(params, p), np.asarray(v, dtype=float))
    return ComplexCoords(complex(x[0], x[1]), complex(x[2], x[3]))


def from_complex_coords(params: HopfParams, p: FramePoint, cc) -> np.ndarray:
    u, v = cc
    return complex_basis_matrix(params, p) @ np.array([u.real, u.imag, v.real, v.imag])


def frame_complex_coords(params: HopfParams, p: FramePoint, J: Optional[np.ndarray] = None) -> np.ndarray:
    """2x4 complex matrix: column i holds the (u, v) coordinates of e_{i+1}."""
    C = complex_basis_matrix(params, p, J)
    X = np.linalg.inv(C)
    return np.array([X[0] + 1j * X[1], X[2] + 1j * X[3]])


# ---------------------------------------------------------------------------
# deterministic sampling of S^1 x S^3


def unit_cube_to_point(u) -> FramePoint:
    """Map [0,1)^4 to S^1 x S^3 so that uniform input gives the product of
    uniform measures (|xi1|^2 is uniform on S^3)."""
    r1 = math.sqrt(u[1])
    r2 = math.sqrt(max(0.0, 1.0 - u[1]))
    return FramePoint(
        TWO_PI * u[0],
        r1 * cmath.exp(1j * TWO_PI * u[2]),
        r2 * cmath.exp(1j * TWO_PI * u[3]),
    )


def sample_points(n: int, seedless: bool = False, skip: int = 1) -> list[FramePoint]:
    """n deterministic sample points.

    Default: unscrambled Halton sequence (low discrepancy, no seed).
    seedless=True: a regular product grid instead.
    Points are nudged off the axes xi1 xi2 = 0.
    """
    if seedless:
        m = max(2, math.ceil(n ** 0.25))
        ax = (np.arange(m) + 0.5) / m
        grid = np.stack(np.meshgrid(ax, ax, ax, ax, indexing="ij"), axis=-1).reshape(-1, 4)
        idx = np.linspace(0, len(grid) - 1, n).round().astype(int)
        cube = grid[idx]
    else:
        from scipy.stats import qmc

        cube = qmc.Halton(d=4, scramble=False).random(n + skip)[skip:]
    cube[:, 1] = np.clip(cube[:, 1], 1e-3, 1 - 1e-3)
    return [unit_cube_to_point(u) for u in cube]
