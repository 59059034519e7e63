"""The leaf-space map to CP^1 for elliptic parameters (alpha^m == beta^n),
its monodromy integers, orbifold data and the stereographic view of S^3."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NotElliptic, PoleExcluded
from .foliations import (
    _rima,
    elliptic_condition,
    leaf_surface,
    lattice,
    point_distance,
)
from .frame import TWO_PI, FramePoint, HopfParams, UniversalPoint


@dataclass(frozen=True)
class MonodromyData:
    m: int
    n: int
    monodromy_c: int
    certified: bool = True

    def as_dict(self) -> dict:
        return {"m": self.m, "n": self.n, "monodromy_c": self.monodromy_c, "certified": self.certified}


@dataclass(frozen=True)
class ProjectivePoint:
    """[w0 : w1] scaled so the larger-modulus entry (w0 on ties) equals 1."""

    w0: complex
    w1: complex

    @classmethod
    def normalize(cls, w0: complex, w1: complex) -> "ProjectivePoint":
        w0, w1 = complex(w0), complex(w1)
        if w0 == 0 and w1 == 0:
            raise ValueError("[0:0] is not a point of CP^1")
        if abs(w0) >= abs(w1):
            return cls(1.0 + 0j, w1 / w0)
        return cls(w0 / w1, 1.0 + 0j)

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.w0, self.w1])

    def format(self, digits: int = 12) -> str:
        def c(z):
            return f"{z.real:.{digits}f}{z.imag:+.{digits}f}i"

        return f"[{c(self.w0)} : {c(self.w1)}]"


@dataclass(frozen=True)
class OrbifoldData:
    regular: bool
    quasi_regular: bool
    cone_orders: Optional[tuple[int, int]]
    multiplicities: Optional[dict]
    certified: bool = True
    qualifier: Optional[str] = None

    def as_dict(self) -> dict:
        return {
            "regular": self.regular,
            "quasi_regular": self.quasi_regular,
            "cone_orders": None if self.cone_orders is None else list(self.cone_orders),
            "multiplicities": self.multiplicities,
            "certified": self.certified,
            "qualifier": self.qualifier,
        }


def monodromy(params: HopfParams) -> MonodromyData:
    """(m, n, c) with m arg(alpha) = n arg(beta) + 2 pi c.

    c is read off the exact certificate k a - l b = p/q (arguments over pi),
    never from rounding floating arguments.
    """
    witness = elliptic_condition(params)
    if witness is None:
        raise NotElliptic("alpha^m = beta^n has no solution in positive integers")
    (l, k, pq), _ = _rima(params)
    j = witness.m // k
    c2 = j * pq  # m a - n b, an even integer
    if c2.denominator != 1 or c2.numerator % 2:
        raise NotElliptic(f"argument congruence failed: m a - n b = {c2}")
    c = c2.numerator // 2
    if math.gcd(math.gcd(witness.m, witness.n), abs(c)) != 1:
        raise NotElliptic(f"(m, n, c) = ({witness.m}, {witness.n}, {c}) is not primitive")
    return MonodromyData(witness.m, witness.n, c, witness.certified)


def _map_arrays(mono: MonodromyData, theta, xi1, xi2):
    return np.exp(1j * mono.monodromy_c * np.asarray(theta)) * np.asarray(xi1) ** mono.m, np.asarray(xi2) ** mono.n


def fibration_map(params: HopfParams, p: FramePoint, mono: Optional[MonodromyData] = None) -> ProjectivePoint:
    mono = mono or monodromy(params)
    w0, w1 = _map_arrays(mono, p.theta, p.xi1, p.xi2)
    return ProjectivePoint.normalize(complex(w0), complex(w1))


def universal_map(params: HopfParams, z: UniversalPoint, mono: Optional[MonodromyData] = None) -> ProjectivePoint:
    """[z1^m : z2^n] on the universal cover."""
    mono = mono or monodromy(params)
    return ProjectivePoint.normalize(complex(z[0]) ** mono.m, complex(z[1]) ** mono.n)


def fs_distance(a, b) -> float:
    """Fubini-Study angle between [a] and [b], in [0, pi/2]."""
    a = a.vector if isinstance(a, ProjectivePoint) else np.asarray(a, dtype=complex)
    b = b.vector if isinstance(b, ProjectivePoint) else np.asarray(b, dtype=complex)
    cross = abs(a[0] * b[1] - a[1] * b[0])
    inner = abs(a[0] * np.conj(b[0]) + a[1] * np.conj(b[1]))
    return float(math.atan2(cross, inner))


def _fs_matrix(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Pairwise Fubini-Study distances between rows of A (n,2) and B (k,2)."""
    cross = np.abs(np.outer(A[:, 0], B[:, 1]) - np.outer(A[:, 1], B[:, 0]))
    inner = np.abs(A @ np.conj(B).T)
    return np.arctan2(cross, inner)


def leaf_spread(
    params: HopfParams, p0: FramePoint, samples: int = 100, mono: Optional[MonodromyData] = None
) -> float:
    """Largest Fubini-Study distance from the image of p0 over points
    leaf_surface(p0, t, s) on a deterministic (t, s) grid spanning two
    lattice periods in each direction."""
    mono = mono or monodromy(params)
    lat = lattice(params, certify=False)
    base = fibration_map(params, p0, mono)
    side = max(1, math.isqrt(samples - 1) + 1)
    u = (np.arange(samples) % side) / side
    w = (np.arange(samples) // side) / side
    spread = 0.0
    for a, b in zip(u, w):
        t = 2.0 * a * lat.v[0]
        s = 2.0 * b * lat.w[1]
        spread = max(spread, fs_distance(base, fibration_map(params, leaf_surface(params, p0, t, s), mono)))
    return spread


def cp1_grid(n: int = 32) -> np.ndarray:
    """n x n grid [cos(eta/2) : sin(eta/2) e^{i phi}] of CP^1, shape (n*n, 2)."""
    eta = np.linspace(0.0, math.pi, n)
    phi = np.arange(n) * TWO_PI / n
    E, P = np.meshgrid(eta, phi, indexing="ij")
    return np.stack([np.cos(E / 2).ravel() + 0j, (np.sin(E / 2) * np.exp(1j * P)).ravel()], axis=1)


def surjectivity_gap(
    params: HopfParams, shape: tuple[int, int, int] = (64, 64, 16), targets: int = 32
) -> float:
    """Largest distance from a CP^1 grid point to the image of a sample grid
    (|xi1| = cos eta, phase of xi1, theta) of S^1 x S^3."""
    mono = monodromy(params)
    n_eta, n_phi, n_th = shape
    eta = np.linspace(0.0, math.pi / 2, n_eta)
    phi = np.arange(n_phi) * TWO_PI / n_phi
    th = np.arange(n_th) * TWO_PI / n_th
    E, P, T = np.meshgrid(eta, phi, th, indexing="ij")
    xi1 = np.cos(E) * np.exp(1j * P)
    xi2 = np.sin(E) + 0j
    w0, w1 = _map_arrays(mono, T, xi1, xi2)
    img = np.stack([w0.ravel(), w1.ravel()], axis=1)
    img /= np.linalg.norm(img, axis=1)[:, None]
    tgt = cp1_grid(targets)
    best = np.full(len(tgt), np.inf)
    for start in range(0, len(img), 8192):
        best = np.minimum(best, _fs_matrix(img[start : start + 8192], tgt).min(axis=0))
    return float(best.max())


def on_common_leaf(params: HopfParams, p: FramePoint, q: FramePoint, tol: float = 1e-9) -> bool:
    """Search one lattice cell of the plane-field leaf through p for q."""
    lat = lattice(params, certify=False)
    dtheta = (p.theta - q.theta) / (2.0 * TWO_PI)  # t with theta matching, modulo 1/2
    n_t = max(1, int(round(2 * lat.q_prime)))
    for j in range(n_t):
        t = dtheta + 0.5 * j
        if abs(p.xi1) > abs(p.xi2):
            phase = np.angle(q.xi1 / p.xi1)
            rate, drift = 2.0 * params.log_mod_alpha, 2.0 * params.arg_alpha * t
        else:
            phase = np.angle(q.xi2 / p.xi2)
            rate, drift = 2.0 * params.log_mod_beta, 2.0 * params.arg_beta * t
        # drift - rate*s = phase + 2 pi i, s within one w-period
        n_s = int(math.ceil(lat.w[1] * rate / TWO_PI)) + 1
        for i in range(-1, n_s + 1):
            s = (drift - phase - TWO_PI * i) / rate
            if point_distance(q, leaf_surface(params, p, t, s)) < tol:
                return True
    return False


def regularity(params: HopfParams) -> OrbifoldData:
    witness = elliptic_condition(params)
    if witness is None:
        data, cert = _rima(params)
        qual = None if cert else f"within tolerance (max_denominator {params.tolerances.max_denominator})"
        return OrbifoldData(False, False, None, None, cert, qual)
    qual = None if witness.certified else f"within tolerance (max_denominator {params.tolerances.max_denominator})"
    mult = {"generic": 1, "xi2_axis": witness.m, "xi1_axis": witness.n}
    return OrbifoldData(
        witness.m == 1 and witness.n == 1,
        True,
        (witness.m, witness.n),
        mult,
        witness.certified,
        qual,
    )


def stereographic(x) -> np.ndarray:
    """(x1, x2, x3) / (1 - x4) for a unit vector of R^4."""
    x = np.asarray(x, dtype=float)
    denom = 1.0 - x[..., 3]
    if np.any(np.abs(denom) <= 1e-12):
        raise PoleExcluded("stereographic projection is undefined at (0, 0, 0, 1)")
    return x[..., :3] / denom[..., None] if x.ndim > 1 else x[:3] / denom


def stereographic_point(p: FramePoint) -> np.ndarray:
    return stereographic(p.real4)

