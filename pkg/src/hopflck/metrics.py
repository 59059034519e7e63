"""Hermitian metrics on (S^1 x S^3, J_{alpha,beta}) and their l.c.K. data.

A metric is given by a hermitian 2x2 matrix H in the complex basis
(e2, e3).  With u_X the complex coordinates of X (see
frame.complex_coords), the hermitian form is H(X, Y) = u_X^T H conj(u_Y)
(complex linear in X), the Riemannian metric is g = Re H and the
fundamental form is Omega(X, Y) = g(JX, Y).

Every routine below that takes a ``family`` works with any object exposing
``params``, ``matrix(p) -> HermitianMetric`` and ``lee_coefficient(theta)``
(the Lee form being -lee_coefficient(theta) e^1).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import IllConditioned, NonPositiveH, ParamMismatch
from .frame import (
    TWO_PI,
    FramePoint,
    HopfParams,
    G_value,
    J_matrix,
    bracket_table,
    frame_complex_coords,
    frame_flow,
    sample_points,
)
from .numerics import DEFAULT_TOLERANCES, ToleranceConfig, directional_derivative

_BRACKETS = bracket_table()
_POSITIVITY_GRID = np.linspace(0.0, TWO_PI, 4096, endpoint=False)


@dataclass(frozen=True)
class HSpec:
    """Positive 2pi-periodic function a0 + sum(a_n cos n t + b_n sin n t)."""

    a0: float
    cos: tuple = ()
    sin: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "cos", tuple(float(c) for c in self.cos))
        object.__setattr__(self, "sin", tuple(float(s) for s in self.sin))
        lo = float(np.min(self(_POSITIVITY_GRID)))
        if not lo > 0:
            raise NonPositiveH(f"h has minimum {lo!r} <= 0 on the sample grid")

    @classmethod
    def constant(cls, value: float) -> "HSpec":
        return cls(float(value))

    @classmethod
    def parse(cls, text: str) -> "HSpec":
        """``const:2`` or ``fourier:a0,a1,b1,a2,b2,...``."""
        kind, _, body = text.partition(":")
        kind = kind.strip().lower()
        nums = [float(x) for x in re.split(r"[,\s]+", body.strip()) if x]
        if kind == "const" and len(nums) == 1:
            return cls.constant(nums[0])
        if kind == "fourier" and nums:
            rest = nums[1:] + [0.0] * (len(nums[1:]) % 2)
            return cls(nums[0], tuple(rest[0::2]), tuple(rest[1::2]))
        raise ValueError(f"cannot parse h spec {text!r}")

    @property
    def is_constant(self) -> bool:
        return not any(self.cos) and not any(self.sin)

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        out = np.full(theta.shape, self.a0)
        for n, a in enumerate(self.cos, start=1):
            out = out + a * np.cos(n * theta)
        for n, b in enumerate(self.sin, start=1):
            out = out + b * np.sin(n * theta)
        return float(out) if out.ndim == 0 else out

    def derivative(self, theta):
        theta = np.asarray(theta, dtype=float)
        out = np.zeros(theta.shape)
        for n, a in enumerate(self.cos, start=1):
            out = out - n * a * np.sin(n * theta)
        for n, b in enumerate(self.sin, start=1):
            out = out + n * b * np.cos(n * theta)
        return float(out) if out.ndim == 0 else out

    def describe(self) -> str:
        if self.is_constant:
            return f"const:{self.a0!r}"
        coeffs = [self.a0]
        for n in range(max(len(self.cos), len(self.sin))):
            coeffs.append(self.cos[n] if n < len(self.cos) else 0.0)
            coeffs.append(self.sin[n] if n < len(self.sin) else 0.0)
        return "fourier:" + ",".join(repr(c) for c in coeffs)


KappaSpec = HSpec


@dataclass(frozen=True)
class HermitianMetric:
    h11: float
    h12: complex
    h22: float

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.h11, self.h12], [self.h12.conjugate(), self.h22]], dtype=complex)

    @property
    def det(self) -> float:
        return self.h11 * self.h22 - abs(self.h12) ** 2

    def is_positive_definite(self) -> bool:
        return self.h11 > 0 and self.det > 0


# ---------------------------------------------------------------------------
# metric families


@dataclass(frozen=True)
class MetricFamily:
    """The metrics g^h_{alpha,beta}, h a positive function of theta."""

    params: HopfParams
    h: HSpec

    def matrix(self, p: FramePoint) -> HermitianMetric:
        return metric_matrix(self, p)

    def lee_coefficient(self, theta: float) -> float:
        return self.h(theta)


@dataclass(frozen=True)
class DiagonalFamily:
    """diag(k(theta), 1) in the basis (e2, e3); requires |alpha| == |beta|."""

    params: HopfParams
    kappa: KappaSpec

    def __post_init__(self):
        if not self.params.equal_moduli():
            raise ParamMismatch("the diagonal family needs |alpha| == |beta|")

    def matrix(self, p: FramePoint) -> HermitianMetric:
        return HermitianMetric(float(self.kappa(p.theta)), 0j, 1.0)

    def lee_coefficient(self, theta: float) -> float:
        return self.kappa(theta) * self.params.log_mod_alpha / math.pi

    def equivalent_family(self) -> MetricFamily:
        """The g^h family with h = k log|alpha| / pi (equal up to 1/log|alpha|)."""
        scale = self.params.log_mod_alpha / math.pi
        k = self.kappa
        return MetricFamily(self.params, HSpec(k.a0 * scale, tuple(c * scale for c in k.cos), tuple(s * scale for s in k.sin)))


@dataclass(frozen=True)
class PerturbedFamily:
    """Negative control: H11 multiplied by (1 + eps |xi1|^2), Lee form kept."""

    base: MetricFamily
    eps: float = 0.1

    @property
    def params(self) -> HopfParams:
        return self.base.params

    def matrix(self, p: FramePoint) -> HermitianMetric:
        m = self.base.matrix(p)
        return HermitianMetric(m.h11 * (1.0 + self.eps * abs(p.xi1) ** 2), m.h12, m.h22)

    def lee_coefficient(self, theta: float) -> float:
        return self.base.lee_coefficient(theta)


def metric_matrix(family: MetricFamily, p: FramePoint) -> HermitianMetric:
    params = family.params
    G = G_value(params, p)
    re = G.real
    m = params.log_mod_alpha - params.log_mod_beta
    r1, r2 = abs(p.xi1) ** 2, abs(p.xi2) ** 2
    w = p.xi1 * p.xi2
    h11 = math.pi * family.h(p.theta) / re**2 + r1 * r2 * m * m / re**3
    h12 = 1j * w * m / re**2
    return HermitianMetric(h11, h12, 1.0 / re)


def diagonal_family_matrix(params: HopfParams, kappa: KappaSpec, p: FramePoint) -> HermitianMetric:
    return DiagonalFamily(params, kappa).matrix(p)


# ---------------------------------------------------------------------------
# pointwise tensors in the frame


@dataclass
class PointTensors:
    """g(e_i, e_j), Omega(e_i, e_j) and J at one point."""

    gram: np.ndarray
    omega2: np.ndarray
    J: np.ndarray


def point_tensors(family, p: FramePoint) -> PointTensors:
    J = J_matrix(family.params, p)
    U = frame_complex_coords(family.params, p, J)
    H = family.matrix(p).matrix
    gram = (U.T @ H @ U.conj()).real
    gram = 0.5 * (gram + gram.T)
    return PointTensors(gram, J.T @ gram, J)


def gram_matrix(family, p: FramePoint) -> np.ndarray:
    return point_tensors(family, p).gram


def metric_eval(family, p: FramePoint, X, Y) -> float:
    """g(X, Y) = Re(u_X^T H conj(u_Y))."""
    from .frame import complex_coords

    ux = np.array(complex_coords(family.params, p, X))
    uy = np.array(complex_coords(family.params, p, Y))
    return float((ux @ family.matrix(p).matrix @ uy.conj()).real)


def fundamental_form(family, p: FramePoint, X, Y) -> float:
    """Omega(X, Y) = g(JX, Y)."""
    J = J_matrix(family.params, p)
    return metric_eval(family, p, J @ np.asarray(X, dtype=float), Y)


def fundamental_form_expansion(family: MetricFamily, p: FramePoint) -> np.ndarray:
    """Omega(e_i, e_j) from its closed-form e^{ij} expansion (4x4 antisymmetric),
    normalised so that the e^{34} coefficient is 1/Re G."""
    params = family.params
    re = G_value(params, p).real
    w = p.xi1 * p.xi2
    kk = params.log_mod_alpha * params.arg_beta - params.log_mod_beta * params.arg_alpha
    m = params.log_mod_alpha - params.log_mod_beta
    c = 1.0 / (2.0 * re)
    E = np.zeros((4, 4))
    E[0, 1] = c * family.h(p.theta)
    E[0, 2] = -c * w.real * kk / (math.pi * re)
    E[0, 3] = -c * w.imag * kk / (math.pi * re)
    E[1, 2] = -c * 2.0 * w.real * m / re
    E[1, 3] = -c * 2.0 * w.imag * m / re
    E[2, 3] = c * 2.0
    return E - E.T


# ---------------------------------------------------------------------------
# Lee data


def lee_form(family, p: FramePoint) -> np.ndarray:
    return np.array([-family.lee_coefficient(p.theta), 0.0, 0.0, 0.0])


def lee_vector(family: MetricFamily, p: FramePoint) -> np.ndarray:
    """B = -4pi e1 + 2 Im G e2 + 2 Im(xi1 xi2) arg(a/b) e3 - 2 Re(xi1 xi2) arg(a/b) e4.

    Independent of h; arg(alpha/beta) is arg(alpha) - arg(beta).
    """
    params = family.params
    G = G_value(params, p)
    w = p.xi1 * p.xi2
    da = params.arg_alpha - params.arg_beta
    return np.array([-2.0 * TWO_PI, 2.0 * G.imag, 2.0 * w.imag * da, -2.0 * w.real * da])


def anti_lee_vector(family: MetricFamily, p: FramePoint) -> np.ndarray:
    """JB = -2 Re G e2 - 2 Im(xi1 xi2) log|a/b| e3 + 2 Re(xi1 xi2) log|a/b| e4."""
    params = family.params
    G = G_value(params, p)
    w = p.xi1 * p.xi2
    m = params.log_mod_alpha - params.log_mod_beta
    return np.array([0.0, -2.0 * G.real, -2.0 * w.imag * m, 2.0 * w.real * m])


def metric_dual(family, p: FramePoint, covector) -> np.ndarray:
    """The vector X with g(X, .) = covector."""
    return np.linalg.solve(gram_matrix(family, p), np.asarray(covector, dtype=float))


# ---------------------------------------------------------------------------
# l.c.K. verification


@dataclass
class LckReport:
    samples: int
    max_d_omega: float
    max_d_Omega_residual: float
    positivity_violations: int
    worst_point: Optional[FramePoint] = field(default=None, repr=False)

    @property
    def max_residual(self) -> float:
        return max(self.max_d_omega, self.max_d_Omega_residual)

    def passed(self, tol: float) -> bool:
        return self.max_residual < tol and self.positivity_violations == 0


def _frame_derivatives(fn, p: FramePoint, step: float, stencil: int) -> list:
    """[e_i(fn)(p) for i = 1..4] for array-valued fn."""
    return [directional_derivative(fn, i, p, step, stencil) for i in range(1, 5)]


def lck_residuals(family, p: FramePoint, step: float = 1e-4) -> tuple[float, float]:
    """(max |d omega(e_i, e_j)|, max |(d Omega - omega ^ Omega)(e_i, e_j, e_k)|) at p."""
    Om = point_tensors(family, p).omega2
    dOm = _frame_derivatives(lambda q: point_tensors(family, q).omega2, p, step, 2)
    om = lee_form(family, p)
    dom = _frame_derivatives(lambda q: lee_form(family, q), p, step, 2)

    d_omega = 0.0
    for i in range(4):
        for j in range(i + 1, 4):
            val = dom[i][j] - dom[j][i] - om @ _BRACKETS[i, j]
            d_omega = max(d_omega, abs(val))

    def brk(a, b, c):
        # Omega([e_a, e_b], e_c)
        return _BRACKETS[a, b] @ Om[:, c]

    resid = 0.0
    for i in range(4):
        for j in range(i + 1, 4):
            for k in range(j + 1, 4):
                d = (
                    dOm[i][j, k] + dOm[j][k, i] + dOm[k][i, j]
                    - brk(i, j, k) - brk(j, k, i) - brk(k, i, j)
                )
                wedge = om[i] * Om[j, k] + om[j] * Om[k, i] + om[k] * Om[i, j]
                resid = max(resid, abs(d - wedge))
    return d_omega, resid


def verify_lck(
    family,
    sample_count: int = 200,
    config: ToleranceConfig = DEFAULT_TOLERANCES,
    seedless: bool = False,
) -> LckReport:
    """Check d omega = 0 and d Omega = omega ^ Omega on quasi-random points."""
    worst, worst_p = -1.0, None
    max_dw = max_res = 0.0
    violations = 0
    for p in sample_points(sample_count, seedless):
        if not family.matrix(p).is_positive_definite():
            violations += 1
        dw, res = lck_residuals(family, p, config.derivative_step)
        max_dw, max_res = max(max_dw, dw), max(max_res, res)
        if max(dw, res) > worst:
            worst, worst_p = max(dw, res), p
    return LckReport(sample_count, max_dw, max_res, violations, worst_p)


# ---------------------------------------------------------------------------
# Levi-Civita connection (Koszul formula on the frame)


def connection(family, p: FramePoint, step: float = 1e-4, stencil: int = 4) -> np.ndarray:
    """nabla[i, j] = nabla_{e_{i+1}} e_{j+1} as frame vectors, shape (4, 4, 4)."""
    G = gram_matrix(family, p)
    if np.linalg.cond(G) > 1e12:
        raise IllConditioned("Gram matrix condition number exceeds 1e12")
    dG = _frame_derivatives(lambda q: gram_matrix(family, q), p, step, stencil)
    # Cg[i, j, k] = g([e_i, e_j], e_k)
    Cg = np.einsum("ijm,mk->ijk", _BRACKETS, G)
    K = np.zeros((4, 4, 4))
    for i in range(4):
        for j in range(4):
            for k in range(4):
                K[i, j, k] = 0.5 * (
                    dG[i][j, k] + dG[j][i, k] - dG[k][i, j]
                    + Cg[i, j, k] - Cg[j, k, i] + Cg[k, i, j]
                )
    return np.linalg.solve(G, K.reshape(16, 4).T).T.reshape(4, 4, 4)


def levi_civita(family, p: FramePoint, i: int, j: int, step: float = 1e-4) -> np.ndarray:
    """nabla_{e_i} e_j (1-based indices)."""
    return connection(family, p, step)[i - 1, j - 1]


def nabla_lee(family, p: FramePoint, step: float = 1e-4) -> np.ndarray:
    """N[i, j] = (nabla_{e_i} omega)(e_j) = e_i(omega(e_j)) - omega(nabla_{e_i} e_j)."""
    nab = connection(family, p, step)
    om = lee_form(family, p)
    dom = _frame_derivatives(lambda q: lee_form(family, q), p, step, 4)
    return np.array([[dom[i][j] - om @ nab[i, j] for j in range(4)] for i in range(4)])


def nabla_lee_closed_form(family: MetricFamily, p: FramePoint) -> np.ndarray:
    """Closed-form (nabla_{e_i} omega)(e_j) = g(nabla_{e_i} B, e_j) for g^h."""
    G = G_value(family.params, p)
    re2 = G.real**2
    dh = family.h.derivative(p.theta)
    N = np.zeros((4, 4))
    N[0, 0] = -dh * abs(G) ** 2 / (2.0 * re2)
    N[1, 1] = -2.0 * dh * math.pi**2 / re2
    N[0, 1] = N[1, 0] = -dh * G.imag * math.pi / re2
    return N


def diagonal_nabla_lee_closed_form(params: HopfParams, kappa: KappaSpec, theta: float) -> np.ndarray:
    """Closed-form nabla omega for diag(k, 1) when |alpha| == |beta|."""
    dk = kappa.derivative(theta)
    la = params.log_mod_alpha
    im = params.arg_alpha if params.alpha == params.beta else None
    N = np.zeros((4, 4))
    if im is None:
        raise ParamMismatch("closed form stated for alpha == beta only")
    mod2 = la * la + im * im
    N[0, 0] = -dk * mod2 / (2.0 * math.pi * la)
    N[0, 1] = N[1, 0] = -dk * im / la
    N[1, 1] = -2.0 * math.pi * dk / la
    return N


def cartan_connection_table(params: HopfParams, kappa: KappaSpec, theta: float) -> np.ndarray:
    """Connection forms theta_j^k of diag(k, 1) for alpha == beta.

    Returns Gamma[i, j, k] = theta_j^k(e_i), i.e. nabla_{e_i} e_j = sum_k Gamma[i, j, k] e_k.
    """
    if params.alpha != params.beta:
        raise ParamMismatch("the connection-form table is stated for alpha == beta")
    k = float(kappa(theta))
    dk = float(kappa.derivative(theta))
    la = params.log_mod_alpha
    arg = params.arg_alpha
    la2 = la * la
    mod2 = la2 + arg * arg
    pi = math.pi
    T = np.zeros((4, 4, 4))  # T[j, k] = coefficients of theta_j^k on e^1..e^4

    def form(j, kk, coeffs):
        T[j - 1, kk - 1] = coeffs

    form(1, 1, [dk * (la2 - arg * arg) / (2 * k * la2), -pi * dk * arg / (k * la2), 0, 0])
    form(2, 1, [-pi * dk * arg / (k * la2), -2 * pi * pi * dk / (k * la2), 0, 0])
    form(1, 2, [dk * mod2 * arg / (4 * pi * k * la2), dk * mod2 / (2 * k * la2), 0, 0])
    form(2, 2, [dk * mod2 / (2 * k * la2), pi * dk * arg / (k * la2), 0, 0])
    form(3, 2, [0, 0, 0, 1])
    form(2, 3, [0, 0, 0, -k])
    form(2, 4, [0, 0, k, 0])
    form(4, 2, [0, 0, -1, 0])
    form(4, 3, [-k * arg / (2 * pi), 2 - k, 0, 0])
    form(1, 3, [0, 0, 0, -k * arg / (2 * pi)])
    form(1, 4, [0, 0, k * arg / (2 * pi), 0])
    form(3, 4, [k * arg / (2 * pi), k - 2, 0, 0])
    return np.transpose(T, (2, 0, 1))


@dataclass
class VaismanVerdict:
    verdict: bool
    max_residual: float


def is_vaisman(
    family, sample_count: int = 64, threshold: float = 1e-6, step: float = 1e-4, seedless: bool = False
) -> VaismanVerdict:
    worst = 0.0
    for p in sample_points(sample_count, seedless):
        worst = max(worst, float(np.linalg.norm(nabla_lee(family, p, step))))
    return VaismanVerdict(worst < threshold, worst)


# ---------------------------------------------------------------------------
# the invariant metric on C^2 - 0 (|alpha| == |beta|)


def universal_theta(params: HopfParams, z: Sequence[complex]) -> float:
    """theta(z) when |alpha| == |beta|: |z|^2 = exp(theta log|alpha| / pi)."""
    n2 = abs(z[0]) ** 2 + abs(z[1]) ** 2
    return math.pi * math.log(n2) / params.log_mod_alpha


def invariant_metric_universal(params: HopfParams, kappa: KappaSpec, z: Sequence[complex]) -> np.ndarray:
    """Coefficients M[a, b] of dz_a (x) dz_b-bar for the metric of diag(k, 1).

    The hermitian form on tangent vectors U, V of C^2 - 0 is U^T M conj(V).
    """
    if not params.equal_moduli():
        raise ParamMismatch("the invariant metric needs |alpha| == |beta|")
    z1, z2 = complex(z[0]), complex(z[1])
    k = float(kappa(universal_theta(params, (z1, z2))))
    n2 = abs(z1) ** 2 + abs(z2) ** 2
    M = np.array(
        [
            [k * abs(z1) ** 2 + abs(z2) ** 2, (k - 1) * z2 * z1.conjugate()],
            [(k - 1) * z1 * z2.conjugate(), abs(z1) ** 2 + k * abs(z2) ** 2],
        ],
        dtype=complex,
    )
    return M / n2**2
