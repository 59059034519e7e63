from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import E2PI, GENERIC_POINT, PARAM_SETS, random_point
from hopflck.errors import InexactClassification, NotElliptic
from hopflck.foliations import (
    FoliationKind,
    classify_leaf,
    elliptic_condition,
    flow_anti_lee,
    flow_arrays,
    flow_lee,
    knot_info,
    knot_type,
    lattice,
    leaf_surface,
    period_oracle,
    point_distance,
)
from hopflck.frame import FramePoint, HopfParams, from_universal, frame_fields, to_universal
from hopflck.metrics import HSpec, MetricFamily, anti_lee_vector, lee_form, lee_vector

K = FoliationKind
F = Fraction


def close(p, q, tol=1e-10):
    return point_distance(p, q) < tol


# --- flows ------------------------------------------------------------------


def test_flow_lee_examples(params, rng):
    p = random_point(rng)
    assert close(flow_lee(params, p, 0.0), p)
    q = flow_lee(PARAM_SETS["real-equal"], FramePoint(0, 1, 0), 0.5)
    assert close(q, FramePoint(0, 1, 0))
    for t in rng.uniform(-5, 5, size=10):
        r = flow_lee(params, p, t)
        assert abs(abs(r.xi1) - abs(p.xi1)) < 1e-14 and abs(abs(r.xi2) - abs(p.xi2)) < 1e-14


def test_flow_lee_matches_universal_cover(params, rng):
    # in C^2 the Lee flow is z(t) = z0 exp(-2 t log|a|), and similarly for beta
    for _ in range(20):
        p = random_point(rng)
        t = rng.uniform(-0.3, 0.3)
        z = to_universal(params, p)
        w = (z[0] * math.exp(-2 * t * params.log_mod_alpha), z[1] * math.exp(-2 * t * params.log_mod_beta))
        assert close(flow_lee(params, p, t), from_universal(params, w))


def test_flow_anti_lee_examples(params, rng):
    p = random_point(rng)
    assert close(flow_anti_lee(params, p, 0.0), p)
    for s in rng.uniform(-5, 5, size=10):
        assert flow_anti_lee(params, p, s).theta == p.theta
    prm = HopfParams.exact(F(5, 3), 3.0, 0, 0)
    assert close(flow_anti_lee(prm, GENERIC_POINT, math.pi), GENERIC_POINT)


def test_leaf_surface_examples(params, rng):
    p = random_point(rng)
    t, s = rng.uniform(-3, 3, size=2)
    assert close(leaf_surface(params, p, t, 0.0), flow_lee(params, p, t))
    assert close(leaf_surface(params, p, 0.0, s), flow_anti_lee(params, p, s))
    assert close(leaf_surface(params, p, t, s), flow_anti_lee(params, flow_lee(params, p, t), s))
    assert close(leaf_surface(params, p, t, s), flow_lee(params, flow_anti_lee(params, p, s), t))
    assert close(leaf_surface(PARAM_SETS["4-2"], p, 0.5, 0.0), p, 1e-12)


def _ambient_velocity(params, p, flow, eps=1e-5):
    a = flow(params, p, eps)
    b = flow(params, p, -eps)
    dth = (a.theta_lift - b.theta_lift) / (2 * eps)
    return np.concatenate([[dth], (a.real4 - b.real4) / (2 * eps)])


def test_flows_are_tangent_to_B_and_JB(params, rng):
    f = MetricFamily(params, HSpec.constant(2.0))
    for _ in range(10):
        p = random_point(rng)
        fr = frame_fields(p)
        assert np.allclose(_ambient_velocity(params, p, flow_lee), lee_vector(f, p) @ fr, atol=1e-6)
        assert np.allclose(_ambient_velocity(params, p, flow_anti_lee), anti_lee_vector(f, p) @ fr, atol=1e-6)


def test_lee_form_annihilates_sphere_slices(params, rng):
    f = MetricFamily(params, HSpec(2.0, (), (1.0,)))
    for _ in range(10):
        p = random_point(rng)
        om = lee_form(f, p)
        for v in np.eye(4)[1:]:
            assert om @ v == 0.0


# --- classification ---------------------------------------------------------


def test_kernel_lee_is_sphere_slice(params):
    assert classify_leaf(params, GENERIC_POINT, K.KERNEL_LEE).kind == "Sphere3Slice"


def test_plane_example_elliptic_real():
    prm = HopfParams.exact(F(2), math.pi, 0, 0)
    assert prm.alpha == pytest.approx(E2PI)
    leaf = classify_leaf(prm, GENERIC_POINT, K.LEE_ANTI_LEE_PLANE)
    assert leaf.kind == "CompactTorus" and leaf.certified
    assert (leaf.lattice.l, leaf.lattice.k) == (2, 1)


def test_anti_lee_dense_when_log_ratio_irrational():
    prm = HopfParams.exact("irr", 1.0, "irr", F(1, 3))
    leaf = classify_leaf(prm, GENERIC_POINT, K.ANTI_LEE_FLOW)
    assert leaf.kind == "DenseIn2Torus" and leaf.certified and not leaf.compact


@pytest.mark.parametrize("alpha", [2, 3j, -5 + 1j, E2PI])
def test_alpha_equal_beta_plane_compact(alpha, rng):
    prm = HopfParams(alpha, alpha)
    for p in (GENERIC_POINT, random_point(rng), FramePoint(0, 1, 0)):
        assert classify_leaf(prm, p, K.LEE_ANTI_LEE_PLANE).compact
    irr = HopfParams.exact(1, 1.0, "irr", "irr:0.6180339887498949")
    assert classify_leaf(irr, GENERIC_POINT, K.LEE_ANTI_LEE_PLANE).kind == "CompactTorus"


def test_lee_axis_leaves():
    prm = HopfParams.exact(F(3, 2), 1.0, F(1, 3), "irr")
    a1 = classify_leaf(prm, FramePoint(0.2, 1, 0), K.LEE_FLOW)
    assert a1.kind == "CircleCompact" and a1.on_axis == 1 and a1.period == pytest.approx(3.0)
    a2 = classify_leaf(prm, FramePoint(0.2, 0, 1), K.LEE_FLOW)
    assert a2.kind == "DenseInAxisTorus" and a2.on_axis == 2
    al = classify_leaf(prm, FramePoint(0.2, 0, 1), K.ANTI_LEE_FLOW)
    assert al.kind == "CircleCompact" and al.period == pytest.approx(math.pi / prm.log_mod_beta)
    pl = classify_leaf(prm, FramePoint(0.2, 1, 0), K.LEE_ANTI_LEE_PLANE)
    assert pl.kind == "CompactTorus" and pl.on_axis == 1 and pl.lattice is None


def test_lee_noncompact_projection_info():
    same = HopfParams.exact(F(3, 2), 1.0, "irr:0.3", "irr:0.3")
    leaf = classify_leaf(same, GENERIC_POINT, K.LEE_FLOW)
    assert leaf.kind == "DenseIn2Torus" and leaf.projection == "toral-knot"
    assert leaf.projection_type == F(1) and leaf.certified
    one = HopfParams.exact(F(3, 2), 1.0, "irr", F(1, 4))
    leaf = classify_leaf(one, GENERIC_POINT, K.LEE_FLOW)
    assert leaf.kind == "DenseIn2Torus" and leaf.projection == "dense" and leaf.certified
    gen = HopfParams.exact(F(3, 2), 1.0, "irr", "irr")
    assert classify_leaf(gen, GENERIC_POINT, K.LEE_FLOW).kind == "DenseIn3Torus"


def test_floating_verdicts_are_tagged():
    prm = HopfParams(2j, 2)
    leaf = classify_leaf(prm, GENERIC_POINT, K.LEE_FLOW)
    assert leaf.kind == "CircleCompact" and not leaf.certified
    assert leaf.qualifier == "within tolerance (max_denominator 1000000)"
    with pytest.raises(InexactClassification) as info:
        classify_leaf(prm, GENERIC_POINT, K.LEE_FLOW, strict=True)
    assert info.value.verdict == leaf


def test_near_axis_follows_generic_branch():
    prm = HopfParams.exact(F(3, 2), 1.0, "irr", F(1, 4))
    p = FramePoint(0, 1.0, 1e-9)
    assert classify_leaf(prm, p, K.LEE_FLOW).on_axis is None


# --- knot types -------------------------------------------------------------


def test_knot_type_examples():
    prm = HopfParams.exact(F(5, 3), 3.0, 0, 0)
    assert knot_type(prm, K.ANTI_LEE_FLOW) == F(5, 3)
    fig = HopfParams.exact(F(2), 1.0, F(-3, 10), F(1, 2))
    assert knot_type(fig, K.LEE_FLOW) == F(-3, 5)
    info = knot_info(HopfParams(E2PI, E2PI), K.LEE_FLOW)
    assert info.value is None and info.status == "degenerate"
    assert knot_type(HopfParams.exact("irr", 1.0, 0, 0), K.ANTI_LEE_FLOW) is None
    with pytest.raises(ValueError):
        knot_type(prm, K.KERNEL_LEE)


def _crossings(angle_rate, period, n=20001):
    # number of times the phase t -> angle_rate * t crosses 0 mod 2 pi over one period
    ts = np.linspace(0, period, n)
    turns = np.floor(angle_rate * ts / (2 * math.pi) + 1e-9)
    return int(abs(turns[-1] - turns[0]))


@pytest.mark.parametrize(
    "l,k",
    [(l, k) for l in range(-7, 8) for k in range(1, 8) if l != 0 and math.gcd(l, k) == 1][::3],
)
def test_lee_knot_winding_counts(l, k):
    # arg alpha / arg beta = l / k with both arguments rational multiples of pi
    a, b = F(l, 8), F(k, 8)
    prm = HopfParams.exact(1, 1.0, a, b)
    assert knot_type(prm, K.LEE_FLOW) == F(l, k)
    # the projected curve on T closes after l pi / arg alpha; t1 winds |l| times and t2 winds k times
    period = abs(l) * math.pi / prm.arg_alpha
    assert _crossings(2 * prm.arg_alpha, period) == abs(l)
    assert _crossings(2 * prm.arg_beta, period) == k


@pytest.mark.parametrize("l,k", [(5, 3), (7, 2), (3, 1), (7, 6), (4, 3)])
def test_anti_lee_knot_winding_counts(l, k):
    prm = HopfParams.exact(F(l, k), 0.7, 0, 0)
    leaf = classify_leaf(prm, GENERIC_POINT, K.ANTI_LEE_FLOW)
    assert leaf.knot_type == F(l, k)
    assert _crossings(2 * prm.log_mod_alpha, leaf.period) == l
    assert _crossings(2 * prm.log_mod_beta, leaf.period) == k


# --- ellipticity and lattices -----------------------------------------------


def test_elliptic_condition_examples():
    w = elliptic_condition(HopfParams(4, 2))
    assert (w.m, w.n) == (1, 2)
    w = elliptic_condition(HopfParams(2j, 2))
    assert (w.m, w.n) == (4, 4)
    w = elliptic_condition(HopfParams(3 - 1j, 3 - 1j))
    assert (w.m, w.n) == (1, 1)
    assert elliptic_condition(HopfParams.exact("irr", 1.0, 0, 0)) is None
    assert elliptic_condition(HopfParams.exact(F(2), 1.0, "irr", 0)) is None


@settings(max_examples=60, deadline=None)
@given(
    st.integers(1, 6), st.integers(1, 6), st.integers(-11, 12), st.integers(1, 12), st.integers(-11, 12), st.integers(1, 12)
)
def test_elliptic_witness_is_minimal(l, k, pa, qa, pb, qb):
    if math.gcd(l, k) != 1 or l < k:
        return
    prm = HopfParams.exact(F(l, k), 0.5, F(pa, qa), F(pb, qb))
    w = elliptic_condition(prm)
    assert w is not None
    assert abs(prm.alpha**w.m - prm.beta**w.n) < 1e-9 * abs(prm.beta**w.n)
    assert F(w.n, w.m) == F(l, k)
    # no smaller multiple of (k, l) works
    for j in range(1, w.m // k):
        m, n = j * k, j * l
        assert abs(prm.alpha**m - prm.beta**n) > 1e-6 * abs(prm.beta**n)


def test_lattice_examples():
    lat = lattice(HopfParams(4, 2))
    assert (lat.l, lat.k, lat.p, lat.q) == (2, 1, 0, 1)
    assert lat.v == pytest.approx((0.5, 0.0)) and lat.w == pytest.approx((0.0, math.pi / math.log(2)))
    lat = lattice(HopfParams(2j, 2))
    assert (lat.l, lat.k, lat.p, lat.q, lat.p_prime, lat.q_prime, lat.b, lat.lattice_c) == (1, 1, 1, 2, 1, 2, 1, 0)
    assert lat.v == pytest.approx((2.0, 0.0)) and lat.w == pytest.approx((0.0, math.pi / math.log(2)))
    lat = lattice(HopfParams(3, 3))
    assert lat.v == pytest.approx((0.5, 0.0)) and lat.w == pytest.approx((0.0, math.pi / math.log(3)))
    with pytest.raises(NotElliptic):
        lattice(HopfParams.exact("irr", 1.0, 0, 0))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.integers(-7, 8), st.integers(1, 8), st.integers(-7, 8), st.integers(1, 8))
def test_lattice_invariants_and_periods(l, k, pa, qa, pb, qb):
    if math.gcd(l, k) != 1 or l < k:
        return
    prm = HopfParams.exact(F(l, k), 0.9, F(pa, qa), F(pb, qb))
    lat = lattice(prm, samples=3)
    assert lat.b * lat.k - lat.lattice_c * lat.l == 1 and lat.lattice_c >= 0
    assert lat.p == 0 or math.gcd(lat.p, lat.q) == 1
    assert abs(lat.v[0] * lat.w[1] - lat.v[1] * lat.w[0]) > 1e-9
    p0 = GENERIC_POINT
    for t, s in (lat.v, lat.w, (lat.v[0] + lat.w[0], lat.v[1] + lat.w[1])):
        assert point_distance(p0, leaf_surface(prm, p0, t, s)) < 1e-9
    for t, s in ((lat.v[0] / 2, lat.v[1] / 2), (lat.w[0] / 2, lat.w[1] / 2), ((lat.v[0] + lat.w[0]) / 2, (lat.v[1] + lat.w[1]) / 2)):
        assert point_distance(p0, leaf_surface(prm, p0, t, s)) > 1e-3


# --- period oracle ----------------------------------------------------------


def test_period_oracle_examples():
    prm = HopfParams(E2PI, E2PI)
    t = period_oracle(prm, FramePoint(0, 1, 0), K.LEE_FLOW)
    assert t == pytest.approx(0.5, abs=1e-9)
    prm = HopfParams.exact(F(5, 3), 3.0, 0, 0)
    assert period_oracle(prm, GENERIC_POINT, K.ANTI_LEE_FLOW) == pytest.approx(math.pi, abs=1e-9)
    prm = HopfParams.exact("irr", 1.0, 0, 0)
    assert period_oracle(prm, GENERIC_POINT, K.ANTI_LEE_FLOW, t_max=100) is None


def test_period_oracle_rejects_two_dimensional_kinds():
    with pytest.raises(ValueError):
        flow_arrays(PARAM_SETS["4-2"], GENERIC_POINT, K.LEE_ANTI_LEE_PLANE, [0.0])


def test_foliation_kind_parse():
    assert K.parse("anti-lee") is K.ANTI_LEE_FLOW
    assert K.parse("LeeAntiLeePlane") is K.LEE_ANTI_LEE_PLANE
    with pytest.raises(ValueError):
        K.parse("bogus")
