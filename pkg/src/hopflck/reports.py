"""Machine-readable report documents emitted by the CLI."""

from __future__ import annotations

import json
from typing import Optional

from pydantic import BaseModel, ConfigDict


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ToleranceEcho(_Strict):
    root_tol: float
    derivative_step: float
    residual_tol: float
    rational_tol: float
    max_denominator: int


class ParamsEcho(_Strict):
    alpha: list[float]
    beta: list[float]
    log_mod_ratio: Optional[str]
    arg_alpha_over_pi: Optional[str]
    arg_beta_over_pi: Optional[str]
    exact_mode: bool


class LatticeSummary(_Strict):
    v: list[float]
    w: list[float]
    l: int
    k: int
    p: int
    q: int
    p_prime: str
    q_prime: str
    b: int
    lattice_c: int


class LeafSummary(_Strict):
    kind: str
    compact: bool
    period: Optional[float]
    knot_type: Optional[str]
    lattice: Optional[LatticeSummary]
    on_axis: Optional[int]
    projection: Optional[str]
    projection_type: Optional[str]
    certified: bool
    qualifier: Optional[str]


class FoliationEntry(_Strict):
    foliation: str
    location: str
    leaf: LeafSummary


class KnotSummary(_Strict):
    foliation: str
    value: Optional[str]
    status: str
    certified: bool


class WitnessSummary(_Strict):
    m: int
    n: int
    certified: bool


class MonodromySummary(_Strict):
    m: int
    n: int
    monodromy_c: int
    certified: bool


class Multiplicities(_Strict):
    generic: int
    xi2_axis: int
    xi1_axis: int


class OrbifoldSummary(_Strict):
    regular: bool
    quasi_regular: bool
    cone_orders: Optional[list[int]]
    multiplicities: Optional[Multiplicities]
    certified: bool
    qualifier: Optional[str]


class ClassifyReport(_Strict):
    command: str = "classify"
    params: ParamsEcho
    tolerances: ToleranceEcho
    point: list[float]
    foliations: list[FoliationEntry]
    knot_types: list[KnotSummary]
    elliptic: bool
    elliptic_witness: Optional[WitnessSummary]
    monodromy: Optional[MonodromySummary]
    orbifold: OrbifoldSummary
    certified: bool
    qualifiers: list[str]


class CheckResult(_Strict):
    name: str
    max_residual: float
    threshold: float
    passed: bool


class VerifyReport(_Strict):
    command: str = "verify"
    params: ParamsEcho
    tolerances: ToleranceEcho
    h: str
    samples: int
    sampling: str
    lck_residual: float
    positivity_violations: int
    vaisman: bool
    vaisman_residual: float
    checks: list[CheckResult]
    passed: bool


def dump(model: BaseModel) -> str:
    """Stable JSON text: declared field order, two-space indent, trailing newline."""
    return json.dumps(model.model_dump(mode="json"), indent=2, allow_nan=True) + "\n"


def classify_report_schema() -> dict:
    return ClassifyReport.model_json_schema()
