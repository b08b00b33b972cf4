"""Pydantic request/response schemas for the evaluation service."""

from __future__ import annotations

from pydantic import BaseModel, Field, model_validator


class SchemeSpec(BaseModel):
    """Wire form of a scheme parameter set."""

    scheme: str = Field(description="'sng' or 'cmb'")
    d_out: int
    d_x: int
    d_z: int
    d_m: int
    p: float = 1e-3
    r_y: float = 0.1
    d_cult: int | None = None
    n_m: int | None = None
    c_gap: float | None = None
    t_intv: float | None = None
    t_idle: float | None = None
    q_cult: float | None = None

    @model_validator(mode="after")
    def _check_variant(self):
        if self.scheme not in ("sng", "cmb"):
            raise ValueError("scheme must be 'sng' or 'cmb'")
        return self


class CostResponse(BaseModel):
    scheme: str
    space: int
    time: float
    d_h: int
    d_v: int
    n_m_side: int


class InfidelityRequest(BaseModel):
    params: SchemeSpec
    schedule: list[list[str]] | None = None
    grow_table_csv: str | None = None
    # JSON object with the seven ansatz fields, or one object per setting
    ansatz_json: str | None = None
    seed: int = 0


class InfidelityResponse(BaseModel):
    scheme: str
    p: float
    r_y: float
    q_dist_exact: float
    q_dist_analytic: float
    q_succ: float
    q_succ_analytic: float
    space: int
    time: float
    effective_spacetime: float
    dims: dict[str, int]
    t_intv: float | None = None
    t_idle: float | None = None
    diagnostics: dict


class SweepRequest(BaseModel):
    scheme: str = "sng"
    d_out: list[int]
    d_x: list[int]
    d_z: list[int]
    d_m: list[int]
    p: float = 1e-3
    r_y: float = 0.1
    d_cult: int | None = None
    n_m: int | None = None
    c_gap: float | None = None
    t_intv: float | None = None
    t_idle: float | None = None


class SweepResponse(BaseModel):
    reports: list[InfidelityResponse]
    frontier: list[InfidelityResponse]


class VerifyLayoutRequest(BaseModel):
    d_out: int
    d_x: int
    d_z: int
    d_m: int
    schedule: list[list[str]] | None = None
    combined_prestages: bool = False


class VerifyLayoutResponse(BaseModel):
    distance_preserving: bool
    pairing_violations: list[dict]
    layout_violations: list[dict]


class SchedulesRequest(BaseModel):
    length: int = 7
    count_only: bool = False


class SchedulesResponse(BaseModel):
    count: int
    schedules: list[str]


class CycleSimRequest(BaseModel):
    n_m: int
    d_m: int
    d_cult: int
    p: float | None = None
    t_cult: int | None = None
    q_cult_succ: float | None = None
    p_acc: float | None = None
    c_gap: float | None = None
    seed: int = 0
    n_stages: int = 1000

    @model_validator(mode="after")
    def _check_sources(self):
        if self.q_cult_succ is None and self.p is None:
            raise ValueError("need q_cult_succ or p (for bundled defaults)")
        if self.p_acc is None and (self.p is None or self.c_gap is None):
            raise ValueError("need p_acc, or p and c_gap for table lookup")
        return self


class CycleSimResponse(BaseModel):
    t_m: int
    t_intv_mean: float
    t_intv_stderr: float
    t_idle_mean: float
    t_idle_stderr: float
    stages: int
    gap_histogram: list[list[int]]
    discards: dict[str, int]


class FitRequest(BaseModel):
    samples_csv: str
    model: str = "scaled-power"
    loocv: bool = False
    candidates: list[str] | None = None


class FitResponse(BaseModel):
    params: dict | None = None
    model: str
    residual_norm: float | None = None
    loocv_scores: list[dict] | None = None


class ErrorResponse(BaseModel):
    error: str
    kind: str  # "config", "data", "numeric"
