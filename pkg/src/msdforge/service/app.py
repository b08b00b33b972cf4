"""FastAPI service exposing the evaluation toolkit.

The CLI is a thin client of these endpoints; every numeric result it prints
comes from the JSON bodies assembled here.
"""

from __future__ import annotations

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from .. import circuit, cycle, engine, fitting, growing, layout, schedules
from ..datafiles import cultivation_spec, load_grow_table
from ..growing import GrowDataError
from ..scheme import SchemeParams, Variant, derive_dims, space_cost, time_cost
from . import models

app = FastAPI(
    title="msdforge",
    description="Magic state distillation evaluation service for 2D color codes",
    version="0.1.0",
)


class ConfigError(ValueError):
    pass


def _params_from_spec(spec: models.SchemeSpec) -> SchemeParams:
    variant = Variant.SINGLE_LEVEL if spec.scheme == "sng" else Variant.CULTIVATION_MSD
    return SchemeParams(
        variant=variant,
        d_out=spec.d_out, d_x=spec.d_x, d_z=spec.d_z, d_m=spec.d_m,
        p=spec.p, r_y=spec.r_y,
        d_cult=spec.d_cult, n_m=spec.n_m, c_gap=spec.c_gap,
        t_intv=spec.t_intv, t_idle=spec.t_idle, q_cult=spec.q_cult,
    )


@app.exception_handler(ValueError)
async def _value_error(request, exc: ValueError):
    kind = "data" if isinstance(exc, GrowDataError) else "config"
    return JSONResponse(
        status_code=422 if kind == "config" else 424,
        content=models.ErrorResponse(error=str(exc), kind=kind).model_dump(),
    )


@app.exception_handler(ArithmeticError)
async def _numeric_error(request, exc: ArithmeticError):
    return JSONResponse(
        status_code=500,
        content=models.ErrorResponse(error=str(exc), kind="numeric").model_dump(),
    )


@app.get("/healthz")
def healthz() -> dict:
    return {"status": "ok"}


@app.post("/cost", response_model=models.CostResponse)
def cost(spec: models.SchemeSpec) -> models.CostResponse:
    params = _params_from_spec(spec)
    dims = derive_dims(params)
    n_cult = None
    if params.is_combined:
        assert params.d_cult is not None
        n_cult = cultivation_spec(params.p, params.d_cult).n_cult
    return models.CostResponse(
        scheme=params.label(),
        space=space_cost(params, n_cult=n_cult),
        time=time_cost(params) if not params.is_combined or params.t_intv
        else time_cost(params, t_intv=_simulated_t_intv(params)),
        d_h=dims.d_h,
        d_v=dims.d_v,
        n_m_side=dims.n_m_side,
    )


def _simulated_t_intv(params: SchemeParams, seed: int = 0) -> float:
    assert params.d_cult is not None and params.n_m is not None
    spec = cultivation_spec(params.p, params.d_cult)
    if params.c_gap is not None and params.d_m != params.d_cult:
        _, p_acc = growing.growing_rates(
            load_grow_table(), params.p, params.d_cult, params.d_m, params.c_gap
        )
    else:
        p_acc = 1.0
    stats = cycle.simulate(cycle.CycleConfig(
        n_m=params.n_m, t_cult=spec.t_cult, d_m=params.d_m,
        d_cult=params.d_cult, q_cult_succ=spec.q_cult_succ,
        p_acc=p_acc, seed=seed,
    ))
    return stats.t_intv_mean


def _report_response(report: engine.PerformanceReport) -> models.InfidelityResponse:
    d = report.to_dict()
    return models.InfidelityResponse(**d)


@app.post("/infidelity", response_model=models.InfidelityResponse)
def infidelity(req: models.InfidelityRequest) -> models.InfidelityResponse:
    import json as _json

    from ..ansatz import RateModel
    from ..datafiles import parse_ansatz_params

    params = _params_from_spec(req.params)
    schedule = (
        circuit.StageSchedule.from_labels(req.schedule)
        if req.schedule is not None else None
    )
    table = (
        growing.GrowRateTable.from_csv(req.grow_table_csv)
        if req.grow_table_csv is not None else None
    )
    rates = None
    if req.ansatz_json is not None:
        rates = RateModel(
            params.r_y, parse_ansatz_params(_json.loads(req.ansatz_json))
        )
    report = engine.evaluate_scheme(
        params, schedule=schedule, rates=rates, grow_table=table, seed=req.seed
    )
    return _report_response(report)


@app.post("/sweep", response_model=models.SweepResponse)
def sweep(req: models.SweepRequest) -> models.SweepResponse:
    variant = Variant.SINGLE_LEVEL if req.scheme == "sng" else Variant.CULTIVATION_MSD
    knobs = {}
    if variant is Variant.CULTIVATION_MSD:
        knobs = dict(
            d_cult=req.d_cult, n_m=req.n_m, c_gap=req.c_gap,
            t_intv=req.t_intv, t_idle=req.t_idle,
        )
    grid = engine.admissible_grid(
        variant, req.d_out, req.d_x, req.d_z, req.d_m, req.p, req.r_y, **knobs
    )
    if not grid:
        raise ConfigError("no admissible points in the requested ranges")
    reports, frontier = engine.pareto_sweep(grid)
    return models.SweepResponse(
        reports=[_report_response(r) for r in reports],
        frontier=[_report_response(r) for r in frontier],
    )


@app.post("/verify-layout", response_model=models.VerifyLayoutResponse)
def verify_layout_endpoint(
    req: models.VerifyLayoutRequest,
) -> models.VerifyLayoutResponse:
    schedule = (
        circuit.StageSchedule.from_labels(req.schedule)
        if req.schedule is not None else circuit.default_stage_schedule()
    )
    pairing = circuit.verify_pairing(schedule, req.d_out, req.d_x, req.d_z, req.d_m)
    lv = layout.verify_layout(
        schedule, req.d_out, req.d_x, req.d_z, req.d_m,
        combined_prestages=req.combined_prestages,
    )
    fatal = [v for v in lv if not v.informational]
    return models.VerifyLayoutResponse(
        distance_preserving=not pairing and not fatal,
        pairing_violations=[v.to_dict() for v in pairing],
        layout_violations=[v.to_dict() for v in lv],
    )


@app.post("/schedules", response_model=models.SchedulesResponse)
def schedules_endpoint(req: models.SchedulesRequest) -> models.SchedulesResponse:
    found = schedules.enumerate_valid(req.length)
    return models.SchedulesResponse(
        count=len(found),
        schedules=[] if req.count_only else [str(s) for s in found],
    )


@app.post("/cycle-sim", response_model=models.CycleSimResponse)
def cycle_sim(req: models.CycleSimRequest) -> models.CycleSimResponse:
    t_cult, q_succ = req.t_cult, req.q_cult_succ
    if t_cult is None or q_succ is None:
        assert req.p is not None
        spec = cultivation_spec(req.p, req.d_cult)
        t_cult = t_cult if t_cult is not None else spec.t_cult
        q_succ = q_succ if q_succ is not None else spec.q_cult_succ
    p_acc = req.p_acc
    if p_acc is None:
        if req.d_m == req.d_cult:
            p_acc = 1.0
        else:
            assert req.p is not None and req.c_gap is not None
            _, p_acc = growing.growing_rates(
                load_grow_table(), req.p, req.d_cult, req.d_m, req.c_gap
            )
    config = cycle.CycleConfig(
        n_m=req.n_m, t_cult=t_cult, d_m=req.d_m, d_cult=req.d_cult,
        q_cult_succ=q_succ, p_acc=p_acc, seed=req.seed, n_stages=req.n_stages,
    )
    stats = cycle.simulate(config)
    return models.CycleSimResponse(
        t_m=config.t_m,
        t_intv_mean=stats.t_intv_mean,
        t_intv_stderr=stats.t_intv_stderr,
        t_idle_mean=stats.t_idle_mean,
        t_idle_stderr=stats.t_idle_stderr,
        stages=stats.stages,
        gap_histogram=[list(g) for g in stats.gap_histogram],
        discards=stats.discards,
    )


@app.post("/fit", response_model=models.FitResponse)
def fit(req: models.FitRequest) -> models.FitResponse:
    samples = fitting.SampleSet.from_csv(req.samples_csv)
    if req.loocv:
        scores = fitting.loocv_select(
            samples, req.candidates or fitting.DEFAULT_CANDIDATES
        )
        return models.FitResponse(
            model=scores[0].model,
            loocv_scores=[
                {"model": s.model, "score": s.score,
                 "failed_folds": s.failed_folds,
                 "disqualified": s.disqualified}
                for s in scores
            ],
        )
    try:
        result = fitting.fit_ansatz(samples, req.model)
    except fitting.FitError as exc:
        raise ArithmeticError(str(exc)) from exc
    return models.FitResponse(
        params=result.params.to_dict(),
        model=result.model,
        residual_norm=result.residual_norm,
    )
