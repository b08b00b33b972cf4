"""Exact evaluation of distillation output infidelity and success
probability, plus the closed-form truncations used as an independent
cross-check.

The exact path evolves the 32-dimensional logical density matrix of the five
distillation qubits under the full channel list.  All channel unitaries are
diagonal in the computational basis, so a channel acts elementwise:

    rho[s, s'] *= (1 - p) + p * u[s] * conj(u[s'])

with u the diagonal phase vector of the channel's rotation product.  The
composition over channels is therefore an elementwise multiplier matrix and
the evaluation is exact up to floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .ansatz import PauliRates, RateModel
from .channels import NoiseChannel, channels_combined, channels_single_level
from .circuit import StageSchedule, default_stage_schedule
from .datafiles import cultivation_spec, load_grow_table
from .growing import GrowRateTable, grow_pauli_rates
from .scheme import (
    SchemeParams,
    Variant,
    derive_dims,
    space_cost,
    time_cost,
)

_DIM = 32
_N_QUBITS = 5


def _phase_vector(channel: NoiseChannel) -> np.ndarray:
    """Diagonal of the channel's rotation product over the 32 basis states.

    R_P(theta) multiplies a Z-basis state by exp(-i theta) on +1 eigenspaces
    of P and exp(+i theta) on -1 eigenspaces; the eigenvalue at basis state s
    is (-1)^{parity(s & mask)}.
    """
    states = np.arange(_DIM)
    total = np.zeros(_DIM, dtype=complex)
    for term in channel.terms:
        overlap = states & term.mask.bits
        parity = np.zeros(_DIM, dtype=np.int64)
        bits = overlap
        while bits.any():
            parity ^= bits & 1
            bits = bits >> 1
        sign = 1 - 2 * parity  # +1 on even parity, -1 on odd
        total += -1j * term.angle.radians * sign
    return np.exp(total)


def _initial_state() -> np.ndarray:
    """|A_-> on the output qubit (the top bit) and |+> on the validation
    qubits, as a pure density matrix."""
    amps = np.empty(_DIM, dtype=complex)
    for s in range(_DIM):
        out_bit = (s >> 4) & 1
        amps[s] = (1 / math.sqrt(2)) * np.exp(-1j * math.pi / 4 * out_bit) / 4.0
    return np.outer(amps, amps.conj())


def final_state(channels: list[NoiseChannel]) -> np.ndarray:
    """Density matrix of the five logical qubits after the channel list."""
    multiplier = np.ones((_DIM, _DIM), dtype=complex)
    for ch in channels:
        u = _phase_vector(ch)
        multiplier *= (1.0 - ch.p_err) + ch.p_err * np.outer(u, u.conj())
    return _initial_state() * multiplier


def evolve_and_project(channels: list[NoiseChannel]) -> tuple[float, float]:
    """Apply the channel list to the initial state, project the validation
    qubits onto <++++|, and return (q_succ, q_dist)."""
    rho = final_state(channels)

    herm_defect = np.abs(rho - rho.conj().T).max()
    if herm_defect > 1e-10:
        raise ArithmeticError(f"density matrix lost Hermiticity: {herm_defect}")

    # <++++| rho |++++> on the validation qubits: uniform average over their
    # 16 basis states on both sides, leaving a 2x2 output-qubit matrix.
    rho_out = np.zeros((2, 2), dtype=complex)
    for i in range(2):
        for ip in range(2):
            block = rho[i * 16:(i + 1) * 16, ip * 16:(ip + 1) * 16]
            rho_out[i, ip] = block.sum() / 16.0

    q_succ = float(rho_out[0, 0].real + rho_out[1, 1].real)
    if q_succ < -1e-12:
        raise ArithmeticError(f"negative success probability: {q_succ}")
    if q_succ <= 0.0:
        return 0.0, 1.0
    a_minus = np.array([1.0, np.exp(-1j * math.pi / 4)]) / math.sqrt(2)
    fidelity = float(np.real(a_minus.conj() @ rho_out @ a_minus)) / q_succ
    q_dist = min(max(1.0 - fidelity, 0.0), 1.0)
    return min(q_succ, 1.0), q_dist


# ---------------------------------------------------------------------------
# Closed-form truncations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AnalyticInputs:
    """Aggregate rates entering the closed-form expressions."""

    p_out: float = 0.0
    p_rec_x: float = 0.0
    p_rec_z: float = 0.0
    p_m: float = 0.0
    p_timelike: float = 0.0
    p_anc_out: float = 0.0
    p_anc_rec: float = 0.0
    p_anc_rec_pre: float = 0.0
    p_anc_m: float = 0.0
    p_magic: float = 0.0  # combined scheme only
    # geometry knobs entering a few coefficients
    d_m: int = 1
    d_z: int = 2
    d_h: int = 2
    d_v: int = 2
    t_intv: float | None = None


def _clamp(x: float) -> float:
    return min(max(x, 0.0), 1.0)


def analytic_single(inputs: AnalyticInputs, p: float, r_y: float) -> tuple[float, float]:
    """Truncated closed forms for the single-level scheme; returns
    (q_dist, q_succ)."""
    a = inputs
    area = (a.d_h + 6) * (a.d_v + 6)
    tl_coeff = (11 * area + 16 * a.d_z) / area
    pft = 7.0 * p / 3.0

    q_dist = (
        35.0 * pft**3
        + (16 * a.d_m + 19 + r_y) / 4.0 * a.p_out
        + a.d_m * (7 + r_y) * a.p_anc_out
        + 3.5 * pft**2 * (
            15 * a.p_m + 22 * a.p_anc_m + 8 * a.p_anc_rec_pre
            + tl_coeff * a.p_timelike
        )
        + (8 * a.p_rec_z + 4 * a.p_anc_rec + (27 + 19 * r_y) / 8.0 * a.p_rec_x)
        * (14.0 * p / 3.0 + a.p_m + 2 * a.p_anc_m + a.p_timelike)
        + 4 * a.p_rec_x * a.p_rec_z
        + 2 * a.p_rec_x * a.p_anc_rec
        + (31 + 68 * r_y) / 8.0 * a.p_rec_x**2
    )
    # p_rec_z carries an r_y factor by definition, so the 1/r_y quotient in
    # the success probability is finite; evaluate the cancelled form.
    rec_z_over_ry = a.p_rec_z / r_y if r_y > 0 else 0.0
    q_succ = (
        1.0
        - 35.0 * p
        - 7.5 * a.p_m
        - 11.0 * a.p_anc_m
        - 4.0 * a.p_anc_rec_pre
        - tl_coeff / 2.0 * a.p_timelike
        - 16.0 * (2 + r_y) * rec_z_over_ry
        - 4.0 * (5 + 3 * r_y) / (1 + r_y) * a.p_anc_rec
        - (4 * a.d_m + 71 + 35 * r_y) / 4.0 * a.p_rec_x
        - 2.0 * (1 + r_y) * a.p_out
    )
    return _clamp(q_dist), _clamp(q_succ)


def analytic_combined(inputs: AnalyticInputs, r_y: float) -> tuple[float, float]:
    """Truncated closed forms for the cultivation-MSD scheme; returns
    (q_dist, q_succ)."""
    a = inputs
    if a.t_intv is None or a.t_intv <= a.d_m:
        raise ValueError("combined analytic form needs t_intv > d_m")
    core = a.p_magic + a.p_m + a.p_anc_m + 0.5 * a.p_timelike

    q_dist = (
        35.0 * core**3
        + 28.0 * a.p_anc_rec_pre * core**2
        + ((27 + 19 * r_y) / 4.0 * a.p_rec_x + 16 * a.p_rec_z
           + 8 * a.p_anc_rec + 6 * a.p_anc_rec_pre**2) * core
        + (19 * a.t_intv - 3 * a.d_m + (a.t_intv - a.d_m) * r_y) / 4.0 * a.p_out
        + a.d_m * (7 + r_y) * a.p_anc_out
        + (31 + 68 * r_y) / 8.0 * a.p_rec_x**2
        + ((2.5 + r_y) * a.p_anc_rec_pre**2 + 2 * a.p_anc_rec
           + 4 * a.p_rec_z) * a.p_rec_x
    )
    rec_z_over_ry = a.p_rec_z / r_y if r_y > 0 else 0.0
    q_succ = (
        1.0
        - 15.0 * core
        - ((71 + 35 * r_y) / 4.0 + a.d_m / (a.t_intv - a.d_m)) * a.p_rec_x
        - 16.0 * (2 + r_y) * rec_z_over_ry
        - (20 + 12 * r_y) / (1 + r_y) * a.p_anc_rec
        - 4.0 * a.p_anc_rec_pre
    )
    return _clamp(q_dist), _clamp(q_succ)


def analytic_inputs_single(s: SchemeParams, rates: RateModel) -> AnalyticInputs:
    dims = derive_dims(s)
    p, d_m, d_z = s.p, s.d_m, s.d_z
    tri = rates.tri_x(p, s.d_out)  # equal X/Z base rate
    rec_x = rates.rec_x1(p, s.d_x, s.d_z)
    rec_z = rates.rec_z1(p, s.d_x, s.d_z)
    r_y = rates.r_y
    return AnalyticInputs(
        p_out=tri,
        p_rec_x=rec_x,
        p_rec_z=r_y * (d_m + 1) * rec_z,
        p_m=(2 * d_m + 1 + r_y) * rates.tri_x(p, d_m),
        p_timelike=rates.timelike_x(p, dims.d_h + 6, dims.d_v + 6, d_m),
        p_anc_out=rates.rec_z1(p, dims.d_v + 6, s.d_out + 1),
        p_anc_rec=d_m * (1 + r_y) * rates.rec_z1(p, dims.d_v + 6, d_z),
        p_anc_rec_pre=d_m * (1 + r_y) * rates.rec_z1(p, 4, d_z),
        p_anc_m=d_m * (1 + r_y) * rates.rec_x1(p, d_m + 1, dims.d_h + 6),
        d_m=d_m, d_z=d_z, d_h=dims.d_h, d_v=dims.d_v,
    )


def analytic_inputs_combined(
    s: SchemeParams,
    rates: RateModel,
    grow: PauliRates,
    cult: PauliRates,
    t_intv: float,
    t_idle: float,
) -> AnalyticInputs:
    dims = derive_dims(s)
    p, d_m, d_z = s.p, s.d_m, s.d_z
    r_y = rates.r_y
    p_cult = cult.pX  # = q_cult / (2 + r_y)
    p_grow = grow.pX
    return AnalyticInputs(
        p_out=rates.tri_x(p, s.d_out),
        p_rec_x=(t_intv - d_m) * rates.rec_x1(p, s.d_x, d_z),
        p_rec_z=r_y * t_intv * rates.rec_z1(p, s.d_x, d_z),
        p_m=((1 + r_y) * (t_idle + d_m) + 1) * rates.tri_x(p, d_m),
        p_timelike=rates.timelike_x(p, dims.d_h + 6, dims.d_v + 6, d_m),
        p_magic=(1 + r_y) * (p_cult + p_grow),
        p_anc_out=rates.rec_z1(p, dims.d_v + 6, s.d_out + 1),
        p_anc_rec=d_m * (1 + r_y) * rates.rec_z1(p, dims.d_v + 6, d_z),
        p_anc_rec_pre=d_m * (1 + r_y)
        * rates.rec_z1(p, dims.d_v + 6, min(d_z, d_m + 1)),
        p_anc_m=d_m * (1 + r_y) * rates.rec_x1(p, d_m + 1, dims.d_h + 6),
        d_m=d_m, d_z=d_z, d_h=dims.d_h, d_v=dims.d_v, t_intv=t_intv,
    )


# ---------------------------------------------------------------------------
# Full scheme evaluation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PerformanceReport:
    scheme: str
    p: float
    r_y: float
    q_dist: float
    q_dist_analytic: float
    q_succ: float
    q_succ_analytic: float
    space: int
    time: float
    effective_spacetime: float
    d_h: int
    d_v: int
    t_intv: float | None = None
    t_idle: float | None = None
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "scheme": self.scheme,
            "p": self.p,
            "r_y": self.r_y,
            "q_dist_exact": self.q_dist,
            "q_dist_analytic": self.q_dist_analytic,
            "q_succ": self.q_succ,
            "q_succ_analytic": self.q_succ_analytic,
            "space": self.space,
            "time": self.time,
            "effective_spacetime": self.effective_spacetime,
            "dims": {"d_h": self.d_h, "d_v": self.d_v},
            "t_intv": self.t_intv,
            "t_idle": self.t_idle,
            "diagnostics": self.diagnostics,
        }


# Below this infidelity the exact path is dominated by double-precision
# cancellation noise; the closed-form value is the trustworthy one.
EXACT_PRECISION_FLOOR = 1e-13


def _diagnostics(channels: list[NoiseChannel], q_dist: float) -> dict:
    per_source: dict[str, float] = {}
    for ch in channels:
        key = ch.source.rsplit("-", 1)[0]
        per_source[key] = per_source.get(key, 0.0) + ch.p_err
    return {
        "channel_count": len(channels),
        "total_error_weight": sum(ch.p_err for ch in channels),
        "per_rule_p_err": dict(sorted(per_source.items())),
        "exact_below_precision_floor": q_dist < EXACT_PRECISION_FLOOR,
    }


def evaluate_scheme(
    s: SchemeParams,
    schedule: StageSchedule | None = None,
    rates: RateModel | None = None,
    grow_table: GrowRateTable | None = None,
    seed: int = 0,
) -> PerformanceReport:
    """Evaluate one parameter set end to end: channels, exact evolution,
    closed-form cross-check, and resource costs."""
    schedule = schedule if schedule is not None else default_stage_schedule()
    rates = rates if rates is not None else RateModel(s.r_y)

    if s.variant is Variant.SINGLE_LEVEL:
        channels = channels_single_level(s, schedule, rates)
        q_succ, q_dist = evolve_and_project(channels)
        qd_a, qs_a = analytic_single(analytic_inputs_single(s, rates), s.p, s.r_y)
        space = space_cost(s)
        time = time_cost(s)
        t_intv = t_idle = None
    else:
        assert s.d_cult is not None
        spec = cultivation_spec(s.p, s.d_cult)
        q_cult = s.q_cult if s.q_cult is not None else spec.q_cult
        cult_base = q_cult / (2.0 + s.r_y)
        cult = PauliRates(pX=cult_base, pY=s.r_y * cult_base, pZ=cult_base)
        grow_table = grow_table if grow_table is not None else load_grow_table()
        if s.c_gap is None:
            raise ValueError("cultivation-MSD evaluation needs c_gap")
        grow, p_acc = grow_pauli_rates(
            grow_table, s.p, s.d_cult, s.d_m, s.c_gap, s.r_y
        )
        t_intv, t_idle = s.t_intv, s.t_idle
        if t_intv is None or t_idle is None:
            from .cycle import CycleConfig, simulate

            cfg = CycleConfig(
                n_m=s.n_m or 1,
                t_cult=spec.t_cult,
                d_m=s.d_m,
                d_cult=s.d_cult,
                q_cult_succ=spec.q_cult_succ,
                p_acc=p_acc,
                seed=seed,
            )
            stats = simulate(cfg)
            t_intv = t_intv if t_intv is not None else stats.t_intv_mean
            t_idle = t_idle if t_idle is not None else stats.t_idle_mean
        channels = channels_combined(
            s, schedule, rates, grow=grow, cult=cult,
            t_intv=t_intv, t_idle=t_idle,
        )
        q_succ, q_dist = evolve_and_project(channels)
        qd_a, qs_a = analytic_combined(
            analytic_inputs_combined(s, rates, grow, cult, t_intv, t_idle),
            s.r_y,
        )
        space = space_cost(s, n_cult=spec.n_cult)
        time = time_cost(s, t_intv=t_intv)

    dims = derive_dims(s)
    effective = space * time / q_succ if q_succ > 0 else math.inf
    return PerformanceReport(
        scheme=s.label(),
        p=s.p,
        r_y=s.r_y,
        q_dist=q_dist,
        q_dist_analytic=qd_a,
        q_succ=q_succ,
        q_succ_analytic=qs_a,
        space=space,
        time=time,
        effective_spacetime=effective,
        d_h=dims.d_h,
        d_v=dims.d_v,
        t_intv=t_intv,
        t_idle=t_idle,
        diagnostics=_diagnostics(channels, q_dist),
    )


def py_ratio_sweep(
    s: SchemeParams,
    ratios: list[float],
    schedule: StageSchedule | None = None,
    grow_table: GrowRateTable | None = None,
) -> list[tuple[float, float]]:
    """Evaluate the scheme across Y-ratio values, holding total failure rates
    fixed (only the per-Pauli split changes)."""
    out = []
    for r_y in ratios:
        if not 0.0 <= r_y <= 1.0:
            raise ValueError(f"Y-ratio must be in [0, 1], got {r_y}")
        report = evaluate_scheme(
            s.with_rates(r_y=r_y),
            schedule=schedule,
            rates=RateModel(r_y),
            grow_table=grow_table,
        )
        out.append((r_y, report.q_dist))
    return out


def pareto_sweep(
    variants: list[SchemeParams],
    schedule: StageSchedule | None = None,
    grow_table: GrowRateTable | None = None,
) -> tuple[list[PerformanceReport], list[PerformanceReport]]:
    """Evaluate a list of admissible parameter sets and return (all reports,
    non-dominated frontier) under (q_dist, effective spacetime cost).

    Dominance is weak; ties break lexicographically on space cost so the
    frontier is deterministic.
    """
    if not variants:
        raise ValueError("no admissible parameter sets to sweep")
    reports = [
        evaluate_scheme(s, schedule=schedule, grow_table=grow_table)
        for s in variants
    ]
    order = sorted(
        reports, key=lambda r: (r.q_dist, r.effective_spacetime, r.space)
    )
    frontier: list[PerformanceReport] = []
    best_cost = math.inf
    for rep in order:
        if rep.effective_spacetime < best_cost:
            frontier.append(rep)
            best_cost = rep.effective_spacetime
    return reports, frontier


def admissible_grid(
    variant: Variant,
    d_out_range: list[int],
    d_x_range: list[int],
    d_z_range: list[int],
    d_m_range: list[int],
    p: float,
    r_y: float = 0.1,
    **combined_knobs,
) -> list[SchemeParams]:
    """All parameter tuples from the given ranges that satisfy parity and
    distance-preservation constraints."""
    out = []
    for d_out in d_out_range:
        for d_x in d_x_range:
            for d_z in d_z_range:
                for d_m in d_m_range:
                    if d_out % 2 == 0 or d_m % 2 == 0 or d_x % 2 or d_z % 2:
                        continue
                    if not (d_out - d_z <= d_m < 2 * d_z):
                        continue
                    if d_z >= d_out or d_m >= d_out:
                        continue
                    try:
                        out.append(
                            SchemeParams(
                                variant=variant, d_out=d_out, d_x=d_x,
                                d_z=d_z, d_m=d_m, p=p, r_y=r_y,
                                **combined_knobs,
                            )
                        )
                    except ValueError:
                        continue
    return out
