"""Translation of scheme parameters and logical rate functions into the
ordered list of noise channels acting on the five distillation qubits.

Every physical error source (patch memory errors, spacelike and timelike
strings in the ancillary region, faulty T-measurements, cultivation and
growing errors) maps to a channel

    rho -> (1 - p_err) rho + p_err U rho U^dagger

where U is a product of pi/2 or +-pi/4 rotations in Z-type bases.  Channels
are emitted in stage order, then rule order within a stage; since all
unitaries are mutually commuting diagonals the order carries no semantics
beyond reproducibility.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .ansatz import PauliRates, RateModel
from .circuit import StageSchedule, verify_pairing
from .paulis import QubitId, ZPauliMask
from .scheme import DerivedDims, SchemeParams, Variant, derive_dims

VALIDATION = (QubitId.A, QubitId.B, QubitId.C, QubitId.D)


class Angle(Enum):
    MINUS_QUARTER = "-pi/4"
    PLUS_QUARTER = "+pi/4"
    HALF = "pi/2"

    @property
    def radians(self) -> float:
        return {"-pi/4": -math.pi / 4, "+pi/4": math.pi / 4, "pi/2": math.pi / 2}[
            self.value
        ]


@dataclass(frozen=True)
class RotationTerm:
    mask: ZPauliMask
    angle: Angle

    def __post_init__(self):
        if self.mask.is_identity:
            raise ValueError("rotation terms must have non-empty bases")


@dataclass(frozen=True)
class NoiseChannel:
    terms: tuple[RotationTerm, ...]
    p_err: float
    stage: int
    source: str

    def __post_init__(self):
        if not 0.0 <= self.p_err <= 1.0:
            raise ValueError(f"p_err out of [0, 1]: {self.p_err}")

    def to_dict(self) -> dict:
        return {
            "terms": [[str(t.mask), t.angle.value] for t in self.terms],
            "p_err": self.p_err,
            "stage": self.stage,
            "source": self.source,
        }


def _z_rate(rates: RateModel, s: SchemeParams, q: QubitId) -> float:
    if q is QubitId.OUT:
        return rates.tri_z(s.p, s.d_out)
    if q in (QubitId.A, QubitId.C):
        return rates.rec_z1(s.p, s.d_x, s.d_z)
    return rates.rec_z2(s.p, s.d_x, s.d_z)


def _x_rate(rates: RateModel, s: SchemeParams, q: QubitId) -> float:
    if q is QubitId.OUT:
        return rates.tri_x(s.p, s.d_out)
    if q in (QubitId.A, QubitId.C):
        return rates.rec_x1(s.p, s.d_x, s.d_z)
    return rates.rec_x2(s.p, s.d_x, s.d_z)


class _Emitter:
    def __init__(self):
        self.channels: list[NoiseChannel] = []

    def emit(self, stage: int, source: str,
             terms: list[RotationTerm] | tuple[RotationTerm, ...],
             p_err: float) -> None:
        # Channels with empty unitaries or zero weight act as identity.
        if not terms or p_err <= 0.0:
            return
        self.channels.append(
            NoiseChannel(tuple(terms), float(p_err), stage, source)
        )


def _commuted_x_terms(
    schedule: StageSchedule, k: int, involved
) -> list[RotationTerm]:
    """-pi/4 rotation terms produced by commuting an X-type error through all
    rotations executed up to and including stage k; ``involved(mask)`` decides
    whether a rotation basis picks up the error."""
    terms = []
    for j in range(1, k + 1):
        for mask in (schedule.p(j), schedule.q(j)):
            if not mask.is_identity and involved(mask):
                terms.append(RotationTerm(mask, Angle.MINUS_QUARTER))
    return terms


def _memory_channels(
    em: _Emitter,
    s: SchemeParams,
    schedule: StageSchedule,
    rates: RateModel,
    k: int,
    interval: float,
    out_active: bool,
) -> None:
    """Patch memory errors during stage k and the following interval
    (rule items shared by both scheme variants)."""
    support = schedule.stage_support(k)
    active = ([QubitId.OUT] if out_active else []) + list(VALIDATION)

    for q in active:
        em.emit(
            k, f"memory-z-{q.value}",
            [RotationTerm(ZPauliMask.of(q), Angle.HALF)],
            interval * _z_rate(rates, s, q),
        )

    for q in active:
        lam = 1 if support.contains(q) else 0
        terms = _commuted_x_terms(schedule, k, lambda m, q=q: m.contains(q))
        em.emit(
            k, f"memory-x-{q.value}", terms,
            (interval - s.d_m * lam) * _x_rate(rates, s, q),
        )

    if out_active:
        lam = 1 if support.contains(QubitId.OUT) else 0
        terms = [RotationTerm(ZPauliMask.of(QubitId.OUT), Angle.HALF)]
        terms += _commuted_x_terms(
            schedule, k, lambda m: m.contains(QubitId.OUT)
        )
        em.emit(
            k, "memory-y-out", terms,
            (interval - s.d_m * lam) * rates.tri_y(s.p, s.d_out),
        )

    for q1, q2 in ((QubitId.A, QubitId.B), (QubitId.C, QubitId.D)):
        em.emit(
            k, f"memory-zz-{q1.value}{q2.value}",
            [RotationTerm(ZPauliMask.of(q1), Angle.HALF),
             RotationTerm(ZPauliMask.of(q2), Angle.HALF)],
            interval * rates.rec_z1z2(s.p, s.d_x, s.d_z),
        )
        lam = 1 if (support.contains(q1) or support.contains(q2)) else 0
        terms = _commuted_x_terms(
            schedule, k,
            lambda m, a=q1, b=q2: m.contains(a) != m.contains(b),
        )
        em.emit(
            k, f"memory-xx-{q1.value}{q2.value}", terms,
            (interval - s.d_m * lam) * rates.rec_x1x2(s.p, s.d_x, s.d_z),
        )


_PATCH_GROUPS = (
    (QubitId.OUT,),
    (QubitId.A, QubitId.B),
    (QubitId.C, QubitId.D),
)


def _anc_spacelike_channels(
    em: _Emitter,
    s: SchemeParams,
    schedule: StageSchedule,
    rates: RateModel,
    dims: DerivedDims,
    k: int,
) -> None:
    """Z errors on measured qubits from spacelike strings crossing the
    ancillary region (regular stages, both variants).

    The flip events live on the region in front of each logical patch: one
    string flips the recorded corrections of every co-measured qubit in that
    patch at once, so a rectangular patch with both of its qubits in a
    measured operator suffers a correlated Z product.
    """
    p_mask, q_mask = schedule.p(k), schedule.q(k)

    for group in _PATCH_GROUPS:
        dz_prime = s.d_out + 1 if group[0] is QubitId.OUT else s.d_z
        sel_p = ZPauliMask.of(*(q for q in group if p_mask.contains(q)))
        sel_q = ZPauliMask.of(*(q for q in group if q_mask.contains(q)))
        label = "".join(q.value for q in group)
        for mask, rate, tag in (
            (sel_p, rates.rec_z2(s.p, dims.d_v + 6, dz_prime), "p"),
            (sel_q, rates.rec_z1(s.p, dims.d_v + 6, dz_prime), "q"),
            (sel_p * sel_q, rates.rec_z1z2(s.p, dims.d_v + 6, dz_prime), "y"),
        ):
            if mask.is_identity:
                continue
            em.emit(
                k, f"anc-{tag}-{label}",
                [RotationTerm(ZPauliMask.of(q), Angle.HALF) for q in mask],
                s.d_m * rate,
            )


def channels_single_level(
    s: SchemeParams,
    schedule: StageSchedule,
    rates: RateModel | None = None,
) -> list[NoiseChannel]:
    """Full channel list for the single-level (faulty T-measurement) scheme."""
    if s.variant is not Variant.SINGLE_LEVEL:
        raise ValueError("scheme variant must be single-level")
    pairing = verify_pairing(schedule, s.d_out, s.d_x, s.d_z, s.d_m)
    if pairing:
        raise ValueError(f"schedule fails pairing conditions: {pairing[0].detail}")
    rates = rates if rates is not None else RateModel(s.r_y)
    dims = derive_dims(s)
    first_out = schedule.first_output_stage()
    em = _Emitter()

    for k in range(1, 9):
        interval = s.d_m + 1
        _memory_channels(em, s, schedule, rates, k, interval, k >= first_out)

        # Faulty T-measurements plus memory errors on the auxiliary patches,
        # mapped through the measurement into rotation errors in this stage's
        # bases.
        d_aux = s.d_m if k >= 3 else s.d_z - 1
        for mask, tag in ((schedule.p(k), "alpha"), (schedule.q(k), "beta")):
            if mask.is_identity:
                continue
            em.emit(k, f"aux-x-{tag}",
                    [RotationTerm(mask, Angle.MINUS_QUARTER)],
                    rates.tri_x(s.p, d_aux))
            em.emit(k, f"aux-y-{tag}",
                    [RotationTerm(mask, Angle.PLUS_QUARTER)],
                    rates.tri_y(s.p, d_aux))
            em.emit(k, f"aux-z-{tag}",
                    [RotationTerm(mask, Angle.HALF)],
                    s.d_m * rates.tri_z(s.p, d_aux))
            em.emit(k, f"faulty-t-x-{tag}",
                    [RotationTerm(mask, Angle.MINUS_QUARTER)], 2 * s.p / 3)
            em.emit(k, f"faulty-t-y-{tag}",
                    [RotationTerm(mask, Angle.PLUS_QUARTER)], 2 * s.p / 3)
            em.emit(k, f"faulty-t-z-{tag}",
                    [RotationTerm(mask, Angle.HALF)], 5 * s.p / 3)

        if k >= 3:
            _anc_spacelike_channels(em, s, schedule, rates, dims, k)
            # Spacelike strings reaching the aux patches become Z errors
            # there, i.e. pi/2 rotation errors after the T-measurement.
            for mask, rec_x, tag in (
                (schedule.p(k), rates.rec_x1, "alpha"),
                (schedule.q(k), rates.rec_x2, "beta"),
            ):
                if mask.is_identity:
                    continue
                rate = s.d_m * (
                    rec_x(s.p, s.d_m + 1, dims.d_h + 6)
                    + rates.rec_x1x2(s.p, s.d_m + 1, dims.d_h + 6)
                )
                em.emit(k, f"anc-aux-z-{tag}",
                        [RotationTerm(mask, Angle.HALF)], rate)
            # Timelike strings flip the joint measurement outcome, acting as
            # X errors on the aux qubits before their T-measurements.
            em.emit(k, "timelike-alpha",
                    [RotationTerm(schedule.p(k), Angle.MINUS_QUARTER)],
                    rates.timelike_x(s.p, dims.d_h + 6, dims.d_v + 6, s.d_m))
            if not schedule.q(k).is_identity:
                em.emit(k, "timelike-beta",
                        [RotationTerm(schedule.q(k), Angle.MINUS_QUARTER)],
                        rates.timelike_z(s.p, dims.d_h + 6, dims.d_v + 6, s.d_m))
        else:
            # Thin pre-layout for the single-qubit rotations: an imaginary
            # 4 x d_z patch covers each thin ancillary strip.
            for q in schedule.stage_support(k).support():
                if q is QubitId.OUT:
                    continue
                rate = s.d_m * (
                    max(rates.rec_z1(s.p, 4, s.d_z), rates.rec_z2(s.p, 4, s.d_z))
                    + rates.rec_z1z2(s.p, 4, s.d_z)
                )
                em.emit(k, f"anc-pre-z-{q.value}",
                        [RotationTerm(ZPauliMask.of(q), Angle.HALF)], rate)
            tl = max(
                rates.timelike_x(s.p, s.d_z, 4, s.d_m),
                rates.timelike_z(s.p, s.d_z, 4, s.d_m),
            )
            for mask, tag in ((schedule.p(k), "alpha"), (schedule.q(k), "beta")):
                if not mask.is_identity:
                    em.emit(k, f"timelike-pre-{tag}",
                            [RotationTerm(mask, Angle.MINUS_QUARTER)], tl)
    return em.channels


def channels_combined(
    s: SchemeParams,
    schedule: StageSchedule,
    rates: RateModel | None = None,
    grow: PauliRates | None = None,
    cult: PauliRates | None = None,
    t_intv: float | None = None,
    t_idle: float | None = None,
) -> list[NoiseChannel]:
    """Full channel list for the cultivation-MSD scheme.

    ``grow`` holds the post-selected growing-operation Pauli rates (zero when
    d_m = d_cult), ``cult`` the cultivation output Pauli rates.
    """
    if s.variant is not Variant.CULTIVATION_MSD:
        raise ValueError("scheme variant must be cultivation-MSD")
    pairing = verify_pairing(schedule, s.d_out, s.d_x, s.d_z, s.d_m)
    if pairing:
        raise ValueError(f"schedule fails pairing conditions: {pairing[0].detail}")
    t_intv = t_intv if t_intv is not None else s.t_intv
    t_idle = t_idle if t_idle is not None else s.t_idle
    if t_intv is None or t_idle is None:
        raise ValueError("combined channels need t_intv and t_idle")
    if t_intv <= s.d_m:
        raise ValueError(f"t_intv must exceed d_m, got ({t_intv}, {s.d_m})")
    rates = rates if rates is not None else RateModel(s.r_y)
    grow = grow if grow is not None else PauliRates()
    cult = cult if cult is not None else PauliRates()
    if s.d_m == s.d_cult:
        grow = PauliRates()  # growing is skipped outright

    dims = derive_dims(s)
    first_out = schedule.first_output_stage()
    n_side = dims.n_m_side
    assert s.n_m is not None
    em = _Emitter()

    for k in range(1, 9):
        interval = (s.d_m + 1) if k == 8 else t_intv
        _memory_channels(em, s, schedule, rates, k, interval, k >= first_out)

        for mask, tag, rec_i, rec_j, tl in (
            (schedule.p(k), "alpha", rates.rec_x1, rates.rec_z2,
             rates.timelike_x),
            (schedule.q(k), "beta", rates.rec_x2, rates.rec_z1,
             rates.timelike_z),
        ):
            if mask.is_identity:
                continue
            # Outcome flips and Y-type errors on the consumed magic state,
            # all collapsing onto a pi/2 rotation error in this basis.
            half_rate = (
                rates.tri_z(s.p, s.d_m) / 2
                + rates.tri_x(s.p, s.d_m) / 2
                + (s.d_m + 1) * rates.tri_y(s.p, s.d_m)
                + grow.pY
                + t_idle * rates.tri_y(s.p, s.d_m)
                + cult.pY
            )
            if k >= 3:
                half_rate += (
                    n_side / s.n_m * s.d_m
                    * (rec_i(s.p, s.d_m + 1, dims.d_h + 6)
                       + rates.rec_x1x2(s.p, s.d_m + 1, dims.d_h + 6))
                    + (s.n_m - n_side) / s.n_m * s.d_m
                    * (rec_j(s.p, dims.d_v + 6, s.d_m + 1)
                       + rates.rec_z1z2(s.p, dims.d_v + 6, s.d_m + 1))
                )
            em.emit(k, f"magic-half-{tag}",
                    [RotationTerm(mask, Angle.HALF)], half_rate)

            # X/Z errors from growing, idling, cultivation, and timelike
            # strings flip the surgery outcome: a +-pi/4 rotation pair.
            pm_rate = (
                (grow.pX + grow.pZ) / 2
                + t_idle / 2 * (rates.tri_x(s.p, s.d_m) + rates.tri_z(s.p, s.d_m))
                + (cult.pX + cult.pZ) / 2
                + tl(s.p, dims.d_h + 6, dims.d_v + 6, s.d_m) / 2
            )
            em.emit(k, f"magic-plus-{tag}",
                    [RotationTerm(mask, Angle.PLUS_QUARTER)], pm_rate)
            em.emit(k, f"magic-minus-{tag}",
                    [RotationTerm(mask, Angle.MINUS_QUARTER)], pm_rate)

        if k >= 3:
            _anc_spacelike_channels(em, s, schedule, rates, dims, k)
        else:
            # Full layout already in place; the region is only
            # min(d_z, d_m + 1) wide in front of the single-qubit stages.
            weak = min(s.d_z, s.d_m + 1)
            for q in schedule.stage_support(k).support():
                if q is QubitId.OUT:
                    continue
                rec = rates.rec_z2 if q in (QubitId.A, QubitId.B) else rates.rec_z1
                rate = s.d_m * (
                    rec(s.p, dims.d_v + 6, weak)
                    + rates.rec_z1z2(s.p, dims.d_v + 6, weak)
                )
                em.emit(k, f"anc-pre-z-{q.value}",
                        [RotationTerm(ZPauliMask.of(q), Angle.HALF)], rate)
    return em.channels
