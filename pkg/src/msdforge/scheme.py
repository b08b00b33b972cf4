"""Scheme parameters, derived layout dimensions, and space/time cost formulas.

Two scheme variants are supported: the single-level scheme, which implements
each pi/8 rotation through a faulty T-measurement, and the cultivation-MSD
scheme, which consumes magic states prepared by cultivation and grown to
distance d_m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

from .circuit import check_distance_parity

T_ROUND = 8  # time steps per syndrome-extraction round
STAGES = 8


class Variant(Enum):
    SINGLE_LEVEL = "sng"
    CULTIVATION_MSD = "cmb"


@dataclass(frozen=True)
class SchemeParams:
    variant: Variant
    d_out: int
    d_x: int
    d_z: int
    d_m: int
    p: float = 1e-3
    r_y: float = 0.1
    # cultivation-MSD knobs
    d_cult: int | None = None
    n_m: int | None = None
    c_gap: float | None = None
    t_intv: float | None = None
    t_idle: float | None = None
    q_cult: float | None = None

    def __post_init__(self):
        check_distance_parity(self.d_out, self.d_x, self.d_z, self.d_m)
        if not self.d_out - self.d_z <= self.d_m < 2 * self.d_z:
            raise ValueError(
                f"need d_out - d_z <= d_m < 2*d_z, got "
                f"({self.d_out}, {self.d_z}, {self.d_m})"
            )
        if not 0 < self.p < 1:
            raise ValueError(f"physical rate must be in (0, 1), got {self.p}")
        if self.r_y < 0:
            raise ValueError(f"r_y must be non-negative, got {self.r_y}")
        if self.variant is Variant.CULTIVATION_MSD:
            if self.d_cult is None or self.n_m is None:
                raise ValueError("cultivation-MSD scheme needs d_cult and n_m")
            if self.d_cult not in (3, 5):
                raise ValueError(f"d_cult must be 3 or 5, got {self.d_cult}")
            if self.d_cult > self.d_m:
                raise ValueError(f"need d_cult <= d_m, got ({self.d_cult}, {self.d_m})")
            if self.n_m < 1:
                raise ValueError(f"n_m must be positive, got {self.n_m}")
            if self.t_intv is not None and self.t_intv <= self.d_m:
                raise ValueError(
                    f"t_intv must exceed d_m, got ({self.t_intv}, {self.d_m})"
                )

    @property
    def is_combined(self) -> bool:
        return self.variant is Variant.CULTIVATION_MSD

    def label(self) -> str:
        if self.is_combined:
            parts = [self.d_out, self.d_x, self.d_z, self.d_m, self.d_cult, self.n_m]
            tag = ",".join(str(v) for v in parts)
            if self.c_gap is not None:
                tag += f",{self.c_gap:g}"
            return f"cmb-({tag})"
        return f"sng-({self.d_out},{self.d_x},{self.d_z},{self.d_m})"

    def with_rates(self, p: float | None = None, r_y: float | None = None):
        return replace(
            self,
            p=self.p if p is None else p,
            r_y=self.r_y if r_y is None else r_y,
        )


@dataclass(frozen=True)
class DerivedDims:
    """Ancillary-patch dimensions and the per-side auxiliary patch count."""

    d_h: int
    d_v: int
    n_m_side: int = 1


def derive_dims(s: SchemeParams) -> DerivedDims:
    if s.is_combined:
        assert s.n_m is not None
        n_side = min(s.n_m, math.ceil(s.d_z / (s.d_m + 1)))
        d_h = max(2 * s.d_z, s.d_out + 1) + (s.n_m - n_side) * (s.d_m + 1)
        d_v = max(s.d_z, n_side * (s.d_m + 1))
        return DerivedDims(d_h=d_h, d_v=d_v, n_m_side=n_side)
    return DerivedDims(
        d_h=max(s.d_out + 1, 2 * s.d_z),
        d_v=max(s.d_z, s.d_m + 1),
        n_m_side=1,
    )


def n_tri(d: int) -> int:
    """Qubit count (data + syndrome) of a distance-d triangular patch."""
    if d < 3 or d % 2 == 0:
        raise ValueError(f"triangular patch distance must be odd >= 3, got {d}")
    return (3 * d * d - 1) // 2


def n_rec(d1: int, d2: int) -> int:
    """Qubit count of a rectangular patch with distances (d1, d2)."""
    if d1 < 2 or d2 < 2:
        raise ValueError(f"rectangular patch distances must be >= 2, got ({d1}, {d2})")
    return 3 * d1 * d2 - 2 * d1 - 2 * d2 + 2


def _n_anc_patch(d_h: int, d_v: int) -> int:
    return 3 * d_h * d_v - 2 * d_h - 2 * d_v + 2


def space_cost(s: SchemeParams, n_cult: int | None = None) -> int:
    """Maximal number of physical qubits (data + syndrome) the scheme holds.

    For the cultivation-MSD scheme, ``n_cult`` is the qubit count of one
    cultivation patch; it defaults to a full triangular patch of distance
    d_cult.
    """
    dims = derive_dims(s)
    anc = _n_anc_patch(dims.d_h, dims.d_v)
    if s.is_combined:
        assert s.d_cult is not None and s.n_m is not None
        if n_cult is None:
            n_cult = n_tri(s.d_cult)
        n_int = 4 * s.d_out + 12 * s.d_z + 10 * s.n_m * s.d_m + 2 * s.n_m - 8
        grown = 0 if s.d_m == s.d_cult else n_tri(s.d_m) - n_tri(s.d_cult)
        aux = 2 * s.n_m * (n_cult + grown)
        return n_tri(s.d_out) + 2 * n_rec(s.d_x, s.d_z) + anc + n_int + aux
    n_int = 4 * s.d_out + 12 * s.d_z + 10 * s.d_m - 6
    return (
        n_tri(s.d_out)
        + 2 * n_rec(s.d_x, s.d_z)
        + 2 * n_tri(s.d_m)
        + anc
        + n_int
    )


def time_cost(s: SchemeParams, t_intv: float | None = None) -> float:
    """Time steps per distillation attempt.

    Single level: eight stages of (d_m merge rounds + 1 measurement round).
    Cultivation-MSD: eight stages separated by t_intv rounds on average, so
    the cost is real-valued; pass the simulated (or tabulated) t_intv.
    """
    if s.is_combined:
        t_intv = t_intv if t_intv is not None else s.t_intv
        if t_intv is None:
            raise ValueError("combined-scheme time cost needs t_intv")
        if t_intv <= s.d_m:
            raise ValueError(f"t_intv must exceed d_m, got ({t_intv}, {s.d_m})")
        return STAGES * T_ROUND * t_intv
    return float(STAGES * T_ROUND * (s.d_m + 1))
