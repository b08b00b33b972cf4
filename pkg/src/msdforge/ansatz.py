"""Sub-threshold logical-failure-rate ansatz: evaluation, built-in fitted
parameter sets, per-Pauli rate splitting, and the threshold-improvement
what-if.

The ansatz is

    p_fail(p, d) = alpha * (p/p_th)^(beta*d + eta) * [1 + eps * (p/p_th)^(zeta * d^lam)]

with d standing for the code distance in memory experiments and for the round
count T in stability experiments.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, replace
from enum import Enum


class Setting(Enum):
    TRIANGULAR_MEMORY = "triangular"
    RECTANGULAR_Z_FAIL = "rectangular_z"
    RECTANGULAR_X_FAIL = "rectangular_x"
    STABILITY = "stability"


@dataclass(frozen=True)
class AnsatzParams:
    p_th: float
    alpha: float
    beta: float
    eta: float
    eps: float
    zeta: float
    lam: float

    def __post_init__(self):
        if min(self.p_th, self.alpha, self.beta, self.zeta) <= 0:
            raise ValueError("p_th, alpha, beta, zeta must be positive")

    def to_dict(self) -> dict:
        d = asdict(self)
        return {
            "p_th": d["p_th"], "alpha": d["alpha"], "beta": d["beta"],
            "eta": d["eta"], "epsilon": d["eps"], "zeta": d["zeta"],
            "lambda": d["lam"],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AnsatzParams":
        def pick(*names):
            for n in names:
                if n in d:
                    return float(d[n])
            raise KeyError(f"ansatz JSON lacks field {names[0]!r}")

        return cls(
            p_th=pick("p_th"), alpha=pick("alpha"), beta=pick("beta"),
            eta=pick("eta"), eps=pick("epsilon", "eps"),
            zeta=pick("zeta"), lam=pick("lambda", "lam"),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


# Fitted values for the concatenated-matching decoder under circuit-level
# noise, one parameter set per experimental setting.
BUILTIN_PARAMS: dict[Setting, AnsatzParams] = {
    Setting.TRIANGULAR_MEMORY: AnsatzParams(
        p_th=2.41e-3, alpha=6.19e-4, beta=0.537, eta=-1.45,
        eps=27.2, zeta=0.404, lam=0.933,
    ),
    Setting.RECTANGULAR_Z_FAIL: AnsatzParams(
        p_th=4.17e-3, alpha=5.68e-4, beta=0.439, eta=-1.04,
        eps=88.1, zeta=0.927, lam=0.332,
    ),
    Setting.RECTANGULAR_X_FAIL: AnsatzParams(
        p_th=3.07e-3, alpha=2.07e-4, beta=0.553, eta=-2.05,
        eps=73.1, zeta=0.515, lam=0.742,
    ),
    Setting.STABILITY: AnsatzParams(
        p_th=6.24e-3, alpha=6.91e-6, beta=0.601, eta=-1.61,
        eps=543.0, zeta=0.800, lam=0.389,
    ),
}


def builtin_params(setting: Setting) -> AnsatzParams:
    return BUILTIN_PARAMS[setting]


def eval_ansatz(params: AnsatzParams, p: float, d: float) -> float:
    """Per-round (or per-area, for stability) failure rate; clamped to [0, 1]."""
    if p <= 0:
        return 0.0
    if d < 1:
        raise ValueError(f"distance must be >= 1, got {d}")
    log_ratio = math.log(p / params.p_th)
    main = params.alpha * math.exp((params.beta * d + params.eta) * log_ratio)
    corr = 1.0 + params.eps * math.exp(params.zeta * d**params.lam * log_ratio)
    value = main * corr
    if not math.isfinite(value):
        raise ArithmeticError(
            f"ansatz evaluation overflowed at p={p}, d={d}: {value}"
        )
    return min(max(value, 0.0), 1.0)


def adjust_threshold(params: AnsatzParams, lam: float) -> AnsatzParams:
    """What-if for improved decoding: move p_th toward 1% by a fraction lam."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"tuning parameter must be in [0, 1], got {lam}")
    return replace(params, p_th=(1.0 - lam) * params.p_th + lam * 0.01)


@dataclass(frozen=True)
class PauliRates:
    """Per-round logical Pauli error rates extracted from failure rates.

    For triangular patches only (pX, pY, pZ) are meaningful.  Rectangular
    patches carry the per-qubit rates plus the Y-string correlated rates
    (pX1X2, pZ1Z2); the two encoded qubits have equal rates by assumption.
    """

    pX: float = 0.0
    pY: float = 0.0
    pZ: float = 0.0
    pX1X2: float = 0.0
    pZ1Z2: float = 0.0


def split_rates(
    setting: Setting,
    p: float,
    d: float | tuple[float, float],
    r_y: float,
    params: AnsatzParams | None = None,
) -> PauliRates:
    """Split a setting's total failure rate into per-Pauli logical rates.

    X and Z logical errors are taken equally likely; Y-type (correlated)
    errors carry a fraction r_y of the X rate.  Rectangular settings accept
    d = (d_x, d_z) and apply the multiplicity scaling of failure rates with
    the transverse patch dimension.
    """
    if r_y < 0:
        raise ValueError(f"r_y must be non-negative, got {r_y}")
    params = params if params is not None else builtin_params(setting)

    if setting is Setting.TRIANGULAR_MEMORY:
        p_fail = eval_ansatz(params, p, float(d))  # type: ignore[arg-type]
        base = p_fail / (2.0 * (1.0 + r_y))
        return PauliRates(pX=base, pY=r_y * base, pZ=base)

    if setting is Setting.STABILITY:
        raise ValueError("stability failures are not split into Pauli rates")

    if not isinstance(d, tuple):
        d = (float(d), float(d))
    d_x, d_z = d
    if setting is Setting.RECTANGULAR_Z_FAIL:
        # Z-observable failures are logical-X errors: weight set by d_x,
        # string multiplicity scaling with d_z.
        p_fail = (d_z / d_x) * eval_ansatz(params, p, d_x)
        base = p_fail / (2.0 * (1.0 + r_y))
        return PauliRates(pX=base, pX1X2=r_y * base)
    if setting is Setting.RECTANGULAR_X_FAIL:
        p_fail = (d_x / d_z) * eval_ansatz(params, p, d_z)
        base = p_fail / (2.0 * (1.0 + r_y))
        return PauliRates(pZ=base, pZ1Z2=r_y * base)
    raise ValueError(f"unknown setting {setting}")


def stability_rate(
    p: float,
    l_h: float,
    l_v: float,
    t: int,
    params: AnsatzParams | None = None,
) -> float:
    """Timelike (X- or Z-type) failure rate of an L_H x L_V region over T
    rounds, extrapolated from square stability experiments by area scaling."""
    if min(l_h, l_v) < 1 or t < 1:
        raise ValueError("region dimensions and round count must be >= 1")
    params = params if params is not None else builtin_params(Setting.STABILITY)
    return (l_h * l_v) / t**2 * eval_ansatz(params, p, t)


class RateModel:
    """Bundle of the per-Pauli logical rate functions consumed by channel
    generation, parameterized by the four ansatz settings and r_y.

    The notation mirrors the rate symbols used throughout the analysis:
    tri_* for triangular patches, rec_* for rectangular patches (per-round),
    and timelike_* for per-region stability failures.
    """

    def __init__(
        self,
        r_y: float,
        params: dict[Setting, AnsatzParams] | None = None,
    ):
        if r_y < 0:
            raise ValueError(f"r_y must be non-negative, got {r_y}")
        self.r_y = r_y
        self.params = dict(BUILTIN_PARAMS if params is None else params)

    def _tri(self, p: float, d: float) -> float:
        fail = eval_ansatz(self.params[Setting.TRIANGULAR_MEMORY], p, d)
        return fail / (2.0 * (1.0 + self.r_y))

    def tri_x(self, p: float, d: float) -> float:
        return self._tri(p, d)

    def tri_z(self, p: float, d: float) -> float:
        return self._tri(p, d)

    def tri_y(self, p: float, d: float) -> float:
        return self.r_y * self._tri(p, d)

    def _rec_x(self, p: float, d_x: float, d_z: float) -> float:
        rates = split_rates(
            Setting.RECTANGULAR_Z_FAIL, p, (d_x, d_z), self.r_y,
            self.params[Setting.RECTANGULAR_Z_FAIL],
        )
        return rates.pX

    def _rec_z(self, p: float, d_x: float, d_z: float) -> float:
        rates = split_rates(
            Setting.RECTANGULAR_X_FAIL, p, (d_x, d_z), self.r_y,
            self.params[Setting.RECTANGULAR_X_FAIL],
        )
        return rates.pZ

    def rec_x1(self, p: float, d_x: float, d_z: float) -> float:
        return self._rec_x(p, d_x, d_z)

    rec_x2 = rec_x1

    def rec_x1x2(self, p: float, d_x: float, d_z: float) -> float:
        return self.r_y * self._rec_x(p, d_x, d_z)

    def rec_z1(self, p: float, d_x: float, d_z: float) -> float:
        return self._rec_z(p, d_x, d_z)

    rec_z2 = rec_z1

    def rec_z1z2(self, p: float, d_x: float, d_z: float) -> float:
        return self.r_y * self._rec_z(p, d_x, d_z)

    def timelike_x(self, p: float, l_h: float, l_v: float, t: int) -> float:
        return stability_rate(p, l_h, l_v, t, self.params[Setting.STABILITY])

    timelike_z = timelike_x

    def with_adjusted_thresholds(self, lam: float) -> "RateModel":
        return RateModel(
            self.r_y,
            {s: adjust_threshold(q, lam) for s, q in self.params.items()},
        )

    @classmethod
    def zero(cls, r_y: float = 0.0) -> "RateModel":
        """All memory/ancilla/timelike rates identically zero; isolates the
        non-Clifford error sources."""
        return _ZeroRateModel(r_y)


class _ZeroRateModel(RateModel):
    def _tri(self, p, d):
        return 0.0

    def _rec_x(self, p, d_x, d_z):
        return 0.0

    def _rec_z(self, p, d_x, d_z):
        return 0.0

    def timelike_x(self, p, l_h, l_v, t):
        return 0.0

    timelike_z = timelike_x
