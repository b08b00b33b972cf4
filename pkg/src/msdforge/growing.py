"""Growing-operation rate tables: post-selected logical failure and
acceptance rates for growing a cultivated patch from d_cult to d_m.

Dense curves must come from simulation output supplied as CSV; the bundled
table only anchors the documented operating points (rates without
post-selection, the achievable minima, and the gap-threshold locations where
the post-selection behaviour collapses).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path

from .ansatz import PauliRates

CSV_HEADER = ("p", "d_cult", "d_m", "c_gap", "p_log", "p_acc")


class GrowDataError(ValueError):
    """Raised when the table lacks the slice needed for a lookup."""


@dataclass(frozen=True)
class GrowRow:
    p: float
    d_cult: int
    d_m: int
    c_gap: float
    p_log: float
    p_acc: float

    def __post_init__(self):
        if not (0.0 <= self.p_log <= 1.0 and 0.0 <= self.p_acc <= 1.0):
            raise ValueError("p_log and p_acc must be probabilities")


class GrowRateTable:
    def __init__(self, rows: list[GrowRow]):
        self.rows = sorted(rows, key=lambda r: (r.p, r.d_cult, r.d_m, r.c_gap))

    def __len__(self) -> int:
        return len(self.rows)

    def slice(self, p: float, d_cult: int) -> list[GrowRow]:
        return [
            r for r in self.rows
            if r.d_cult == d_cult and math.isclose(r.p, p, rel_tol=1e-9)
        ]

    @classmethod
    def from_csv(cls, text_or_path: str | Path) -> "GrowRateTable":
        if isinstance(text_or_path, Path) or "\n" not in str(text_or_path):
            text = Path(text_or_path).read_text()
        else:
            text = str(text_or_path)
        lines = [ln for ln in text.splitlines() if ln.strip() and not
                 ln.lstrip().startswith("#")]
        reader = csv.DictReader(io.StringIO("\n".join(lines)))
        missing = set(CSV_HEADER) - set(reader.fieldnames or ())
        if missing:
            raise GrowDataError(f"growing-rate CSV lacks columns: {sorted(missing)}")
        rows = [
            GrowRow(
                p=float(rec["p"]), d_cult=int(rec["d_cult"]),
                d_m=int(rec["d_m"]), c_gap=float(rec["c_gap"]),
                p_log=float(rec["p_log"]), p_acc=float(rec["p_acc"]),
            )
            for rec in reader
        ]
        return cls(rows)

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out)
        writer.writerow(CSV_HEADER)
        for r in self.rows:
            writer.writerow([r.p, r.d_cult, r.d_m, r.c_gap, r.p_log, r.p_acc])
        return out.getvalue()


def _interp_in_gap(rows: list[GrowRow], c_gap: float) -> tuple[float, float]:
    """Interpolate (p_log, p_acc) at fixed d_m: p_log linearly on the log
    scale, p_acc linearly; clamped to the tabulated c_gap range."""
    rows = sorted(rows, key=lambda r: r.c_gap)
    if c_gap <= rows[0].c_gap:
        return rows[0].p_log, rows[0].p_acc
    if c_gap >= rows[-1].c_gap:
        return rows[-1].p_log, rows[-1].p_acc
    for lo, hi in zip(rows, rows[1:]):
        if lo.c_gap <= c_gap <= hi.c_gap:
            if math.isclose(c_gap, lo.c_gap):
                return lo.p_log, lo.p_acc
            if math.isclose(c_gap, hi.c_gap):
                return hi.p_log, hi.p_acc
            t = (c_gap - lo.c_gap) / (hi.c_gap - lo.c_gap)
            log_p = (1 - t) * math.log(max(lo.p_log, 1e-300)) + t * math.log(
                max(hi.p_log, 1e-300)
            )
            return math.exp(log_p), (1 - t) * lo.p_acc + t * hi.p_acc
    raise AssertionError("unreachable")


def growing_rates(
    table: GrowRateTable, p: float, d_cult: int, d_m: int, c_gap: float
) -> tuple[float, float]:
    """Look up (p_log, p_acc) for a growing operation.

    Exact table knots are returned as stored.  Otherwise p_log is
    interpolated linearly in c_gap on the log scale; in d_m it is
    interpolated log-linearly between tabulated values and extrapolated
    beyond the largest tabulated d_m with a log-linear fit through the three
    largest tabulated values.  p_acc beyond the largest tabulated d_m reuses
    the largest-d_m value, which never overstates performance since
    acceptance improves with d_m.
    """
    rows = table.slice(p, d_cult)
    if not rows:
        raise GrowDataError(f"no growing data for p={p}, d_cult={d_cult}")
    by_dm: dict[int, list[GrowRow]] = {}
    for r in rows:
        by_dm.setdefault(r.d_m, []).append(r)
    if len(by_dm) < 2:
        raise GrowDataError(
            f"growing data for p={p}, d_cult={d_cult} spans a single d_m; "
            "need at least two for extrapolation"
        )
    dms = sorted(by_dm)

    if d_m in by_dm:
        return _interp_in_gap(by_dm[d_m], c_gap)

    at_dm = {dm: _interp_in_gap(by_dm[dm], c_gap) for dm in dms}

    if d_m > dms[-1]:
        anchor_dms = dms[-3:]
        logs = [math.log(max(at_dm[dm][0], 1e-300)) for dm in anchor_dms]
        if len(anchor_dms) >= 2:
            xbar = sum(anchor_dms) / len(anchor_dms)
            ybar = sum(logs) / len(logs)
            denom = sum((x - xbar) ** 2 for x in anchor_dms)
            slope = (
                sum((x - xbar) * (y - ybar) for x, y in zip(anchor_dms, logs))
                / denom
            )
            # Never extrapolate upward: growing does not get worse with d_m.
            slope = min(slope, 0.0)
            p_log = math.exp(ybar + slope * (d_m - xbar))
        else:
            p_log = at_dm[anchor_dms[-1]][0]
        p_acc = at_dm[dms[-1]][1]
        return min(p_log, 1.0), p_acc

    if d_m < dms[0]:
        return at_dm[dms[0]]

    lo = max(dm for dm in dms if dm < d_m)
    hi = min(dm for dm in dms if dm > d_m)
    t = (d_m - lo) / (hi - lo)
    log_p = (1 - t) * math.log(max(at_dm[lo][0], 1e-300)) + t * math.log(
        max(at_dm[hi][0], 1e-300)
    )
    return math.exp(log_p), (1 - t) * at_dm[lo][1] + t * at_dm[hi][1]


def grow_pauli_rates(
    table: GrowRateTable, p: float, d_cult: int, d_m: int, c_gap: float,
    r_y: float,
) -> tuple[PauliRates, float]:
    """Split the tabulated growing failure rate into per-Pauli rates and
    return them together with the acceptance rate."""
    if d_m == d_cult:
        return PauliRates(), 1.0
    p_log, p_acc = growing_rates(table, p, d_cult, d_m, c_gap)
    base = p_log / (2.0 * (1.0 + r_y))
    return PauliRates(pX=base, pY=r_y * base, pZ=base), p_acc
