"""Bundled default data: fitted ansatz parameters, growing-rate anchors, and
cultivation black-box figures.  Every loader honours the MSDFORGE_DATA_DIR
environment variable so deployments can swap in their own tables without
touching code.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

from .ansatz import AnsatzParams, Setting
from .growing import GrowDataError, GrowRateTable

_BUNDLED = Path(__file__).parent / "data"


def data_dir() -> Path:
    override = os.environ.get("MSDFORGE_DATA_DIR")
    return Path(override) if override else _BUNDLED


def _resolve(name: str) -> Path:
    path = data_dir() / name
    if not path.exists():
        fallback = _BUNDLED / name
        if fallback.exists():
            return fallback
        raise FileNotFoundError(f"data file {name} not found in {data_dir()}")
    return path


def parse_ansatz_params(raw: dict) -> dict[Setting, AnsatzParams]:
    if set(raw) >= {s.value for s in Setting}:
        return {s: AnsatzParams.from_dict(raw[s.value]) for s in Setting}
    # An object holding a single parameter set applies to every setting.
    single = AnsatzParams.from_dict(raw)
    return {s: single for s in Setting}


def load_ansatz_params(path: str | Path | None = None) -> dict[Setting, AnsatzParams]:
    src = Path(path) if path is not None else _resolve("ansatz_params.json")
    return parse_ansatz_params(json.loads(src.read_text()))


def load_grow_table(path: str | Path | None = None) -> GrowRateTable:
    src = Path(path) if path is not None else _resolve("grow_anchors.csv")
    return GrowRateTable.from_csv(src)


@dataclass(frozen=True)
class CultivationSpec:
    p: float
    d_cult: int
    q_cult: float
    q_cult_succ: float
    t_cult: int  # time steps for one successful attempt
    n_cult: int  # qubits for one cultivation patch


@lru_cache(maxsize=4)
def _cultivation_entries(src: str) -> tuple[CultivationSpec, ...]:
    raw = json.loads(Path(src).read_text())
    return tuple(
        CultivationSpec(
            p=float(e["p"]), d_cult=int(e["d_cult"]),
            q_cult=float(e["q_cult"]), q_cult_succ=float(e["q_cult_succ"]),
            t_cult=int(e["t_cult"]), n_cult=int(e["n_cult"]),
        )
        for e in raw["entries"]
    )


def cultivation_spec(
    p: float, d_cult: int, path: str | Path | None = None
) -> CultivationSpec:
    src = Path(path) if path is not None else _resolve("cultivation.json")
    entries = _cultivation_entries(str(src))
    exact = [
        e for e in entries
        if e.d_cult == d_cult and math.isclose(e.p, p, rel_tol=1e-9)
    ]
    if exact:
        return exact[0]
    # Cultivation figures are only known at the tabulated operating points;
    # pick the nearest p at this d_cult rather than inventing a scaling.
    candidates = [e for e in entries if e.d_cult == d_cult]
    if not candidates:
        raise GrowDataError(f"no cultivation data for d_cult={d_cult}")
    best = min(candidates, key=lambda e: abs(math.log(e.p / p)))
    return CultivationSpec(
        p=p, d_cult=d_cult, q_cult=best.q_cult,
        q_cult_succ=best.q_cult_succ, t_cult=best.t_cult, n_cult=best.n_cult,
    )
