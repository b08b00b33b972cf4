import json

import pytest
from fastapi.testclient import TestClient

from msdforge.service.app import app

client = TestClient(app, raise_server_exceptions=False)


def test_healthz():
    assert client.get("/healthz").json() == {"status": "ok"}


def test_cost_single_level():
    resp = client.post("/cost", json={
        "scheme": "sng", "d_out": 19, "d_x": 8, "d_z": 12, "d_m": 7,
    })
    assert resp.status_code == 200
    body = resp.json()
    assert body["space"] == 2265
    assert body["time"] == 512
    assert body["d_h"] == 24 and body["d_v"] == 12


def test_cost_combined_with_interval():
    resp = client.post("/cost", json={
        "scheme": "cmb", "d_out": 39, "d_x": 22, "d_z": 26, "d_m": 13,
        "d_cult": 3, "n_m": 4, "t_intv": 21.7,
    })
    body = resp.json()
    assert body["space"] == 15043
    assert body["time"] == pytest.approx(1388.8)
    assert body["n_m_side"] == 2


def test_cost_invalid_distances():
    resp = client.post("/cost", json={
        "scheme": "sng", "d_out": 3, "d_x": 2, "d_z": 2, "d_m": 1,
    })
    assert resp.status_code == 422
    assert resp.json()["kind"] == "config"


def test_infidelity_single_level():
    resp = client.post("/infidelity", json={"params": {
        "scheme": "sng", "d_out": 11, "d_x": 8, "d_z": 6, "d_m": 5,
        "p": 1e-3, "r_y": 0.1,
    }})
    assert resp.status_code == 200
    body = resp.json()
    assert 0 < body["q_dist_exact"] < 1e-3
    assert 0.5 < body["q_succ"] < 1.0
    assert body["diagnostics"]["channel_count"] > 100


def test_infidelity_with_custom_schedule_and_table():
    from msdforge.circuit import default_stage_schedule
    from msdforge.datafiles import load_grow_table

    resp = client.post("/infidelity", json={
        "params": {
            "scheme": "cmb", "d_out": 39, "d_x": 22, "d_z": 26, "d_m": 13,
            "p": 1e-3, "r_y": 0.1, "d_cult": 3, "n_m": 4, "c_gap": 7.6,
            "t_intv": 21.7, "t_idle": 1.4,
        },
        "schedule": default_stage_schedule().to_labels(),
        "grow_table_csv": load_grow_table().to_csv(),
    })
    assert resp.status_code == 200
    assert resp.json()["q_dist_exact"] < 1e-8


def test_sweep_and_frontier():
    resp = client.post("/sweep", json={
        "scheme": "sng", "d_out": [11, 13], "d_x": [8], "d_z": [6, 8],
        "d_m": [5, 7], "p": 1e-3,
    })
    assert resp.status_code == 200
    body = resp.json()
    assert body["reports"]
    assert body["frontier"]
    schemes = {r["scheme"] for r in body["reports"]}
    assert all(f["scheme"] in schemes for f in body["frontier"])


def test_sweep_empty_grid():
    resp = client.post("/sweep", json={
        "scheme": "sng", "d_out": [11], "d_x": [8], "d_z": [20], "d_m": [5],
        "p": 1e-3,
    })
    assert resp.status_code == 422


def test_verify_layout_endpoint():
    good = client.post("/verify-layout", json={
        "d_out": 19, "d_x": 8, "d_z": 12, "d_m": 7,
    }).json()
    assert good["distance_preserving"]
    bad = client.post("/verify-layout", json={
        "d_out": 19, "d_x": 8, "d_z": 12, "d_m": 5,
    }).json()
    assert not bad["distance_preserving"]
    assert bad["pairing_violations"]
    assert bad["layout_violations"]


def test_schedules_endpoint():
    body = client.post("/schedules", json={"length": 7}).json()
    assert body["count"] == 24
    assert len(body["schedules"]) == 24
    counted = client.post("/schedules",
                          json={"length": 7, "count_only": True}).json()
    assert counted["count"] == 24
    assert counted["schedules"] == []


def test_cycle_sim_endpoint():
    body = client.post("/cycle-sim", json={
        "n_m": 4, "d_m": 13, "d_cult": 3, "p": 1e-3, "c_gap": 7.6,
        "seed": 1, "n_stages": 500,
    }).json()
    assert body["t_m"] == 2
    assert body["t_intv_mean"] > 14
    assert body["discards"]


def test_cycle_sim_requires_rate_sources():
    resp = client.post("/cycle-sim", json={"n_m": 4, "d_m": 13, "d_cult": 3})
    assert resp.status_code == 422


def test_fit_endpoint():
    from msdforge.ansatz import Setting, builtin_params
    from msdforge.fitting import synthesize_samples

    truth = builtin_params(Setting.TRIANGULAR_MEMORY)
    csv = synthesize_samples(
        truth, "scaled-power",
        [1e-4, 2e-4, 4e-4, 7e-4, 1e-3], [3, 5, 7, 9, 11, 13],
    ).to_csv()
    body = client.post("/fit", json={"samples_csv": csv}).json()
    assert body["params"]["p_th"] == pytest.approx(truth.p_th, rel=0.01)
    assert body["residual_norm"] < 1e-6


def test_fit_loocv_endpoint():
    from msdforge.ansatz import Setting, builtin_params
    from msdforge.fitting import synthesize_samples

    truth = builtin_params(Setting.TRIANGULAR_MEMORY)
    csv = synthesize_samples(
        truth, "scaled-power", [2e-4, 5e-4, 1e-3], [3, 5, 7, 9],
    ).to_csv()
    body = client.post("/fit", json={
        "samples_csv": csv, "loocv": True,
        "candidates": ["none", "scaled-power"],
    }).json()
    assert body["model"] in ("none", "scaled-power")
    assert len(body["loocv_scores"]) == 2


def test_report_roundtrip_through_json():
    resp = client.post("/infidelity", json={"params": {
        "scheme": "sng", "d_out": 11, "d_x": 8, "d_z": 6, "d_m": 5,
    }})
    body = json.loads(resp.text)
    again = client.post("/infidelity", json={"params": {
        "scheme": "sng", "d_out": 11, "d_x": 8, "d_z": 6, "d_m": 5,
    }})
    assert json.loads(again.text) == body
