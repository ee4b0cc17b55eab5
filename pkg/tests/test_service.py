"""Steering API: lifecycle, job polling, invariants, persistence."""
import math
import time

import pytest
from fastapi.testclient import TestClient

from hctps.benchmarks import FunctionId
from hctps.experiments import experiment_path, load, run_phase, search_cube
from hctps.ga import GAConfig
from hctps.service import Job, create_app


@pytest.fixture()
def client(tmp_path):
    app = create_app(store_dir=tmp_path / "store")
    with TestClient(app) as c:
        c.app = app
        yield c


def wait_job(client, job_id, timeout=60.0):
    deadline = time.time() + timeout
    while time.time() < deadline:
        data = client.get(f"/jobs/{job_id}").json()
        if data["status"] != "running":
            return data
        time.sleep(0.02)
    raise TimeoutError(f"job {job_id} did not finish")


def create_experiment(client, fid="F1", dim=30, seed=42):
    resp = client.post(
        "/experiments", json={"fid": fid, "dim": dim, "config": {"seed": seed}}
    )
    assert resp.status_code == 200, resp.text
    return resp.json()["id"]


def run_global(client, exp_id, n_runs=3):
    resp = client.post(f"/experiments/{exp_id}/global", json={"n_runs": n_runs})
    assert resp.status_code == 200, resp.text
    job = wait_job(client, resp.json()["job_id"])
    assert job["status"] == "done", job
    return job


def test_function_catalog_served(client):
    rows = client.get("/functions").json()
    assert len(rows) == 14
    assert rows[0] == {"id": "F1", "name": "Bent Cigar"}
    assert rows[11] == {"id": "F12", "name": "Rastrigin's"}


def test_create_experiment_fixes_search_cube(client):
    exp_id = create_experiment(client, "F1", 30)
    view = client.get(f"/experiments/{exp_id}").json()
    assert view["status"] == "running"
    assert view["phases"] == []
    cube = view["search_cube"]
    assert cube["lo"] == ["-100.0"] * 30
    assert cube["hi"] == ["100.0"] * 30


def test_create_experiment_validation(client):
    assert client.post("/experiments", json={"fid": "F1", "dim": 2}).status_code == 400
    assert client.post("/experiments", json={"fid": "nope"}).status_code == 400
    bad_config = {"fid": "F1", "config": {"population_size": 7}}
    assert client.post("/experiments", json=bad_config).status_code == 400


def test_duplicate_creations_get_distinct_ids(client):
    ids = {create_experiment(client) for _ in range(5)}
    assert len(ids) == 5


def test_global_phase_lifecycle(client):
    exp_id = create_experiment(client, "F12", seed=7)
    resp = client.post(f"/experiments/{exp_id}/global", json={"n_runs": 3})
    job_id = resp.json()["job_id"]
    progress = client.get(f"/jobs/{job_id}").json()
    assert progress["total"] == 3
    assert 0 <= progress["completed"] <= 3
    done = wait_job(client, job_id)
    assert done["phase_index"] == 0
    view = client.get(f"/experiments/{exp_id}").json()
    assert view["status"] == "awaiting_decision"
    assert view["phases"][0]["phase"] == "global"
    assert view["phases"][0]["stats"]["n_runs"] == 3
    # A second global phase is refused.
    again = client.post(f"/experiments/{exp_id}/global", json={"n_runs": 1})
    assert again.status_code == 409


def test_unknown_routes_404(client):
    assert client.get("/experiments/missing").status_code == 404
    assert client.get("/jobs/missing").status_code == 404
    assert client.post("/experiments/missing/global", json={}).status_code == 404


def test_octants_require_global(client):
    exp_id = create_experiment(client)
    assert client.get(f"/experiments/{exp_id}/octants").status_code == 409
    run_global(client, exp_id)
    octants = client.get(f"/experiments/{exp_id}/octants").json()
    assert len(octants) == 8
    assert octants[0]["bounds"]["lo"] == ["-100.0"] * 3
    assert octants[0]["bounds"]["hi"] == ["0.0"] * 3
    assert octants[7]["bounds"]["hi"] == ["100.0"] * 3
    assert all(o["phases"] == [] for o in octants)


def test_local_phase_attributed_to_octant(client):
    exp_id = create_experiment(client, "F12", seed=7)
    run_global(client, exp_id, n_runs=2)
    resp = client.post(
        f"/experiments/{exp_id}/local",
        json={"octant_index": 5, "scale_exponent": 3, "n_runs": 2},
    )
    assert resp.status_code == 200, resp.text
    job = wait_job(client, resp.json()["job_id"])
    assert job["phase_index"] == 1
    octants = client.get(f"/experiments/{exp_id}/octants").json()
    assert octants[4]["phases"][0]["phase_index"] == 1
    assert octants[4]["phases"][0]["scale_exponent"] == 3
    assert "mean" in octants[4]["phases"][0]["stats"]
    assert all(o["phases"] == [] for i, o in enumerate(octants) if i != 4)


def test_local_requires_global_first(client):
    exp_id = create_experiment(client)
    resp = client.post(
        f"/experiments/{exp_id}/local", json={"octant_index": 1, "n_runs": 1}
    )
    assert resp.status_code == 409


def test_local_preview_scaled_bounds(client):
    exp_id = create_experiment(client, "F1")
    preview = client.get(
        f"/experiments/{exp_id}/local-preview",
        params={"octant_index": 6, "scale_exponent": 80},
    ).json()
    unit = repr(math.ldexp(100.0, -80))
    region = preview["region"]
    assert region["lo"][0] == "0.0" and region["hi"][0] == unit
    assert region["lo"][1] == "-" + unit and region["hi"][1] == "0.0"
    assert region["lo"][2] == "0.0" and region["hi"][2] == unit
    assert len(region["lo"]) == 30
    assert preview["scale_factor"] == 0.5**80
    # m = 0 preview equals the unscaled extension.
    flat = client.get(
        f"/experiments/{exp_id}/local-preview",
        params={"octant_index": 6, "scale_exponent": 0},
    ).json()
    assert flat["region"]["hi"][0] == "100.0"


def test_degenerate_scale_rejected(client):
    exp_id = create_experiment(client)
    run_global(client, exp_id, n_runs=1)
    resp = client.post(
        f"/experiments/{exp_id}/local",
        json={"octant_index": 1, "scale_exponent": 1100, "n_runs": 1},
    )
    assert resp.status_code == 400
    assert "degenerate" in resp.json()["detail"].lower()


def test_custom_box_validated_inside_cube(client):
    exp_id = create_experiment(client, dim=3)
    run_global(client, exp_id, n_runs=1)
    outside = {"lo": ["-200", "0", "0"], "hi": ["0", "1", "1"]}
    resp = client.post(
        f"/experiments/{exp_id}/local", json={"box": outside, "n_runs": 1}
    )
    assert resp.status_code == 400
    inside = {"lo": ["-1", "-1", "-1"], "hi": ["1", "1", "1"]}
    resp = client.post(
        f"/experiments/{exp_id}/local", json={"box": inside, "n_runs": 1}
    )
    assert resp.status_code == 200
    job = wait_job(client, resp.json()["job_id"])
    assert job["status"] == "done"
    view = client.get(f"/experiments/{exp_id}").json()
    assert view["phases"][1]["subcube_spec"] is None
    assert view["phases"][1]["region"]["lo"] == ["-1.0"] * 3


def test_one_job_per_experiment(client):
    exp_id = create_experiment(client)
    state = client.app.state.session
    blocker = Job("blocker", exp_id, total=5)
    state.jobs["blocker"] = blocker
    resp = client.post(f"/experiments/{exp_id}/global", json={"n_runs": 1})
    assert resp.status_code == 409
    blocker.status = "done"
    resp = client.post(f"/experiments/{exp_id}/global", json={"n_runs": 1})
    assert resp.status_code == 200
    wait_job(client, resp.json()["job_id"])


def test_sequential_locals_append(client):
    exp_id = create_experiment(client, "F12", seed=3)
    run_global(client, exp_id, n_runs=1)
    for expected_index in (1, 2):
        resp = client.post(
            f"/experiments/{exp_id}/local",
            json={"octant_index": expected_index, "scale_exponent": 40, "n_runs": 1},
        )
        job = wait_job(client, resp.json()["job_id"])
        assert job["phase_index"] == expected_index
    view = client.get(f"/experiments/{exp_id}").json()
    assert [p["phase"] for p in view["phases"]] == ["global", "local", "local"]


def test_job_stats_match_offline_run(client):
    exp_id = create_experiment(client, "F13", seed=11)
    run_global(client, exp_id, n_runs=3)
    view = client.get(f"/experiments/{exp_id}").json()
    offline = run_phase(
        FunctionId.F13, search_cube(30), GAConfig(seed=11), 3, seed_base=11
    )
    got = view["phases"][0]["stats"]
    assert got["mean"] == offline.stats.mean
    assert got["best"] == offline.stats.best
    assert got["st_dev"] == offline.stats.st_dev
    assert view["phases"][0]["best_values"] == [r.best_value for r in offline.runs]


def test_view_reconstructible_from_persisted_record(client, tmp_path):
    exp_id = create_experiment(client, "F12", seed=5)
    run_global(client, exp_id, n_runs=2)
    store = client.app.state.session.store_dir
    record = load(experiment_path(store, exp_id))
    view = client.get(f"/experiments/{exp_id}").json()
    assert record.experiment_id == view["experiment_id"]
    assert record.status == view["status"]
    assert len(record.phases) == len(view["phases"])
    assert record.phases[0].stats.mean == view["phases"][0]["stats"]["mean"]
    assert [r.best_value for r in record.phases[0].runs] == view["phases"][0]["best_values"]


def test_satisfied_freezes_record(client):
    exp_id = create_experiment(client, "F12", seed=7)
    no_phases = client.post(f"/experiments/{exp_id}/satisfied")
    assert no_phases.status_code == 409
    run_global(client, exp_id, n_runs=2)
    report = client.post(f"/experiments/{exp_id}/satisfied").json()
    assert report["status"] == "satisfied"
    assert report["phase_index"] == 0
    # After global only, the report's best equals the global stats best.
    view = client.get(f"/experiments/{exp_id}").json()
    assert report["best_value"] == view["phases"][0]["stats"]["best"]
    assert report["comparison"]["HCTPS"] == report["comparison"]["GA"]
    denied = client.post(
        f"/experiments/{exp_id}/local", json={"octant_index": 1, "n_runs": 1}
    )
    assert denied.status_code == 409
    again = client.post(f"/experiments/{exp_id}/global", json={"n_runs": 1})
    assert again.status_code == 409
    # Marking satisfied twice replays the frozen report.
    replay = client.post(f"/experiments/{exp_id}/satisfied").json()
    assert replay["best_value"] == report["best_value"]


def test_winning_local_phase_drives_report(client):
    exp_id = create_experiment(client, "F12", seed=7)
    run_global(client, exp_id, n_runs=2)
    resp = client.post(
        f"/experiments/{exp_id}/local",
        json={"octant_index": 3, "scale_exponent": 40, "n_runs": 2},
    )
    wait_job(client, resp.json()["job_id"])
    report = client.post(f"/experiments/{exp_id}/satisfied").json()
    assert report["phase_index"] == 1
    assert report["best_value"] == 0.0
    assert report["comparison"]["winning_phase_index"] == 1
    assert report["comparison"]["HCTPS"]["best"] == 0.0


def test_store_reloaded_on_restart(client, tmp_path):
    exp_id = create_experiment(client, "F12", seed=7)
    run_global(client, exp_id, n_runs=1)
    store = client.app.state.session.store_dir
    fresh = create_app(store_dir=store)
    with TestClient(fresh) as c2:
        view = c2.get(f"/experiments/{exp_id}").json()
        assert view["phases"][0]["phase"] == "global"
        assert view["status"] == "awaiting_decision"
