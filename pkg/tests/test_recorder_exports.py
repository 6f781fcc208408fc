"""Round-trips for demonstrations exported by the browser recorder.

The files under fixtures/recorder/ are written by the recorder's own test
suite (frontend/test/scenarios.test.ts).  readouts.json stores, per
scenario, the clicked cell sequence and the live robustness values the
recorder displayed.  Here we confirm the Python side loads those exports
unchanged, re-serializes them byte for byte, computes the same robustness
numbers, and ranks the three walks the way the scores demand.
"""

import json
from pathlib import Path

import pytest

from stlfd.cli import main
from stlfd.envs import get_env
from stlfd.features import bfs_time_bound, extract_signal, load_demos, save_demos
from stlfd.specgraph import load_spec_json
from stlfd.stl import robustness_prefix

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
RECORDER = FIXTURES / "recorder"
SCENARIOS = ("bad", "good", "incomplete")


@pytest.fixture(scope="module")
def env():
    return get_env("grid5")


@pytest.fixture(scope="module")
def sidecar():
    return json.loads((RECORDER / "readouts.json").read_text())


def demo_path(name):
    return RECORDER / f"demo_{name}.json"


def test_sidecar_covers_every_demo(sidecar):
    assert sorted(sidecar) == sorted(SCENARIOS)
    for name in SCENARIOS:
        assert demo_path(name).exists()


@pytest.mark.parametrize("name", SCENARIOS)
def test_recorded_cells_match_sidecar(name, env, sidecar):
    [(env_id, trace)] = load_demos(demo_path(name), env=env)
    assert env_id == "grid5"
    assert [list(s) for s in trace.states] == sidecar[name]["cells"]


@pytest.mark.parametrize("name", SCENARIOS)
def test_export_bytes_round_trip(name, env, tmp_path):
    [(_, trace)] = load_demos(demo_path(name), env=env)
    resaved = tmp_path / "resaved.json"
    save_demos(resaved, env, [trace])
    assert resaved.read_bytes() == demo_path(name).read_bytes()


@pytest.mark.parametrize("name", SCENARIOS)
def test_live_readout_matches_monitor(name, env, sidecar):
    bound = bfs_time_bound(env)
    graph = load_spec_json(
        FIXTURES / "specs_grid_single.json",
        {"T": 4 * bound, "T_goal": bound},
    )
    [(_, trace)] = load_demos(demo_path(name), env=env)
    signal = extract_signal(env, trace)
    readout = sidecar[name]["readout"]
    assert sorted(readout) == sorted(n.name for n in graph.nodes)
    for node in graph.nodes:
        rho = robustness_prefix(node.formula, signal).value
        assert rho == readout[node.name], node.name


def test_rank_classifies_recorder_demos(tmp_path, monkeypatch):
    monkeypatch.delenv("STLFD_OUT_DIR", raising=False)
    combined = [
        json.loads(demo_path(name).read_text())
        for name in ("good", "bad", "incomplete")
    ]
    demos = tmp_path / "demos.json"
    demos.write_text(json.dumps(combined, indent=2, sort_keys=True) + "\n")
    code = main([
        "rank", "--env", "grid5",
        "--specs", str(FIXTURES / "specs_grid_single.json"),
        "--demos", str(demos), "--out", str(tmp_path),
    ])
    assert code == 0
    payload = json.loads((tmp_path / "ranking.json").read_text())
    by_index = {d["index"]: d for d in payload["demos"]}
    assert by_index[0]["good"] is True   # clean walk to the goal
    assert by_index[1]["good"] is False  # steps onto an obstacle
    assert by_index[2]["good"] is True   # stops early but stays safe
    assert by_index[0]["rank"] == 3
    assert by_index[2]["rank"] == 2
    assert by_index[1]["rank"] == 1
