import json

import pytest

from stlfd.envs import GridEnv, MountainCarEnv, get_env, load_map
from stlfd.features import (
    FeatureError,
    Trace,
    UnreachableGoalError,
    available_channels,
    best_goal_order,
    bfs_time_bound,
    channel_value,
    extract_signal,
    goal_sequence_bound,
    load_demos,
    manhattan,
    save_demos,
    trace_from_json,
    trace_to_json,
)
from stlfd.stl import parse_formula, robustness

from oracles import exhaustive_shortest_path

# 6x6 field used throughout: two obstacle cells in the middle, start at the
# bottom left, goal four columns over at the top
FIELD = load_map(
    """
    . . . . G .
    . . . . . .
    . # # . . .
    . . . . . .
    S . . . . .
    . . . . . .
    """,
    env_id="field6",
)

THROUGH = Trace(
    states=((4, 0), (4, 1), (4, 2), (3, 2), (2, 2), (1, 2), (0, 2), (0, 3), (0, 4)),
    actions=("R", "R", "U", "U", "U", "U", "R", "R"),
)
DETOUR = Trace(
    states=((4, 0), (4, 1), (4, 2), (4, 3), (4, 4), (3, 4), (2, 4), (1, 4), (0, 4)),
    actions=("R", "R", "R", "R", "U", "U", "U", "U"),
)


def test_trace_validation():
    with pytest.raises(FeatureError):
        Trace(states=())
    with pytest.raises(FeatureError):
        Trace(states=((0, 0), (0, 1)), actions=("R", "R"))
    assert len(Trace(states=((0, 0),))) == 1
    # actions may be omitted entirely for state-only traces
    assert Trace(states=((0, 0), (0, 1))).actions == ()


def test_manhattan():
    assert manhattan((0, 0), (3, 4)) == 7
    assert manhattan((2, 2), (2, 2)) == 0


def test_grid_channel_inventory():
    assert available_channels(FIELD) == ("d_obs", "dist_red", "d_goal", "d_goal_1", "t")
    multi = get_env("grid7_multi")
    assert "d_goal_2" in available_channels(multi)
    mc = get_env("mountaincar50")
    assert available_channels(mc) == ("d_flag", "t")


def test_extracted_channels_on_worked_trajectories():
    sig = extract_signal(FIELD, THROUGH)
    assert sig.channels["d_obs"] == (3.0, 2.0, 2.0, 1.0, 0.0, 1.0, 2.0, 3.0, 4.0)
    assert sig.channels["d_goal"] == (8.0, 7.0, 6.0, 5.0, 4.0, 3.0, 2.0, 1.0, 0.0)
    assert sig.channels["dist_red"] == sig.channels["d_obs"]
    assert sig.channels["t"] == tuple(float(i) for i in range(9))

    detour = extract_signal(FIELD, DETOUR)
    assert detour.channels["d_obs"] == (3.0, 2.0, 2.0, 3.0, 4.0, 3.0, 2.0, 3.0, 4.0)
    assert detour.channels["d_goal"] == sig.channels["d_goal"]


def test_worked_trajectories_against_specs():
    avoid = parse_formula("G[0,9](d_obs >= 1)")
    reach = parse_formula("F[0,9](d_goal < 1)")
    through = extract_signal(FIELD, THROUGH)
    detour = extract_signal(FIELD, DETOUR)
    assert robustness(avoid, through).value == -1.0
    assert robustness(avoid, detour).value == 1.0
    assert robustness(reach, through).value == 1.0
    assert robustness(reach, detour).value == 1.0


def test_obstacle_free_grid_makes_avoidance_vacuous():
    env = load_map("S . G")
    assert channel_value(env, "d_obs", (0, 1), 0) == float(env.width + env.height)


def test_goal_override_changes_d_goal_only():
    sig = extract_signal(FIELD, THROUGH, goal_override=(4, 4))
    assert sig.channels["d_goal"][0] == 4.0  # (4,0) -> (4,4)
    # the per-goal channel still points at the declared goal
    assert sig.channels["d_goal_1"][0] == 8.0


def test_per_goal_channels_on_multi_goal_map():
    env = get_env("grid7_multi")
    state = (6, 0)
    assert channel_value(env, "d_goal_1", state, 0) == 12.0
    assert channel_value(env, "d_goal_2", state, 0) == 6.0
    assert channel_value(env, "d_goal", state, 0) == 6.0  # nearest of the two
    with pytest.raises(FeatureError, match="out of range"):
        channel_value(env, "d_goal_3", state, 0)
    with pytest.raises(FeatureError, match="unknown channel"):
        channel_value(env, "d_goal_x", state, 0)
    with pytest.raises(FeatureError, match="unknown channel"):
        channel_value(env, "altitude", state, 0)


def test_channel_subset_extraction():
    sig = extract_signal(FIELD, THROUGH, channels=("d_goal", "t"))
    assert set(sig.channels) == {"d_goal", "t"}


def test_mountain_car_flag_distance():
    env = get_env("mountaincar50")
    assert channel_value(env, "d_flag", env.start, 0) == 28.0
    assert channel_value(env, "d_flag", (47, 10), 5) == 0.0
    assert channel_value(env, "d_flag", (49, 0), 9) == -2.0
    trace = Trace(states=((19, 25), (30, 30), (48, 33)), actions=(2, 2))
    sig = extract_signal(env, trace)
    r = robustness(parse_formula("F[0,10](d_flag <= 0)"), sig)
    assert r.value == 1.0 and r.satisfied


# --------------------------------------------------------------------------
# Time bounds
# --------------------------------------------------------------------------


@pytest.mark.parametrize(
    "env_id,expected",
    [("grid5", 8), ("grid7", 12), ("frozenlake4", 6), ("frozenlake8", 14)],
)
def test_bfs_bounds_on_builtin_maps(env_id, expected):
    assert bfs_time_bound(get_env(env_id)) == expected


def test_bfs_agrees_with_exhaustive_enumeration():
    for env_id in ("grid5", "grid7", "frozenlake4", "frozenlake4_test"):
        env = get_env(env_id)
        assert bfs_time_bound(env) == exhaustive_shortest_path(env, env.start, env.goal)


def test_bfs_detours_around_obstacles():
    env = load_map(
        """
        S # G
        . # .
        . . .
        """
    )
    # straight across is two steps but blocked; around the wall is six
    assert bfs_time_bound(env) == 6


def test_bfs_unreachable_goal():
    env = load_map(
        """
        S # G
        . # .
        . # .
        """
    )
    with pytest.raises(UnreachableGoalError):
        bfs_time_bound(env)
    assert exhaustive_shortest_path(env, env.start, env.goal) is None


def test_bfs_rejects_mountain_car():
    with pytest.raises(FeatureError):
        bfs_time_bound(get_env("mountaincar50"))


def test_goal_order_bounds():
    env = get_env("grid7_multi")
    assert goal_sequence_bound(env, (1, 2)) == 18
    assert goal_sequence_bound(env, (2, 1)) == 12
    assert best_goal_order(env) == ((2, 1), 12)


# --------------------------------------------------------------------------
# Demonstration files
# --------------------------------------------------------------------------


def test_grid_demo_round_trip(tmp_path):
    payload = trace_to_json(FIELD, THROUGH)
    assert payload["env_id"] == "field6"
    assert payload["steps"][0] == {"x": 4, "y": 0, "action": "R"}
    assert payload["steps"][-1] == {"x": 0, "y": 4}
    env_id, back = trace_from_json(payload, env=FIELD)
    assert (env_id, back) == ("field6", THROUGH)

    path = tmp_path / "demo.json"
    save_demos(path, FIELD, [THROUGH])
    assert load_demos(path, env=FIELD) == [("field6", THROUGH)]


def test_demo_list_round_trip(tmp_path):
    path = tmp_path / "demos.json"
    save_demos(path, FIELD, [THROUGH, DETOUR])
    loaded = load_demos(path, env=FIELD)
    assert [t for _, t in loaded] == [THROUGH, DETOUR]
    # a two-element file really is a JSON array
    assert json.loads(path.read_text())[1]["steps"][0] == {
        "x": 4,
        "y": 0,
        "action": "R",
    }


def test_mountain_car_demo_round_trip():
    env = get_env("mountaincar50")
    trace = Trace(states=((19, 25), (19, 24), (20, 26)), actions=(0, 2))
    payload = trace_to_json(env, trace)
    assert payload["steps"][0] == {"bin_pos": 19, "bin_vel": 25, "action": 0}
    assert trace_from_json(payload)[1] == trace


def test_demo_validation_errors():
    with pytest.raises(FeatureError, match="missing its action"):
        trace_from_json(
            {"env_id": "grid5", "steps": [{"x": 4, "y": 0}, {"x": 3, "y": 0}]}
        )
    with pytest.raises(FeatureError, match="must not carry"):
        trace_from_json(
            {
                "env_id": "grid5",
                "steps": [{"x": 4, "y": 0, "action": "U"}, {"x": 3, "y": 0, "action": "U"}],
            }
        )
    with pytest.raises(FeatureError, match="outside"):
        trace_from_json({"env_id": "grid5", "steps": [{"x": 9, "y": 0}]})
    with pytest.raises(FeatureError, match="not one of"):
        trace_from_json(
            {"env_id": "grid5", "steps": [{"x": 4, "y": 0, "action": "X"}, {"x": 3, "y": 0}]}
        )
    with pytest.raises(FeatureError, match="missing integer"):
        trace_from_json({"env_id": "grid5", "steps": [{"x": 4}]})
    with pytest.raises(FeatureError, match="non-empty"):
        trace_from_json({"env_id": "grid5", "steps": []})
    with pytest.raises(FeatureError, match="env_id"):
        trace_from_json({"steps": [{"x": 0, "y": 0}]})


def test_demo_with_unregistered_env_id_loads_unchecked():
    env_id, trace = trace_from_json(
        {"env_id": "somewhere_else", "steps": [{"x": 40, "y": 40}]}
    )
    assert env_id == "somewhere_else"
    assert trace.states == ((40, 40),)


def test_explicit_null_action_on_final_step():
    _, trace = trace_from_json(
        {
            "env_id": "grid5",
            "steps": [{"x": 4, "y": 0, "action": "R"}, {"x": 4, "y": 1, "action": None}],
        }
    )
    assert trace.actions == ("R",)
