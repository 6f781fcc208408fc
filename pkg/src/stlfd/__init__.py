"""Learning from demonstrations with signal temporal logic guidance."""

from stlfd.envs import ENV_IDS, GridEnv, MapError, MountainCarEnv, get_env, load_map
from stlfd.features import (
    FeatureError,
    Trace,
    UnreachableGoalError,
    bfs_time_bound,
    best_goal_order,
    extract_signal,
    load_demos,
    save_demos,
)
from stlfd.inference import (
    DemoScore,
    InferenceError,
    RewardResult,
    infer_reward,
    load_reward,
    rank_demos,
    save_reward,
    save_reward_csv,
    score_demo,
)
from stlfd.qstl import (
    EpisodeRecord,
    MultiGoalResult,
    PrefixMonitor,
    TrainConfig,
    TrainError,
    TrainResult,
    greedy_policy,
    load_policy,
    multi_goal_policy,
    q_stl_train,
    save_policy,
    save_stats_csv,
)
from stlfd.specgraph import (
    CycleError,
    GraphError,
    SpecGraph,
    SpecNode,
    build_graph,
    load_spec_json,
)
from stlfd.stl import (
    Always,
    And,
    Eventually,
    Formula,
    Implies,
    Interval,
    Not,
    Or,
    ParseError,
    Predicate,
    ROB_CAP,
    Robustness,
    Signal,
    StlError,
    Until,
    format_formula,
    parse_formula,
    robustness,
    robustness_prefix,
    satisfies,
)

__version__ = "0.1.0"
