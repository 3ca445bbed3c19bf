"""High-throughput grid-world simulator for exploration of unknown terrains.

A robot with a range- and line-of-sight-limited sensor explores a hidden
obstacle grid one cardinal move at a time, rewarded for newly discovered
cells. The package bundles the episode engine, a seeded procedural terrain
generator, frontier-based baseline planners, a batch experiment harness,
and an interactive play server.
"""

from .env import (
    Action,
    DiscoveryMask,
    EnvConfig,
    Environment,
    EpisodeFinished,
    StartBlocked,
    StepOutcome,
    Termination,
    encode_observation,
    normalized_score,
    ROBOT_VALUE,
)
from .grid import (
    Cell,
    FREE_VALUE,
    OBSTACLE_VALUE,
    ShapeMismatch,
    TerrainMap,
)
from .harness import (
    BatchResult,
    CoverageCurve,
    EpisodeTrace,
    Heatmap,
    ReplayMismatch,
    accumulate_heatmap,
    coverage_curve,
    knee_ratio,
    load_trace,
    replay_trace,
    run_batch,
    run_episode,
    save_trace,
    throughput_bench,
)
from .planners import (
    Belief,
    Frontier,
    NoReachableFrontier,
    ScriptExhausted,
    cost_policy_next,
    detect_frontiers,
    make_policy,
    shortest_path,
    utility_policy_next,
)
from .procgen import (
    DifficultyVector,
    GenerationFailed,
    GenSpec,
    ShapeTooSmall,
    fundamental_positions,
    generate,
    generate_random,
    generate_structured,
    is_solvable,
)
from .sensing import line_of_sight, sensor_sweep, traverse_ray

__version__ = "0.1.0"

__all__ = [
    "Action",
    "Belief",
    "BatchResult",
    "Cell",
    "CoverageCurve",
    "DifficultyVector",
    "DiscoveryMask",
    "EnvConfig",
    "Environment",
    "EpisodeFinished",
    "EpisodeTrace",
    "FREE_VALUE",
    "Frontier",
    "GenSpec",
    "GenerationFailed",
    "Heatmap",
    "NoReachableFrontier",
    "OBSTACLE_VALUE",
    "ROBOT_VALUE",
    "ReplayMismatch",
    "ScriptExhausted",
    "ShapeMismatch",
    "ShapeTooSmall",
    "StartBlocked",
    "StepOutcome",
    "TerrainMap",
    "Termination",
    "accumulate_heatmap",
    "cost_policy_next",
    "coverage_curve",
    "detect_frontiers",
    "encode_observation",
    "fundamental_positions",
    "generate",
    "generate_random",
    "generate_structured",
    "is_solvable",
    "knee_ratio",
    "line_of_sight",
    "load_trace",
    "make_policy",
    "normalized_score",
    "replay_trace",
    "run_batch",
    "run_episode",
    "save_trace",
    "sensor_sweep",
    "shortest_path",
    "throughput_bench",
    "traverse_ray",
    "utility_policy_next",
]
