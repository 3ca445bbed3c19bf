"""Batch experiment runner and episode artifacts.

Episodes are recorded as replayable traces (JSON, one document per
episode); everything downstream — metrics tables, visitation/obstacle
heatmaps, coverage-vs-distance curves — is derived from traces, so any
reported number can be regenerated from the trace files alone. Episodes
are independent work items: batches may run in a process pool and produce
bit-identical results at any parallelism degree.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .env import Action, EnvConfig, Environment, Termination, normalized_score
from .grid import Cell, ShapeMismatch
from .planners import Belief, NoReachableFrontier, Policy, ScriptExhausted, make_policy
from .procgen import DifficultyVector, GenSpec, generate

METRICS_HEADER = "episode,seed,steps,distance,total_reward,normalized_score,coverage,termination"


class ReplayMismatch(RuntimeError):
    """A trace replay diverged from the recorded rewards."""


@dataclass
class EpisodeTrace:
    gen_spec: GenSpec
    config: EnvConfig
    actions: list[Action]
    rewards: list[float]
    poses: list[Cell]
    termination: Termination
    total_reward: float
    normalized_score: float
    coverage_final: float
    steps: int

    @property
    def distance(self) -> int:
        """Cells actually traveled (invalid steps do not move the robot)."""
        return sum(1 for a, b in zip(self.poses, self.poses[1:]) if a != b)

    def to_dict(self) -> dict:
        gs, cfg = self.gen_spec, self.config
        dv = gs.difficulty
        return {
            "gen_spec": {
                "shape": list(gs.shape),
                "mode": gs.mode,
                "difficulty": [dv.d_t, dv.d_m, dv.d_b] if dv else None,
                "seed": gs.seed,
            },
            "config": {
                "shape": list(cfg.shape),
                "sensor_radius": cfg.sensor_radius,
                "beta": cfg.beta,
                "r_move": cfg.r_move,
                "bonuses_enabled": cfg.bonuses_enabled,
                "max_steps": cfg.max_steps,
                "start": list(cfg.start),
                "seed": cfg.seed,
            },
            "actions": [a.letter for a in self.actions],
            "rewards": self.rewards,
            "poses": [[p.row, p.col] for p in self.poses],
            "termination": self.termination.value,
            "total_reward": self.total_reward,
            "normalized_score": self.normalized_score,
            "coverage_final": self.coverage_final,
            "steps": self.steps,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EpisodeTrace":
        gs = data["gen_spec"]
        cfg = data["config"]
        dv = gs.get("difficulty")
        return cls(
            gen_spec=GenSpec(
                shape=tuple(gs["shape"]),
                mode=gs["mode"],
                difficulty=DifficultyVector(*dv) if dv else None,
                seed=gs["seed"],
            ),
            config=EnvConfig(
                shape=tuple(cfg["shape"]),
                sensor_radius=cfg["sensor_radius"],
                beta=cfg["beta"],
                r_move=cfg["r_move"],
                bonuses_enabled=cfg["bonuses_enabled"],
                max_steps=cfg["max_steps"],
                start=tuple(cfg["start"]),
                seed=cfg["seed"],
            ),
            actions=[Action.from_letter(t) for t in data["actions"]],
            rewards=list(data["rewards"]),
            poses=[Cell(r, c) for r, c in data["poses"]],
            termination=Termination(data["termination"]),
            total_reward=data["total_reward"],
            normalized_score=data["normalized_score"],
            coverage_final=data["coverage_final"],
            steps=data["steps"],
        )


def save_trace(trace: EpisodeTrace, path: str | Path) -> None:
    Path(path).write_text(json.dumps(trace.to_dict()) + "\n")


def load_trace(path: str | Path) -> EpisodeTrace:
    return EpisodeTrace.from_dict(json.loads(Path(path).read_text()))


def run_episode(gen_spec: GenSpec, config: EnvConfig, policy: str | Policy) -> EpisodeTrace:
    """Generate terrain, drive one episode, record the full trace.

    String policies are resolved fresh with seed = gen_spec.seed, so a
    batch's episodes are self-contained and order-independent.
    """
    if isinstance(policy, str):
        policy = make_policy(policy, sensor_radius=config.sensor_radius, seed=gen_spec.seed)
    terrain = generate(
        gen_spec, start=config.start,
        sensor_radius=config.sensor_radius, beta=config.beta,
    )
    env = Environment(config)
    env.reset(terrain)
    actions: list[Action] = []
    rewards: list[float] = []
    poses = [env.pose]
    while not env.done:
        try:
            action = policy(Belief.from_env(env))
        except (NoReachableFrontier, ScriptExhausted):
            break
        outcome = env.step(action)
        actions.append(Action(action))
        rewards.append(outcome.reward)
        poses.append(env.pose)
    return EpisodeTrace(
        gen_spec=gen_spec,
        config=config,
        actions=actions,
        rewards=rewards,
        poses=poses,
        termination=env.termination,
        total_reward=env.total_reward,
        normalized_score=normalized_score(env.total_reward, config.n_cells),
        coverage_final=env.coverage,
        steps=env.steps,
    )


@dataclass
class ReplayResult:
    """Per-step series recomputed by driving a trace through a fresh env."""

    distances: np.ndarray  # after reset and after each traveled cell
    coverages: np.ndarray
    final_known: np.ndarray
    final_pose: Cell


def replay_trace(trace: EpisodeTrace, *, verify: bool = True) -> ReplayResult:
    """Re-execute a trace; with verify, demand exact reward agreement."""
    terrain = generate(
        trace.gen_spec, start=trace.config.start,
        sensor_radius=trace.config.sensor_radius, beta=trace.config.beta,
    )
    env = Environment(trace.config)
    env.reset(terrain)
    distances = [0]
    coverages = [env.coverage]
    for i, action in enumerate(trace.actions):
        outcome = env.step(action)
        if verify and outcome.reward != trace.rewards[i]:
            raise ReplayMismatch(
                f"step {i}: reward {outcome.reward} != recorded {trace.rewards[i]}"
            )
        if verify and env.pose != trace.poses[i + 1]:
            raise ReplayMismatch(f"step {i}: pose {env.pose} != {trace.poses[i + 1]}")
        if outcome.info["distance_traveled"] == distances[-1] + 1:
            distances.append(outcome.info["distance_traveled"])
            coverages.append(outcome.info["coverage"])
    if verify and env.termination != trace.termination:
        raise ReplayMismatch(f"termination {env.termination} != {trace.termination}")
    return ReplayResult(
        distances=np.asarray(distances),
        coverages=np.asarray(coverages),
        final_known=env.known_grid(),
        final_pose=env.pose,
    )


@dataclass
class Heatmap:
    visitation: np.ndarray
    obstacle_hits: np.ndarray
    episodes: int


def accumulate_heatmap(traces: list[EpisodeTrace]) -> Heatmap:
    """Pose visitation counts plus per-trace discovered-obstacle presence."""
    if not traces:
        raise ValueError("no traces")
    shape = traces[0].config.shape
    for t in traces:
        if t.config.shape != shape:
            raise ShapeMismatch(f"trace shapes differ: {t.config.shape} vs {shape}")
    visitation = np.zeros(shape, dtype=np.int64)
    obstacle_hits = np.zeros(shape, dtype=np.int64)
    for t in traces:
        for pose in t.poses:
            visitation[pose.row, pose.col] += 1
        replay = replay_trace(t, verify=False)
        obstacle_hits += replay.final_known == 2
    return Heatmap(visitation, obstacle_hits, len(traces))


@dataclass
class CoverageCurve:
    """Coverage-vs-distance aggregation over a batch of episodes.

    Episodes shorter than the longest are padded with their final coverage;
    std is the population standard deviation.
    """

    distance: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    episodes: int


def coverage_curve(traces: list[EpisodeTrace]) -> CoverageCurve:
    series = [replay_trace(t, verify=False) for t in traces]
    longest = max(len(s.distances) for s in series)
    table = np.empty((len(series), longest), dtype=np.float64)
    for i, s in enumerate(series):
        table[i, : len(s.coverages)] = s.coverages
        table[i, len(s.coverages):] = s.coverages[-1]
    return CoverageCurve(
        distance=np.arange(longest),
        mean=table.mean(axis=0),
        std=table.std(axis=0),
        episodes=len(series),
    )


def knee_ratio(distances: np.ndarray, coverages: np.ndarray) -> float | None:
    """End-stage slowdown measure for one episode's coverage series.

    Compares distance spent per percentage point of coverage in the last
    five absolute points of coverage against the middle half of the climb.
    None when the series is too degenerate to measure.
    """
    c0 = float(coverages[0])
    c_end = float(coverages[-1])
    span = c_end - c0
    if span <= 0.05:
        return None

    def dist_at(c: float) -> float:
        idx = int(np.searchsorted(coverages, c, side="left"))
        return float(distances[min(idx, len(distances) - 1)])

    mid_lo, mid_hi = c0 + 0.25 * span, c0 + 0.75 * span
    last_lo = max(c0, c_end - 0.05)
    mid_pp = (dist_at(mid_hi) - dist_at(mid_lo)) / (100.0 * (mid_hi - mid_lo))
    last_pp = (dist_at(c_end) - dist_at(last_lo)) / (100.0 * (c_end - last_lo))
    if mid_pp <= 0:
        return None
    return last_pp / mid_pp


@dataclass
class BatchResult:
    traces: list[EpisodeTrace]
    failures: list[tuple[int, str]]
    aggregates: dict[str, float]


def _episode_job(args: tuple[GenSpec, EnvConfig, str]) -> EpisodeTrace:
    return run_episode(*args)


def run_batch(
    template: GenSpec,
    config: EnvConfig,
    policy: str,
    episodes: int,
    parallelism: int = 1,
) -> BatchResult:
    """Run episodes seeded template.seed + i; aggregate over successes."""
    if episodes < 1:
        raise ValueError("episodes must be >= 1")
    jobs = []
    for i in range(episodes):
        seed = template.seed + i
        jobs.append((replace(template, seed=seed), replace(config, seed=seed), policy))
    results: dict[int, EpisodeTrace] = {}
    failures: list[tuple[int, str]] = []
    if parallelism <= 1:
        for i, job in enumerate(jobs):
            try:
                results[i] = _episode_job(job)
            except Exception as exc:
                failures.append((i, f"{type(exc).__name__}: {exc}"))
    else:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            futures = {pool.submit(_episode_job, job): i for i, job in enumerate(jobs)}
            for future, i in futures.items():
                try:
                    results[i] = future.result()
                except Exception as exc:
                    failures.append((i, f"{type(exc).__name__}: {exc}"))
    failures.sort()
    traces = [results[i] for i in sorted(results)]
    aggregates: dict[str, float] = {}
    if traces:
        for key, values in (
            ("normalized_score", [t.normalized_score for t in traces]),
            ("steps", [t.steps for t in traces]),
            ("distance", [t.distance for t in traces]),
            ("coverage", [t.coverage_final for t in traces]),
        ):
            arr = np.asarray(values, dtype=np.float64)
            aggregates[f"{key}_mean"] = float(arr.mean())
            aggregates[f"{key}_std"] = float(arr.std())
    return BatchResult(traces, failures, aggregates)


def metrics_rows(traces: list[EpisodeTrace]) -> list[str]:
    """CSV lines (header first) summarizing a batch, one row per episode."""
    lines = [METRICS_HEADER]
    for i, t in enumerate(traces):
        lines.append(
            f"{i},{t.gen_spec.seed},{t.steps},{t.distance},"
            f"{t.total_reward!r},{t.normalized_score!r},{t.coverage_final!r},"
            f"{t.termination.value}"
        )
    return lines


def write_batch_outputs(out_dir: str | Path, result: BatchResult) -> None:
    """Persist traces plus derived metrics/heatmap/curve artifacts."""
    out = Path(out_dir)
    (out / "traces").mkdir(parents=True, exist_ok=True)
    for i, trace in enumerate(result.traces):
        save_trace(trace, out / "traces" / f"episode_{i:05d}.json")
    (out / "metrics.csv").write_text("\n".join(metrics_rows(result.traces)) + "\n")
    summary = {
        "aggregates": result.aggregates,
        "failures": result.failures,
        "episodes": len(result.traces),
        "std": "population",
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    if result.traces:
        heat = accumulate_heatmap(result.traces)
        (out / "heatmap.json").write_text(json.dumps({
            "visitation": heat.visitation.tolist(),
            "obstacle_hits": heat.obstacle_hits.tolist(),
            "episodes": heat.episodes,
        }) + "\n")
        curve = coverage_curve(result.traces)
        (out / "coverage_curve.json").write_text(json.dumps({
            "distance": curve.distance.tolist(),
            "mean": curve.mean.tolist(),
            "std": curve.std.tolist(),
            "episodes": curve.episodes,
            "std_kind": "population",
        }) + "\n")


def throughput_bench(config: EnvConfig, steps: int, *, gen_spec: GenSpec | None = None) -> float:
    """Wall-clock steps/second of one env driven by uniform-valid actions."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    spec = gen_spec or GenSpec(
        shape=config.shape, mode="structured",
        difficulty=DifficultyVector(2, 2, 1), seed=config.seed,
    )
    terrain = generate(
        spec, start=config.start,
        sensor_radius=config.sensor_radius, beta=config.beta,
    )
    env = Environment(config)
    env.reset(terrain)
    rows, cols = config.shape
    obstacles = terrain.obstacles
    # Per-cell action validity, precomputed so the driver costs almost nothing.
    valid = np.zeros((rows, cols, 4), dtype=bool)
    valid[1:, :, 0] = ~obstacles[:-1, :]
    valid[:, :-1, 1] = ~obstacles[:, 1:]
    valid[:-1, :, 2] = ~obstacles[1:, :]
    valid[:, 1:, 3] = ~obstacles[:, :-1]
    rng = np.random.default_rng(config.seed)
    block = [int(x) for x in rng.integers(0, 4, size=1 << 16)]
    mask = (1 << 16) - 1
    bi = 0
    step = env.step
    reset = env.reset
    t0 = time.perf_counter()
    for _ in range(steps):
        # Rejection sampling keeps the draw uniform over the valid subset.
        row = valid[env._pr, env._pc]
        a = block[bi & mask]
        bi += 1
        while not row[a]:
            a = block[bi & mask]
            bi += 1
        if step(a).done:
            reset()
    elapsed = time.perf_counter() - t0
    return steps / elapsed
