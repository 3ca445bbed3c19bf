"""Command-line surface: bench, play-trace, throughput, serve."""

from __future__ import annotations

import argparse
import sys

from .env import EnvConfig
from .harness import (
    load_trace,
    replay_trace,
    run_batch,
    throughput_bench,
    write_batch_outputs,
)
from .procgen import DifficultyVector, GenSpec


def _add_shape(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--shape", nargs=2, type=int, default=[21, 21],
                        metavar=("R", "C"), help="grid rows and cols")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridscout",
        description="Grid exploration simulator: batch runs, replay, benchmarks, play server.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    bench = sub.add_parser("bench", help="run an episode batch and write artifacts")
    _add_shape(bench)
    bench.add_argument("--mode", choices=["structured", "random"], default="structured")
    bench.add_argument("--difficulty", default="2,2,1", help="d_t,d_m,d_b (structured mode)")
    bench.add_argument("--policy", default="cost",
                       help="cost | utility | random | scripted:<file>")
    bench.add_argument("--episodes", type=int, default=100)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--max-steps", type=int, default=None)
    bench.add_argument("--sensor-radius", type=int, default=6)
    bench.add_argument("--beta", type=float, default=0.99)
    bench.add_argument("--parallelism", type=int, default=1)
    bench.add_argument("--out", required=True, help="output directory")

    play = sub.add_parser("play-trace", help="replay a recorded trace and verify it")
    play.add_argument("--in", dest="path", required=True, help="trace JSON file")

    thru = sub.add_parser("throughput", help="measure env steps per second")
    _add_shape(thru)
    thru.add_argument("--steps", type=int, default=1_000_000)
    thru.add_argument("--sensor-radius", type=int, default=6)
    thru.add_argument("--seed", type=int, default=0)

    serve = sub.add_parser("serve", help="start the interactive play server")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--static", default=None,
                       help="directory of built UI assets to serve at /")
    serve.add_argument("--idle-timeout", type=float, default=30 * 60.0)
    return parser


def _cmd_bench(args: argparse.Namespace) -> int:
    shape = tuple(args.shape)
    if args.mode == "structured":
        dv = DifficultyVector.parse(args.difficulty)
        template = GenSpec(shape=shape, mode="structured", difficulty=dv, seed=args.seed)
        bonuses = dv.bonuses_enabled
    else:
        template = GenSpec(shape=shape, mode="random", seed=args.seed)
        bonuses = True
    config = EnvConfig(
        shape=shape,
        sensor_radius=args.sensor_radius,
        beta=args.beta,
        bonuses_enabled=bonuses,
        max_steps=args.max_steps,
        seed=args.seed,
    )
    result = run_batch(template, config, args.policy, args.episodes, args.parallelism)
    write_batch_outputs(args.out, result)
    print(f"episodes: {len(result.traces)} ok, {len(result.failures)} failed")
    for key in ("normalized_score", "coverage", "steps", "distance"):
        mean = result.aggregates.get(f"{key}_mean")
        std = result.aggregates.get(f"{key}_std")
        if mean is not None:
            print(f"{key}: mean {mean:.4f} std {std:.4f}")
    print(f"artifacts written to {args.out}")
    return 1 if result.failures else 0


def _cmd_play_trace(args: argparse.Namespace) -> int:
    trace = load_trace(args.path)
    replay_trace(trace)
    print(
        f"replay ok: steps={trace.steps} distance={trace.distance} "
        f"total_reward={trace.total_reward} score={trace.normalized_score:.4f} "
        f"coverage={trace.coverage_final:.4f} termination={trace.termination.value}"
    )
    return 0


def _cmd_throughput(args: argparse.Namespace) -> int:
    config = EnvConfig(shape=tuple(args.shape), sensor_radius=args.sensor_radius,
                       seed=args.seed)
    rate = throughput_bench(config, args.steps)
    print(f"{rate:,.0f} steps/s over {args.steps} steps "
          f"at {config.shape[0]}x{config.shape[1]}, d={config.sensor_radius}")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .server import create_app

    app = create_app(idle_timeout=args.idle_timeout, static_dir=args.static)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "bench": _cmd_bench,
        "play-trace": _cmd_play_trace,
        "throughput": _cmd_throughput,
        "serve": _cmd_serve,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
