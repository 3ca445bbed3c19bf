"""Gym-style adapter over the gridscout engine.

One adapter per training worker; adapters share nothing. The classic
four-tuple step API is used: (observation, reward, done, info). The
observation is the raw 2-D float grid the engine emits, values in
{0, 0.3, 0.6, 1}; consumers that want stacked or flattened inputs can
wrap it.

Action indices are 0:N, 1:E, 2:S, 3:W. An out-of-range index is a caller
bug and raises ValueError; it is never treated as an invalid move.
"""

from dataclasses import dataclass

import numpy as np

from gridscout import DifficultyVector, EnvConfig, Environment, GenSpec, generate

ENV_ID = "GridScout-v0"


@dataclass(frozen=True)
class DiscreteSpace:
    """Action space: integers 0..n-1."""

    n: int

    def contains(self, x) -> bool:
        return isinstance(x, (int, np.integer)) and 0 <= int(x) < self.n

    def sample(self, rng: np.random.Generator) -> int:
        return int(rng.integers(0, self.n))


@dataclass(frozen=True)
class GridSpace:
    """Observation space: 2-D float grid with entries in [low, high]."""

    shape: tuple[int, int]
    low: float = 0.0
    high: float = 1.0

    def contains(self, x) -> bool:
        arr = np.asarray(x)
        return arr.shape == self.shape and bool(
            ((arr >= self.low) & (arr <= self.high)).all()
        )


def _coerce_difficulty(difficulty) -> DifficultyVector | None:
    if difficulty is None or isinstance(difficulty, DifficultyVector):
        return difficulty
    if isinstance(difficulty, str):
        return DifficultyVector.parse(difficulty)
    return DifficultyVector(*(int(v) for v in difficulty))


class GridScoutEnv:
    """Gym-style handle on one exploration episode stream.

    With a fixed seed every reset regenerates the same terrain; without
    one each reset draws a fresh terrain seed, so episodes vary the way a
    training loop expects.
    """

    def __init__(
        self,
        shape: tuple[int, int] = (21, 21),
        mode: str = "structured",
        difficulty=None,
        seed: int | None = None,
        sensor_radius: int = 6,
        beta: float = 0.99,
        max_steps: int | None = None,
    ):
        self._shape = (int(shape[0]), int(shape[1]))
        self._mode = mode
        self._difficulty = _coerce_difficulty(difficulty)
        self._seed = None if seed is None else int(seed)
        self._seed_stream = np.random.default_rng()
        bonuses = True
        if mode == "structured":
            dv = self._difficulty if self._difficulty is not None else DifficultyVector()
            bonuses = dv.bonuses_enabled
        self._config = EnvConfig(
            shape=self._shape,
            sensor_radius=int(sensor_radius),
            beta=float(beta),
            bonuses_enabled=bonuses,
            max_steps=max_steps,
        )
        self._env = Environment(self._config)
        self.action_space = DiscreteSpace(4)
        self.observation_space = GridSpace(self._shape)
        self._started = False

    def reset(self, *, seed: int | None = None, options=None) -> np.ndarray:
        """Generate terrain and start an episode; returns the observation grid."""
        if seed is not None:
            self._seed = int(seed)
        if self._seed is not None:
            terrain_seed = self._seed
        else:
            terrain_seed = int(self._seed_stream.integers(0, 2**31))
        spec = GenSpec(shape=self._shape, mode=self._mode,
                       difficulty=self._difficulty, seed=terrain_seed)
        self._env.reset(generate(spec))
        self._started = True
        return self._env.observation()

    def step(self, action: int) -> tuple[np.ndarray, float, bool, dict]:
        if not self._started:
            raise RuntimeError("reset() must be called before step()")
        if not self.action_space.contains(action):
            raise ValueError(f"action index out of range 0..3: {action!r}")
        out = self._env.step(int(action))
        info = dict(out.info)
        info["coverage"] = self._env.coverage
        info["termination"] = self._env.termination.value
        return out.observation, out.reward, out.done, info

    def close(self) -> None:
        self._started = False


def make(env_id: str, **kwargs) -> GridScoutEnv:
    """Registry-free gym-style factory; only ENV_ID is known."""
    if env_id != ENV_ID:
        raise ValueError(f"unknown environment id: {env_id!r}")
    return GridScoutEnv(**kwargs)


def register_with_gymnasium() -> bool:
    """Register ENV_ID with gymnasium when it is installed.

    Returns False (and does nothing) when gymnasium is absent; the adapter
    itself never requires it.
    """
    try:
        import gymnasium
    except ImportError:
        return False
    gymnasium.register(id=ENV_ID, entry_point="gridscout_gym.adapter:GridScoutEnv")
    return True
