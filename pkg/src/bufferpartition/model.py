"""Domain types and CTMC generator for the two-class partitioned buffer.

States are pairs ``(i, j)`` with ``i`` real-time (RT) customers and ``j``
non-real-time (NRT) customers in the system. The state ordering is
row-major: ``index(i, j) = i * (N + 1) + j``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np


class ConfigError(ValueError):
    """Invalid traffic, buffer or experiment configuration."""


@dataclass(frozen=True)
class TrafficParams:
    lambda_rt: float
    lambda_nrt: float
    mu_rt: float
    mu_nrt: float

    def __post_init__(self):
        for name in ("lambda_rt", "lambda_nrt", "mu_rt", "mu_nrt"):
            value = float(getattr(self, name))
            if not np.isfinite(value):
                raise ConfigError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if self.mu_rt <= 0 or self.mu_nrt <= 0:
            raise ConfigError("service rates mu_rt and mu_nrt must be > 0")
        if self.lambda_rt < 0 or self.lambda_nrt < 0:
            raise ConfigError("arrival rates lambda_rt and lambda_nrt must be >= 0")

    @property
    def total_arrival_rate(self) -> float:
        return self.lambda_rt + self.lambda_nrt


@dataclass(frozen=True)
class BufferConfig:
    """Partitioned buffer: at most ``r_threshold`` RT and ``n_capacity`` NRT customers."""

    r_threshold: int
    n_capacity: int

    def __post_init__(self):
        for name in ("r_threshold", "n_capacity"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value:
                raise ConfigError(f"{name} must be an integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        if self.r_threshold < 1:
            raise ConfigError(f"r_threshold must be >= 1, got {self.r_threshold}")
        if self.n_capacity < 1:
            raise ConfigError(f"n_capacity must be >= 1, got {self.n_capacity}")

    @property
    def total(self) -> int:
        return self.r_threshold + self.n_capacity

    @classmethod
    def from_total(cls, r_threshold: int, total: int) -> "BufferConfig":
        """Split a buffer of capacity ``total`` at threshold ``r_threshold``."""
        if not 1 <= r_threshold <= total - 1:
            raise ConfigError(
                f"threshold R={r_threshold} must satisfy 1 <= R <= T-1 with T={total}"
            )
        return cls(r_threshold, total - r_threshold)


class State(NamedTuple):
    i: int
    j: int


class GeneratorMode(enum.Enum):
    """How service rates are switched on in the two-dimensional chain.

    ``PAPER_LITERAL`` serves both classes at their own rates whenever
    present. ``STRICT_PRIORITY`` serves NRT only when no RT customer is in
    the system.
    """

    PAPER_LITERAL = "literal"
    STRICT_PRIORITY = "strict"


@dataclass(frozen=True)
class StateSpace:
    config: BufferConfig
    states: tuple[State, ...] = field(repr=False)

    def __len__(self) -> int:
        return len(self.states)

    @property
    def shape(self) -> tuple[int, int]:
        return self.config.r_threshold + 1, self.config.n_capacity + 1

    def index(self, state: tuple[int, int]) -> int:
        i, j = state
        rows, cols = self.shape
        if not (0 <= i < rows and 0 <= j < cols):
            raise KeyError(f"state {tuple(state)} outside lattice {rows - 1}x{cols - 1}")
        return i * cols + j

    def state(self, k: int) -> State:
        return self.states[k]

    @property
    def rt_counts(self) -> np.ndarray:
        return np.array([s.i for s in self.states], dtype=float)

    @property
    def nrt_counts(self) -> np.ndarray:
        return np.array([s.j for s in self.states], dtype=float)


def build_state_space(config: BufferConfig) -> StateSpace:
    """Enumerate all ``(R+1)(N+1)`` states, row-major by RT count then NRT count."""
    if not isinstance(config, BufferConfig):
        raise ConfigError("config must be a BufferConfig")
    states = tuple(
        State(i, j)
        for i in range(config.r_threshold + 1)
        for j in range(config.n_capacity + 1)
    )
    return StateSpace(config, states)


@dataclass(frozen=True)
class Generator:
    space: StateSpace
    rates: np.ndarray = field(repr=False)
    mode: GeneratorMode

    def __post_init__(self):
        self.rates.setflags(write=False)


def build_generator(
    params: TrafficParams,
    config: BufferConfig,
    mode: GeneratorMode = GeneratorMode.PAPER_LITERAL,
) -> Generator:
    """Transition-rate matrix of the partitioned buffer chain.

    Arrivals are blocked at the partition boundary (no RT arrival out of
    ``i = R``, no NRT arrival out of ``j = N``). Diagonal entries are the
    negative off-diagonal row sums.
    """
    mode = GeneratorMode(mode)
    space = build_state_space(config)
    R, N = config.r_threshold, config.n_capacity
    n = len(space)
    Q = np.zeros((n, n))
    for k, (i, j) in enumerate(space.states):
        if i < R:
            Q[k, space.index((i + 1, j))] = params.lambda_rt
        if j < N:
            Q[k, space.index((i, j + 1))] = params.lambda_nrt
        if i > 0:
            Q[k, space.index((i - 1, j))] = params.mu_rt
        if j > 0 and (mode is GeneratorMode.PAPER_LITERAL or i == 0):
            Q[k, space.index((i, j - 1))] = params.mu_nrt
    np.fill_diagonal(Q, 0.0)
    np.fill_diagonal(Q, -Q.sum(axis=1))
    return Generator(space, Q, mode)
