"""Replicated discrete-event simulation of the partitioned buffer.

Random streams: numpy ``PCG64`` bit generators, one per replication,
seeded from ``SeedSequence(master_seed).spawn(replications)``. The
spawn derivation hashes ``(master_seed, replication index)``, so results
are a pure function of the :class:`SimConfig`.
"""
from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..metrics import METRIC_NAMES
from ..model import BufferConfig, ConfigError, TrafficParams
from . import _kernel as K

DEFAULT_SEED = 20070601
DEFAULT_REPLICATIONS = 20


class Discipline(enum.Enum):
    """Service discipline of the simulated server.

    ``NONPREEMPTIVE``: one server, RT chosen first at each service start.
    ``PREEMPTIVE``: RT arrival interrupts NRT service, which later resumes.
    ``INDEPENDENT``: each class is drained at its own rate whenever present.
    """

    NONPREEMPTIVE = "nonpreemptive"
    PREEMPTIVE = "preemptive"
    INDEPENDENT = "independent"


_KERNEL_CODE = {
    Discipline.NONPREEMPTIVE: K.NONPREEMPTIVE,
    Discipline.PREEMPTIVE: K.PREEMPTIVE,
    Discipline.INDEPENDENT: K.INDEPENDENT,
}


def default_horizon(params: TrafficParams) -> float:
    return 1e6 / (params.mu_rt + params.mu_nrt)


@dataclass(frozen=True)
class SimConfig:
    """Simulation settings; ``horizon`` and ``warmup`` default from the rates."""

    params: TrafficParams
    buffer: BufferConfig
    discipline: Discipline = Discipline.NONPREEMPTIVE
    warmup: Optional[float] = None
    horizon: Optional[float] = None
    replications: int = DEFAULT_REPLICATIONS
    master_seed: int = DEFAULT_SEED

    def __post_init__(self):
        object.__setattr__(self, "discipline", Discipline(self.discipline))
        horizon = default_horizon(self.params) if self.horizon is None else float(self.horizon)
        warmup = 0.1 * horizon if self.warmup is None else float(self.warmup)
        if not (horizon > 0 and math.isfinite(horizon)):
            raise ConfigError(f"horizon must be a positive finite time, got {horizon}")
        if not (warmup >= 0 and math.isfinite(warmup)):
            raise ConfigError(f"warmup must be >= 0, got {warmup}")
        if int(self.replications) != self.replications or self.replications < 1:
            raise ConfigError(f"replications must be an integer >= 1, got {self.replications}")
        if not 0 <= int(self.master_seed) < 2**64:
            raise ConfigError("master_seed must be an unsigned 64-bit integer")
        object.__setattr__(self, "horizon", horizon)
        object.__setattr__(self, "warmup", warmup)
        object.__setattr__(self, "replications", int(self.replications))
        object.__setattr__(self, "master_seed", int(self.master_seed))


@dataclass(frozen=True)
class ClassCounts:
    """Whole-run counts for one class, starting from an empty system."""

    arrivals: int
    losses: int
    departures: int
    in_system_end: int
    max_occupancy: int


@dataclass(frozen=True)
class ReplicationRecord:
    metrics: dict[str, Optional[float]]
    rt: ClassCounts
    nrt: ClassCounts
    admitted_rt: int
    admitted_nrt: int
    horizon: float


@dataclass(frozen=True)
class Estimate:
    mean: Optional[float]
    se: Optional[float]
    n: int


@dataclass(frozen=True)
class SimMetrics:
    config: SimConfig
    estimates: dict[str, Estimate]
    replications: tuple[ReplicationRecord, ...] = field(repr=False)

    def __getitem__(self, name: str) -> Estimate:
        return self.estimates[name]

    def totals(self, cls: str) -> ClassCounts:
        parts = [getattr(rec, cls) for rec in self.replications]
        return ClassCounts(
            sum(p.arrivals for p in parts),
            sum(p.losses for p in parts),
            sum(p.departures for p in parts),
            sum(p.in_system_end for p in parts),
            max(p.max_occupancy for p in parts),
        )


def replication_seeds(master_seed: int, count: int) -> list[np.random.SeedSequence]:
    return np.random.SeedSequence(master_seed).spawn(count)


def _ratio(num: float, den: float) -> Optional[float]:
    return num / den if den > 0 else None


def run_replication(config: SimConfig, seed) -> ReplicationRecord:
    """Simulate one replication seeded by `seed` (int or ``SeedSequence``)."""
    p, b = config.params, config.buffer
    rng = np.random.Generator(np.random.PCG64(seed))
    counts, sums = K.run_kernel(
        rng, p.lambda_rt, p.lambda_nrt, p.mu_rt, p.mu_nrt,
        b.r_threshold, b.n_capacity, _KERNEL_CODE[config.discipline],
        config.warmup, config.warmup + config.horizon,
    )
    c = [int(x) for x in counts]
    h = config.horizon
    metrics = {
        "n_rt": sums[K.AREA_RT] / h,
        "n_nrt": sums[K.AREA_NRT] / h,
        "l_rt": _ratio(c[K.LOSS_RT], c[K.ARR_RT]),
        "l_nrt": _ratio(c[K.LOSS_NRT], c[K.ARR_NRT]),
        "d_rt": _ratio(sums[K.DELAY_RT], c[K.DONE_RT]) if c[K.ARR_RT] else None,
        "d_nrt": _ratio(sums[K.DELAY_NRT], c[K.DONE_NRT]) if c[K.ARR_NRT] else None,
    }
    rt = ClassCounts(c[K.TOT_ARR_RT], c[K.TOT_LOSS_RT], c[K.TOT_DEP_RT], c[K.END_RT], c[K.MAX_RT])
    nrt = ClassCounts(c[K.TOT_ARR_NRT], c[K.TOT_LOSS_NRT], c[K.TOT_DEP_NRT],
                      c[K.END_NRT], c[K.MAX_NRT])
    return ReplicationRecord(
        metrics, rt, nrt,
        admitted_rt=c[K.ARR_RT] - c[K.LOSS_RT],
        admitted_nrt=c[K.ARR_NRT] - c[K.LOSS_NRT],
        horizon=h,
    )


def _aggregate(values: list[Optional[float]]) -> Estimate:
    defined = np.array([v for v in values if v is not None], dtype=float)
    n = len(defined)
    if n == 0:
        return Estimate(None, None, 0)
    se = float(defined.std(ddof=1) / math.sqrt(n)) if n > 1 else None
    return Estimate(float(defined.mean()), se, n)


def run_simulation(config: SimConfig, workers: Optional[int] = None) -> SimMetrics:
    """Run all replications and aggregate means and standard errors.

    Replications run on a thread pool (the kernel releases the GIL); the
    result does not depend on `workers`.
    """
    seeds = replication_seeds(config.master_seed, config.replications)
    workers = workers or min(config.replications, os.cpu_count() or 1)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            records = tuple(pool.map(lambda s: run_replication(config, s), seeds))
    else:
        records = tuple(run_replication(config, s) for s in seeds)
    estimates = {
        name: _aggregate([rec.metrics[name] for rec in records]) for name in METRIC_NAMES
    }
    return SimMetrics(config, estimates, records)
