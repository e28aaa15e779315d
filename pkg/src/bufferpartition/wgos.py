"""Weighted Grade of Service cost and threshold optimisation."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .metrics import ClassMetrics, class_metrics
from .model import BufferConfig, ConfigError, GeneratorMode, TrafficParams, build_generator
from .solver import solve_steady_state


class UndefinedDelayError(ValueError):
    """A class with positive arrival rate has no defined mean delay."""


class DegenerateTrafficError(ValueError):
    """Total arrival rate is zero, so the class weights are undefined."""


@dataclass(frozen=True)
class CostWeights:
    cl_rt: float
    cl_nrt: float
    cd_rt: float
    cd_nrt: float

    def __post_init__(self):
        for name in ("cl_rt", "cl_nrt", "cd_rt", "cd_nrt"):
            value = float(getattr(self, name))
            if not value >= 0:
                raise ConfigError(f"cost weight {name} must be >= 0, got {value}")
            object.__setattr__(self, name, value)

    def scaled(self, factor: float) -> "CostWeights":
        return CostWeights(self.cl_rt * factor, self.cl_nrt * factor,
                           self.cd_rt * factor, self.cd_nrt * factor)


@dataclass(frozen=True)
class WGoSResult:
    gamma: float
    rt_term: float
    nrt_term: float
    rt_weight: float
    nrt_weight: float


def _class_term(rate: float, loss: float, delay: Optional[float],
                loss_cost: float, delay_cost: float, label: str) -> float:
    if rate == 0:
        return 0.0
    if delay is None:
        raise UndefinedDelayError(f"{label} delay undefined with positive arrival rate {rate}")
    return loss_cost * loss + (1.0 - loss) * delay_cost * delay


def wgos_gamma(metrics: ClassMetrics, params: TrafficParams, costs: CostWeights) -> WGoSResult:
    """Arrival-rate weighted sum of per-class loss and delay penalties.

    A class with zero arrival rate carries zero weight and its term is
    reported as 0.
    """
    total = params.lambda_rt + params.lambda_nrt
    if total <= 0:
        raise DegenerateTrafficError("lambda_rt + lambda_nrt must be > 0")
    rt = _class_term(params.lambda_rt, metrics.l_rt, metrics.d_rt, costs.cl_rt, costs.cd_rt, "RT")
    nrt = _class_term(params.lambda_nrt, metrics.l_nrt, metrics.d_nrt,
                      costs.cl_nrt, costs.cd_nrt, "NRT")
    w_rt = params.lambda_rt / total
    w_nrt = params.lambda_nrt / total
    return WGoSResult(w_rt * rt + w_nrt * nrt, rt, nrt, w_rt, w_nrt)


@dataclass(frozen=True)
class SweepRow:
    r: int
    n: int
    metrics: ClassMetrics
    gamma: Optional[float] = None


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    r_star: Optional[int]
    mode: GeneratorMode

    @property
    def gammas(self) -> np.ndarray:
        return np.array([row.gamma for row in self.rows], dtype=float)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(row.metrics, name) for row in self.rows], dtype=float)


def evaluate(params: TrafficParams, config: BufferConfig,
             mode: GeneratorMode = GeneratorMode.PAPER_LITERAL) -> ClassMetrics:
    """Build, solve and summarise one configuration."""
    return class_metrics(solve_steady_state(build_generator(params, config, mode)), params)


def sweep_threshold(
    params: TrafficParams,
    total_T: int,
    r_range: Iterable[int],
    costs: Optional[CostWeights] = None,
    mode: GeneratorMode = GeneratorMode.PAPER_LITERAL,
) -> SweepResult:
    """Evaluate every threshold in `r_range` at fixed total capacity.

    Without `costs` only metrics are tabulated and ``r_star`` is None.
    Ties in gamma resolve to the smallest R.
    """
    mode = GeneratorMode(mode)
    r_values = sorted(set(int(r) for r in r_range))
    if not r_values:
        raise ConfigError("threshold range is empty")
    rows = []
    for r in r_values:
        try:
            config = BufferConfig.from_total(r, total_T)
            metrics = evaluate(params, config, mode)
            gamma = wgos_gamma(metrics, params, costs).gamma if costs is not None else None
        except (ArithmeticError, ValueError) as exc:
            raise type(exc)(f"R={r}: {exc}") from exc
        rows.append(SweepRow(r, config.n_capacity, metrics, gamma))

    r_star = None
    if costs is not None:
        gammas = [row.gamma for row in rows]
        r_star = rows[int(np.argmin(gammas))].r
    return SweepResult(tuple(rows), r_star, mode)
