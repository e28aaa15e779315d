"""Per-class QoS measures computed from a steady-state distribution."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .model import TrafficParams
from .solver import SteadyState

METRIC_NAMES = ("n_rt", "n_nrt", "l_rt", "l_nrt", "d_rt", "d_nrt")


@dataclass(frozen=True)
class ClassMetrics:
    """Mean counts, loss probabilities and mean sojourn times per class.

    A delay is ``None`` when the class has zero admitted throughput.
    """

    n_rt: float
    n_nrt: float
    l_rt: float
    l_nrt: float
    d_rt: Optional[float]
    d_nrt: Optional[float]

    def as_dict(self) -> dict[str, Optional[float]]:
        return {name: getattr(self, name) for name in METRIC_NAMES}


def mean_counts(ss: SteadyState) -> tuple[float, float]:
    grid = ss.grid
    n_rt = float(grid.sum(axis=1) @ range(grid.shape[0]))
    n_nrt = float(grid.sum(axis=0) @ range(grid.shape[1]))
    return n_rt, n_nrt


def loss_probabilities(ss: SteadyState) -> tuple[float, float]:
    """Mass on the full-RT row ``i = R`` and on the full-NRT column ``j = N``."""
    grid = ss.grid
    return float(grid[-1, :].sum()), float(grid[:, -1].sum())


def _little(count: float, rate: float, loss: float) -> Optional[float]:
    throughput = rate * (1.0 - loss)
    if throughput <= 0:
        return None
    return count / throughput


def mean_delays(ss: SteadyState, params: TrafficParams) -> tuple[Optional[float], Optional[float]]:
    """Mean time in system per class via Little's law."""
    n_rt, n_nrt = mean_counts(ss)
    l_rt, l_nrt = loss_probabilities(ss)
    return _little(n_rt, params.lambda_rt, l_rt), _little(n_nrt, params.lambda_nrt, l_nrt)


def class_metrics(ss: SteadyState, params: TrafficParams) -> ClassMetrics:
    n_rt, n_nrt = mean_counts(ss)
    l_rt, l_nrt = loss_probabilities(ss)
    d_rt, d_nrt = mean_delays(ss, params)
    return ClassMetrics(n_rt, n_nrt, l_rt, l_nrt, d_rt, d_nrt)
