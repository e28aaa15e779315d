"""Analytic-versus-simulation comparison reports."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from ..metrics import METRIC_NAMES, ClassMetrics
from ..model import GeneratorMode
from .runner import Discipline, SimMetrics

Z_LIMIT = 3.0
LITTLE_RTOL = 0.01

EXACT_PAIRS = {
    GeneratorMode.PAPER_LITERAL: Discipline.INDEPENDENT,
    GeneratorMode.STRICT_PRIORITY: Discipline.PREEMPTIVE,
}


class PairingError(ValueError):
    """Generator mode and simulated discipline do not describe the same system."""


@dataclass(frozen=True)
class MetricCheck:
    name: str
    analytic: Optional[float]
    simulated: Optional[float]
    se: Optional[float]
    z: Optional[float]
    passed: bool


@dataclass(frozen=True)
class LittleCheck:
    cls: str
    mean_count: float
    throughput_x_delay: Optional[float]
    rel_error: Optional[float]
    passed: bool


@dataclass(frozen=True)
class ValidationReport:
    mode: GeneratorMode
    discipline: Discipline
    comparison_only: bool
    metrics: tuple[MetricCheck, ...]
    little: tuple[LittleCheck, ...]

    @property
    def passed(self) -> bool:
        return all(m.passed for m in self.metrics) and all(c.passed for c in self.little)

    def failures(self) -> list[str]:
        out = [f"{m.name}: z={m.z}" for m in self.metrics if not m.passed]
        out += [f"little[{c.cls}]: rel={c.rel_error}" for c in self.little if not c.passed]
        return out


def z_score(analytic: float, mean: float, se: Optional[float]) -> Optional[float]:
    """``|analytic - mean| / se``; a zero spread only tolerates rounding-level gaps."""
    if se is None:
        return None
    diff = abs(analytic - mean)
    if se > 0:
        return diff / se
    return 0.0 if diff <= 1e-12 * max(1.0, abs(analytic)) else math.inf


def _check_metric(name: str, analytic: Optional[float], sim: SimMetrics) -> MetricCheck:
    est = sim[name]
    if analytic is None or est.mean is None:
        # both undefined is agreement; one-sided undefined is not
        both = analytic is None and est.mean is None
        return MetricCheck(name, analytic, est.mean, est.se, None, both)
    z = z_score(analytic, est.mean, est.se)
    return MetricCheck(name, analytic, est.mean, est.se, z, z is not None and z <= Z_LIMIT)


def little_checks(sim: SimMetrics, rtol: float = LITTLE_RTOL) -> tuple[LittleCheck, ...]:
    """Time-average count against admitted throughput times mean sojourn."""
    out = []
    total_time = sum(rec.horizon for rec in sim.replications)
    for cls in ("rt", "nrt"):
        count = sim[f"n_{cls}"].mean
        delay = sim[f"d_{cls}"].mean
        admitted = sum(getattr(rec, f"admitted_{cls}") for rec in sim.replications)
        if delay is None or admitted == 0:
            out.append(LittleCheck(cls, count, None, None, count == 0))
            continue
        rhs = admitted / total_time * delay
        rel = abs(count - rhs) / max(abs(count), abs(rhs))
        out.append(LittleCheck(cls, count, rhs, rel, rel <= rtol))
    return tuple(out)


def validate(analytic: ClassMetrics, simulated: SimMetrics, mode: GeneratorMode) -> ValidationReport:
    """Per-metric z-scores at the 3-sigma level plus Little's-law checks.

    Non-preemptive simulations have no exact analytic counterpart; their
    reports are flagged ``comparison_only`` and the z-scores measure the
    gap rather than certify agreement.
    """
    mode = GeneratorMode(mode)
    discipline = simulated.config.discipline
    comparison_only = discipline is Discipline.NONPREEMPTIVE
    if not comparison_only and EXACT_PAIRS[mode] is not discipline:
        raise PairingError(
            f"mode {mode.value!r} pairs with discipline {EXACT_PAIRS[mode].value!r}, "
            f"not {discipline.value!r}"
        )
    checks = tuple(_check_metric(name, getattr(analytic, name), simulated) for name in METRIC_NAMES)
    return ValidationReport(mode, discipline, comparison_only, checks, little_checks(simulated))
