"""Exit criteria for the build. Each test records one PASS/FAIL line that
is echoed in the pytest terminal summary."""
import time

import numpy as np
import pytest

from bufferpartition import (
    BufferConfig,
    ClassMetrics,
    CostWeights,
    GeneratorMode,
    TrafficParams,
    build_generator,
    evaluate,
    solve_steady_state,
    sweep_threshold,
    wgos_gamma,
)
from bufferpartition.sim import EXACT_PAIRS, SimConfig, run_simulation, validate
from oracles import gauss_stationary, lattice_rates, mm1k_blocking, mm1k_distribution

PAPER_COSTS = CostWeights(cl_rt=300, cl_nrt=50, cd_rt=1000, cd_nrt=1)
THRESHOLDS = range(2, 17)
T = 20
MODES = list(GeneratorMode)


def _gamma_table(results):
    lines = []
    for label, res in results:
        lines.append(f"{label}: " + " ".join(f"R={r.r}:{r.gamma:.4f}" for r in res.rows))
    return "\n".join(lines)


def test_criterion_1_optimum_threshold(record_criterion):
    configs = {
        "fig11 lambda_rt=12": TrafficParams(12, 6, 20, 10),
        "fig12 lambda_nrt=6": TrafficParams(12, 6, 20, 10),
        "fig12 lambda_nrt=9": TrafficParams(12, 9, 20, 10),
    }
    start = time.perf_counter()
    found, tables = {}, []
    for label, params in configs.items():
        found[label] = []
        for mode in MODES:
            res = sweep_threshold(params, T, THRESHOLDS, PAPER_COSTS, mode)
            tables.append((f"{label} [{mode.value}]", res))
            if res.r_star == 3:
                found[label].append(mode.value)
    elapsed = time.perf_counter() - start
    ok = all(found.values()) and elapsed < 1.0
    record_criterion(1, f"WGoS argmin R=3 per curve in modes {found}; {elapsed:.2f}s", ok)
    assert all(found.values()), _gamma_table(tables)
    assert elapsed < 1.0


def _interior_max(values):
    k = int(np.argmax(values))
    return 0 < k < len(values) - 1


SCENARIOS = {
    # (label, params, has medium/high load for the delay-peak check)
    "s1 lambda_rt=2": (TrafficParams(2, 6, 20, 10), False),
    "s1 lambda_rt=12": (TrafficParams(12, 6, 20, 10), True),
    "s1 lambda_rt=18": (TrafficParams(18, 6, 20, 10), True),
    "s2 lambda_nrt=2": (TrafficParams(12, 2, 20, 10), False),
    "s2 lambda_nrt=6": (TrafficParams(12, 6, 20, 10), True),
    "s2 lambda_nrt=9": (TrafficParams(12, 9, 20, 10), True),
}


@pytest.mark.parametrize("mode", MODES, ids=lambda m: m.value)
def test_criterion_2_curve_shapes(mode, record_criterion):
    failures = []
    for label, (params, loaded) in SCENARIOS.items():
        res = sweep_threshold(params, T, THRESHOLDS, mode=mode)
        l_rt, l_nrt = res.column("l_rt"), res.column("l_nrt")
        d_rt, d_nrt = res.column("d_rt"), res.column("d_nrt")
        if not np.all(np.diff(l_nrt) >= 0):
            failures.append(f"{label}: L_nrt not non-decreasing")
        if not np.all(np.diff(l_rt) <= 0):
            failures.append(f"{label}: L_rt not non-increasing")
        if not np.all(np.diff(d_rt) >= 0):
            failures.append(f"{label}: D_rt not non-decreasing")
        if loaded and not _interior_max(d_nrt):
            failures.append(f"{label}: D_nrt has no interior maximum "
                            f"(argmax at R={res.rows[int(np.argmax(d_nrt))].r})")
    record_criterion(2, f"curve shapes [{mode.value}]"
                     + (": " + "; ".join(failures) if failures else ""), not failures)
    assert not failures, "\n".join(failures)


def test_criterion_3_solver_oracle(record_criterion):
    rng = np.random.default_rng(3)
    worst_entry = worst_res = worst_sum = 0.0
    cases = 0
    while cases < 50:
        R, N = (int(x) for x in rng.integers(1, 6, size=2))
        if (R + 1) * (N + 1) > 36:
            continue
        lr, ln, mr, mn = rng.uniform(0.1, 40, size=4)
        for mode in MODES:
            gen = build_generator(TrafficParams(lr, ln, mr, mn), BufferConfig(R, N), mode)
            ss = solve_steady_state(gen)
            ref = np.array(gauss_stationary(
                lattice_rates(lr, ln, mr, mn, R, N, mode is GeneratorMode.STRICT_PRIORITY)))
            worst_entry = max(worst_entry, float(np.max(np.abs(ss.prob - ref))))
            worst_res = max(worst_res, ss.residual)
            worst_sum = max(worst_sum, abs(ss.prob.sum() - 1))
        cases += 1
    ok = worst_entry <= 1e-10 and worst_res <= 1e-10 and worst_sum <= 1e-12
    record_criterion(3, f"50 sets x 2 modes: max|GTH-oracle|={worst_entry:.1e}, "
                     f"max residual={worst_res:.1e}, max|sum-1|={worst_sum:.1e}", ok)
    assert worst_entry <= 1e-10
    assert worst_res <= 1e-10
    assert worst_sum <= 1e-12


def test_criterion_4_closed_form_reduction(record_criterion):
    ss = solve_steady_state(build_generator(TrafficParams(0, 5, 20, 10), BufferConfig(4, 10)))
    m = evaluate(TrafficParams(0, 5, 20, 10), BufferConfig(4, 10))
    err_loss = abs(m.l_nrt - 1 / 2047)
    err_dist = float(np.max(np.abs(ss.grid[0] - mm1k_distribution(5, 10, 10))))
    err_zero = float(np.max(np.abs(ss.grid[1:])))

    ss2 = solve_steady_state(build_generator(TrafficParams(7, 0, 10, 10), BufferConfig(6, 3)))
    m2 = evaluate(TrafficParams(7, 0, 10, 10), BufferConfig(6, 3))
    err_rt_dist = float(np.max(np.abs(ss2.grid[:, 0] - mm1k_distribution(7, 10, 6))))
    err_rt_loss = abs(m2.l_rt - mm1k_blocking(7, 10, 6))
    worst = max(err_loss, err_dist, err_zero, err_rt_dist, err_rt_loss)
    record_criterion(4, f"M/M/1/N and M/M/1/R reductions, worst error {worst:.1e}", worst <= 1e-10)
    assert err_loss <= 1e-10
    assert err_dist <= 1e-10 and err_zero <= 1e-10
    assert err_rt_dist <= 1e-10 and err_rt_loss <= 1e-10


def _validation_cases():
    rng = np.random.default_rng(5)
    cases = [
        ("scenario1 lambda_rt=12", TrafficParams(12, 6, 20, 10), BufferConfig(8, 12)),
        ("scenario2 lambda_nrt=9", TrafficParams(12, 9, 20, 10), BufferConfig(8, 12)),
    ]
    for k in range(5):
        R, N = (int(x) for x in rng.integers(2, 7, size=2))
        mu_rt, mu_nrt = rng.uniform(5, 25, size=2)
        rho_rt, rho_nrt = rng.uniform(0.5, 1.2, size=2)
        params = TrafficParams(rho_rt * mu_rt, rho_nrt * mu_nrt, mu_rt, mu_nrt)
        cases.append((f"random{k}", params, BufferConfig(R, N)))
    return cases


@pytest.fixture(scope="module")
def validation_runs():
    runs = []
    start = time.perf_counter()
    for label, params, buffer in _validation_cases():
        for mode in MODES:
            sim = run_simulation(SimConfig(params, buffer, EXACT_PAIRS[mode]))
            report = validate(evaluate(params, buffer, mode), sim, mode)
            runs.append((label, mode, sim, report))
    return runs, time.perf_counter() - start


def test_criterion_5_simulation_agreement(validation_runs, record_criterion):
    runs, elapsed = validation_runs
    failures = []
    worst = 0.0
    for label, mode, sim, report in runs:
        for m in report.metrics:
            if m.z is not None:
                worst = max(worst, m.z)
            if not m.passed:
                failures.append(f"{label} [{mode.value}] {m.name}: analytic={m.analytic} "
                                f"sim={m.simulated} se={m.se} z={m.z}")
    ok = not failures and elapsed < 120
    record_criterion(5, f"{len(runs)} matched runs x 6 metrics within 3 se "
                     f"(max z={worst:.2f}, {elapsed:.1f}s)", ok)
    assert not failures, "\n".join(failures)
    assert elapsed < 120


def test_criterion_6_simulation_consistency(validation_runs, record_criterion):
    runs, _ = validation_runs
    conservation = all(
        c.arrivals == c.losses + c.departures + c.in_system_end
        for _, _, sim, _ in runs for rec in sim.replications for c in (rec.rt, rec.nrt)
    )
    little_worst = max(c.rel_error for *_, report in runs for c in report.little)
    label, params, buffer = _validation_cases()[0]
    cfg = SimConfig(params, buffer, EXACT_PAIRS[GeneratorMode.PAPER_LITERAL])
    identical = run_simulation(cfg) == run_simulation(cfg)
    ok = conservation and little_worst <= 0.01 and identical
    record_criterion(6, f"conservation exact={conservation}, Little max rel err "
                     f"{little_worst:.1e}, seeded rerun identical={identical}", ok)
    assert conservation
    assert little_worst <= 0.01
    assert identical


def test_criterion_7_wgos_algebra(record_criterion):
    metrics = ClassMetrics(n_rt=0.5, n_nrt=1.0, l_rt=0.1, l_nrt=0.2, d_rt=0.05, d_nrt=0.5)
    params = TrafficParams(12, 6, 20, 10)
    gamma = wgos_gamma(metrics, params, PAPER_COSTS).gamma
    hand_err = abs(gamma - 53.4667)
    # 53.4667 is the 4-decimal rounding of 50 + 10.4/3
    exact_err = abs(gamma - (50 + 10.4 / 3))

    scale_errs = []
    argmins = {mode: set() for mode in MODES}
    for c in (0.01, 1.0, 7.5, 1e3):
        g = wgos_gamma(metrics, params, PAPER_COSTS.scaled(c)).gamma
        scale_errs.append(abs(g - c * gamma) / (c * gamma))
        for mode in MODES:
            res = sweep_threshold(params, T, THRESHOLDS, PAPER_COSTS.scaled(c), mode)
            argmins[mode].add(res.r_star)
    invariant = all(len(found) == 1 for found in argmins.values())
    ok = exact_err <= 1e-9 and hand_err <= 5e-5 and max(scale_errs) <= 1e-12 and invariant
    record_criterion(7, f"gamma={gamma:.6f} (exact err {exact_err:.1e}), linear scaling "
                     f"max rel err {max(scale_errs):.1e}, argmin invariant={invariant}", ok)
    assert exact_err <= 1e-9
    assert hand_err <= 5e-5
    assert max(scale_errs) <= 1e-12
    assert invariant
