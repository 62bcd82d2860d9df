"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line."""
import math
import random
import time
from dataclasses import replace

import numpy as np
import pytest

from amdahl_limits import comm, core
from amdahl_limits.dataio import derive, parse_csv, parse_csv_text, sample_list_path
from amdahl_limits.ledger import (
    FICTIVE_MACHINE, WorkloadSpec, ledger, log_grid, peak_operating_point, sweep,
)
from amdahl_limits.modifiers import (
    ACCELERATOR_N_RANGE, Accelerator, apply_accelerator, gain_ratio, hpl_ai_equivalence,
    mixed_precision_speedup,
)
from amdahl_limits.timeline import (
    DispatchMode, TimelineConfig, compare_to_analytic, config_from_spec, simulate,
)

GRID = log_grid(100, 1e10, points_per_decade=10)
STEP = 10 ** 0.1


@pytest.fixture
def verdict(capsys):
    def report(label, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} {label}: {detail}")
        assert ok, detail
    return report


def test_algebra_roundtrip(verdict):
    start = time.perf_counter()
    alphas = [0.0, 0.25, 0.5, 0.9, 0.99, 0.999]
    ns = np.logspace(math.log10(2), 9, 10)
    worst, exact = 0.0, True
    for a in alphas:
        for n in ns:
            s = core.speedup(a, n)
            worst = max(worst, abs(core.alpha_from_speedup(s, n) - a))
            exact &= core.efficiency(a, n) * n == s
    elapsed = time.perf_counter() - start
    verdict("algebra round trip", worst <= 1e-12 and exact and elapsed < 1.0,
            f"{len(alphas) * len(ns)} points, max |alpha error| {worst:.2e}, "
            f"E*N == S exactly: {exact}, {elapsed * 1e3:.1f} ms")


def test_roofline_asymptote(verdict):
    serials = np.logspace(-6, 0, 61)[:-1]
    worst = max(abs(core.speedup(1 - s, 1e9, serial=s) * s - 1) for s in serials)
    verdict("roofline asymptote", worst <= 0.01,
            f"max relative gap to 1/(1-alpha) at N=1e9: {worst:.2e}")


def test_peak_then_decline(verdict):
    start = time.perf_counter()
    m, w = FICTIVE_MACHINE, WorkloadSpec.hpl()
    points = sweep(m, w, GRID)
    peak = peak_operating_point(m, w, GRID)
    r_max = [entry.r_max for _, entry in points]
    i = r_max.index(max(r_max))
    declining = all(b < a for a, b in zip(r_max[i:], r_max[i + 1:]))
    closed = math.sqrt(w.total_flops / (m.p_single * m.t_addr))
    within_step = 1 / STEP <= peak.n / closed <= STEP
    elapsed = time.perf_counter() - start
    verdict("peak then decline", peak.interior and declining and within_step and elapsed < 5,
            f"n_at_peak {peak.n} vs closed form {closed:.4g}, strictly declining after: "
            f"{declining}, {elapsed:.2f} s")


def test_grid_time_shift(verdict):
    m = FICTIVE_MACHINE
    base = peak_operating_point(m, WorkloadSpec.hpl(), GRID)
    grid = peak_operating_point(m, WorkloadSpec.grid_synced(5000 / m.clock_hz), GRID)
    n_shift, perf_shift = base.n / grid.n, base.nominal / grid.nominal
    verdict("grid-time shift", n_shift >= 100 and perf_shift >= 100,
            f"n_at_peak {base.n} -> {grid.n} ({n_shift:.0f}x), "
            f"peak nominal down {perf_shift:.0f}x")


def _edges(t):
    sizes = t.layer_sizes()
    return sum(a * b for a, b in zip(sizes, sizes[1:]))


def test_message_counts(verdict):
    checks = {
        "hpl(1e6)": comm.messages_hpl(10**6) == 2 * 10**6,
        "hpcg(m,1)": all(comm.messages_hpcg(m, 1) == comm.messages_hpl(m) for m in range(1, 100)),
        "ann(1,1000,2,1)": comm.messages_ann(comm.AnnTopology(1, 1000, 2, 1)).total == 1_002_000,
    }
    topologies = [comm.AnnTopology(a, b, c, d) for a in range(1, 7) for b in range(1, 7)
                  for c in range(1, 7) for d in range(1, 7)]
    checks["enumeration"] = all(comm.messages_ann(t).total == _edges(t) for t in topologies)
    verdict("message counts", all(checks.values()),
            ", ".join(f"{k} {'ok' if v else 'wrong'}" for k, v in checks.items())
            + f" ({len(topologies)} topologies)")


def test_brain_degradation(verdict):
    b = comm.brain_profile(fanout=10**4, t_comp=1e-7, t_comm=1e-5)
    b3 = comm.brain_profile(fanout=10**3, t_comp=1e-7, t_comm=1e-5)
    improved = comm.hierarchic_reduction(b, 100).implied_gain / b.implied_gain
    ok = (0.5e-6 <= b.efficiency_ratio <= 2e-6
          and b3.efficiency_ratio == pytest.approx(1e-5, rel=0.01)
          and improved == pytest.approx(100, rel=0.01))
    verdict("brain degradation", ok,
            f"ratio(fanout 1e4) {b.efficiency_ratio:.3g}, ratio(fanout 1e3) "
            f"{b3.efficiency_ratio:.3g}, reduction gain x{improved:.2f}")


def test_class_rooflines(verdict):
    hpl, hpcg = comm.roofline_for_class("hpl"), comm.roofline_for_class("hpcg")
    brain_cap = comm.roofline_for_class("brain")
    brain_gain = comm.brain_profile().implied_gain
    ordered = hpl > hpcg > comm.roofline_for_class("ann") > brain_cap
    ok = (hpl / hpcg == pytest.approx(200, rel=0.01) and brain_cap <= 1.1e4
          and brain_gain <= 1.1e4 and ordered)
    verdict("class rooflines", ok,
            f"HPL/HPCG {hpl / hpcg:.1f}, brain cap {brain_cap:.3g}, "
            f"brain implied gain {brain_gain:.4g}, ordered {ordered}")


def test_mixed_precision(verdict):
    t_c = 1.0
    s = mixed_precision_speedup(t_c, t_c / 8, 0.25)
    eq = hpl_ai_equivalence(445, 148.6)
    ok = s == pytest.approx(3.0, rel=1e-3) and eq == pytest.approx(2.994, abs=1e-3)
    verdict("mixed precision", ok, f"predicted speedup {s:.4f}, HPL-AI equivalence {eq:.4f}")


def _random_config(rng):
    n = rng.randint(1, 30)
    return TimelineConfig(
        n, [rng.uniform(0.01, 5) for _ in range(n)], t_init_sw=rng.uniform(0, 1),
        t_init_os=rng.uniform(0, 1), t_addr=rng.uniform(0, 0.5),
        pd_out=[rng.uniform(0, 0.5) for _ in range(n)],
        pd_back=[rng.uniform(0, 0.5) for _ in range(n)], t_collect=rng.uniform(0, 0.2))


def test_timeline_simulator(verdict):
    ideal = all(
        (r.speedup, r.empirical_alpha) == (n, 1.0)
        for n in (2, 3, 10, 999) for r in [simulate(TimelineConfig(n, 0.7))])
    hand = simulate(TimelineConfig(2, (1.0, 1.0), t_addr=0.5))
    hand_ok = hand.total_time == 2.0 and hand.empirical_alpha == 0.0

    rng = random.Random(2024)
    ordered = 0
    for _ in range(1000):
        c = _random_config(rng)
        blocking = replace(c, dispatch_mode=DispatchMode.BLOCKING)
        ordered += simulate(c).total_time <= simulate(blocking).total_time

    m = FICTIVE_MACHINE
    worst = 0.0
    for w in (WorkloadSpec.hpl(), WorkloadSpec.hpcg(iterations=3)):
        for n in (100, 5000, 50_000):
            check = compare_to_analytic(config_from_spec(m, w, n), m, w)
            assert check.payload_dominated
            worst = max(worst, check.relative_difference)

    start = time.perf_counter()
    simulate(config_from_spec(m, WorkloadSpec.hpl(), 10**5))
    elapsed = time.perf_counter() - start
    ok = ideal and hand_ok and ordered == 1000 and worst <= 0.05 and elapsed < 10
    verdict("timeline simulator", ok,
            f"ideal exact {ideal}, hand-walked total {hand.total_time} alpha "
            f"{hand.empirical_alpha}, pipelined<=blocking {ordered}/1000, "
            f"worst ledger gap {worst:.2e}, 1e5 workers in {elapsed:.2f} s")


def test_ingestion(verdict):
    records = parse_csv(sample_list_path())
    big = max(records, key=lambda r: r.cores)
    serial = derive(big).one_minus_alpha_hpl

    with open(sample_list_path(), encoding="utf-8") as fh:
        lines = fh.read().splitlines(keepends=True)
    header_at = next(i for i, line in enumerate(lines) if not line.startswith("#"))
    injected = lines[:header_at + 2] + ["99,Broken,100,9,8,,2020,no\n"] + lines[header_at + 2:]
    again = parse_csv_text("".join(injected))
    isolated = list(again) == list(records) and len(again.rejected) == 1

    worst = 0.0
    for r in records:
        d = derive(r)
        worst = max(worst, abs(core.efficiency(d.alpha_hpl, r.cores,
                                               serial=d.one_minus_alpha_hpl) - d.e_hpl))
    ok = big.cores >= 10**7 and 1e-8 <= serial <= 1e-7 and isolated and worst <= 1e-9
    verdict("ingestion", ok,
            f"{big.cores} cores -> 1-alpha {serial:.3e}, reject isolated {isolated} "
            f"{again.rejected}, max efficiency round-trip error {worst:.1e}")


def test_accelerator(verdict):
    m, w = FICTIVE_MACHINE, WorkloadSpec.hpl()
    acc = apply_accelerator(m, Accelerator.default_for(m))
    ns = log_grid(*ACCELERATOR_N_RANGE, points_per_decade=10)
    up = all(ledger(acc, w, n).r_max > ledger(m, w, n).r_max for n in ns)
    down = all(ledger(acc, w, n).efficiency < ledger(m, w, n).efficiency for n in ns)
    ratios = [gain_ratio(m, acc, w, n) for n in ns]
    monotone = all(b <= a for a, b in zip(ratios, ratios[1:]))
    ok = (acc.t_addr > m.t_addr and up and down and monotone and ratios[0] > 4
          and ratios[-1] == pytest.approx(2, rel=0.1))
    verdict("accelerator monotonicities", ok,
            f"r_max up {up}, efficiency down {down}, gain ratio {ratios[0]:.2f} -> "
            f"{ratios[-1]:.2f} over n {ns[0]}..{ns[-1]}, non-increasing {monotone}")
