"""End-to-end acceptance checks; each test reports one PASS/FAIL line."""

import time

import numpy as np
import pytest

from toa.analysis import find_jump, find_peaks, sweep_barrier_height
from toa.classical import ClassicalState, classical_toa, lie_arrival_time
from toa.engine import (arrival_distribution, decompose_reflection, hartman_time, incident_reflected_times,
                        mean_toa_moment, mean_toa_phase)
from toa.kinematics import GaussianPacket
from toa.quadrature import gauss_legendre_nodes
from toa.scattering import Free, LinearRamp, SampledSmooth, SquareBarrier, Step, barrier_solution, transfer_matrix
from toa.scenario import bundled_scenarios, load_scenario
from toa.specfun import ode_residual

BARRIER_PACKET = GaussianPacket(-30.0, 2.0, 10.0)
REFLECTION_PACKET = GaussianPacket(-150.0, 2.0, 10.0)
RAMP = LinearRamp(100.0)
RAMP_PACKET = GaussianPacket(-2.0, 10.0, 1.0)


def barrier(p_v, a):
    return SquareBarrier(p_v * p_v / 2, a)


def test_free_baseline(acceptance):
    start = time.perf_counter()
    dist = arrival_distribution(50.0, BARRIER_PACKET, Free())
    mean = mean_toa_moment(dist)
    P = dist.total_probability
    elapsed = time.perf_counter() - start
    ok = abs(mean / 40.0 - 1) <= 0.005 and abs(P - 1) <= 1e-8 and elapsed < 2.0
    assert acceptance(1, "free baseline", ok, f"mean {mean:.6f}, P {P:.12f}, {elapsed:.2f} s")


def test_hartman_value(acceptance):
    start = time.perf_counter()
    t_h = hartman_time(40.0, 15.0, 2.0, 1.0)
    mean = mean_toa_phase(50.0, BARRIER_PACKET, barrier(2.6, 15.0))
    elapsed = time.perf_counter() - start
    ok = t_h == 32.5 and abs(mean / 32.5 - 1) <= 0.05 and elapsed < 30.0
    assert acceptance(2, "Hartman value", ok, f"t_H {t_h}, mean at p_V=2.6 {mean:.4f}, {elapsed:.2f} s")


def test_height_sweep_shape(acceptance):
    start = time.perf_counter()
    res = sweep_barrier_height(BARRIER_PACKET, 15.0, 50.0, (0.1, 3.0), 59)
    elapsed = time.perf_counter() - start
    v, t = res.values, res.mean_toa
    defined = all(r.defined for r in res.rows)
    # (i) approach to the free time at small barrier momentum
    low = v <= 0.5
    small_limit = abs(t[0] / 40.0 - 1) <= 0.005 and np.all(np.diff(np.abs(t[low] - 40.0)) > 0)
    # (ii) monotone rise above the free time from p_V = 2 up to the maximum
    i_max = int(np.argmax(t))
    rise = (v >= 2.0) & (np.arange(len(v)) <= i_max)
    rising = v[i_max] > 2.0 and np.all(t[rise] > 40.0) and np.all(np.diff(t[rise]) > 0)
    # (iii) one contiguous drop onto the Hartman plateau, landing inside [2.2, 2.7]
    near = np.abs(t / 32.5 - 1) <= 0.05
    after = np.arange(len(v)) > i_max
    landing = np.nonzero(near & after)[0]
    drop_steps = np.nonzero(np.diff(t) < -0.1 * (t[i_max] - 32.5))[0]
    single = len(drop_steps) > 0 and np.all(np.diff(drop_steps) == 1)
    p_star = v[landing[0]] if len(landing) else np.nan
    plateau = len(landing) > 0 and np.all(near[landing[0]:])
    ok = (defined and small_limit and rising and single and plateau and 2.2 <= p_star <= 2.7
          and elapsed < 300)
    detail = (f"mean(0.1) {t[0]:.3f}, max {t[i_max]:.2f} at {v[i_max]:.2f}, lands at p_V* {p_star:.2f} "
              f"with {t[landing[0]] if len(landing) else np.nan:.3f}, {elapsed:.1f} s")
    assert acceptance(3, "height sweep shape", ok, detail)


def test_jump_scaling(acceptance):
    start = time.perf_counter()
    maxima = {}
    for a in (10.0, 20.0):
        res = sweep_barrier_height(BARRIER_PACKET, a, 50.0, (1.9, 3.0), 111)
        maxima[a] = find_jump(res).pre_maximum
    elapsed = time.perf_counter() - start
    ok = abs(maxima[10.0] / 95 - 1) <= 0.2 and abs(maxima[20.0] / 450 - 1) <= 0.2 and elapsed < 600
    assert acceptance(4, "jump scaling", ok,
                      f"a=10 max {maxima[10.0]:.2f}, a=20 max {maxima[20.0]:.2f}, {elapsed:.1f} s")


def test_reflection_peaks(acceptance):
    start = time.perf_counter()
    first = find_peaks(arrival_distribution(-100.0, REFLECTION_PACKET, barrier(2.2, 4.0)))
    second = find_peaks(arrival_distribution(-100.0, REFLECTION_PACKET, barrier(1.9, 6.0)))
    late = [tp for tp in second.times if 100.0 <= tp <= 180.0]
    elapsed = time.perf_counter() - start
    ok = len(first) == 2 and abs(first.times[0] - 25.0) <= 1.0 and len(late) >= 2 and elapsed < 120
    detail = (f"(2.2, 4) peaks {[round(x, 2) for x in first.times]}, "
              f"(1.9, 6) late peaks {[round(x, 2) for x in late]}, {elapsed:.1f} s")
    assert acceptance(5, "reflection peaks", ok, detail)


def test_ramp_bimodality(acceptance):
    start = time.perf_counter()
    xs = (RAMP_PACKET.q0, 0.5 * RAMP_PACKET.q0, RAMP_PACKET.energy / RAMP.f)
    reports = [find_peaks(arrival_distribution(x, RAMP_PACKET, RAMP, override_quality=True)) for x in xs]
    P_tr, P_ref, _ = decompose_reflection(xs[0], RAMP_PACKET, RAMP, override_quality=True)
    seps = [r.separation for r in reports]
    elapsed = time.perf_counter() - start
    ok = (len(reports[0]) == 2 and abs(P_tr / P_ref - 1) <= 0.02 and np.all(np.diff(seps) < 0)
          and elapsed < 120)
    detail = (f"peaks at q0 {[round(x, 4) for x in reports[0].times]}, P_tr/P_ref {P_tr / P_ref:.12f}, "
              f"separations {[round(s, 4) for s in seps]}, {elapsed:.1f} s")
    assert acceptance(6, "ramp bimodality", ok, detail)


def test_round_trip_invariant(acceptance):
    start = time.perf_counter()
    p, w = gauss_legendre_nodes(*RAMP_PACKET.momentum_window(10.0), 64)
    w = w * np.abs(RAMP_PACKET.momentum_amplitude(p)) ** 2
    E = p * p / 2
    sums = [np.add(*incident_reflected_times(x, E, RAMP_PACKET, RAMP))
            for x in np.linspace(RAMP_PACKET.q0, 0.0, 21)]
    spread = max(np.max(np.abs(s / sums[0] - 1)) for s in sums)
    average = float(np.sum(w * sums[0]) / np.sum(w))
    elapsed = time.perf_counter() - start
    ok = spread <= 1e-6 and abs(average / 0.6 - 1) <= 0.02 and elapsed < 60
    assert acceptance(7, "round-trip invariant", ok,
                      f"relative spread {spread:.2e}, packet average {average:.5f}, {elapsed:.2f} s")


def _property_suites(rng):
    out = {}
    p = rng.uniform(0.05, 5.0, 1000)
    pv = rng.uniform(0.0, 5.0, 1000)
    a = rng.uniform(0.0, 30.0, 1000)
    unit = tm = 0.0
    for args in zip(p, pv, a):
        spec = barrier(args[1], args[2])
        sol = barrier_solution(args[0], spec, 1.0)
        unit = max(unit, abs(abs(sol.R) ** 2 + abs(sol.T) ** 2 - 1))
        tm = max(tm, abs(sol.T - transfer_matrix(np.array([args[0]]), spec, 1.0)[0][0]))
    out["unitarity"] = (unit, unit <= 1e-12)
    out["closed form vs transfer matrix"] = (tm, tm <= 1e-10)

    norm = route = 0.0
    for name in bundled_scenarios():
        cfg = load_scenario(name)
        for x in cfg.detectors:
            dist = arrival_distribution(x, cfg.packet, cfg.spec, override_quality=cfg.override_quality)
            norm = max(norm, abs(np.trapezoid(dist.density, dist.times) - 1))
            phase = mean_toa_phase(x, cfg.packet, cfg.spec, override_quality=cfg.override_quality)
            route = max(route, abs(mean_toa_moment(dist) / phase - 1))
    out["normalisation"] = (norm, norm <= 1e-8)
    out["moment vs phase route"] = (route, route <= 0.005)

    specs = [SquareBarrier(1.0, 4.0), RAMP, Step(0.5), Free(),
             SampledSmooth((0.0, 2.0, 5.0, 9.0), (0.0, 1.5, 0.2, 0.8))]
    lie, count = 0.0, 0
    while count < 1000:
        spec = specs[count % len(specs)]
        state = ClassicalState(rng.uniform(-20, -0.1), rng.uniform(0.5, 20))
        x = rng.uniform(-5, 8)
        t = classical_toa(state, x, spec)
        if t is None:
            continue
        lie = max(lie, abs(lie_arrival_time(state, x, spec) - t) / max(1.0, abs(t)))
        count += 1
    out["equation of time vs Lie route"] = (lie, lie <= 1e-10)

    airy = float(np.max(ode_residual(rng.uniform(-200, 200, 1000))))
    out["Airy ODE residual"] = (airy, airy <= 1e-6)
    return out


def test_property_suites(acceptance, rng):
    start = time.perf_counter()
    out = _property_suites(rng)
    elapsed = time.perf_counter() - start
    ok = all(flag for _, flag in out.values()) and elapsed < 120
    detail = ", ".join(f"{k} {v:.1e}" for k, (v, _) in out.items()) + f", {elapsed:.1f} s"
    assert acceptance(8, "property suites", ok, detail)
