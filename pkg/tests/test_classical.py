import numpy as np
import pytest
from hypothesis import given, strategies as st

from toa.classical import (ClassicalState, CoverageError, classical_ensemble_mean, classical_toa,
                           jacobi_lie_map, lie_arrival_time, turning_point)
from toa.kinematics import GaussianPacket
from toa.scattering import Free, LinearRamp, SampledSmooth, SquareBarrier, Step

RAMP = LinearRamp(100.0)


def test_free_flight():
    assert classical_toa(ClassicalState(-30.0, 2.0), 50.0, Free()) == pytest.approx(40.0, rel=1e-14)


def test_ramp_times():
    s = ClassicalState(-2.0, 10.0)
    assert classical_toa(s, 0.0, RAMP) == pytest.approx(0.2, rel=1e-12)
    assert classical_toa(s, 0.5, RAMP) == pytest.approx(0.3, rel=1e-10)
    assert classical_toa(s, 0.6, RAMP) is None


def test_turning_points():
    assert turning_point(50.0, RAMP) == pytest.approx(0.5)
    assert turning_point(3.0, Free()) is None
    assert turning_point(1.0, SquareBarrier(2.0, 5.0)) == 0.0
    assert turning_point(3.0, SquareBarrier(2.0, 5.0)) is None
    assert turning_point(0.5, Step(1.0)) == 0.0
    ramp = SampledSmooth((0.0, 1.0, 2.0), (0.0, 2.0, 4.0))
    assert turning_point(3.0, ramp) == pytest.approx(1.5)


def test_lie_map_free_is_identity():
    assert jacobi_lie_map(ClassicalState(3.5, -1.25), Free()) == pytest.approx((3.5, -1.25))


@given(st.floats(-20, 20), st.floats(0.5, 10), st.floats(0.1, 4))
def test_lie_map_energy(q, p, V):
    spec = SquareBarrier(V, 3.0)
    state = ClassicalState(q, p)
    mapped = jacobi_lie_map(state, spec)
    if mapped is None:
        return
    _, P = mapped
    assert P * P / 2 == pytest.approx(state.energy(spec), rel=1e-12)


def _random_reachable(rng, n):
    specs = [SquareBarrier(1.0, 4.0), RAMP, Step(0.5), SampledSmooth((0.0, 2.0, 5.0, 9.0), (0.0, 1.5, 0.2, 0.8))]
    out = []
    while len(out) < n:
        spec = specs[len(out) % len(specs)]
        q = rng.uniform(-20, -0.1)
        p = rng.uniform(0.5, 20)
        x = rng.uniform(-5, 8)
        t = classical_toa(ClassicalState(q, p), x, spec)
        if t is not None:
            out.append((ClassicalState(q, p), x, spec, t))
    return out


def test_equation_of_time_equals_lie_route(rng):
    for state, x, spec, t in _random_reachable(rng, 1000):
        assert lie_arrival_time(state, x, spec) == pytest.approx(t, rel=1e-10, abs=1e-10)


def test_additivity_and_monotonicity():
    spec = SampledSmooth((0.0, 2.0, 5.0, 9.0), (0.0, 1.5, 0.2, 0.8))
    s = ClassicalState(-4.0, 2.5)
    xs = np.linspace(-3.0, 8.9, 40)
    ts = [classical_toa(s, x, spec) for x in xs]
    assert all(np.diff(ts) > 0)
    # restart at x1 with the local momentum there
    x1, x2 = 3.0, 7.0
    H = s.energy(spec)
    p1 = np.sqrt(2 * (H - float(np.interp(x1, spec.q, spec.V))))
    t1 = classical_toa(s, x1, spec)
    t12 = classical_toa(ClassicalState(x1, p1), x2, spec)
    assert t1 + t12 == pytest.approx(classical_toa(s, x2, spec), rel=1e-10)


def test_barrier_over_top_time():
    # V = 1, p = 2 over a width-15 barrier: 65 units at speed 2, 15 at local speed sqrt 2
    t = classical_toa(ClassicalState(-30.0, 2.0), 50.0, SquareBarrier(1.0, 15.0))
    assert t == pytest.approx(32.5 + 15.0 / np.sqrt(2.0), rel=1e-12)
    assert lie_arrival_time(ClassicalState(-30.0, 2.0), 50.0, SquareBarrier(1.0, 15.0)) == pytest.approx(t, rel=1e-10)


def test_ensemble_free():
    assert classical_ensemble_mean(GaussianPacket(-30.0, 2.0, 10.0), 50.0, Free()) == pytest.approx(40.025, rel=1e-3)


def test_ensemble_coverage():
    with pytest.raises(CoverageError):
        classical_ensemble_mean(GaussianPacket(-2.0, 10.0, 1.0), 0.5, RAMP)
    assert classical_ensemble_mean(GaussianPacket(-2.0, 10.0, 1.0), -2.0, RAMP) == 0.0
