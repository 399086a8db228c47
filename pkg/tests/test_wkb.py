import numpy as np
import pytest

from toa.classical import classical_ensemble_mean
from toa.kinematics import GaussianPacket
from toa.scattering import Free, LinearRamp, SampledSmooth
from toa.wkb import (TurningPointError, WkbState, wkb_arrival, wkb_arrival_probability, wkb_eigenfunction,
                     wkb_mean, wkb_reduced)

RAMP = LinearRamp(100.0)


def test_action_ramp_oracle():
    # mpmath quadrature of sqrt(2 (50 - 100 q)) over [0, 0.25]
    assert WkbState(50.0, RAMP).action(0.25) == pytest.approx(2.1548220313557542, rel=1e-13)


def test_action_free_and_left():
    assert WkbState(2.0, Free()).action(5.0) == pytest.approx(10.0, rel=1e-14)
    assert WkbState(2.0, RAMP).action(-1.5) == pytest.approx(-3.0)


def test_turning_point_guard():
    with pytest.raises(TurningPointError):
        WkbState(50.0, RAMP).action(0.5)
    with pytest.raises(TurningPointError):
        WkbState(50.0, RAMP).local_momentum(0.6)


def test_local_momentum():
    assert WkbState(50.0, RAMP).local_momentum(0.25) == pytest.approx(np.sqrt(50.0))


def test_free_eigenfunction_is_plane_wave():
    E = np.array([0.5, 2.0, 8.0])
    p = np.sqrt(2 * E)
    np.testing.assert_allclose(wkb_eigenfunction(3.0, E, Free()), np.sqrt(1 / (2 * np.pi * p)) * np.exp(3j * p))


def test_amplitude_conserves_flux():
    spec = SampledSmooth((0.0, 1.0, 3.0, 4.0), (0.0, 5.0, 5.0, 0.5))
    p = np.array([4.0, 6.0])
    for x in (0.5, 2.0, 3.7):
        u = wkb_reduced(spec, x, p, 1.0)
        px = np.sqrt(p * p - 2 * np.interp(x, spec.q, spec.V))
        np.testing.assert_allclose(np.abs(u) ** 2 * px, p, rtol=1e-13)


def test_momentum_derivative():
    spec = SampledSmooth((0.0, 1.0, 3.0, 4.0), (0.0, 5.0, 5.0, 0.5))
    p = np.array([4.0, 6.0])
    h = 1e-6
    _, du = wkb_reduced(spec, 2.0, p, 1.0, derivative=True)
    fd = (wkb_reduced(spec, 2.0, p + h, 1.0) - wkb_reduced(spec, 2.0, p - h, 1.0)) / (2 * h)
    np.testing.assert_allclose(du, fd, rtol=1e-7)


def test_free_mean_and_probability():
    pk = GaussianPacket(-30.0, 2.0, 10.0)
    assert wkb_mean(50.0, pk, Free()) == pytest.approx(40.025047, rel=1e-7)
    assert wkb_arrival_probability(50.0, pk, Free()) == pytest.approx(1.0, abs=1e-12)


def test_ramp_mean_matches_classical():
    pk = GaussianPacket(-30.0, 10.0, 10.0)
    spec = LinearRamp(0.5)
    for x in (10.0, 50.0, 90.0):
        assert wkb_mean(x, pk, spec) == pytest.approx(classical_ensemble_mean(pk, x, spec), rel=0.01)


def test_probability_exceeds_one_on_slope():
    # slower local speed means longer dwell at the detector
    pk = GaussianPacket(-30.0, 10.0, 10.0)
    assert wkb_arrival_probability(50.0, pk, LinearRamp(0.5)) > 1.0


def test_distribution_normalised():
    pk = GaussianPacket(-30.0, 10.0, 10.0)
    dist = wkb_arrival(50.0, pk, LinearRamp(0.5))
    assert np.sum(dist.density) * dist.grid.spacing == pytest.approx(1.0, abs=1e-8)
    assert np.sum(dist.times * dist.density) * dist.grid.spacing == pytest.approx(
        wkb_mean(50.0, pk, LinearRamp(0.5)), rel=1e-6)


def test_distribution_refuses_turning_point():
    with pytest.raises(TurningPointError):
        wkb_arrival(0.45, GaussianPacket(-30.0, 10.0, 10.0), RAMP)
