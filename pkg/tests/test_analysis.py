import numpy as np
import pytest

from toa.analysis import (SweepResult, SweepRow, compare_times, find_jump, find_peaks, sweep_barrier_height,
                          sweep_barrier_width)
from toa.engine import ArrivalDistribution, TimeGrid
from toa.kinematics import GaussianPacket
from toa.scattering import SquareBarrier

PACKET = GaussianPacket(-30.0, 2.0, 10.0)


def _dist(times_heights, widths):
    g = TimeGrid(0.0, 100.0, 2001)
    t = g.times
    y = sum(h * np.exp(-((t - c) / w) ** 2) for (c, h), w in zip(times_heights, widths))
    return ArrivalDistribution(0.0, g, y / np.trapezoid(y, t), 1.0, 0.0)


def test_peaks_located_and_refined():
    rep = find_peaks(_dist([(25.013, 1.0), (70.0, 0.3)], [2.0, 5.0]))
    assert len(rep) == 2
    assert rep.times[0] == pytest.approx(25.013, abs=2e-3)
    assert rep.separation == pytest.approx(70.0 - 25.013, abs=5e-3)
    assert rep.peaks[0].half_width == pytest.approx(2.0 * np.sqrt(np.log(2)), rel=0.01)


def test_peaks_window_and_prominence():
    d = _dist([(25.0, 1.0), (70.0, 0.01)], [2.0, 5.0])
    assert len(find_peaks(d)) == 1
    assert len(find_peaks(d, prominence=1e-3)) == 2
    assert find_peaks(d, window=(50.0, 100.0), prominence=1e-3).times == pytest.approx([70.0], abs=1e-3)
    with pytest.raises(ValueError):
        find_peaks(d, window=(-10.0, 50.0))


def test_single_peak_separation_zero():
    assert find_peaks(_dist([(40.0, 1.0)], [3.0])).separation == 0.0


def test_find_jump():
    rows = [SweepRow(v, t, 0, 0, 1) for v, t in [(0, 40), (1, 60), (2, 90), (3, 33), (4, 32.5)]]
    rows.insert(2, SweepRow(1.5, np.nan, 0, 0, 0, "AccuracyError: x"))
    jump = find_jump(SweepResult("p_V", rows, 40, 50))
    assert jump.location == 2.5 and jump.pre_maximum == 90 and jump.size == -57


def test_height_sweep_small():
    res = sweep_barrier_height(PACKET, 15.0, 50.0, (0.1, 2.0), 3)
    assert all(r.defined for r in res.rows)
    assert res.mean_toa[0] == pytest.approx(40.034, abs=1e-3)
    np.testing.assert_allclose(res.hartman, 32.5)
    with pytest.raises(ValueError):
        sweep_barrier_height(PACKET, 15.0, 10.0, (0.1, 2.0), 3)


def test_width_sweep_regimes():
    # moderate widths follow the Hartman time; wide barriers pass only over-barrier momenta
    res = sweep_barrier_width(PACKET, 2.2, 50.0, (3.0, 6.0), 4)
    np.testing.assert_allclose(res.mean_toa, res.hartman, rtol=0.03)
    wide = sweep_barrier_width(PACKET, 2.2, 50.0, (10.0, 14.0), 3)
    assert np.all(np.diff(wide.mean_toa) > 15.0)


def test_compare_times():
    cmp = compare_times(PACKET, 50.0, SquareBarrier(0.5, 15.0))
    assert cmp.free_time == 40.0 and cmp.hartman_time == 32.5
    # far above the barrier the quantum and classical means agree closely
    assert cmp.quantum_mean == pytest.approx(cmp.classical_mean, rel=0.02)
