"""Barrier sweeps, jump location and peak detection on arrival-time densities."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import signal

from .classical import CoverageError, classical_ensemble_mean
from .engine import (ArrivalDistribution, arrival_probability, hartman_time, mean_toa_phase,
                     parallel_map, wigner_phase_time)
from .kinematics import GaussianPacket
from .scattering import PotentialSpec, SquareBarrier

__all__ = ["SweepRow", "SweepResult", "Peak", "PeakReport", "Jump", "TimeComparison",
           "sweep_barrier_height", "sweep_barrier_width", "find_peaks", "find_jump", "compare_times",
           "DEFAULT_PROMINENCE"]

DEFAULT_PROMINENCE = 0.02


@dataclass(frozen=True)
class SweepRow:
    value: float
    mean_toa: float
    phase_time: float
    hartman_time: float
    probability: float
    error: str = ""

    @property
    def defined(self) -> bool:
        return not self.error and math.isfinite(self.mean_toa)


@dataclass
class SweepResult:
    parameter: str
    rows: list[SweepRow]
    t0: float
    x: float

    @property
    def values(self) -> np.ndarray:
        return np.array([r.value for r in self.rows])

    @property
    def mean_toa(self) -> np.ndarray:
        return np.array([r.mean_toa for r in self.rows])

    @property
    def phase_time(self) -> np.ndarray:
        return np.array([r.phase_time for r in self.rows])

    @property
    def hartman(self) -> np.ndarray:
        return np.array([r.hartman_time for r in self.rows])

    @property
    def probability(self) -> np.ndarray:
        return np.array([r.probability for r in self.rows])


def _row(packet: GaussianPacket, x: float, p_v: float, a: float, value: float, tol: float) -> SweepRow:
    m = packet.mass
    spec = SquareBarrier(p_v * p_v / (2 * m), a)
    t_h = hartman_time(packet.free_arrival_time(x), a, packet.p0, m)
    try:
        mean = mean_toa_phase(x, packet, spec, tol=tol)
        prob = arrival_probability(x, packet, spec, tol=tol)
        phase = float(wigner_phase_time(packet.p0, x, packet.q0, spec, m))
    except Exception as exc:  # noqa: BLE001  (flagged per row, never fatal to the sweep)
        return SweepRow(value, math.nan, math.nan, t_h, math.nan, f"{type(exc).__name__}: {exc}")
    return SweepRow(value, mean, phase, t_h, prob)


def _check_beyond(x: float, a_max: float):
    if not x > a_max:
        raise ValueError(f"detector x = {x} must lie beyond the barrier (a <= {a_max})")


def sweep_barrier_height(packet: GaussianPacket, a: float, x: float, p_v_range: tuple[float, float],
                         n: int, tol: float = 1e-8) -> SweepResult:
    """Mean arrival time behind a barrier of width ``a`` for ``n`` barrier momenta."""
    _check_beyond(x, a)
    values = np.linspace(p_v_range[0], p_v_range[1], n)
    rows = parallel_map(lambda v: _row(packet, x, float(v), a, float(v), tol), values)
    return SweepResult("p_V", rows, packet.free_arrival_time(x), x)


def sweep_barrier_width(packet: GaussianPacket, p_v: float, x: float, a_range: tuple[float, float],
                        n: int, tol: float = 1e-8) -> SweepResult:
    """Mean arrival time behind a barrier of momentum ``p_v`` for ``n`` widths."""
    _check_beyond(x, max(a_range))
    values = np.linspace(a_range[0], a_range[1], n)
    rows = parallel_map(lambda v: _row(packet, x, p_v, float(v), float(v), tol), values)
    return SweepResult("a", rows, packet.free_arrival_time(x), x)


@dataclass(frozen=True)
class Jump:
    index: int
    location: float
    before: float
    after: float
    pre_maximum: float

    @property
    def size(self) -> float:
        return self.after - self.before


def find_jump(result: SweepResult) -> Jump | None:
    """Largest single-step change of the mean arrival time over the defined rows."""
    rows = [r for r in result.rows if r.defined]
    if len(rows) < 2:
        return None
    v = np.array([r.value for r in rows])
    t = np.array([r.mean_toa for r in rows])
    i = int(np.argmax(np.abs(np.diff(t))))
    return Jump(i, 0.5 * (v[i] + v[i + 1]), float(t[i]), float(t[i + 1]), float(np.max(t[:i + 1])))


@dataclass(frozen=True)
class Peak:
    t: float
    height: float
    half_width: float


@dataclass
class PeakReport:
    peaks: list[Peak] = field(default_factory=list)
    window: tuple[float, float] = (-math.inf, math.inf)

    def __len__(self) -> int:
        return len(self.peaks)

    @property
    def times(self) -> list[float]:
        return [p.t for p in self.peaks]

    @property
    def separation(self) -> float:
        """Distance between the first and last peak; zero for fewer than two."""
        return self.peaks[-1].t - self.peaks[0].t if len(self.peaks) > 1 else 0.0


def find_peaks(dist: ArrivalDistribution, window: tuple[float, float] | None = None,
               prominence: float = DEFAULT_PROMINENCE) -> PeakReport:
    """Local maxima above ``prominence * max(density)``, refined by a parabola through three samples."""
    t = dist.times
    y = dist.density
    if window is None:
        window = (float(t[0]), float(t[-1]))
    t1, t2 = window
    if t1 > t2:
        raise ValueError("window must satisfy t1 <= t2")
    if t1 < t[0] or t2 > t[-1]:
        raise ValueError(f"window {window} not inside the grid [{t[0]}, {t[-1]}]")
    if not dist.defined or y.size == 0:
        return PeakReport([], window)
    level = prominence * float(np.max(y))
    idx, _ = signal.find_peaks(y, height=level, prominence=level)
    idx = idx[(t[idx] >= t1) & (t[idx] <= t2)]
    if idx.size == 0:
        return PeakReport([], window)
    widths = signal.peak_widths(y, idx, rel_height=0.5)[0]
    dt = dist.grid.spacing
    peaks = []
    for i, w in zip(idx, widths):
        tp, hp = t[i], y[i]
        if 0 < i < len(y) - 1:
            a, b, c = y[i - 1], y[i], y[i + 1]
            den = a - 2 * b + c
            if den < 0:
                shift = 0.5 * (a - c) / den
                tp = t[i] + shift * dt
                hp = b - 0.25 * (a - c) * shift
        peaks.append(Peak(float(tp), float(hp), float(0.5 * w * dt)))
    return PeakReport(peaks, window)


@dataclass(frozen=True)
class TimeComparison:
    quantum_mean: float
    phase_time: float
    hartman_time: float | None
    classical_mean: float | None
    free_time: float


def compare_times(packet: GaussianPacket, x: float, spec: PotentialSpec, tol: float = 1e-8) -> TimeComparison:
    """Quantum mean next to the single-momentum phase time, Hartman and classical estimates."""
    t0 = packet.free_arrival_time(x)
    t_h = hartman_time(t0, spec.a, packet.p0, packet.mass) if isinstance(spec, SquareBarrier) else None
    try:
        classical = classical_ensemble_mean(packet, x, spec)
    except CoverageError:
        classical = None
    return TimeComparison(mean_toa_phase(x, packet, spec, tol=tol),
                          float(wigner_phase_time(packet.p0, x, packet.q0, spec, packet.mass)),
                          t_h, classical, t0)
