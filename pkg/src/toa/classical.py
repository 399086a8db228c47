"""Classical equation of time and the Jacobi-Lie map to free translations.

All supported potentials are piecewise linear, so the time integral
``int dq / sqrt(H - V(q))`` is summed segment by segment in closed form.
Per segment the rationalised form ``2 dq / (sqrt(H - V_a) + sqrt(H - V_b))``
is used: it is exact for linear ``V``, has no cancellation, and absorbs the
square-root singularity at a turning point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kinematics import GaussianPacket
from .quadrature import gauss_legendre_nodes
from .scattering import (Free, LinearRamp, PotentialSpec, SampledSmooth, SquareBarrier, Step,
                         potential_value)

__all__ = ["ClassicalState", "CoverageError", "classical_toa", "turning_point", "jacobi_lie_map",
           "classical_ensemble_mean", "path_breakpoints", "lie_arrival_time"]


class CoverageError(RuntimeError):
    """Too little of the packet reaches the detector classically."""


@dataclass(frozen=True)
class ClassicalState:
    q: float
    p: float
    m: float = 1.0

    def __post_init__(self):
        if not self.m > 0:
            raise ValueError("mass must be > 0")

    def energy(self, spec: PotentialSpec) -> float:
        return self.p ** 2 / (2 * self.m) + float(potential_value(spec, self.q))


def path_breakpoints(spec: PotentialSpec, lo: float, hi: float) -> np.ndarray:
    """Sorted positions in ``[lo, hi]`` between which ``V`` is linear."""
    pts = [lo, hi]
    if isinstance(spec, (Step, LinearRamp)):
        pts.append(0.0)
    elif isinstance(spec, SquareBarrier):
        pts += [0.0, spec.a]
    elif isinstance(spec, SampledSmooth):
        pts += list(spec.q)
    pts = np.unique([x for x in pts if lo <= x <= hi])
    return pts


def _segment_values(spec: PotentialSpec, q: np.ndarray):
    """Potential just right of each left end and just left of each right end."""
    left, right = q[:-1], q[1:]
    mid = 0.5 * (left + right)
    if isinstance(spec, (Step, SquareBarrier)):
        # constant on each open segment
        v = potential_value(spec, mid)
        return v, v
    return potential_value(spec, left), potential_value(spec, right)


def _time_integral(spec: PotentialSpec, H: float, lo: float, hi: float) -> float | None:
    """``int_lo^hi dq / sqrt(H - V)``, or None if the path is classically forbidden."""
    if hi == lo:
        return 0.0
    q = path_breakpoints(spec, lo, hi)
    va, vb = _segment_values(spec, q)
    A = H - va
    B = H - vb
    if np.any(A < 0) or np.any(B < 0):
        return None
    den = np.sqrt(A) + np.sqrt(B)
    if np.any(den == 0):
        return None
    return float(np.sum(2.0 * np.diff(q) / den))


def classical_toa(state: ClassicalState, x: float, spec: PotentialSpec) -> float | None:
    """Arrival time at ``x`` along the classical trajectory through ``state``.

    Returns ``None`` when a turning point lies between ``state.q`` and ``x``.
    """
    if state.p == 0:
        return None
    H = state.energy(spec)
    lo, hi = sorted((state.q, x))
    # a detector behind the particle gives a negative (past) arrival time
    integral = _time_integral(spec, H, lo, hi)
    if integral is None:
        return None
    sgn_path = 1.0 if x >= state.q else -1.0
    return math.copysign(1.0, state.p) * sgn_path * math.sqrt(state.m / 2.0) * integral


def turning_point(E: float, spec: PotentialSpec) -> float | None:
    if not E > 0:
        raise ValueError("energy must be > 0")
    if isinstance(spec, Free):
        return None
    if isinstance(spec, (Step, SquareBarrier)):
        return 0.0 if E <= spec.V else None
    if isinstance(spec, LinearRamp):
        return E / spec.f
    if isinstance(spec, SampledSmooth):
        q = np.asarray(spec.q)
        v = np.asarray(spec.V)
        above = np.nonzero(v >= E)[0]
        if len(above) == 0:
            return None
        i = above[0]
        if i == 0:
            return float(q[0])
        return float(q[i - 1] + (E - v[i - 1]) * (q[i] - q[i - 1]) / (v[i] - v[i - 1]))
    raise TypeError(f"unknown potential {spec!r}")


def _lie_coordinate(spec: PotentialSpec, H: float, q: float) -> float | None:
    # Q = int_0^q dq' / sqrt(1 - V/H) = sqrt(H) int_0^q dq' / sqrt(H - V)
    lo, hi = sorted((0.0, q))
    integral = _time_integral(spec, H, lo, hi)
    if integral is None:
        return None
    return math.copysign(1.0, q) * math.sqrt(H) * integral if q != 0 else 0.0


def jacobi_lie_map(state: ClassicalState, spec: PotentialSpec) -> tuple[float, float] | None:
    """Free-translation coordinates ``(Q, P)`` with ``P^2 / 2m = H(q, p)``; None if unreachable."""
    H = state.energy(spec)
    if not H > 0:
        return None
    P = math.copysign(math.sqrt(2.0 * state.m * H), state.p)
    Q = _lie_coordinate(spec, H, state.q)
    if Q is None:
        return None
    return Q, P


def lie_arrival_time(state: ClassicalState, x: float, spec: PotentialSpec) -> float | None:
    """``m (X - Q) / P`` with ``X`` the image of the detector position."""
    mapped = jacobi_lie_map(state, spec)
    if mapped is None:
        return None
    Q, P = mapped
    H = P * P / (2 * state.m)
    X = _lie_coordinate(spec, H, x)
    if X is None or _time_integral(spec, H, *sorted((state.q, x))) is None:
        return None
    return state.m * (X - Q) / P


def classical_ensemble_mean(packet: GaussianPacket, x: float, spec: PotentialSpec,
                            n_sigma: float = 8.0, n_panels: int = 64,
                            min_coverage: float = 0.99) -> float:
    """Classical arrival time averaged over the packet's momentum density."""
    lo, hi = packet.momentum_window(n_sigma)
    p, w = gauss_legendre_nodes(lo, hi, n_panels)
    dens = np.abs(packet.momentum_amplitude(p)) ** 2 * w
    times = np.array([classical_toa(ClassicalState(packet.q0, pi, packet.mass), x, spec)
                      for pi in p], dtype=object)
    ok = np.array([t is not None for t in times])
    total = dens.sum()
    reach = dens[ok].sum()
    if reach < min_coverage * total:
        raise CoverageError(f"only {reach / total:.3%} of the packet reaches x = {x} classically")
    t = np.array([float(v) for v in times[ok]])
    return float(np.sum(dens[ok] * t) / reach)
