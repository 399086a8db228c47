"""Quasi-classical (WKB) eigenstates and arrival statistics for smooth potentials.

Reflection is neglected: to the left of the origin the eigenstate is the
free plane wave, to the right it is ``sqrt(p / p(x)) exp(i S(x))`` with
``S(x) = int_0^x p(q) dq``.  Action and time integrals are evaluated in
closed form on each linear segment of the potential.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .classical import path_breakpoints
from .kinematics import GaussianPacket
from .quadrature import gauss_legendre_nodes
from .scattering import PotentialSpec, Step, SquareBarrier, potential_value

__all__ = ["TurningPointError", "WkbState", "EPS_TURN", "wkb_eigenfunction", "wkb_reduced",
           "wkb_arrival", "wkb_arrival_probability", "wkb_mean", "max_potential"]

EPS_TURN = 1e-3


class TurningPointError(ValueError):
    """Evaluation too close to (or beyond) a classical turning point."""


def max_potential(spec: PotentialSpec, x: float) -> float:
    if x <= 0:
        return 0.0
    q = path_breakpoints(spec, 0.0, x)
    v = potential_value(spec, q)
    if isinstance(spec, (Step, SquareBarrier)):
        v = np.append(v, potential_value(spec, 0.5 * (q[:-1] + q[1:])))
    return float(np.max(v))


def _segments(spec: PotentialSpec, x: float):
    q = path_breakpoints(spec, 0.0, x)
    if isinstance(spec, (Step, SquareBarrier)):
        v = potential_value(spec, 0.5 * (q[:-1] + q[1:]))
        return np.diff(q), v, v
    v = potential_value(spec, q)
    return np.diff(q), v[:-1], v[1:]


def _integrals(spec: PotentialSpec, x: float, p: np.ndarray, m: float):
    """``S = int_0^x p(q) dq`` and ``K = int_0^x dq / p(q)`` for each momentum in ``p``."""
    dq, va, vb = _segments(spec, x)
    A = p[:, None] ** 2 - 2 * m * va[None, :]
    B = p[:, None] ** 2 - 2 * m * vb[None, :]
    ra, rb = np.sqrt(A), np.sqrt(B)
    den = ra + rb
    # exact for linear V: int sqrt(A + slope q) and int 1/sqrt(...)
    S = np.sum((2.0 / 3.0) * dq * (A + ra * rb + B) / den, axis=1)
    K = np.sum(2.0 * dq / den, axis=1)
    return S, K


def _guard(spec: PotentialSpec, x: float, p: np.ndarray, m: float):
    E = p ** 2 / (2 * m)
    vmax = max_potential(spec, x)
    if np.any(E - vmax < EPS_TURN * E):
        raise TurningPointError(
            f"WKB state within {EPS_TURN:g} E of a turning point on [0, {x}] (max V = {vmax:g})")


@dataclass(frozen=True)
class WkbState:
    E: float
    spec: PotentialSpec
    m: float = 1.0

    def local_momentum(self, q):
        v = potential_value(self.spec, q)
        kin = self.E - v
        if np.any(kin < EPS_TURN * self.E):
            raise TurningPointError("local momentum requested in or near a forbidden region")
        return np.sqrt(2 * self.m * kin)

    def action(self, x: float) -> float:
        p = np.array([np.sqrt(2 * self.m * self.E)])
        if x <= 0:
            return float(p[0] * x)
        _guard(self.spec, x, p, self.m)
        return float(_integrals(self.spec, x, p, self.m)[0][0])


def wkb_reduced(spec: PotentialSpec, x: float, p, m: float, derivative: bool = False):
    p = np.atleast_1d(np.asarray(p, dtype=float))
    if x < 0:
        u = np.exp(1j * p * x)
        return (u, 1j * x * u) if derivative else u
    _guard(spec, x, p, m)
    S, K = _integrals(spec, x, p, m)
    vx = float(potential_value(spec, x))
    px = np.sqrt(p * p - 2 * m * vx)
    amp = np.sqrt(p / px)
    u = amp * np.exp(1j * S)
    if not derivative:
        return u
    damp = 0.5 / amp * (-2 * m * vx) / px ** 3
    # dS/dp = p K
    return u, (damp + 1j * amp * p * K) * np.exp(1j * S)


def wkb_eigenfunction(x: float, E, spec: PotentialSpec, m: float = 1.0):
    E = np.atleast_1d(np.asarray(E, dtype=float))
    p = np.sqrt(2 * m * E)
    return np.sqrt(m / (2 * np.pi * p)) * wkb_reduced(spec, x, p, m)


def _packet_nodes(packet: GaussianPacket, n_sigma: float = 10.0, n_panels: int = 64):
    lo, hi = packet.momentum_window(n_sigma)
    p, w = gauss_legendre_nodes(lo, hi, n_panels)
    return p, w * np.abs(packet.momentum_amplitude(p)) ** 2


def wkb_mean(x: float, packet: GaussianPacket, spec: PotentialSpec) -> float:
    """Momentum-averaged classical flight time ``q0 -> 0 -> x`` with WKB arrival weights."""
    p, w = _packet_nodes(packet)
    m = packet.mass
    if x < 0:
        return float(np.sum(w * m * (x - packet.q0) / p) / np.sum(w))
    _guard(spec, x, p, m)
    _, K = _integrals(spec, x, p, m)
    px = np.sqrt(p * p - 2 * m * float(potential_value(spec, x)))
    weight = w * p / px
    t = -m * packet.q0 / p + m * K
    return float(np.sum(weight * t) / np.sum(weight))


def wkb_arrival_probability(x: float, packet: GaussianPacket, spec: PotentialSpec) -> float:
    p, w = _packet_nodes(packet)
    if x < 0:
        return float(np.sum(w))
    _guard(spec, x, p, packet.mass)
    px = np.sqrt(p * p - 2 * packet.mass * float(potential_value(spec, x)))
    return float(np.sum(w * p / px))


def wkb_arrival(x: float, packet: GaussianPacket, spec: PotentialSpec, grid=None, **kwargs):
    """Normalised arrival-time density built from WKB eigenstates."""
    from .engine import arrival_distribution

    lo, hi = packet.momentum_window(10.0)
    _guard(spec, max(x, 0.0), np.array([lo, hi]), packet.mass)
    return arrival_distribution(x, packet, spec, grid=grid, model="wkb", **kwargs)
