"""Stationary scattering states for the supported one-dimensional potentials.

Every eigenfunction is handled in its *reduced* form ``u(x, p)``: the state
``<x|E r(+)>`` with the flux normalisation ``sqrt(m / 2 pi p)`` stripped, so
that an incident unit plane wave ``exp(i p x)`` arrives from the left.  All
functions here are vectorised over the momentum ``p``; ``x`` is a scalar.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .specfun import airy

__all__ = [
    "Free", "Step", "SquareBarrier", "LinearRamp", "SampledSmooth", "PotentialSpec",
    "ScatteringSolution", "DomainError", "potential_value", "barrier_momentum",
    "step_coefficients", "barrier_solution", "barrier_transmission", "transfer_matrix",
    "barrier_transmission_phase_derivative", "linear_modulus_phase", "phase_shift",
    "phase_shift_derivative", "eigenfunction", "split_currents", "reduced_eigenfunction",
    "reduced_left_eigenfunction", "supports_split", "singular_momenta",
]


class DomainError(ValueError):
    """Argument outside the physical domain of an operation."""


@dataclass(frozen=True)
class Free:
    kind = "free"


@dataclass(frozen=True)
class Step:
    V: float
    kind = "step"

    def __post_init__(self):
        if not self.V >= 0:
            raise DomainError("step height must be >= 0")


@dataclass(frozen=True)
class SquareBarrier:
    V: float
    a: float
    kind = "barrier"

    def __post_init__(self):
        if not self.V >= 0:
            raise DomainError("barrier height must be >= 0")
        if not self.a >= 0:
            raise DomainError("barrier width must be >= 0")


@dataclass(frozen=True)
class LinearRamp:
    f: float
    kind = "ramp"

    def __post_init__(self):
        if not self.f > 0:
            raise DomainError("ramp force must be > 0")


@dataclass(frozen=True)
class SampledSmooth:
    """Piecewise-linear potential through ``(q, V)`` samples; zero for ``q < 0``."""

    q: tuple
    V: tuple
    kind = "sampled"

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        v = np.asarray(self.V, dtype=float)
        if q.ndim != 1 or q.shape != v.shape or len(q) < 2:
            raise DomainError("sampled potential needs matching 1-D q and V tables")
        if np.any(np.diff(q) <= 0):
            raise DomainError("sampled potential grid must be strictly increasing")
        if q[0] != 0.0 or v[0] != 0.0:
            raise DomainError("sampled potential must start at q = 0 with V = 0")
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise DomainError("sampled potential must be finite and >= 0")
        object.__setattr__(self, "q", tuple(float(x) for x in q))
        object.__setattr__(self, "V", tuple(float(x) for x in v))

    @property
    def q_max(self) -> float:
        return self.q[-1]


PotentialSpec = Union[Free, Step, SquareBarrier, LinearRamp, SampledSmooth]


def potential_value(spec: PotentialSpec, q):
    q = np.asarray(q, dtype=float)
    if isinstance(spec, Free):
        return np.zeros_like(q)
    if isinstance(spec, Step):
        return np.where(q >= 0, spec.V, 0.0)
    if isinstance(spec, SquareBarrier):
        return np.where((q >= 0) & (q <= spec.a), spec.V, 0.0)
    if isinstance(spec, LinearRamp):
        return np.where(q > 0, spec.f * q, 0.0)
    if isinstance(spec, SampledSmooth):
        if np.any(q > spec.q_max):
            raise DomainError(f"position beyond sampled potential table (q_max = {spec.q_max})")
        return np.where(q < 0, 0.0, np.interp(q, spec.q, spec.V))
    raise TypeError(f"unknown potential {spec!r}")


def barrier_momentum(spec: PotentialSpec, m: float) -> float:
    """``p_V = sqrt(2 m V)`` for the constant-height potentials, else 0."""
    if isinstance(spec, (Step, SquareBarrier)):
        return math.sqrt(2.0 * m * spec.V)
    return 0.0


def singular_momenta(spec: PotentialSpec, m: float) -> tuple[float, ...]:
    """Momenta where the reduced eigenfunction has a square-root branch point."""
    if isinstance(spec, Step) and spec.V > 0:
        return (barrier_momentum(spec, m),)
    return ()


@dataclass(frozen=True)
class ScatteringSolution:
    """Per-momentum stationary-state data (arrays broadcast over ``p``)."""

    p: np.ndarray
    energy: np.ndarray
    p_prime: np.ndarray
    T: np.ndarray
    R: np.ndarray
    interior: tuple = field(default=())
    channel: str = "right"


def _check_momentum(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if np.any(~(p > 0)):
        raise DomainError("momentum must be > 0")
    return p


def _reduced_momentum(p, pv):
    return np.sqrt(p * p - pv * pv + 0j)


# Entire functions of w = z^2 used with z = p' a:
#   cos z,  S(z) = sin z / z,  C2(z) = (cos z - S(z)) / z^2


def _cos_sinc(w):
    w = np.asarray(w, dtype=float)
    small = np.abs(w) < 1e-2
    ws = np.where(small, w, 0.0)
    c_ser = 1 - ws / 2 + ws ** 2 / 24 - ws ** 3 / 720 + ws ** 4 / 40320
    s_ser = 1 - ws / 6 + ws ** 2 / 120 - ws ** 3 / 5040 + ws ** 4 / 362880
    c2_ser = -1 / 3 + ws / 30 - ws ** 2 / 840 + ws ** 3 / 45360
    wb = np.where(small, 1.0, w)
    r = np.sqrt(np.abs(wb))
    with np.errstate(over="ignore", invalid="ignore"):
        c_big = np.where(wb > 0, np.cos(r), np.cosh(r))
        s_big = np.where(wb > 0, np.sin(r), np.sinh(r)) / r
        c2_big = (c_big - s_big) / wb
    return (np.where(small, c_ser, c_big), np.where(small, s_ser, s_big),
            np.where(small, c2_ser, c2_big))


def step_coefficients(p, V: float, m: float) -> ScatteringSolution:
    p = _check_momentum(p)
    if V < 0:
        raise DomainError("step height must be >= 0")
    pv = math.sqrt(2.0 * m * V)
    pp = _reduced_momentum(p, pv)
    T = 2.0 * p / (p + pp)
    R = (p - pp) / (p + pp)
    return ScatteringSolution(p=p, energy=p * p / (2 * m), p_prime=pp, T=T, R=R, interior=(T,))


def _barrier_parts(p, spec: SquareBarrier, m: float):
    pv2 = 2.0 * m * spec.V
    a = spec.a
    w = (p * p - pv2) * a * a
    c, S, C2 = _cos_sinc(w)
    s = a * S                       # sin(p'a) / p'
    k2 = 2 * p * p - pv2            # p^2 + p'^2
    D = 2j * p * c + k2 * s
    return pv2, c, s, C2, k2, D


def barrier_transmission(p, spec: SquareBarrier, m: float):
    """Closed-form transmission amplitude of the square barrier.

    ``T = 2 p p' exp(-i p a) / (2 p p' cos(p' a) - i (p^2 + p'^2) sin(p' a))``,
    written in terms of ``sin(p' a) / p'`` so that it stays finite at
    ``p = p_V`` and is literally valid with imaginary ``p'`` below it.
    """
    p = _check_momentum(p)
    _, c, s, _, _, D = _barrier_parts(p, spec, m)
    with np.errstate(over="ignore", invalid="ignore"):
        T = 2j * p * np.exp(-1j * p * spec.a) / D
    return np.where(np.isfinite(T), T, 0.0)


def barrier_transmission_phase_derivative(p, spec: SquareBarrier, m: float):
    """``d arg T / dp`` from the analytic derivative of the denominator."""
    p = _check_momentum(p)
    a = spec.a
    pv2, c, s, C2, k2, D = _barrier_parts(p, spec, m)
    dc = -a * p * s
    ds = a ** 3 * p * C2
    dD = 2j * c + 2j * p * dc + 4 * p * s + k2 * ds
    with np.errstate(over="ignore", invalid="ignore"):
        out = -a - np.imag(dD / D)
    return np.where(np.isfinite(out), out, -a)


def transfer_matrix(p, spec: SquareBarrier, m: float):
    """``(T, R, C, D)`` by propagating the transmitted wave backwards through the barrier.

    Starting from ``(psi, psi') = (e^{ipa}, i p e^{ipa})`` at the back face, the
    interior transfer matrix is applied in reverse and the result at ``q = 0``
    is split into incident and reflected plane waves.  Interior solution is
    ``C cos(p'q) + D sin(p'q)/p'``.
    """
    p = _check_momentum(p)
    a = spec.a
    pv2 = 2.0 * m * spec.V
    c, S, _ = _cos_sinc((p * p - pv2) * a * a)
    s = a * S
    pp2 = p * p - pv2
    # inverse of [[c, s], [-p'^2 s, c]] (unit determinant)
    minv = np.empty(p.shape + (2, 2))
    minv[..., 0, 0] = c
    minv[..., 0, 1] = -s
    minv[..., 1, 0] = pp2 * s
    minv[..., 1, 1] = c
    back = np.stack([np.exp(1j * p * a), 1j * p * np.exp(1j * p * a)], axis=-1)
    front = np.einsum("...ij,...j->...i", minv, back)
    psi0, dpsi0 = front[..., 0], front[..., 1]
    inc = 0.5 * (psi0 + dpsi0 / (1j * p))
    ref = 0.5 * (psi0 - dpsi0 / (1j * p))
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        T = 1.0 / inc
        R = ref / inc
        C = psi0 / inc
        D = dpsi0 / inc
    return T, R, C, D


def barrier_solution(p, spec: SquareBarrier, m: float) -> ScatteringSolution:
    p = _check_momentum(p)
    _, R, C, D = transfer_matrix(p, spec, m)
    T = barrier_transmission(p, spec, m)
    pv = math.sqrt(2.0 * m * spec.V)
    return ScatteringSolution(p=p, energy=p * p / (2 * m), p_prime=_reduced_momentum(p, pv),
                              T=T, R=R, interior=(C, D))


def _barrier_reflection_and_derivative(p, spec: SquareBarrier, m: float):
    # R = s p_V^2 / D, with s = sin(p'a)/p' and D the t1 denominator
    a = spec.a
    pv2, c, s, C2, k2, D = _barrier_parts(p, spec, m)
    dc = -a * p * s
    ds = a ** 3 * p * C2
    dD = 2j * c + 2j * p * dc + 4 * p * s + k2 * ds
    with np.errstate(over="ignore", invalid="ignore"):
        R = s * pv2 / D
        dR = pv2 * (ds * D - s * dD) / (D * D)
        T = 2j * p * np.exp(-1j * p * a) / D
        dT = T * (1.0 / p - 1j * a - dD / D)
    fix = lambda z: np.where(np.isfinite(z), z, 0.0)
    return fix(R), fix(dR), fix(T), fix(dT)


# ---- linear ramp -------------------------------------------------------------


def _ramp_parts(p, f: float, m: float):
    kf = (2.0 * m * f) ** (1.0 / 3.0)
    c = kf / p
    z0 = -(p / kf) ** 2
    dz0 = -2.0 * p / kf ** 2
    dc = -kf / p ** 2
    ai0, aip0 = airy(z0)
    W0 = ai0 - 1j * c * aip0
    dW0 = aip0 * dz0 - 1j * (dc * aip0 + c * z0 * ai0 * dz0)
    return kf, c, z0, dz0, dc, W0, dW0


def _branch_fix(raw, z):
    """Continuous phase of ``Ai(z) - i c Ai'(z)`` along ``z``.

    For ``z < 0`` the branch nearest to ``pi/4 - (2/3)(-z)^{3/2}`` is selected;
    for ``z >= 0`` the principal value is already continuous.
    """
    z = np.asarray(z, dtype=float)
    x = np.where(z < 0, -z, 0.0)
    guide = np.pi / 4 - (2.0 / 3.0) * x ** 1.5
    k = np.rint((guide - raw) / (2 * np.pi))
    return np.where(z < 0, raw + 2 * np.pi * k, raw)


def _check_ramp_args(E, f):
    E = np.asarray(E, dtype=float)
    if np.any(~(E > 0)):
        raise DomainError("energy must be > 0")
    if not f > 0:
        raise DomainError("force must be > 0")
    return E


def phase_shift(E, f: float, m: float):
    """Continuous phase shift ``delta(E) = phi(0, E)`` of the linear ramp."""
    E = _check_ramp_args(E, f)
    p = np.sqrt(2.0 * m * E)
    _, _, z0, _, _, W0, _ = _ramp_parts(p, f, m)
    return _branch_fix(np.angle(W0), z0)


def phase_shift_derivative(E, f: float, m: float):
    """``d delta / dE`` by the Airy-equation chain rule."""
    E = _check_ramp_args(E, f)
    p = np.sqrt(2.0 * m * E)
    _, _, _, _, _, W0, dW0 = _ramp_parts(p, f, m)
    return np.imag(dW0 / W0) * m / p


def linear_modulus_phase(q: float, E, f: float, m: float):
    """Real envelope ``M`` and continuous phase ``phi`` with ``<q|E> ~ M cos(phi)``.

    ``M = 1`` and ``phi = p q + delta(E)`` for ``q <= 0``; beyond the origin
    ``M`` is the Airy modulus ratio and ``phi`` the Airy phase.
    """
    E = _check_ramp_args(E, f)
    p = np.sqrt(2.0 * m * E)
    kf, c, z0, _, _, W0, _ = _ramp_parts(p, f, m)
    delta = _branch_fix(np.angle(W0), z0)
    if q <= 0:
        return np.ones_like(p), p * q + delta
    z = kf * q + z0
    ai, aip = airy(z)
    W = ai - 1j * c * aip
    return np.abs(W) / np.abs(W0), _branch_fix(np.angle(W), z)


def _ramp_phase_derivative(x: float, p, f: float, m: float):
    """``d phi(x, E) / dp`` and ``d delta / dp`` (momentum derivatives)."""
    kf, c, z0, dz0, dc, W0, dW0 = _ramp_parts(p, f, m)
    ddelta = np.imag(dW0 / W0)
    if x <= 0:
        return x + ddelta, ddelta
    z = kf * x + z0
    ai, aip = airy(z)
    W = ai - 1j * c * aip
    dW = aip * dz0 - 1j * (dc * aip + c * z * ai * dz0)
    return np.imag(dW / W), ddelta


# ---- reduced eigenfunctions ---------------------------------------------------


def reduced_eigenfunction(spec: PotentialSpec, x: float, p, m: float, derivative: bool = False):
    """Right-mover eigenfunction without its flux normalisation.

    Returns ``u`` or ``(u, du/dp)``.
    """
    p = np.asarray(p, dtype=float)
    if isinstance(spec, Free) or (isinstance(spec, (Step, SquareBarrier)) and spec.V == 0) \
            or (isinstance(spec, SquareBarrier) and spec.a == 0):
        u = np.exp(1j * p * x)
        return (u, 1j * x * u) if derivative else u
    if isinstance(spec, Step):
        pv = math.sqrt(2.0 * m * spec.V)
        pp = _reduced_momentum(p, pv)
        T = 2.0 * p / (p + pp)
        R = (p - pp) / (p + pp)
        if not derivative:
            if x < 0:
                return np.exp(1j * p * x) + R * np.exp(-1j * p * x)
            return T * np.exp(1j * pp * x)
        with np.errstate(divide="ignore", invalid="ignore"):
            dpp = p / pp
            dT = 2.0 / (p + pp) - 2.0 * p * (1 + dpp) / (p + pp) ** 2
            dR = ((1 - dpp) * (p + pp) - (p - pp) * (1 + dpp)) / (p + pp) ** 2
        if x < 0:
            e = np.exp(1j * p * x)
            return e + R / e, 1j * x * e + (dR - 1j * x * R) / e
        e = np.exp(1j * pp * x)
        return T * e, (dT + 1j * x * dpp * T) * e
    if isinstance(spec, SquareBarrier):
        R, dR, T, dT = _barrier_reflection_and_derivative(p, spec, m)
        if x < 0:
            e = np.exp(1j * p * x)
            u = e + R / e
            return (u, 1j * x * e + (dR - 1j * x * R) / e) if derivative else u
        if x > spec.a:
            e = np.exp(1j * p * x)
            u = T * e
            return (u, (dT + 1j * x * T) * e) if derivative else u
        pv2 = 2.0 * m * spec.V
        cx, Sx, C2x = _cos_sinc((p * p - pv2) * x * x)
        sx = x * Sx
        C = 1 + R
        D = 1j * p * (1 - R)
        u = C * cx + D * sx
        if not derivative:
            return u
        dcx = -x * p * sx
        dsx = x ** 3 * p * C2x
        dC = dR
        dDc = 1j * (1 - R) - 1j * p * dR
        return u, dC * cx + C * dcx + dDc * sx + D * dsx
    if isinstance(spec, LinearRamp):
        kf, c, z0, dz0, dc, W0, dW0 = _ramp_parts(p, spec.f, m)
        if x <= 0:
            e = np.exp(1j * p * x)
            rho = np.conj(W0) / W0
            u = e + rho / e
            if not derivative:
                return u
            drho = (np.conj(dW0) * W0 - np.conj(W0) * dW0) / W0 ** 2
            return u, 1j * x * e + (drho - 1j * x * rho) / e
        z = kf * x + z0
        ai, aip = airy(z)
        u = 2.0 * ai / W0
        if not derivative:
            return u
        return u, 2.0 * aip * dz0 / W0 - 2.0 * ai * dW0 / W0 ** 2
    if isinstance(spec, SampledSmooth):
        from .wkb import wkb_reduced
        return wkb_reduced(spec, x, p, m, derivative=derivative)
    raise TypeError(f"unknown potential {spec!r}")


def reduced_left_eigenfunction(spec: PotentialSpec, x: float, p, m: float, derivative: bool = False):
    """Left-mover channel (incident from the right), for the mirror-symmetric potentials."""
    p = np.asarray(p, dtype=float)
    if isinstance(spec, Free):
        u = np.exp(-1j * p * x)
        return (u, -1j * x * u) if derivative else u
    if isinstance(spec, SquareBarrier):
        a = spec.a
        ph = np.exp(-1j * p * a)
        if not derivative:
            return ph * reduced_eigenfunction(spec, a - x, p, m)
        u, du = reduced_eigenfunction(spec, a - x, p, m, derivative=True)
        return ph * u, ph * (du - 1j * a * u)
    raise NotImplementedError(f"no left-mover channel for {type(spec).__name__}")


def supports_split(spec: PotentialSpec, x: float) -> bool:
    if isinstance(spec, (Free, Step, LinearRamp)):
        return True
    if isinstance(spec, SquareBarrier):
        return x < 0 or x > spec.a or spec.a == 0 or spec.V == 0
    return False


def _split(spec: PotentialSpec, x: float, p, m: float):
    p = np.asarray(p, dtype=float)
    zero = np.zeros(p.shape, dtype=complex)
    if isinstance(spec, Free):
        return np.exp(1j * p * x), zero
    if isinstance(spec, (Step, SquareBarrier)):
        if not supports_split(spec, x):
            raise DomainError("no current split inside the barrier")
        if isinstance(spec, SquareBarrier) and (spec.V == 0 or spec.a == 0):
            return np.exp(1j * p * x), zero
        if x < 0:
            e = np.exp(1j * p * x)
            R = (step_coefficients(p, spec.V, m).R if isinstance(spec, Step)
                 else _barrier_reflection_and_derivative(p, spec, m)[0])
            return e, R / e
        return reduced_eigenfunction(spec, x, p, m), zero
    if isinstance(spec, LinearRamp):
        kf, c, z0, _, _, W0, _ = _ramp_parts(p, spec.f, m)
        if x <= 0:
            e = np.exp(1j * p * x)
            return e, np.conj(W0) / W0 / e
        z = kf * x + z0
        ai, aip = airy(z)
        W = ai - 1j * c * aip
        return W / W0, np.conj(W) / W0
    raise DomainError(f"no current split for {type(spec).__name__}")


def eigenfunction(x: float, sol: ScatteringSolution, spec: PotentialSpec, m: float):
    """``<x|E r(+)>`` for the momenta held by ``sol``."""
    p = np.asarray(sol.p, dtype=float)
    if isinstance(spec, SampledSmooth) and x > spec.q_max:
        raise DomainError(f"position beyond sampled potential table (q_max = {spec.q_max})")
    return np.sqrt(m / (2 * np.pi * p)) * reduced_eigenfunction(spec, x, p, m)


def split_currents(x: float, sol: ScatteringSolution, spec: PotentialSpec, m: float):
    """``(Phi_tr, Phi_ref)``: positive- and negative-current parts of the reduced eigenfunction."""
    return _split(spec, x, sol.p, m)
