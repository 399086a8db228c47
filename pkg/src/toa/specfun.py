"""Real-argument Airy function Ai and its derivative.

Three regimes are stitched together:

* ``|z| <= SERIES_LIMIT``: Maclaurin series about the origin.
* ``SERIES_LIMIT < |z| < ASYMPTOTIC_LIMIT``: local Taylor expansion of the
  Airy ODE ``y'' = z y`` about the nearest node of a precomputed table.
* ``|z| >= ASYMPTOTIC_LIMIT``: Poincare asymptotic expansions.

The table nodes on the negative axis are filled by stepping the ODE outward
from the Maclaurin values (the oscillatory regime is neutrally stable); the
nodes on the positive axis are filled by stepping inward from the
asymptotic values at ``ASYMPTOTIC_LIMIT``, the direction in which the
recessive solution grows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["AiryPair", "airy_pair", "airy", "AiryRangeError", "MAX_ARGUMENT", "ode_residual"]

MAX_ARGUMENT = 1.0e4
SERIES_LIMIT = 2.0
ASYMPTOTIC_LIMIT = 12.0

_NODE_SPACING = 0.125
_TAYLOR_TERMS = 28
_STEP_TERMS = 60

# Ai(0) = 1 / (3^(2/3) Gamma(2/3)), Ai'(0) = -1 / (3^(1/3) Gamma(1/3))
_AI0 = 1.0 / (3.0 ** (2.0 / 3.0) * math.gamma(2.0 / 3.0))
_AIP0 = -1.0 / (3.0 ** (1.0 / 3.0) * math.gamma(1.0 / 3.0))


class AiryRangeError(ValueError):
    """Argument outside the supported range ``|z| <= MAX_ARGUMENT``."""


@dataclass(frozen=True)
class AiryPair:
    ai: float
    ai_prime: float
    argument: float


def _asymptotic_coefficients(n: int) -> tuple[np.ndarray, np.ndarray]:
    u = [1.0]
    for k in range(1, n):
        u.append(u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216.0 * k))
    u = np.array(u)
    k = np.arange(n)
    v = np.where(k == 0, 1.0, -(6 * k + 1) / np.where(k == 0, 1, 6 * k - 1) * u)
    return u, v


_U, _V = _asymptotic_coefficients(16)


def _asymptotic_positive(z: np.ndarray, ref=0.0) -> tuple[np.ndarray, np.ndarray]:
    """Asymptotic pair multiplied by ``exp(ref)``; ``ref`` avoids underflow for large ``z``."""
    zeta = (2.0 / 3.0) * z * np.sqrt(z)
    inv = 1.0 / zeta
    sign = (-1.0) ** np.arange(len(_U))
    powers = inv[:, None] ** np.arange(len(_U))[None, :]
    su = powers @ (sign * _U)
    sv = powers @ (sign * _V)
    with np.errstate(under="ignore"):
        env = np.exp(ref - zeta) / (2.0 * math.sqrt(math.pi))
    q = z ** 0.25
    return env / q * su, -env * q * sv


def _asymptotic_negative(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    x = -z
    zeta = (2.0 / 3.0) * x * np.sqrt(x)
    inv = 1.0 / zeta
    n = len(_U)
    powers = inv[:, None] ** np.arange(n)[None, :]
    k = np.arange(n)
    # alternating signs over even and odd subsequences separately
    sgn = np.where((k // 2) % 2 == 0, 1.0, -1.0)
    even = (k % 2 == 0)
    u_even = powers @ np.where(even, sgn * _U, 0.0)
    u_odd = powers @ np.where(~even, sgn * _U, 0.0)
    v_even = powers @ np.where(even, sgn * _V, 0.0)
    v_odd = powers @ np.where(~even, sgn * _V, 0.0)
    theta = zeta - math.pi / 4.0
    c, s = np.cos(theta), np.sin(theta)
    q = x ** 0.25
    norm = 1.0 / math.sqrt(math.pi)
    ai = norm / q * (c * u_even + s * u_odd)
    aip = norm * q * (s * v_even - c * v_odd)
    return ai, aip


def _maclaurin(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # y = Ai(0) f(z) + Ai'(0) g(z), f = sum z^(3k)/..., g = sum z^(3k+1)/...
    f = np.ones_like(z)
    g = z.copy()
    fp = np.zeros_like(z)
    gp = np.ones_like(z)
    tf = np.ones_like(z)
    tg = z.copy()
    z3 = z ** 3
    for k in range(1, 40):
        tf = tf * z3 / ((3 * k - 1) * (3 * k))
        tg = tg * z3 / ((3 * k) * (3 * k + 1))
        f = f + tf
        g = g + tg
        fp = fp + tf * (3 * k) / np.where(z == 0.0, 1.0, z)
        gp = gp + tg * (3 * k + 1) / np.where(z == 0.0, 1.0, z)
    fp = np.where(z == 0.0, 0.0, fp)
    gp = np.where(z == 0.0, 1.0, gp)
    return _AI0 * f + _AIP0 * g, _AI0 * fp + _AIP0 * gp


def _taylor_coefficients(z0: float, y0: float, yp0: float, n: int) -> np.ndarray:
    # y'' = (z0 + h) y  =>  (k+2)(k+1) a_{k+2} = z0 a_k + a_{k-1}
    a = np.zeros(n)
    a[0], a[1] = y0, yp0
    a[2] = z0 * y0 / 2.0
    for k in range(1, n - 2):
        a[k + 2] = (z0 * a[k] + a[k - 1]) / ((k + 2) * (k + 1))
    return a


def _step(z0: float, y0: float, yp0: float, h: float) -> tuple[float, float]:
    a = _taylor_coefficients(z0, y0, yp0, _STEP_TERMS)
    k = np.arange(_STEP_TERMS)
    hp = h ** k
    y = float(np.dot(a, hp))
    yp = float(np.dot(a[1:] * k[1:], hp[:-1]))
    return y, yp


def _build_table() -> tuple[np.ndarray, np.ndarray]:
    nodes = np.arange(-ASYMPTOTIC_LIMIT, ASYMPTOTIC_LIMIT + 0.5 * _NODE_SPACING, _NODE_SPACING)
    values = np.zeros((len(nodes), 2))
    i0 = int(round(ASYMPTOTIC_LIMIT / _NODE_SPACING))
    values[i0] = (_AI0, _AIP0)
    # negative side: outward from the origin
    y, yp = _AI0, _AIP0
    for i in range(i0, 0, -1):
        y, yp = _step(nodes[i], y, yp, -_NODE_SPACING)
        values[i - 1] = (y, yp)
    # positive side: inward from the asymptotic region
    ai, aip = _asymptotic_positive(np.array([nodes[-1]]))
    y, yp = float(ai[0]), float(aip[0])
    values[-1] = (y, yp)
    for i in range(len(nodes) - 1, i0 + 1, -1):
        y, yp = _step(nodes[i], y, yp, -_NODE_SPACING)
        values[i - 1] = (y, yp)
    coeffs = np.array([
        _taylor_coefficients(z0, y0, yp0, _TAYLOR_TERMS) for z0, (y0, yp0) in zip(nodes, values)
    ])
    return nodes, coeffs


_NODES, _COEFFS = _build_table()


def _tabulated(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    idx = np.clip(np.rint((z - _NODES[0]) / _NODE_SPACING).astype(int), 0, len(_NODES) - 1)
    h = z - _NODES[idx]
    c = _COEFFS[idx]
    y = np.zeros_like(z)
    yp = np.zeros_like(z)
    for k in range(_TAYLOR_TERMS - 1, 0, -1):
        y = y * h + c[:, k]
        yp = yp * h + k * c[:, k]
    y = y * h + c[:, 0]
    return y, yp


def airy(z) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized ``(Ai(z), Ai'(z))`` for real ``z`` with ``|z| <= 1e4``.

    Values beyond ``z ~ 105`` underflow to zero.
    """
    z = np.asarray(z, dtype=float)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    if np.any(~np.isfinite(z)) or np.any(np.abs(z) > MAX_ARGUMENT):
        raise AiryRangeError(f"Airy argument outside |z| <= {MAX_ARGUMENT:g}")
    ai = np.empty_like(z)
    aip = np.empty_like(z)
    small = np.abs(z) <= SERIES_LIMIT
    big_pos = z >= ASYMPTOTIC_LIMIT
    big_neg = z <= -ASYMPTOTIC_LIMIT
    mid = ~(small | big_pos | big_neg)
    if small.any():
        ai[small], aip[small] = _maclaurin(z[small])
    if mid.any():
        ai[mid], aip[mid] = _tabulated(z[mid])
    if big_pos.any():
        ai[big_pos], aip[big_pos] = _asymptotic_positive(z[big_pos])
    if big_neg.any():
        ai[big_neg], aip[big_neg] = _asymptotic_negative(z[big_neg])
    if scalar:
        return ai[0], aip[0]
    return ai, aip


def airy_pair(z: float) -> AiryPair:
    ai, aip = airy(float(z))
    return AiryPair(float(ai), float(aip), float(z))


def ode_residual(z, h: float = 1e-3) -> np.ndarray:
    """``|Ai'' - z Ai|`` with ``Ai''`` from a fourth-order difference of ``Ai'``.

    Scaled by ``(1 + |z|)`` times the local size of ``Ai`` (its oscillation
    envelope for ``z < 0``), so the value is a relative residual.
    """
    z = np.asarray(z, dtype=float)
    far = z >= ASYMPTOTIC_LIMIT + 2 * h
    # far on the positive axis Ai underflows; compare everything relative to exp(-zeta(z))
    ref = np.where(far, (2.0 / 3.0) * np.abs(z) ** 1.5, 0.0)

    def pair(zz):
        ai, aip = airy(np.where(far, 0.0, zz))
        if far.any():
            ai_f, aip_f = _asymptotic_positive(zz[far], ref[far])
            ai, aip = np.array(ai, ndmin=1), np.array(aip, ndmin=1)
            ai[far], aip[far] = ai_f, aip_f
        return ai, aip

    z = np.atleast_1d(z)
    far, ref = np.atleast_1d(far), np.atleast_1d(ref)
    d = [pair(z + k * h)[1] for k in (-2, -1, 1, 2)]
    second = (d[0] - 8 * d[1] + 8 * d[2] - d[3]) / (12 * h)
    ai = pair(z)[0]
    envelope = np.where(z < 0, (1 + np.abs(z)) ** -0.25 / np.sqrt(np.pi), np.abs(ai))
    return np.abs(second - z * ai) / ((1 + np.abs(z)) * np.maximum(envelope, np.abs(ai)))
