"""Gaussian initial wave packet in position and momentum representations.

Natural units with hbar = 1 throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["GaussianPacket", "momentum_amplitude", "position_amplitude"]

# thresholds for the "narrow, well separated packet" approximations
MIN_P0_DELTA = 5.0
MIN_SEPARATION = 3.0


@dataclass(frozen=True)
class GaussianPacket:
    """Minimum-uncertainty packet centred at ``q0`` with mean momentum ``p0``.

    The position width is ``2 * delta`` and the momentum-density standard
    deviation is ``sigma_p = 1 / (2 * delta)``.
    """

    q0: float
    p0: float
    delta: float
    mass: float = 1.0

    def __post_init__(self):
        if not (self.delta > 0 and self.mass > 0 and self.p0 > 0):
            raise ValueError("GaussianPacket needs delta > 0, mass > 0 and p0 > 0")
        for name in ("q0", "p0", "delta", "mass"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"GaussianPacket.{name} must be finite")

    @property
    def sigma_p(self) -> float:
        return 1.0 / (2.0 * self.delta)

    @property
    def energy(self) -> float:
        return self.p0 ** 2 / (2.0 * self.mass)

    @property
    def p_floor(self) -> float:
        return 1e-6 * self.p0

    @property
    def quality(self) -> bool:
        """True when the right-mover / far-from-origin approximations hold."""
        return self.p0 * self.delta >= MIN_P0_DELTA and abs(self.q0) >= MIN_SEPARATION * self.delta

    def momentum_window(self, n_sigma: float = 8.0) -> tuple[float, float]:
        lo = max(self.p_floor, self.p0 - n_sigma * self.sigma_p)
        return lo, self.p0 + n_sigma * self.sigma_p

    def momentum_amplitude(self, p):
        return momentum_amplitude(self, p)

    def position_amplitude(self, q):
        return position_amplitude(self, q)

    def free_arrival_time(self, x: float) -> float:
        """Classical free-flight time from ``q0`` to ``x`` at momentum ``p0``."""
        return self.mass * (x - self.q0) / self.p0


def momentum_amplitude(packet: GaussianPacket, p):
    p = np.asarray(p, dtype=float)
    d2 = packet.delta ** 2
    norm = (2.0 * d2 / math.pi) ** 0.25
    return norm * np.exp(-d2 * (p - packet.p0) ** 2 - 1j * p * packet.q0)


def position_amplitude(packet: GaussianPacket, q):
    q = np.asarray(q, dtype=float)
    d = packet.delta
    norm = (1.0 / (2.0 * math.pi * d * d)) ** 0.25
    # the two exponentials of the textbook form combined to avoid overflow
    u = (q - packet.q0) / (2.0 * d)
    return norm * np.exp(-u * u + 1j * packet.p0 * (q - packet.q0))
