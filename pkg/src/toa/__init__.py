"""Quantum time-of-arrival distributions for one-dimensional scattering."""

from .kinematics import GaussianPacket
from .scattering import Free, LinearRamp, SampledSmooth, SquareBarrier, Step
from .engine import (ArrivalDistribution, TimeGrid, arrival_amplitude, arrival_distribution,
                     arrival_probability, decompose_reflection, hartman_time,
                     incident_reflected_times, mean_toa_moment, mean_toa_phase,
                     split_mean_toa_total_reflection, wigner_phase_time)

__all__ = [
    "GaussianPacket", "Free", "Step", "SquareBarrier", "LinearRamp", "SampledSmooth",
    "ArrivalDistribution", "TimeGrid", "arrival_amplitude", "arrival_distribution",
    "arrival_probability", "decompose_reflection", "hartman_time", "incident_reflected_times",
    "mean_toa_moment", "mean_toa_phase", "split_mean_toa_total_reflection", "wigner_phase_time",
]
