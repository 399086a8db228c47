"""Arrival-time amplitudes, densities, probabilities and mean arrival times.

The arrival amplitude at ``x`` is the energy-eigenstate expansion

    A(t) = (2 pi)^-1/2 int dp sqrt(p/m) exp(-i p^2 t / 2m) psi(p) u(x, p)

with ``u`` the reduced (flux-normalisation stripped) eigenfunction.  The
momentum integral runs over an adaptive window holding every point where
``|psi u|^2`` exceeds ``e^-60`` of its maximum, discretised by composite
Gauss-Legendre panels that are doubled until two successive evaluations
agree to the requested tolerance.

Two facts keep the time axis cheap and exact:

* ``A(t)`` is the Fourier transform of a function supported on a finite
  energy interval ``dE``, so ``|A|^2`` is band limited and the trapezoid
  rule on any uniform grid with spacing below ``2 pi / dE`` integrates it
  (and ``t |A|^2``) exactly, up to the tails outside the grid.
* Parseval gives ``P(x) = int dp |psi u|^2`` and the first moment
  ``int dp (m/p) |psi|^2 (-q0 |u|^2 + Im(u* du/dp))`` without any time grid.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .kinematics import GaussianPacket, momentum_amplitude
from .quadrature import AccuracyError, gauss_legendre_nodes, gauss_legendre_panels, weight_window
from .scattering import (DomainError, Free, LinearRamp, PotentialSpec, SampledSmooth, SquareBarrier,
                         _ramp_phase_derivative, _split, reduced_eigenfunction,
                         reduced_left_eigenfunction, singular_momenta, supports_split)

__all__ = [
    "TimeGrid", "ArrivalDistribution", "Components", "PacketQualityError", "GridError",
    "PhaseDerivativeError", "arrival_amplitude", "arrival_distribution", "arrival_probability",
    "mean_toa_moment", "mean_toa_phase", "decompose_reflection", "incident_reflected_times",
    "split_mean_toa_total_reflection", "wigner_phase_time", "hartman_time", "parallel_map",
]

UNDEFINED_PROBABILITY = 1e-12
LOG_WEIGHT_RANGE = 60.0
SCAN_SIGMAS = 40.0
SCAN_POINTS = 4097
MAX_PANELS = 1 << 15
MIN_PANELS = 4
PHASE_PER_PANEL = math.pi / 2
TAIL_TOL = 1e-6
# auto grids are grown until the uncaptured mass is far below the normalisation tolerance
AUTO_TAIL = 1e-9
EDGE_RATIO = 1e-12
MAX_EXPANSIONS = 12
MAX_TIME_POINTS = 400_000
SAMPLES_PER_PERIOD = 4
FOURIER_CHUNK = 1 << 21


class PacketQualityError(ValueError):
    """Packet too wide or too close to the origin for the right-mover treatment."""


class GridError(RuntimeError):
    """Time grid misses more probability mass than allowed."""


class PhaseDerivativeError(RuntimeError):
    """Phase derivative undefined (vanishing amplitude)."""


def _thread_count() -> int:
    raw = os.environ.get("TOA_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def parallel_map(fn, items) -> list:
    """Ordered map over ``items``; at most ``TOA_THREADS`` workers."""
    items = list(items)
    workers = min(_thread_count(), len(items))
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class TimeGrid:
    t_min: float
    t_max: float
    n_points: int

    def __post_init__(self):
        if not (math.isfinite(self.t_min) and math.isfinite(self.t_max) and self.t_min < self.t_max):
            raise ValueError("TimeGrid needs finite t_min < t_max")
        if int(self.n_points) != self.n_points or self.n_points < 16:
            raise ValueError("TimeGrid needs n_points >= 16")

    @property
    def times(self) -> np.ndarray:
        return np.linspace(self.t_min, self.t_max, int(self.n_points))

    @property
    def spacing(self) -> float:
        return (self.t_max - self.t_min) / (self.n_points - 1)


@dataclass
class Components:
    """Unnormalised transmitted, reflected and interference densities."""

    transmitted: np.ndarray
    reflected: np.ndarray
    interference: np.ndarray


@dataclass
class ArrivalDistribution:
    x: float
    grid: TimeGrid
    density: np.ndarray
    total_probability: float
    mean: float
    components: Components | None = None
    defined: bool = True
    captured: float = 1.0
    panels: int = 0

    @property
    def times(self) -> np.ndarray:
        return self.grid.times

    @property
    def unnormalized(self) -> np.ndarray:
        return self.density * self.total_probability

    @property
    def tail_mass(self) -> float:
        return abs(1.0 - self.captured)


# ---- channels -------------------------------------------------------------------


@dataclass(frozen=True)
class _Channel:
    """One degenerate eigenstate family (right- or left-incident) seen at ``x``."""

    x: float
    packet: GaussianPacket
    spec: PotentialSpec
    model: str = "exact"
    sign: int = 1

    @property
    def m(self) -> float:
        return self.packet.mass

    def psi(self, p):
        return momentum_amplitude(self.packet, self.sign * np.asarray(p, dtype=float))

    def u(self, p, derivative: bool = False):
        p = np.asarray(p, dtype=float)
        if self.model == "wkb":
            from .wkb import wkb_reduced
            return wkb_reduced(self.spec, self.x, p, self.m, derivative=derivative)
        if self.sign > 0:
            return reduced_eigenfunction(self.spec, self.x, p, self.m, derivative=derivative)
        return reduced_left_eigenfunction(self.spec, self.x, p, self.m, derivative=derivative)

    def split(self, p):
        if self.quasi_classical:
            # reflection is neglected in the quasi-classical states
            u = self.u(p)
            return u, np.zeros_like(u)
        return _split(self.spec, self.x, p, self.m)

    def packet_slope(self) -> float:
        """``d arg psi(s p) / dp``."""
        return -self.sign * self.packet.q0

    def singular(self) -> tuple[float, ...]:
        if self.model == "wkb":
            return ()
        return singular_momenta(self.spec, self.m)

    @property
    def quasi_classical(self) -> bool:
        return self.model == "wkb" or isinstance(self.spec, SampledSmooth)

    def lowest_momentum(self) -> float:
        lo = self.packet.p_floor
        if self.quasi_classical:
            from .wkb import EPS_TURN, max_potential
            vmax = max_potential(self.spec, max(self.x, 0.0))
            if vmax > 0:
                lo = max(lo, math.sqrt(2 * self.m * vmax / (1 - EPS_TURN)) * (1 + 1e-9))
        return lo


def _channels(packet: GaussianPacket, spec: PotentialSpec, x: float, model: str,
              override_quality: bool) -> list[_Channel]:
    if model not in ("exact", "wkb"):
        raise ValueError(f"unknown model {model!r}")
    chans = [_Channel(x, packet, spec, model, 1)]
    if packet.quality:
        return chans
    if not override_quality:
        raise PacketQualityError(
            f"packet (q0={packet.q0}, p0={packet.p0}, delta={packet.delta}) fails the quality test "
            "p0*delta >= 5 and |q0| >= 3*delta; pass override_quality=True to proceed")
    if model == "exact" and isinstance(spec, (Free, SquareBarrier)):
        chans.append(_Channel(x, packet, spec, model, -1))
    return chans


# ---- momentum rule ----------------------------------------------------------------


@dataclass
class _Window:
    channel: _Channel
    lo: float
    hi: float
    scan_p: np.ndarray = field(repr=False)
    scan_slope: np.ndarray = field(repr=False)
    scan_weight: np.ndarray = field(repr=False)
    singular: tuple = ()
    cdf: np.ndarray | None = field(default=None, repr=False)
    base_panels: int = MIN_PANELS

    def focus(self, t_lo: float = 0.0, t_hi: float = 0.0) -> "_Window":
        """Copy whose panels equidistribute the integrand phase for times in ``[t_lo, t_hi]``."""
        p = self.scan_p
        m = self.channel.m
        # |slope - p t / m| is convex in t, so the end points bound it
        rate = np.maximum(np.abs(self.scan_slope - p * t_lo / m), np.abs(self.scan_slope - p * t_hi / m))
        rate = np.max(np.where(self.scan_weight > 0, rate, 0.0), axis=0)
        width = self.hi - self.lo
        rho = rate / PHASE_PER_PANEL + MIN_PANELS / width
        cum = np.concatenate([[0.0], np.cumsum(0.5 * (rho[1:] + rho[:-1]) * np.diff(p))])
        n0 = max(MIN_PANELS, int(math.ceil(cum[-1])))
        return replace(self, cdf=cum / cum[-1], base_panels=n0)

    def stationary_times(self) -> np.ndarray:
        """Stationary-phase arrival times of every component carrying weight."""
        t = self.channel.m * self.scan_slope / self.scan_p
        return t[self.scan_weight > 0]

    def nodes_at(self, level: int):
        return self.nodes(self.base_panels << level)

    def nodes(self, n_panels: int):
        """Composite Gauss-Legendre nodes, graded towards square-root branch points."""
        if self.cdf is not None and not self.singular:
            edges = np.interp(np.linspace(0.0, 1.0, n_panels + 1), self.cdf, self.scan_p)
            edges[0], edges[-1] = self.lo, self.hi
            return gauss_legendre_panels(edges)
        cuts = sorted({self.lo, self.hi, *[s for s in self.singular if self.lo < s < self.hi]})
        sing = set(self.singular)
        width = self.hi - self.lo
        ps, ws = [], []
        for a, b in zip(cuts[:-1], cuts[1:]):
            k = max(2, int(math.ceil(n_panels * (b - a) / width)))
            left, right = a in sing, b in sing
            if left and right:
                mid = 0.5 * (a + b)
                pieces = [_graded(a, mid, k, True), _graded(mid, b, k, False)]
            elif left or right:
                pieces = [_graded(a, b, k, left)]
            else:
                pieces = [gauss_legendre_nodes(a, b, k)]
            for p, w in pieces:
                ps.append(p)
                ws.append(w)
        return np.concatenate(ps), np.concatenate(ws)


def _graded(a: float, b: float, k: int, at_left: bool):
    # p = a + (b - a) s^2 makes sqrt(p - a) analytic in s
    s, w = gauss_legendre_nodes(0.0, 1.0, k)
    L = b - a
    if at_left:
        return a + L * s * s, 2 * L * s * w
    return b - L * s * s, 2 * L * s * w


def _components(ch: _Channel, p: np.ndarray):
    """Pieces of the reduced eigenfunction with their phase slopes ``d arg / dp``."""
    if ch.sign > 0 and ch.model == "exact" and supports_split(ch.spec, ch.x) \
            and not isinstance(ch.spec, SampledSmooth):
        pieces = ch.split(p)
        out = []
        for c in pieces:
            slope = np.gradient(np.unwrap(np.angle(c)), p)
            out.append((c, slope))
        return out
    u, du = ch.u(p, derivative=True)
    u2 = np.abs(u) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        slope = np.where(u2 > 0, np.imag(np.conj(u) * du) / u2, 0.0)
    return [(u, slope)]


def _windows(chans: list[_Channel]) -> list[_Window]:
    packet = chans[0].packet
    top = packet.p0 + SCAN_SIGMAS * packet.sigma_p
    found = []
    for ch in chans:
        lo = ch.lowest_momentum()
        if lo >= top:
            continue
        p = np.linspace(lo, top, SCAN_POINTS)
        psi2 = np.abs(ch.psi(p)) ** 2
        w = psi2 * np.abs(ch.u(p)) ** 2
        found.append((ch, p, psi2, w))
    if not found:
        return []
    cut = math.exp(-LOG_WEIGHT_RANGE)
    overall = max(float(np.max(item[3])) for item in found)
    out = []
    for ch, p, psi2, w in found:
        if not np.max(w) > overall * cut:
            continue
        span = weight_window(p, w, LOG_WEIGHT_RANGE)
        if span is None:
            continue
        lo, hi = span
        if ch.quasi_classical and w[0] >= np.max(w) * cut:
            from .wkb import TurningPointError
            raise TurningPointError("packet momentum window reaches a turning point")
        inside = (p >= lo) & (p <= hi)
        pieces = _components(ch, p)
        slopes = np.array([sl + ch.packet_slope() for _, sl in pieces])[:, inside]
        weights = np.array([psi2 * np.abs(c) ** 2 for c, _ in pieces])[:, inside]
        weights = np.where(weights >= cut * weights.max(), weights, 0.0)
        sing = tuple(s for s in ch.singular() if lo <= s <= hi)
        out.append(_Window(ch, lo, hi, p[inside], slopes, weights, sing))
    return out


def _converge(windows: list[_Window], evaluate, tol: float):
    """Double every window's panel count until ``evaluate`` changes by at most ``tol`` (relative)."""
    prev = evaluate(windows, 0)
    level = 1
    while True:
        cur = evaluate(windows, level)
        scale = max(np.max(np.abs(cur)), 1e-300)
        err = float(np.max(np.abs(cur - prev))) / scale
        if err <= tol:
            return cur, level
        if max(w.base_panels for w in windows) << level >= MAX_PANELS:
            raise AccuracyError(f"momentum quadrature did not converge (relative change {err:.3g})",
                                estimate=err)
        prev = cur
        level += 1


def _focused(windows: list[_Window]) -> list[_Window]:
    return [w.focus() for w in windows]


def _probability_eval(windows, n):
    total = 0.0
    for win in windows:
        p, w = win.nodes_at(n)
        total += float(np.sum(w * np.abs(win.channel.psi(p) * win.channel.u(p)) ** 2))
    return np.array([total])


def _moment_eval(windows, n):
    """``[P, int t |A|^2 dt]`` by Parseval."""
    P = 0.0
    first = 0.0
    for win in windows:
        ch = win.channel
        p, w = win.nodes_at(n)
        u, du = ch.u(p, derivative=True)
        psi2 = np.abs(ch.psi(p)) ** 2
        u2 = np.abs(u) ** 2
        P += float(np.sum(w * psi2 * u2))
        first += float(np.sum(w * (ch.m / p) * psi2 * (ch.packet_slope() * u2 + np.imag(np.conj(u) * du))))
    return np.array([P, first])


# ---- time transforms ---------------------------------------------------------------


def _fourier(times: np.ndarray, energy: np.ndarray, coef: np.ndarray) -> np.ndarray:
    """``sum_j coef_j exp(-i E_j t_k)`` for every ``t_k``."""
    times = np.asarray(times, dtype=float)
    n = len(times)
    if n == 0:
        return np.zeros(0, dtype=complex)
    steps = np.diff(times)
    uniform = n > 2 and np.allclose(steps, steps[0], rtol=1e-9, atol=0.0)
    if not uniform:
        out = np.empty(n, dtype=complex)
        rows = max(1, FOURIER_CHUNK // max(1, len(energy)))
        for i in range(0, n, rows):
            out[i:i + rows] = np.exp(-1j * np.outer(times[i:i + rows], energy)) @ coef
        return out
    dt = (times[-1] - times[0]) / (n - 1)
    # t = start_b + j dt factorises the kernel into two small exponential tables
    block = max(1, int(math.sqrt(n)))
    n_blocks = -(-n // block)
    starts = times[0] + np.arange(n_blocks) * block * dt
    out = np.zeros((n_blocks, block), dtype=complex)
    chunk = max(1, FOURIER_CHUNK // max(block, n_blocks))
    for j in range(0, len(energy), chunk):
        e = energy[j:j + chunk]
        inner = np.exp(-1j * np.outer(np.arange(block) * dt, e))
        outer = coef[j:j + chunk][None, :] * np.exp(-1j * np.outer(starts, e))
        out += outer @ inner.T
    return out.ravel()[:n]


def _amplitude_terms(win: _Window, n: int, parts: bool = False):
    ch = win.channel
    p, w = win.nodes_at(n)
    base = w * np.sqrt(p / ch.m) * ch.psi(p) / math.sqrt(2 * math.pi)
    energy = p * p / (2 * ch.m)
    if not parts:
        return energy, base * ch.u(p)
    tr, ref = ch.split(p)
    return energy, base * tr, base * ref


def _amplitudes_eval(times):
    def evaluate(windows, n):
        return np.concatenate([_fourier(times, *_amplitude_terms(win, n)) for win in windows])
    return evaluate


# ---- public operations -----------------------------------------------------------


def _prepare(x, packet, spec, model, override_quality):
    chans = _channels(packet, spec, float(x), model, override_quality)
    return _windows(chans)


def arrival_amplitude(t, x: float, packet: GaussianPacket, spec: PotentialSpec, *,
                      channel: str = "right", model: str = "exact", tol: float = 1e-8,
                      override_quality: bool = False):
    """Arrival amplitude of one channel at the times ``t``."""
    sign = {"right": 1, "left": -1}[channel]
    windows = [w for w in _prepare(x, packet, spec, model, override_quality) if w.channel.sign == sign]
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if not windows:
        return np.zeros(t.shape, dtype=complex)
    windows = [w.focus(float(t.min()), float(t.max())) for w in windows]
    amp, _ = _converge(windows, _amplitudes_eval(t), tol)
    return amp


def arrival_probability(x: float, packet: GaussianPacket, spec: PotentialSpec, *,
                        model: str = "exact", tol: float = 1e-8, override_quality: bool = False) -> float:
    """Probability of ever arriving at ``x``."""
    windows = _prepare(x, packet, spec, model, override_quality)
    if not windows:
        return 0.0
    val, _ = _converge(_focused(windows), _probability_eval, tol * 1e-2)
    return float(val[0])


def mean_toa_phase(x: float, packet: GaussianPacket, spec: PotentialSpec, *,
                   model: str = "exact", tol: float = 1e-8, override_quality: bool = False) -> float:
    """Mean arrival time from the momentum derivative of the amplitude phase."""
    windows = _prepare(x, packet, spec, model, override_quality)
    if not windows:
        return math.nan
    (P, first), _ = _converge(_focused(windows), _moment_eval, tol * 1e-2)
    # a ratio of two quadratures: meaningful at any positive scale of P
    if not P > 0:
        return math.nan
    return float(first / P)


def _initial_span(windows: list[_Window]) -> tuple[float, float]:
    times = np.concatenate([w.stationary_times() for w in windows])
    packet = windows[0].channel.packet
    pad = 10.0 * packet.mass * packet.delta / packet.p0
    return float(times.min()) - pad, float(times.max()) + pad


def _spacing(windows: list[_Window]) -> float:
    e_lo = min(w.lo ** 2 / (2 * w.channel.m) for w in windows)
    e_hi = max(w.hi ** 2 / (2 * w.channel.m) for w in windows)
    return 2 * math.pi / (e_hi - e_lo) / SAMPLES_PER_PERIOD


def _grid_for(t_lo: float, t_hi: float, dt: float) -> TimeGrid:
    n = int(math.ceil((t_hi - t_lo) / dt)) + 1
    if n > MAX_TIME_POINTS:
        raise GridError(f"time grid [{t_lo:.4g}, {t_hi:.4g}] needs {n} points")
    return TimeGrid(t_lo, t_hi, max(n, 16))


def _evaluate_on(windows, grid: TimeGrid, tol: float, with_parts: bool):
    times = grid.times
    windows = [w.focus(grid.t_min, grid.t_max) for w in windows]
    amps, n = _converge(windows, _amplitudes_eval(times), tol)
    k = len(times)
    dens = np.zeros(k)
    for i in range(len(windows)):
        dens += np.abs(amps[i * k:(i + 1) * k]) ** 2
    parts = None
    if with_parts:
        energy, ftr, fref = _amplitude_terms(windows[0], n, parts=True)
        a_tr = _fourier(times, energy, ftr)
        a_ref = _fourier(times, energy, fref)
        parts = Components(np.abs(a_tr) ** 2, np.abs(a_ref) ** 2,
                           2.0 * np.real(np.conj(a_tr) * a_ref))
    return dens, parts, max(w.base_panels for w in windows) << n


def arrival_distribution(x: float, packet: GaussianPacket, spec: PotentialSpec,
                         grid: TimeGrid | None = None, *, model: str = "exact", tol: float = 1e-8,
                         override_quality: bool = False) -> ArrivalDistribution:
    """Normalised arrival-time density at ``x``; the grid is chosen automatically when omitted."""
    windows = _prepare(x, packet, spec, model, override_quality)
    with_parts = (len(windows) == 1 and windows[0].channel.sign > 0
                  and (model == "wkb" or isinstance(spec, SampledSmooth) or supports_split(spec, x)))
    if windows:
        (P, first), _ = _converge(_focused(windows), _moment_eval, tol * 1e-2)
    else:
        P, first = 0.0, 0.0
    if P <= UNDEFINED_PROBABILITY:
        g = grid or TimeGrid(0.0, 1.0, 16)
        return ArrivalDistribution(float(x), g, np.zeros(g.n_points), float(P), math.nan,
                                   None, defined=False, captured=0.0)
    if grid is not None:
        dens, parts, n = _evaluate_on(windows, grid, tol, with_parts)
        return _finish(x, grid, dens, parts, P, n)
    dt = _spacing(windows)
    t_lo, t_hi = _initial_span(windows)
    for _ in range(MAX_EXPANSIONS + 1):
        g = _grid_for(t_lo, t_hi, dt)
        dens, parts, n = _evaluate_on(windows, g, tol, with_parts)
        peak = float(np.max(dens))
        captured = float(np.trapezoid(dens, g.times)) / P
        grow_lo = dens[0] > EDGE_RATIO * peak
        grow_hi = dens[-1] > EDGE_RATIO * peak
        if not (grow_lo or grow_hi) and abs(1 - captured) < AUTO_TAIL:
            break
        if not (grow_lo or grow_hi):
            grow_lo = grow_hi = True
        span = t_hi - t_lo
        t_lo -= 0.5 * span if grow_lo else 0.0
        t_hi += 0.5 * span if grow_hi else 0.0
    return _finish(x, g, dens, parts, P, n)


def _finish(x, grid, dens, parts, P, n) -> ArrivalDistribution:
    t = grid.times
    density = dens / P
    captured = float(np.trapezoid(density, t))
    mean = float(np.trapezoid(t * density, t) / captured) if captured > 0 else math.nan
    return ArrivalDistribution(float(x), grid, density, float(P), mean, parts, True, captured, n)


def mean_toa_moment(dist: ArrivalDistribution, tail_tol: float = TAIL_TOL) -> float:
    """First moment of a defined distribution; refuses grids that lose too much mass."""
    if not dist.defined:
        raise GridError("arrival distribution is undefined (no arrivals)")
    if dist.tail_mass > tail_tol:
        raise GridError(f"time grid misses {dist.tail_mass:.3g} of the probability mass")
    t = dist.times
    return float(np.trapezoid(t * dist.density, t))


def decompose_reflection(x: float, packet: GaussianPacket, spec: PotentialSpec, *,
                         tol: float = 1e-8, override_quality: bool = False):
    """``(P_tr, P_ref, I)`` with ``P(x) = P_tr + P_ref + I``."""
    if not supports_split(spec, x):
        raise DomainError(f"no current split for {type(spec).__name__} at x = {x}")
    windows = _prepare(x, packet, spec, "exact", override_quality)
    if len(windows) != 1 or windows[0].channel.sign < 0:
        raise DomainError("reflection decomposition needs a single right-mover channel")

    def evaluate(wins, n):
        ch = wins[0].channel
        p, w = wins[0].nodes_at(n)
        psi2 = np.abs(ch.psi(p)) ** 2
        tr, ref = ch.split(p)
        return np.array([np.sum(w * psi2 * np.abs(tr) ** 2), np.sum(w * psi2 * np.abs(ref) ** 2),
                         2.0 * np.sum(w * psi2 * np.real(np.conj(tr) * ref))])

    val, _ = _converge(_focused(windows), evaluate, tol * 1e-2)
    return float(val[0]), float(val[1]), float(val[2])


def incident_reflected_times(x: float, E, packet: GaussianPacket, spec: LinearRamp):
    """Arrival times of the incoming and returning waves at energy ``E``."""
    if not isinstance(spec, LinearRamp):
        raise DomainError("incident/reflected split needs a totally reflecting potential")
    m = packet.mass
    E = np.asarray(E, dtype=float)
    p = np.sqrt(2 * m * E)
    dphi, ddelta = _ramp_phase_derivative(float(x), p, spec.f, m)
    # arg <E|psi> = -delta(E) - p q0
    t_i = (m / p) * (dphi - ddelta - packet.q0)
    t_r = (m / p) * (-dphi - ddelta - packet.q0)
    return t_i, t_r


def split_mean_toa_total_reflection(x: float, packet: GaussianPacket, spec: LinearRamp,
                                    grid: TimeGrid | None = None, *, tol: float = 1e-8,
                                    override_quality: bool = False):
    """``(mean t_i, mean t_r, distribution)`` weighted by ``|psi|^2 |u(x)|^2``."""
    if not isinstance(spec, LinearRamp):
        raise DomainError("incident/reflected split needs a totally reflecting potential")
    windows = _prepare(x, packet, spec, "exact", override_quality)

    def evaluate(wins, n):
        ch = wins[0].channel
        p, w = wins[0].nodes_at(n)
        weight = w * np.abs(ch.psi(p) * ch.u(p)) ** 2
        t_i, t_r = incident_reflected_times(x, p * p / (2 * packet.mass), packet, spec)
        return np.array([np.sum(weight), np.sum(weight * t_i), np.sum(weight * t_r)])

    (P, si, sr), _ = _converge(_focused(windows), evaluate, tol * 1e-2)
    dist = arrival_distribution(x, packet, spec, grid, tol=tol, override_quality=override_quality)
    return float(si / P), float(sr / P), dist


def wigner_phase_time(p, x: float, q0: float, spec: PotentialSpec, m: float = 1.0):
    """``(m/p)(x - q0 + d arg T / dp)`` written through the eigenfunction at ``x``."""
    p = np.asarray(p, dtype=float)
    u, du = reduced_eigenfunction(spec, float(x), p, m, derivative=True)
    u2 = np.abs(u) ** 2
    if np.any(u2 == 0):
        raise PhaseDerivativeError("eigenfunction vanishes; phase time undefined")
    return (m / p) * (-q0 + np.imag(np.conj(u) * du) / u2)


def hartman_time(t0: float, a: float, p0: float, m: float = 1.0) -> float:
    if not p0 > 0:
        raise ValueError("p0 must be > 0")
    return t0 - m * a / p0
