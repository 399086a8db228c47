"""Composite Gauss-Legendre rules for smooth, oscillatory momentum integrals."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

__all__ = ["AccuracyError", "gauss_legendre_nodes", "gauss_legendre_panels", "weight_window", "panels_for_phase"]

ORDER = 16


class AccuracyError(RuntimeError):
    """Quadrature refinement did not reach the requested tolerance."""

    def __init__(self, message: str, estimate: float | None = None):
        super().__init__(message)
        self.estimate = estimate


@lru_cache(maxsize=8)
def _reference_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(order)


def gauss_legendre_nodes(a: float, b: float, n_panels: int, order: int = ORDER):
    """Nodes and weights of an ``n_panels``-panel composite rule on ``[a, b]``."""
    return gauss_legendre_panels(np.linspace(a, b, n_panels + 1), order)


def gauss_legendre_panels(edges, order: int = ORDER):
    """Composite rule over the panels delimited by the increasing array ``edges``."""
    x, w = _reference_rule(order)
    edges = np.asarray(edges, dtype=float)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def weight_window(p: np.ndarray, w: np.ndarray, log_range: float = 60.0):
    """Smallest interval of the sampled grid ``p`` holding every ``w >= max(w) e^-log_range``.

    Returns ``None`` when ``w`` vanishes identically.
    """
    wmax = np.max(w)
    if not wmax > 0:
        return None
    keep = np.nonzero(w >= wmax * np.exp(-log_range))[0]
    i0 = max(keep[0] - 1, 0)
    i1 = min(keep[-1] + 1, len(p) - 1)
    return float(p[i0]), float(p[i1])


def panels_for_phase(total_phase: float, width: float, feature: float, per_panel: float = np.pi / 2) -> int:
    """Panel count so that each panel sees at most ``per_panel`` radians and spans at most ``feature``."""
    n_phase = int(np.ceil(abs(total_phase) / per_panel))
    n_feat = int(np.ceil(width / feature)) if feature > 0 else 1
    return max(4, n_phase, n_feat)
