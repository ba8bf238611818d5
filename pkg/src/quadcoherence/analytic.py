"""Closed-form coherence laws for Gaussian Schell-model states.

These are the fast paths and the oracles the numerical engine is checked
against. Degenerate limits (pure states, transparent beam splitters) are
explicit branches; incoherent limits are left to the numerical path.
"""

from __future__ import annotations

import enum
import math

from .states import GaussianSchellParams

__all__ = [
    "QuadratureAxis",
    "gaussian_l1",
    "gaussian_purity",
    "min_uncertainty_partner",
    "output_l1",
    "output_l1_y",
    "thermal_l1",
]

SQRT_2PI = math.sqrt(2.0 * math.pi)


class QuadratureAxis(enum.Enum):
    """``X = (a^dagger + a)/2`` or ``Y = i(a^dagger - a)/2``."""

    X = "X"
    Y = "Y"


def gaussian_purity(params: GaussianSchellParams) -> float:
    if params.is_pure:
        return 1.0
    return params.mu / math.sqrt(2.0 * params.sigma**2 + params.mu**2)


def gaussian_l1(params: GaussianSchellParams) -> float:
    """l1 coherence ``2 sqrt(2 pi) * sigma * purity``."""
    # purity -> 1 as mu -> inf, so the pure case is 2 sqrt(2 pi) sigma.
    return 2.0 * SQRT_2PI * params.sigma * gaussian_purity(params)


def thermal_l1(n_bar: float) -> float:
    if not n_bar >= 0:
        raise ValueError(f"mean photon number must be nonnegative, got {n_bar}")
    return math.sqrt(2.0 * math.pi / (2.0 * n_bar + 1.0))


def output_l1(c: float, c0: float, bs) -> float:
    """Conditioned-output coherence from input ``c`` and ancilla ``c0``.

    ``1/C'^2 = t^2/C^2 + r^2/C0^2``; independent of the measurement outcome.
    """
    if not (c > 0 and c0 > 0):
        raise ValueError(f"input coherences must be positive, got c={c}, c0={c0}")
    return (bs.t**2 / c**2 + bs.r**2 / c0**2) ** -0.5


def output_l1_y(cy: float, cy0: float, bs) -> float:
    """Output Y-quadrature coherence after an X measurement (pure minimum-uncertainty inputs)."""
    if cy < 0 or cy0 < 0:
        raise ValueError(f"coherences must be nonnegative, got cy={cy}, cy0={cy0}")
    return math.sqrt(bs.t**2 * cy**2 + bs.r**2 * cy0**2)


def min_uncertainty_partner(cx: float) -> float:
    """Y coherence of a pure minimum-uncertainty Gaussian with X coherence ``cx``."""
    if not cx > 0:
        raise ValueError(f"coherence must be positive, got {cx}")
    return 2.0 * math.pi / cx
