"""Quadrature-basis coherence: l1 norm and relative entropy."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .numquad import IntegrationConfig, integrate_1d, integrate_2d, scaled_config
from .states import DensityKernel, FockIndex, WaveFunction, hermite_functions

__all__ = [
    "CoherenceValue",
    "FockMixture",
    "differential_entropy",
    "l1_coherence",
    "l1_coherence_pure",
    "plogp",
    "rel_entropy_coherence_fock_mixture",
    "rel_entropy_coherence_pure",
    "sign_changes",
]

# Below this, p * ln(p) is taken as its limit 0.
P_FLOOR = 1e-300
# Truncation, in units of the state's scale, for integrands in |psi| or |rho|.
ABS_WIDTHS = 12.0
# -p ln p outlives p by a factor x^2 in the tails.
ENTROPY_WIDTHS = 9.0


@dataclass(frozen=True)
class CoherenceValue:
    value: float
    error_estimate: float = 0.0

    def __post_init__(self):
        if self.value < 0:
            raise ValueError(f"coherence must be nonnegative, got {self.value}")

    def __float__(self):
        return self.value


@dataclass(frozen=True)
class FockMixture:
    """Photon-number-diagonal state ``sum_n w_n |n><n|``."""

    weights: tuple[tuple[FockIndex, float], ...]

    def __init__(self, weights: Sequence[tuple[FockIndex | int, float]]):
        items = tuple((n if isinstance(n, FockIndex) else FockIndex(n), float(w)) for n, w in weights)
        if not items:
            raise ValueError("a mixture needs at least one term")
        if any(w < 0 for _, w in items):
            raise ValueError("mixture weights must be nonnegative")
        if abs(math.fsum(w for _, w in items) - 1.0) > 1e-12:
            raise ValueError("mixture weights must sum to 1")
        if len({n for n, _ in items}) != len(items):
            raise ValueError("photon numbers in a mixture must be distinct")
        object.__setattr__(self, "weights", items)

    @property
    def max_n(self) -> int:
        return max(n.n for n, _ in self.weights)

    def density(self, x) -> np.ndarray:
        psi = hermite_functions(self.max_n, x)
        return sum(w * psi[n.n] ** 2 for n, w in self.weights)


def plogp(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    safe = np.where(p > P_FLOOR, p, 1.0)
    return np.where(p > P_FLOOR, p * np.log(safe), 0.0)


def sign_changes(f, half_width: float, samples: int = 4001) -> list[float]:
    """Locate sign changes of a vectorized ``f`` on ``[-half_width, half_width]``."""
    xs = np.linspace(-half_width, half_width, samples)
    ys = f(xs)
    scale = np.max(np.abs(ys))
    if scale == 0:
        return []
    # Ignore sign flips in the numerically-zero tails.
    ys = np.where(np.abs(ys) > 1e-14 * scale, ys, 0.0)
    nz = np.flatnonzero(ys)
    flips = np.flatnonzero(np.sign(ys[nz[1:]]) != np.sign(ys[nz[:-1]]))
    roots = []
    for i in flips:
        lo, hi = xs[nz[i]], xs[nz[i + 1]]
        roots.append(brentq(lambda t: float(f(np.array([t]))[0]), lo, hi, xtol=1e-14))
    return roots


def _kernel_breakpoints(k: DensityKernel, half_width: float) -> list[float]:
    if k.nodes:
        return list(k.nodes)
    xs = np.linspace(-half_width, half_width, 4001)
    x_ref = xs[int(np.argmax(np.abs(k.diagonal(xs))))]
    # For a rank-one kernel the row through x_ref vanishes exactly on the
    # nodal lines; for other kernels the extra edges are merely harmless.
    return sign_changes(lambda x: k.eval(x, np.full_like(x, x_ref)), half_width)


def l1_coherence(k: DensityKernel, config: IntegrationConfig | None = None) -> CoherenceValue:
    """Double integral of ``|rho(x, x')|`` over the quadrature plane."""
    cfg = scaled_config(config or IntegrationConfig(), k.scale_hint, ABS_WIDTHS)
    ev = k.eval
    res = integrate_2d(lambda x, xp: np.abs(ev(x, xp)), cfg, breakpoints=_kernel_breakpoints(k, cfg.half_width))
    return CoherenceValue(max(res.value, 0.0), res.error_estimate)


def _wavefunction_breakpoints(psi: WaveFunction, half_width: float) -> list[float]:
    if psi.nodes:
        return list(psi.nodes)
    return sign_changes(psi.eval, half_width)


def l1_coherence_pure(psi: WaveFunction, config: IntegrationConfig | None = None) -> CoherenceValue:
    """``(int |psi(x)| dx)^2`` for a normalized pure state."""
    cfg = scaled_config(config or IntegrationConfig(), psi.scale_hint, ABS_WIDTHS)
    f = psi.eval
    res = integrate_1d(lambda x: np.abs(f(x)), cfg, breakpoints=_wavefunction_breakpoints(psi, cfg.half_width))
    return CoherenceValue(res.value**2, 2.0 * abs(res.value) * res.error_estimate)


def differential_entropy(p, config: IntegrationConfig, breakpoints: Sequence[float] | None = None) -> float:
    """``-int p ln p dx`` for a vectorized density ``p``."""
    return -integrate_1d(lambda x: plogp(p(x)), config, breakpoints=breakpoints).value


def rel_entropy_coherence_pure(psi: WaveFunction, config: IntegrationConfig | None = None) -> float:
    """Relative entropy of coherence of a pure state.

    The state's own entropy vanishes, leaving the differential entropy of the
    quadrature distribution ``psi(x)^2``. Absolute values therefore depend on
    the continuum regularization; differences between states do not.
    """
    cfg = scaled_config(config or IntegrationConfig(), psi.scale_hint, ENTROPY_WIDTHS)
    f = psi.eval
    return differential_entropy(lambda x: f(x) ** 2, cfg, _wavefunction_breakpoints(psi, cfg.half_width))


def rel_entropy_coherence_fock_mixture(m: FockMixture, config: IntegrationConfig | None = None) -> float:
    """``sum w ln w`` plus the differential entropy of ``sum w psi_n(x)^2``."""
    cfg = scaled_config(config or IntegrationConfig(), math.sqrt(m.max_n + 1.0), ENTROPY_WIDTHS)
    spectrum = math.fsum(w * math.log(w) for _, w in m.weights if w > 0)
    return spectrum + differential_entropy(m.density, cfg)
