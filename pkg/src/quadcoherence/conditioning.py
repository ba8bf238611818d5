"""Beam splitter followed by a sharp X-quadrature measurement on one output.

The signal state ``rho`` and ancilla ``rho0`` meet at a lossless beam splitter
with real ``t`` and ``r = sqrt(1 - t^2)``. Projecting the ancilla output onto
the quadrature eigenvalue ``x0p`` leaves the signal output in

    rho'_u(x, x') = rho(t x + r x0p, t x' + r x0p) * rho0(t x0p - r x, t x0p - r x')

whose trace is the outcome density ``p(x0p)``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .coherence import (
    CoherenceValue,
    FockMixture,
    l1_coherence,
    rel_entropy_coherence_fock_mixture,
    rel_entropy_coherence_pure,
)
from .numquad import IntegrationConfig, integrate_1d, scaled_config
from .states import DensityKernel, WaveFunction, hermite_functions

__all__ = [
    "BeamSplitter",
    "ConditionalResult",
    "CoverageError",
    "DENSITY_FLOOR",
    "EntropyScan",
    "NegligibleOutcomeError",
    "SweepGrid",
    "average_coherence",
    "conditional_coherence",
    "conditional_state",
    "conditional_unnormalized",
    "default_sweep_grid",
    "outcome_density",
    "reduced_state",
    "single_photon_conditional_wavefunction",
    "single_photon_entropy_scan",
]

DENSITY_FLOOR = 1e-10
# Largest probability mass allowed to fall outside a sweep grid.
COVERAGE_TOL = 1e-6
_BLOCK = 8192


class NegligibleOutcomeError(ValueError):
    def __init__(self, x0p: float, density: float):
        self.x0p = x0p
        self.density = density
        super().__init__(f"outcome x0'={x0p:g} has density {density:.3g} below {DENSITY_FLOOR:g}; state undefined")


class CoverageError(ValueError):
    def __init__(self, mass: float):
        self.mass = mass
        super().__init__(f"sweep grid captures probability mass {mass:.9f}; missing {1 - mass:.3g} > {COVERAGE_TOL:g}")


@dataclass(frozen=True)
class BeamSplitter:
    t: float
    r: float = field(init=False)

    def __post_init__(self):
        if not 0.0 <= self.t <= 1.0:
            raise ValueError(f"transmission must lie in [0, 1], got {self.t}")
        object.__setattr__(self, "r", math.sqrt(max(0.0, 1.0 - self.t * self.t)))


@dataclass(frozen=True)
class ConditionalResult:
    x0_prime: float
    density: float
    kernel: DensityKernel
    unnormalized: DensityKernel


@dataclass(frozen=True)
class SweepGrid:
    """Abscissae and weights discretizing an integral over outcomes."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        wts = np.asarray(self.weights, dtype=float)
        if pts.ndim != 1 or pts.shape != wts.shape or pts.size == 0:
            raise ValueError("points and weights must be matching non-empty 1-d arrays")
        if np.any(np.diff(pts) <= 0):
            raise ValueError("sweep points must be strictly increasing")
        if np.any(wts <= 0):
            raise ValueError("sweep weights must be positive")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", wts)

    @classmethod
    def gauss_legendre(cls, half_width: float, nodes: int = 129) -> "SweepGrid":
        u, w = np.polynomial.legendre.leggauss(nodes)
        return cls(half_width * u, half_width * w)

    def __len__(self):
        return self.points.size


def default_sweep_grid(rho: DensityKernel, rho0: DensityKernel, nodes: int = 129) -> SweepGrid:
    """Gauss-Legendre outcome grid on ``6 * max(scale)``.

    ``nodes`` applies up to a half-width of 12; wider grids get proportionally
    more nodes so the node spacing does not grow.
    """
    half_width = 6.0 * max(rho.scale_hint, rho0.scale_hint)
    nodes = max(nodes, math.ceil(nodes * half_width / 12.0) | 1)
    return SweepGrid.gauss_legendre(half_width, nodes)


def _conditioned_scale(rho: DensityKernel, rho0: DensityKernel, bs: BeamSplitter, x0p: float) -> float:
    # Signal argument t x + r x0p and ancilla argument t x0p - r x must both
    # stay within their states' extent; the tighter bound wins.
    a = (rho.scale_hint + bs.r * abs(x0p)) / bs.t if bs.t > 0 else math.inf
    b = (rho0.scale_hint + bs.t * abs(x0p)) / bs.r if bs.r > 0 else math.inf
    return min(a, b)


def conditional_unnormalized(rho: DensityKernel, rho0: DensityKernel, bs: BeamSplitter, x0p: float) -> DensityKernel:
    t, r = bs.t, bs.r
    f, f0 = rho.eval, rho0.eval

    def ev(x, xp):
        return f(t * x + r * x0p, t * xp + r * x0p) * f0(t * x0p - r * x, t * x0p - r * xp)

    return DensityKernel(
        ev,
        scale_hint=_conditioned_scale(rho, rho0, bs, x0p),
        is_pure=rho.is_pure and rho0.is_pure,
        label=f"cond[{rho.label}|{rho0.label}; t={t:g}, x0'={x0p:g}]",
    )


def outcome_density(rho, rho0, bs, x0p, config: IntegrationConfig | None = None) -> float:
    k = conditional_unnormalized(rho, rho0, bs, x0p)
    cfg = scaled_config(config or IntegrationConfig(), k.scale_hint)
    return max(integrate_1d(k.diagonal, cfg).value, 0.0)


def conditional_state(rho, rho0, bs, x0p, config: IntegrationConfig | None = None) -> ConditionalResult:
    """Normalized signal state after observing ``x0p`` on the ancilla port.

    Raises
    ------
    NegligibleOutcomeError
        If ``p(x0p)`` is below ``DENSITY_FLOOR``.
    """
    unnorm = conditional_unnormalized(rho, rho0, bs, x0p)
    cfg = scaled_config(config or IntegrationConfig(), unnorm.scale_hint)
    p = max(integrate_1d(unnorm.diagonal, cfg).value, 0.0)
    if p < DENSITY_FLOOR:
        raise NegligibleOutcomeError(x0p, p)
    g = unnorm.eval
    kernel = DensityKernel(
        lambda x, xp: g(x, xp) / p,
        scale_hint=unnorm.scale_hint,
        is_pure=unnorm.is_pure,
        label=unnorm.label,
    )
    return ConditionalResult(x0_prime=x0p, density=p, kernel=kernel, unnormalized=unnorm)


def conditional_coherence(rho, rho0, bs, x0p, config: IntegrationConfig | None = None) -> CoherenceValue:
    return l1_coherence(conditional_state(rho, rho0, bs, x0p, config).kernel, config)


def _map(fn: Callable, items: Sequence, workers: int) -> list:
    if workers <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _check_coverage(densities: np.ndarray, grid: SweepGrid) -> float:
    mass = math.fsum(grid.weights * densities)
    if abs(1.0 - mass) > COVERAGE_TOL:
        raise CoverageError(mass)
    return mass


def average_coherence(
    rho, rho0, bs, grid: SweepGrid | None = None, config: IntegrationConfig | None = None, workers: int = 1
) -> CoherenceValue:
    """Outcome-averaged coherence ``int p(x0') C'(x0') dx0'``.

    Computed as the grid sum of the coherence of the unnormalized conditioned
    kernels, which sidesteps dividing by vanishing outcome densities.
    """
    grid = grid or default_sweep_grid(rho, rho0)
    cfg = config or IntegrationConfig()

    def one(x0p):
        k = conditional_unnormalized(rho, rho0, bs, x0p)
        p = integrate_1d(k.diagonal, scaled_config(cfg, k.scale_hint)).value
        return p, l1_coherence(k, cfg)

    results = _map(one, grid.points, workers)
    _check_coverage(np.array([p for p, _ in results]), grid)
    value = math.fsum(w * c.value for w, (_, c) in zip(grid.weights, results))
    err = math.fsum(w * c.error_estimate for w, (_, c) in zip(grid.weights, results))
    return CoherenceValue(value, err)


def reduced_state(rho, rho0, bs, grid: SweepGrid | None = None, config: IntegrationConfig | None = None) -> DensityKernel:
    """Signal-mode state with the measured mode traced out.

    The outcome integral is carried by the sweep grid, so every evaluation of
    the returned kernel sums ``len(grid)`` conditioned kernels.
    """
    grid = grid or default_sweep_grid(rho, rho0)
    cfg = config or IntegrationConfig()
    t, r = bs.t, bs.r
    f, f0 = rho.eval, rho0.eval
    x0 = grid.points
    w = grid.weights
    scale = max(math.hypot(t * rho.scale_hint, r * rho0.scale_hint), 0.5)
    densities = np.array(
        [
            integrate_1d(k.diagonal, scaled_config(cfg, k.scale_hint)).value
            for k in (conditional_unnormalized(rho, rho0, bs, p) for p in x0)
        ]
    )
    _check_coverage(densities, grid)

    def ev(x, xp):
        x, xp = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(xp, dtype=float))
        flat_x, flat_xp = x.ravel(), xp.ravel()
        out = np.empty(flat_x.shape)
        for s in range(0, flat_x.size, _BLOCK):
            a = flat_x[s : s + _BLOCK, None]
            b = flat_xp[s : s + _BLOCK, None]
            terms = f(t * a + r * x0, t * b + r * x0) * f0(t * x0 - r * a, t * x0 - r * b)
            out[s : s + _BLOCK] = terms @ w
        return out.reshape(x.shape)

    return DensityKernel(ev, scale_hint=scale, is_pure=False, label=f"reduced[{rho.label}|{rho0.label}; t={t:g}]")


def single_photon_conditional_wavefunction(bs: BeamSplitter, x0p: float) -> WaveFunction:
    """Signal wavefunction for ``|1> (x) |0>`` after observing ``x0p``.

    ``phi(x) = (t psi_1(x) psi_0(x0p) + r psi_0(x) psi_1(x0p)) / sqrt(p(x0p))``
    with ``p(x0p) = t^2 psi_0(x0p)^2 + r^2 psi_1(x0p)^2``.
    """
    t, r = bs.t, bs.r
    h0, h1 = hermite_functions(1, x0p)
    p = t * t * h0 * h0 + r * r * h1 * h1
    if p < DENSITY_FLOOR:
        raise NegligibleOutcomeError(x0p, float(p))
    norm = 1.0 / math.sqrt(p)

    def ev(x):
        psi = hermite_functions(1, x)
        return norm * (t * psi[1] * h0 + r * psi[0] * h1)

    # psi_1 = 2 x psi_0, so the single zero sits at x = -r x0p / t.
    nodes = (-r * x0p / t,) if t > 0 else ()
    return WaveFunction(ev, scale_hint=math.sqrt(2.0) + abs(x0p), label=f"fock(1)|vac t={t:g} x0'={x0p:g}", nodes=nodes)


@dataclass(frozen=True)
class EntropyScan:
    t: float
    average: float
    reduced: float


def single_photon_entropy_scan(t: float, grid: SweepGrid | None = None, config: IntegrationConfig | None = None) -> EntropyScan:
    """Relative-entropy coherence for a single photon against vacuum.

    ``average`` weights the coherence of each conditioned (pure) state by its
    outcome probability; ``reduced`` is the coherence of the traced-out state
    ``r^2 |0><0| + t^2 |1><1|``.
    """
    bs = BeamSplitter(t)
    grid = grid or SweepGrid.gauss_legendre(6.0 * math.sqrt(2.0))
    h = hermite_functions(1, grid.points)
    dens = bs.t**2 * h[0] ** 2 + bs.r**2 * h[1] ** 2
    _check_coverage(dens, grid)
    terms = []
    for x0p, w, p in zip(grid.points, grid.weights, dens):
        if p < DENSITY_FLOOR:
            continue
        terms.append(w * p * rel_entropy_coherence_pure(single_photon_conditional_wavefunction(bs, x0p), config))
    average = math.fsum(terms)
    mixture = FockMixture([(0, bs.r**2), (1, bs.t**2)])
    reduced = rel_entropy_coherence_fock_mixture(mixture, config)
    return EntropyScan(t=t, average=average, reduced=reduced)
