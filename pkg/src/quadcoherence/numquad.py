"""Adaptive Gauss-Legendre quadrature on truncated real lines and squares.

Both integrators split the domain ``[-L, L]`` (or ``[-L, L]^2``) into an
initial set of panels, evaluate a fixed-order Gauss-Legendre rule on every
panel and on its bisected children, and use the difference of the two as a
panel error estimate. Panels are refined globally: the ones carrying the
largest share of the error are bisected until the summed error estimate
meets ``max(abs_tol, rel_tol * |value|)`` or nothing is left to refine.

Integrands must be vectorized: they receive numpy arrays of abscissae and
return an array of the same shape (a scalar is broadcast).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "IntegrationConfig",
    "IntegrationError",
    "QuadResult",
    "integrate_1d",
    "integrate_2d",
    "scaled_config",
]

# Upper bound on integrand evaluations per vectorized call.
_CHUNK = 1 << 20


class IntegrationError(ArithmeticError):
    """Raised when an integrand returns a non-finite value."""

    def __init__(self, point: tuple[float, ...], value: float):
        self.point = point
        self.value = value
        where = ", ".join(f"{p:.17g}" for p in point)
        super().__init__(f"integrand is not finite ({value!r}) at ({where})")


@dataclass(frozen=True)
class IntegrationConfig:
    """Truncation and error-control settings shared by all integrals.

    ``initial_panels`` is the number of equal panels per axis the domain is
    cut into before any refinement (kept even so that the origin is always a
    panel edge).
    """

    half_width: float = 8.0
    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    max_depth: int = 14
    base_order: int = 16
    initial_panels: int = 8

    def __post_init__(self):
        if not self.half_width > 0:
            raise ValueError(f"half_width must be positive, got {self.half_width}")
        if not self.rel_tol > 0:
            raise ValueError(f"rel_tol must be positive, got {self.rel_tol}")
        if not self.abs_tol > 0:
            raise ValueError(f"abs_tol must be positive, got {self.abs_tol}")
        if self.max_depth < 1:
            raise ValueError(f"max_depth must be >= 1, got {self.max_depth}")
        if self.base_order < 2:
            raise ValueError(f"base_order must be >= 2, got {self.base_order}")
        if self.initial_panels < 2 or self.initial_panels % 2:
            raise ValueError(f"initial_panels must be even and >= 2, got {self.initial_panels}")


@dataclass(frozen=True)
class QuadResult:
    value: float
    error_estimate: float
    panels_used: int

    @property
    def converged_tolerance(self) -> float:
        return self.error_estimate / abs(self.value) if self.value else math.inf


def scaled_config(config: IntegrationConfig, scale: float, widths: float = 6.0) -> IntegrationConfig:
    """Widen the truncation so that ``half_width >= widths * max(scale, 1)``.

    Six widths suffice for densities; integrands that decay only as the square
    root of a density (``|psi|``, ``|rho(x, x')|``) need twelve.
    """
    needed = widths * max(float(scale), 1.0)
    if config.half_width >= needed:
        return config
    return replace(config, half_width=needed)


@lru_cache(maxsize=None)
def _gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(order)
    # Map [-1, 1] to [0, 1].
    return 0.5 * (nodes + 1.0), 0.5 * weights


def _initial_edges(half_width: float, panels: int, breakpoints: Sequence[float] | None) -> np.ndarray:
    edges = np.linspace(-half_width, half_width, panels + 1)
    if breakpoints is not None and len(breakpoints):
        extra = np.asarray(breakpoints, dtype=float)
        extra = extra[np.abs(extra) < half_width]
        edges = np.union1d(edges, extra)
        # Drop slivers that would only waste evaluations.
        keep = np.concatenate(([True], np.diff(edges) > 1e-9 * half_width))
        edges = edges[keep]
        edges[-1] = half_width
    return edges


def _evaluate(f, *coords: np.ndarray) -> np.ndarray:
    out = np.empty(coords[0].shape)
    flat = [c.ravel() for c in coords]
    res = out.reshape(-1)
    for start in range(0, flat[0].size, _CHUNK):
        sl = slice(start, start + _CHUNK)
        part = [c[sl] for c in flat]
        vals = np.broadcast_to(np.asarray(f(*part), dtype=float), part[0].shape)
        bad = ~np.isfinite(vals)
        if bad.any():
            i = int(np.argmax(bad))
            raise IntegrationError(tuple(float(c[i]) for c in part), float(vals[i]))
        res[sl] = vals
    return out


def _panel_sums_1d(f, a: np.ndarray, b: np.ndarray, order: int) -> np.ndarray:
    u, w = _gauss_legendre(order)
    h = (b - a)[:, None]
    x = a[:, None] + h * u[None, :]
    return (_evaluate(f, x) * w[None, :]).sum(axis=1) * h[:, 0]


def _panel_sums_2d(f, x0, x1, y0, y1, order: int) -> np.ndarray:
    u, w = _gauss_legendre(order)
    hx = x1 - x0
    hy = y1 - y0
    xs = x0[:, None, None] + hx[:, None, None] * u[None, :, None]
    ys = y0[:, None, None] + hy[:, None, None] * u[None, None, :]
    xs, ys = np.broadcast_arrays(xs, ys)
    vals = _evaluate(f, xs, ys)
    return np.einsum("pij,i,j->p", vals, w, w) * hx * hy


def _refine_mask(err: np.ndarray, depth: np.ndarray, tol: float, max_depth: int) -> np.ndarray:
    # Any leaf above an equal share of the budget is bisected; while the
    # budget is exceeded at least one leaf qualifies unless all are at depth.
    return (err > tol / err.size) & (depth < max_depth)


def integrate_1d(
    f: Callable[[np.ndarray], np.ndarray],
    config: IntegrationConfig | None = None,
    breakpoints: Sequence[float] | None = None,
) -> QuadResult:
    """Integrate ``f`` over ``[-half_width, half_width]``.

    Parameters
    ----------
    f : callable
        Vectorized real integrand.
    config : IntegrationConfig, optional
        Truncation and tolerances; defaults to ``IntegrationConfig()``.
    breakpoints : sequence of float, optional
        Abscissae where ``f`` is known to be non-smooth (for instance zeros of
        a wavefunction inside an absolute value). They become panel edges.

    Returns
    -------
    QuadResult
        If the tolerance could not be met within ``max_depth`` bisections the
        returned ``error_estimate`` exceeds it; no exception is raised.
    """
    cfg = config or IntegrationConfig()
    order = cfg.base_order
    edges = _initial_edges(cfg.half_width, cfg.initial_panels, breakpoints)
    a, b = edges[:-1], edges[1:]
    depth = np.zeros(a.size, dtype=int)

    def fine_coarse(a, b):
        m = 0.5 * (a + b)
        coarse = _panel_sums_1d(f, a, b, order)
        left = _panel_sums_1d(f, a, m, order)
        right = _panel_sums_1d(f, m, b, order)
        return left + right, np.abs(left + right - coarse)

    val, err = fine_coarse(a, b)
    while True:
        total = math.fsum(val)
        total_err = float(err.sum())
        tol = max(cfg.abs_tol, cfg.rel_tol * abs(total))
        if total_err <= tol:
            break
        refine = _refine_mask(err, depth, tol, cfg.max_depth)
        if not refine.any():
            break
        keep = ~refine
        ra, rb, rd = a[refine], b[refine], depth[refine] + 1
        m = 0.5 * (ra + rb)
        ca = np.concatenate((ra, m))
        cb = np.concatenate((m, rb))
        cval, cerr = fine_coarse(ca, cb)
        a = np.concatenate((a[keep], ca))
        b = np.concatenate((b[keep], cb))
        depth = np.concatenate((depth[keep], rd, rd))
        val = np.concatenate((val[keep], cval))
        err = np.concatenate((err[keep], cerr))
    return QuadResult(value=float(total), error_estimate=float(total_err), panels_used=int(a.size))


def integrate_2d(
    f: Callable[[np.ndarray, np.ndarray], np.ndarray],
    config: IntegrationConfig | None = None,
    breakpoints: Sequence[float] | None = None,
) -> QuadResult:
    """Integrate ``f(x, y)`` over the square ``[-half_width, half_width]^2``.

    Cells are refined by quadrisection; ``breakpoints`` become cell edges along
    both axes. Tolerance semantics are those of :func:`integrate_1d`.
    """
    cfg = config or IntegrationConfig()
    order = cfg.base_order
    edges = _initial_edges(cfg.half_width, cfg.initial_panels, breakpoints)
    gx0, gy0 = np.meshgrid(edges[:-1], edges[:-1], indexing="ij")
    gx1, gy1 = np.meshgrid(edges[1:], edges[1:], indexing="ij")
    x0, x1, y0, y1 = (g.ravel() for g in (gx0, gx1, gy0, gy1))
    depth = np.zeros(x0.size, dtype=int)

    def children(x0, x1, y0, y1):
        xm = 0.5 * (x0 + x1)
        ym = 0.5 * (y0 + y1)
        return (
            np.concatenate((x0, xm, x0, xm)),
            np.concatenate((xm, x1, xm, x1)),
            np.concatenate((y0, y0, ym, ym)),
            np.concatenate((ym, ym, y1, y1)),
        )

    def fine_coarse(x0, x1, y0, y1):
        n = x0.size
        coarse = _panel_sums_2d(f, x0, x1, y0, y1, order)
        sub = _panel_sums_2d(f, *children(x0, x1, y0, y1), order).reshape(4, n).sum(axis=0)
        return sub, np.abs(sub - coarse)

    val, err = fine_coarse(x0, x1, y0, y1)
    while True:
        total = math.fsum(val)
        total_err = float(err.sum())
        tol = max(cfg.abs_tol, cfg.rel_tol * abs(total))
        if total_err <= tol:
            break
        refine = _refine_mask(err, depth, tol, cfg.max_depth)
        if not refine.any():
            break
        keep = ~refine
        cells = children(x0[refine], x1[refine], y0[refine], y1[refine])
        cval, cerr = fine_coarse(*cells)
        x0, x1, y0, y1 = (np.concatenate((old[keep], new)) for old, new in zip((x0, x1, y0, y1), cells))
        depth = np.concatenate((depth[keep], np.tile(depth[refine] + 1, 4)))
        val = np.concatenate((val[keep], cval))
        err = np.concatenate((err[keep], cerr))
    return QuadResult(value=float(total), error_estimate=float(total_err), panels_used=int(x0.size))
