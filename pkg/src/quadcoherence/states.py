"""Single-mode states in the quadrature-X representation.

Quadratures follow ``X = (a^dagger + a) / 2``, so the vacuum has variance 1/4.
Every state is real: a pure state is a real wavefunction ``psi(x)`` and a
general state is a real symmetric kernel ``rho(x, x')``. All callables are
vectorized over numpy arrays.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .numquad import IntegrationConfig, integrate_1d, integrate_2d, scaled_config

__all__ = [
    "DensityKernel",
    "FockIndex",
    "GaussianSchellParams",
    "StateSpecError",
    "WaveFunction",
    "fock_wavefunction",
    "gaussian_params_of",
    "gaussian_schell_kernel",
    "hermite_functions",
    "kernel_purity",
    "kernel_trace",
    "kernel_variance",
    "parse_state",
    "pure_kernel",
    "squeezed_wavefunction",
    "thermal_params",
    "y_wavefunction",
]


@dataclass(frozen=True)
class DensityKernel:
    """Real symmetric quadrature kernel ``rho(x, x')``.

    ``nodes`` optionally lists abscissae where the kernel changes sign along
    both axes (zeros of the wavefunction of a pure state); integrators use
    them as panel edges.
    """

    eval: Callable[[np.ndarray, np.ndarray], np.ndarray]
    scale_hint: float
    is_pure: bool = False
    label: str = ""
    nodes: tuple[float, ...] = ()

    def __post_init__(self):
        if not self.scale_hint > 0:
            raise ValueError(f"scale_hint must be positive, got {self.scale_hint}")

    def __call__(self, x, xp):
        return self.eval(x, xp)

    def diagonal(self, x):
        return self.eval(x, x)


@dataclass(frozen=True)
class WaveFunction:
    eval: Callable[[np.ndarray], np.ndarray]
    scale_hint: float
    label: str = ""
    nodes: tuple[float, ...] = ()

    def __post_init__(self):
        if not self.scale_hint > 0:
            raise ValueError(f"scale_hint must be positive, got {self.scale_hint}")

    def __call__(self, x):
        return self.eval(x)


@dataclass(frozen=True)
class GaussianSchellParams:
    """Width ``sigma`` of the quadrature distribution and coherence width ``mu``.

    ``mu = math.inf`` is the pure Gaussian.
    """

    sigma: float
    mu: float = math.inf

    def __post_init__(self):
        if not self.sigma > 0 or not math.isfinite(self.sigma):
            raise ValueError(f"sigma must be positive and finite, got {self.sigma}")
        if not self.mu > 0:
            raise ValueError(f"mu must be positive or inf, got {self.mu}")

    @property
    def is_pure(self) -> bool:
        return math.isinf(self.mu)


@dataclass(frozen=True, order=True)
class FockIndex:
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise ValueError(f"photon number must be a nonnegative integer, got {self.n}")


def gaussian_schell_kernel(params: GaussianSchellParams) -> DensityKernel:
    sigma, mu = params.sigma, params.mu
    norm = 1.0 / math.sqrt(2.0 * math.pi * sigma**2)
    a = 1.0 / (4.0 * sigma**2)
    if params.is_pure:

        def ev(x, xp):
            return norm * np.exp(-a * (x * x + xp * xp))

        label = f"gaussian(sigma={sigma:g}, mu=inf)"
    else:
        b = 1.0 / (4.0 * mu**2)

        def ev(x, xp):
            d = x - xp
            return norm * np.exp(-a * (x * x + xp * xp) - b * d * d)

        label = f"gaussian(sigma={sigma:g}, mu={mu:g})"
    return DensityKernel(ev, scale_hint=sigma, is_pure=params.is_pure, label=label)


def thermal_params(n_bar: float) -> GaussianSchellParams:
    """Gaussian Schell parameters of a thermal state with mean photon number ``n_bar``."""
    if not n_bar >= 0:
        raise ValueError(f"mean photon number must be nonnegative, got {n_bar}")
    sigma = math.sqrt(2.0 * n_bar + 1.0) / 2.0
    if n_bar == 0:
        return GaussianSchellParams(sigma, math.inf)
    mu = 0.5 * math.sqrt((2.0 * n_bar + 1.0) / (2.0 * n_bar * (n_bar + 1.0)))
    return GaussianSchellParams(sigma, mu)


def hermite_functions(n: int, x) -> np.ndarray:
    """Return ``[psi_0(x), ..., psi_n(x)]`` stacked along the first axis.

    Uses the three-term recurrence of normalized Hermite functions in
    ``u = sqrt(2) x``, so no raw Hermite polynomial or factorial is formed.
    """
    x = np.asarray(x, dtype=float)
    u = math.sqrt(2.0) * x
    out = np.empty((n + 1,) + x.shape)
    # psi_0 = (2/pi)^(1/4) exp(-x^2), the u-space h_0 times 2^(1/4).
    out[0] = (2.0 / math.pi) ** 0.25 * np.exp(-x * x)
    if n >= 1:
        out[1] = math.sqrt(2.0) * u * out[0]
    for k in range(1, n):
        out[k + 1] = math.sqrt(2.0 / (k + 1)) * u * out[k] - math.sqrt(k / (k + 1)) * out[k - 1]
    return out


@lru_cache(maxsize=None)
def _hermite_zeros(n: int) -> tuple[float, ...]:
    if n == 0:
        return ()
    roots, _ = np.polynomial.hermite.hermgauss(n)
    return tuple(float(r) / math.sqrt(2.0) for r in roots)


def fock_wavefunction(n: FockIndex | int) -> WaveFunction:
    n = n.n if isinstance(n, FockIndex) else FockIndex(n).n

    def ev(x):
        return hermite_functions(n, x)[n]

    return WaveFunction(ev, scale_hint=math.sqrt(n + 1.0), label=f"fock({n})", nodes=_hermite_zeros(n))


def squeezed_wavefunction(dx: float) -> WaveFunction:
    """Pure centered Gaussian whose quadrature standard deviation is ``dx``."""
    if not dx > 0:
        raise ValueError(f"quadrature width must be positive, got {dx}")
    norm = (2.0 * math.pi * dx**2) ** -0.25
    a = 1.0 / (4.0 * dx**2)

    def ev(x):
        return norm * np.exp(-a * np.asarray(x) ** 2)

    return WaveFunction(ev, scale_hint=dx, label=f"squeezed({dx:g})")


def pure_kernel(psi: WaveFunction) -> DensityKernel:
    f = psi.eval

    def ev(x, xp):
        return f(x) * f(xp)

    return DensityKernel(ev, scale_hint=psi.scale_hint, is_pure=True, label=psi.label, nodes=psi.nodes)


def y_wavefunction(psi: WaveFunction, half_width: float | None = None, panel_width: float = 0.125, order: int = 16) -> WaveFunction:
    """Modulus of the Y-quadrature wavefunction of ``psi``.

    With ``[X, Y] = i/2`` the overlap is ``<y|x> = exp(-2ixy) / sqrt(pi)``; the
    transform is done with a fixed composite Gauss-Legendre rule over
    ``[-half_width, half_width]``. Only ``|psi_Y(y)|`` is returned, which is
    all an l1 coherence needs.
    """
    # Amplitudes decay as the square root of the density, hence twelve widths.
    L = half_width if half_width is not None else 12.0 * max(psi.scale_hint, 1.0)
    panels = max(2, int(math.ceil(2 * L / panel_width)))
    u, w = np.polynomial.legendre.leggauss(order)
    h = 2 * L / panels
    left = -L + h * np.arange(panels)
    xs = (left[:, None] + 0.5 * h * (u[None, :] + 1.0)).ravel()
    ws = np.tile(0.5 * h * w, panels) * psi(xs) / math.sqrt(math.pi)

    def ev(y):
        y = np.asarray(y, dtype=float)
        flat = y.ravel()
        out = np.empty(flat.shape)
        for start in range(0, flat.size, 2048):
            phase = 2.0 * np.multiply.outer(flat[start : start + 2048], xs)
            out[start : start + 2048] = np.hypot(np.cos(phase) @ ws, np.sin(phase) @ ws)
        return out.reshape(y.shape)

    return WaveFunction(ev, scale_hint=max(1.0 / (4.0 * psi.scale_hint), 0.5), label=f"Y[{psi.label}]")


def kernel_trace(k: DensityKernel, config: IntegrationConfig | None = None):
    cfg = scaled_config(config or IntegrationConfig(), k.scale_hint)
    return integrate_1d(k.diagonal, cfg, breakpoints=k.nodes)


def kernel_variance(k: DensityKernel, config: IntegrationConfig | None = None) -> float:
    cfg = scaled_config(config or IntegrationConfig(), k.scale_hint)
    m1 = integrate_1d(lambda x: x * k.diagonal(x), cfg, breakpoints=k.nodes).value
    m2 = integrate_1d(lambda x: x * x * k.diagonal(x), cfg, breakpoints=k.nodes).value
    return m2 - m1 * m1


def kernel_purity(k: DensityKernel, config: IntegrationConfig | None = None) -> float:
    cfg = scaled_config(config or IntegrationConfig(), k.scale_hint)
    return integrate_2d(lambda x, xp: k.eval(x, xp) * k.eval(xp, x), cfg, breakpoints=k.nodes).value


# --- state specification mini-language ---------------------------------------


class StateSpecError(ValueError):
    """A state specification string could not be parsed."""


_SPEC = re.compile(r"^\s*(?P<kind>[a-z]+)\s*(?::(?P<args>.*))?$")
_FIELDS = {
    "gaussian": ("sigma", "mu"),
    "thermal": ("nbar",),
    "fock": ("n",),
    "squeezed": ("dx",),
    "vacuum": (),
}


def _parse_args(kind: str, text: str | None) -> dict[str, str]:
    out: dict[str, str] = {}
    if text is None or not text.strip():
        return out
    for part in text.split(","):
        if "=" not in part:
            raise StateSpecError(f"{kind}: expected key=value, got {part.strip()!r}")
        key, value = (s.strip() for s in part.split("=", 1))
        if key not in _FIELDS[kind]:
            raise StateSpecError(f"{kind}: unknown field {key!r}")
        out[key] = value
    return out


def _number(kind: str, key: str, value: str, allow_inf: bool = False) -> float:
    try:
        v = float(value)
    except ValueError:
        raise StateSpecError(f"{kind}: field {key!r} is not a number: {value!r}") from None
    if math.isnan(v) or (math.isinf(v) and not allow_inf):
        raise StateSpecError(f"{kind}: field {key!r} must be finite, got {value!r}")
    return v


def parse_state(spec: str) -> DensityKernel:
    """Build a kernel from ``gaussian:sigma=..,mu=..``, ``thermal:nbar=..``,
    ``fock:n=..``, ``vacuum`` or ``squeezed:dx=..``."""
    m = _SPEC.match(spec)
    if not m or m.group("kind") not in _FIELDS:
        raise StateSpecError(f"unknown state kind in {spec!r}; expected one of {', '.join(_FIELDS)}")
    kind = m.group("kind")
    args = _parse_args(kind, m.group("args"))
    missing = [k for k in _FIELDS[kind] if k not in args and not (kind == "gaussian" and k == "mu")]
    if missing:
        raise StateSpecError(f"{kind}: missing field {missing[0]!r}")
    try:
        if kind == "vacuum":
            return pure_kernel(fock_wavefunction(0))
        if kind == "fock":
            try:
                n = int(args["n"])
            except ValueError:
                raise StateSpecError(f"fock: field 'n' is not an integer: {args['n']!r}") from None
            return pure_kernel(fock_wavefunction(FockIndex(n)))
        if kind == "thermal":
            return gaussian_schell_kernel(thermal_params(_number(kind, "nbar", args["nbar"])))
        if kind == "squeezed":
            return pure_kernel(squeezed_wavefunction(_number(kind, "dx", args["dx"])))
        sigma = _number(kind, "sigma", args["sigma"])
        mu = _number(kind, "mu", args.get("mu", "inf"), allow_inf=True)
        return gaussian_schell_kernel(GaussianSchellParams(sigma, mu))
    except StateSpecError:
        raise
    except ValueError as exc:
        raise StateSpecError(f"{kind}: {exc}") from None


def gaussian_params_of(spec: str) -> GaussianSchellParams | None:
    """Return the Gaussian Schell parameters a spec denotes, or ``None``."""
    kind = spec.split(":", 1)[0].strip()
    if kind == "vacuum":
        return GaussianSchellParams(0.5)
    if kind == "fock":
        args = _parse_args("fock", spec.split(":", 1)[1] if ":" in spec else None)
        return GaussianSchellParams(0.5) if args.get("n", "").strip() == "0" else None
    if kind == "thermal":
        args = _parse_args(kind, spec.split(":", 1)[1])
        return thermal_params(_number(kind, "nbar", args["nbar"]))
    if kind == "squeezed":
        args = _parse_args(kind, spec.split(":", 1)[1])
        return GaussianSchellParams(_number(kind, "dx", args["dx"]))
    if kind == "gaussian":
        args = _parse_args(kind, spec.split(":", 1)[1])
        return GaussianSchellParams(_number(kind, "sigma", args["sigma"]), _number(kind, "mu", args.get("mu", "inf"), allow_inf=True))
    return None
