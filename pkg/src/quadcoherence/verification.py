"""Law checks run by ``quadcoherence verify`` and by the acceptance tests.

Each check computes the numerical side with the adaptive engine and compares
it with a closed form or an independent construction, returning the worst
deviation seen against a fixed tolerance.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import analytic
from .coherence import l1_coherence, l1_coherence_pure
from .conditioning import (
    BeamSplitter,
    average_coherence,
    conditional_coherence,
    conditional_unnormalized,
    default_sweep_grid,
    outcome_density,
    reduced_state,
    single_photon_entropy_scan,
)
from .numquad import IntegrationConfig, integrate_1d
from .states import (
    GaussianSchellParams,
    fock_wavefunction,
    gaussian_schell_kernel,
    hermite_functions,
    pure_kernel,
    squeezed_wavefunction,
    thermal_params,
)

__all__ = ["LawCheck", "CHECKS", "run_checks"]

SIGMA_GRID = tuple(float(s) for s in np.linspace(0.25, 2.0, 5))
MU_GRID = (0.25, 0.5, 1.0, 4.0, math.inf)
THERMAL_GRID = (0.0, 1.0, 5.0, 20.0)
T_GRID = (0.3, 1 / math.sqrt(2), 0.9)
SYSTEM_NBARS = (0.0, 1.0, 5.0)
ANCILLA_NBARS = (0.0, 1.0)
OUTCOMES = (-2.0, -1.0, 0.0, 1.0, 2.0)


@dataclass
class LawCheck:
    key: str
    law: str
    tolerance: float
    worst: float = 0.0
    passed: bool = True
    seconds: float = 0.0
    details: list[str] = field(default_factory=list)

    def record(self, deviation: float, ok: bool | None = None, note: str = "") -> None:
        self.worst = max(self.worst, deviation)
        good = deviation <= self.tolerance if ok is None else ok
        if not good:
            self.passed = False
            if note:
                self.details.append(note)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.key:<12} {self.law:<58} tol={self.tolerance:.0e} worst={self.worst:.3e} ({self.seconds:.1f}s)"


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b)


def _default_bs(t: float) -> BeamSplitter:
    return BeamSplitter(t)


def perturbed_bs(t: float) -> BeamSplitter:
    """Negative-control beam splitter with ``r = 1 - t`` (not energy conserving)."""
    bs = BeamSplitter(t)
    object.__setattr__(bs, "r", 1.0 - t)
    return bs


def _kernel(n_bar: float):
    return gaussian_schell_kernel(thermal_params(n_bar))


def check_gaussian_closed_form(cfg, make_bs) -> LawCheck:
    c = LawCheck("gaussian_l1", "C = 2 sqrt(2pi) sigma mu / sqrt(2 sigma^2 + mu^2)", 1e-4)
    for sigma in SIGMA_GRID:
        for mu in MU_GRID:
            p = GaussianSchellParams(sigma, mu)
            num = l1_coherence(gaussian_schell_kernel(p), cfg).value
            c.record(_rel(num, analytic.gaussian_l1(p)), note=f"sigma={sigma}, mu={mu}")
    return c


def check_thermal_law(cfg, make_bs) -> LawCheck:
    c = LawCheck("thermal_l1", "C = sqrt(2pi / (2 nbar + 1))", 1e-4)
    for n_bar in THERMAL_GRID:
        num = l1_coherence(_kernel(n_bar), cfg).value
        c.record(_rel(num, analytic.thermal_l1(n_bar)), note=f"nbar={n_bar}")
    return c


def _gaussian_pair_cases():
    for t in T_GRID:
        for ns in SYSTEM_NBARS:
            for na in ANCILLA_NBARS:
                yield t, ns, na


def check_output_law(cfg, make_bs) -> LawCheck:
    c = LawCheck("output_l1", "1/C'^2 = t^2/C^2 + r^2/C0^2, outcome independent", 1e-4)
    for t, ns, na in _gaussian_pair_cases():
        rho, rho0 = _kernel(ns), _kernel(na)
        law = analytic.output_l1(analytic.thermal_l1(ns), analytic.thermal_l1(na), BeamSplitter(t))
        values = [conditional_coherence(rho, rho0, make_bs(t), x, cfg).value for x in OUTCOMES]
        for x, v in zip(OUTCOMES, values):
            c.record(_rel(v, law), note=f"t={t:.4f}, nbar={ns}, nbar0={na}, x0'={x}")
        c.record((max(values) - min(values)) / min(values), note=f"outcome spread t={t:.4f}, nbar={ns}, nbar0={na}")
    return c


def check_gain_criterion(cfg, make_bs) -> LawCheck:
    c = LawCheck("gain_sign", "sign(C' - C) = sign(C0 - C) for r != 0", 0.0)
    states = [("thermal", n) for n in SYSTEM_NBARS] + [("squeezed", 0.25), ("squeezed", 1.0)]

    def kern(kind, v):
        return _kernel(v) if kind == "thermal" else pure_kernel(squeezed_wavefunction(v))

    for t in T_GRID:
        for sys_state in states:
            for anc_state in states:
                rho, rho0 = kern(*sys_state), kern(*anc_state)
                cin = l1_coherence(rho, cfg).value
                c0 = l1_coherence(rho0, cfg).value
                cout = conditional_coherence(rho, rho0, make_bs(t), 0.5, cfg).value
                if abs(c0 - cin) <= 1e-9 * cin:
                    # Equal coherences: the output must not move either.
                    ok = abs(cout - cin) <= 1e-6 * cin
                else:
                    ok = np.sign(cout - cin) == np.sign(c0 - cin)
                c.record(0.0 if ok else 1.0, ok=ok, note=f"t={t:.4f}, system={sys_state}, ancilla={anc_state}")
    return c


IDENTITY_CASES = (("fock", 1, 1 / math.sqrt(2)), ("fock", 2, 1 / math.sqrt(2)), ("thermal", 1, 0.8))


def identity_case(kind: str, n: float, t: float, cfg, make_bs=_default_bs) -> tuple[float, float]:
    rho = pure_kernel(fock_wavefunction(int(n))) if kind == "fock" else _kernel(n)
    rho0 = pure_kernel(fock_wavefunction(0))
    bs = make_bs(t)
    grid = default_sweep_grid(rho, rho0)
    avg = average_coherence(rho, rho0, bs, grid, cfg).value
    red_cfg = IntegrationConfig(
        half_width=cfg.half_width, rel_tol=max(cfg.rel_tol, 1e-5), abs_tol=cfg.abs_tol,
        max_depth=cfg.max_depth, base_order=cfg.base_order,
    )
    red = l1_coherence(reduced_state(rho, rho0, bs, grid, cfg), red_cfg).value
    return avg, red


def check_average_reduced(cfg, make_bs) -> LawCheck:
    c = LawCheck("avg_reduced", "average C' = C'(reduced state)", 1e-3)
    for kind, n, t in IDENTITY_CASES:
        avg, red = identity_case(kind, n, t, cfg, make_bs)
        c.record(_rel(avg, red), note=f"{kind}({n}) x vacuum, t={t:.4f}: average={avg:.6f}, reduced={red:.6f}")
    return c


def check_single_photon_kernel(cfg, make_bs) -> LawCheck:
    c = LawCheck("photon_kernel", "conditioned kernel = rank-one kernel of t psi1 psi0 + r psi0 psi1", 1e-8)
    grid = np.linspace(-3, 3, 21)
    X, XP = np.meshgrid(grid, grid, indexing="ij")
    rho, vac = pure_kernel(fock_wavefunction(1)), pure_kernel(fock_wavefunction(0))
    t = 1 / math.sqrt(2)
    law_bs = BeamSplitter(t)
    for x0p in (0.0, 0.5, 1.5):
        bs = make_bs(t)
        k = conditional_unnormalized(rho, vac, bs, x0p)(X, XP)
        h = hermite_functions(1, grid)
        h0, h1 = hermite_functions(1, x0p)
        phi = law_bs.t * h[1] * h0 + law_bs.r * h[0] * h1
        c.record(float(np.max(np.abs(k - np.outer(phi, phi)))), note=f"kernel x0'={x0p}")
        p_law = law_bs.t**2 * h0**2 + law_bs.r**2 * h1**2
        dev = abs(outcome_density(rho, vac, bs, x0p, cfg) - p_law)
        c.record(dev, ok=dev <= 1e-10, note=f"density x0'={x0p}")
    return c


def check_fock_monotone(cfg, make_bs) -> LawCheck:
    c = LawCheck("fock_l1", "C(fock n) increasing; C0 = sqrt(2pi), C1 = 4 sqrt(2/pi)", 1e-6)
    values = [l1_coherence(pure_kernel(fock_wavefunction(n)), cfg).value for n in range(11)]
    c.record(_rel(values[0], math.sqrt(2 * math.pi)), note="n=0")
    c.record(_rel(values[1], 4 * math.sqrt(2 / math.pi)), note="n=1")
    increasing = all(b > a for a, b in zip(values, values[1:]))
    c.record(0.0, ok=increasing, note=f"not increasing: {values}")
    return c


def check_min_uncertainty(cfg, make_bs) -> LawCheck:
    c = LawCheck("min_uncert", "C_X C_Y = 2 pi for pure Gaussians", 1e-5)
    for sigma in (0.25, 0.5, 1.0):
        cx = l1_coherence_pure(squeezed_wavefunction(sigma), cfg).value
        cy = l1_coherence_pure(squeezed_wavefunction(1 / (4 * sigma)), cfg).value
        c.record(_rel(cx * cy, 2 * math.pi), note=f"sigma={sigma}")
    return c


def check_entropy_separation(cfg, make_bs) -> LawCheck:
    c = LawCheck("entropy_gap", "S_avg >= S_red; equal at t=0,1; gap > 1e-3 at t=1/sqrt2", 1e-4)
    for t in np.linspace(0.0, 1.0, 11):
        scan = single_photon_entropy_scan(float(t), config=cfg)
        gap = scan.average - scan.reduced
        if t in (0.0, 1.0):
            c.record(abs(gap), note=f"endpoint t={t}: gap {gap:.3g}")
        else:
            c.record(0.0, ok=gap >= -1e-9, note=f"t={t:.2f}: average below reduced by {-gap:.3g}")
    mid = single_photon_entropy_scan(1 / math.sqrt(2), config=cfg)
    c.record(0.0, ok=mid.average - mid.reduced > 1e-3, note="no strict separation at t=1/sqrt2")
    return c


def outcome_mass(rho, rho0, bs, cfg) -> float:
    """``int p(x0') dx0'`` by nested adaptive quadrature."""
    outer = IntegrationConfig(
        half_width=6.0 * max(rho.scale_hint, rho0.scale_hint, 1.0),
        rel_tol=cfg.rel_tol, abs_tol=cfg.abs_tol, max_depth=cfg.max_depth, base_order=cfg.base_order,
    )

    def dens(xs):
        return np.array([outcome_density(rho, rho0, bs, float(x), cfg) for x in np.ravel(xs)]).reshape(np.shape(xs))

    return integrate_1d(dens, outer).value


def check_normalization(cfg, make_bs) -> LawCheck:
    c = LawCheck("normalization", "int p(x0') dx0' = 1", 1e-6)
    vac = pure_kernel(fock_wavefunction(0))
    cases = [(_kernel(ns), _kernel(na), t, f"thermal({ns}) x thermal({na})") for t, ns, na in _gaussian_pair_cases()]
    cases += [(pure_kernel(fock_wavefunction(n)), vac, 1 / math.sqrt(2), f"fock({n}) x vacuum") for n in (1, 2, 3)]
    cases += [(_kernel(1.0), vac, 0.8, "thermal(1) x vacuum")]
    for rho, rho0, t, name in cases:
        c.record(abs(outcome_mass(rho, rho0, make_bs(t), cfg) - 1.0), note=f"{name}, t={t:.4f}")
    return c


CHECKS: dict[str, Callable[[IntegrationConfig, Callable], LawCheck]] = {
    "gaussian": check_gaussian_closed_form,
    "thermal": check_thermal_law,
    "output_law": check_output_law,
    "gain": check_gain_criterion,
    "identity": check_average_reduced,
    "photon_kernel": check_single_photon_kernel,
    "fock": check_fock_monotone,
    "uncertainty": check_min_uncertainty,
    "entropy": check_entropy_separation,
    "normalization": check_normalization,
}


def run_checks(names=None, config: IntegrationConfig | None = None, perturb_r: bool = False) -> list[LawCheck]:
    cfg = config or IntegrationConfig()
    make_bs = perturbed_bs if perturb_r else _default_bs
    results = []
    for name in names or CHECKS:
        start = time.perf_counter()
        res = CHECKS[name](cfg, make_bs)
        res.seconds = time.perf_counter() - start
        results.append(res)
    return results
