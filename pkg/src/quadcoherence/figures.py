"""Curve data for the coherence figures, one table per figure."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import simpson

from .coherence import l1_coherence
from .conditioning import (
    BeamSplitter,
    SweepGrid,
    average_coherence,
    conditional_coherence,
    default_sweep_grid,
    outcome_density,
    single_photon_entropy_scan,
)
from .numquad import IntegrationConfig
from .states import fock_wavefunction, pure_kernel, squeezed_wavefunction

__all__ = ["FIGURES", "Figure", "FigureCheckError", "make_figure"]

HALF_BS = 1 / math.sqrt(2)
FOCK_CURVES = (1, 2, 3)
N_SWEEP = tuple(range(11))
# Conditioned states beyond x0' = 3 have p(x0') near the negligible-outcome floor.
X0_COHERENCE = tuple(np.round(np.arange(0, 61) * 0.05, 10))
X0_DENSITY = tuple(np.round(np.arange(0, 101) * 0.05, 10))
T_FIG2 = tuple(np.round(np.linspace(0.0, 1.0, 21), 10))
T_FIG9 = tuple(np.round(np.linspace(0.0, 1.0, 11), 10))


class FigureCheckError(RuntimeError):
    """A figure's internal consistency check failed; nothing was written."""


@dataclass
class Figure:
    name: str
    columns: list[str]
    rows: list[list[float]]
    comments: list[str] = field(default_factory=list)


def _vacuum():
    return pure_kernel(fock_wavefunction(0))


def _fock(n):
    return pure_kernel(fock_wavefunction(n))


def _sweep(fn: Callable, points, workers: int) -> list:
    if workers <= 1:
        return [fn(p) for p in points]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, points))


def fig2(cfg, workers, nodes):
    widths = (0.25, 1.0)
    vac = _vacuum()
    states = [pure_kernel(squeezed_wavefunction(w)) for w in widths]
    base = [l1_coherence(k, cfg).value for k in states]

    def row(t):
        bs = BeamSplitter(float(t))
        return [t] + [conditional_coherence(k, vac, bs, 0.0, cfg).value - c for k, c in zip(states, base)]

    return Figure(
        "fig2",
        ["t"] + [f"Cp_minus_C_dx{w:g}" for w in widths],
        _sweep(row, T_FIG2, workers),
        ["C' - C versus transmission t; squeezed signal (dx = 0.25, 1), vacuum ancilla, outcome x0' = 0"],
    )


def fig3(cfg, workers, nodes):
    rows = _sweep(lambda n: [n, l1_coherence(_fock(n), cfg).value], N_SWEEP, workers)
    return Figure("fig3", ["n", "C"], rows, ["l1 coherence of number states, n = 0..10"])


def _fock_condition_table(cfg, workers, weighted: bool):
    vac = _vacuum()
    bs = BeamSplitter(HALF_BS)
    base = {n: l1_coherence(_fock(n), cfg).value for n in FOCK_CURVES}

    def row(x0p):
        out = [x0p]
        for n in FOCK_CURVES:
            ratio = conditional_coherence(_fock(n), vac, bs, float(x0p), cfg).value / base[n]
            if weighted:
                ratio *= outcome_density(_fock(n), vac, bs, float(x0p), cfg)
            out.append(ratio)
        return out

    return _sweep(row, X0_COHERENCE, workers)


def fig4(cfg, workers, nodes):
    return Figure(
        "fig4",
        ["x0p"] + [f"ratio_n{n}" for n in FOCK_CURVES],
        _fock_condition_table(cfg, workers, weighted=False),
        ["C'(x0')/C versus outcome x0' >= 0 for number states n = 1, 2, 3; vacuum ancilla, t = 1/sqrt(2)"],
    )


def fig5(cfg, workers, nodes):
    vac = _vacuum()
    bs = BeamSplitter(HALF_BS)
    rows = _sweep(
        lambda x0p: [x0p] + [outcome_density(_fock(n), vac, bs, float(x0p), cfg) for n in FOCK_CURVES],
        X0_DENSITY,
        workers,
    )
    table = np.array(rows)
    for j, n in enumerate(FOCK_CURVES, start=1):
        mass = 2.0 * simpson(table[:, j], x=table[:, 0])
        if abs(mass - 1.0) > 1e-4:
            raise FigureCheckError(f"fig5: mirrored density for n={n} integrates to {mass:.6f}")
    return Figure(
        "fig5",
        ["x0p"] + [f"p_n{n}" for n in FOCK_CURVES],
        rows,
        ["outcome density p(x0') for x0' >= 0 (curves are even) for n = 1, 2, 3; vacuum ancilla, t = 1/sqrt(2)"],
    )


def fig6(cfg, workers, nodes):
    return Figure(
        "fig6",
        ["x0p"] + [f"p_ratio_n{n}" for n in FOCK_CURVES],
        _fock_condition_table(cfg, workers, weighted=True),
        ["p(x0') C'(x0')/C versus x0' >= 0 for n = 1, 2, 3; vacuum ancilla, t = 1/sqrt(2)"],
    )


def _averages(cfg, workers, nodes):
    vac = _vacuum()
    bs = BeamSplitter(HALF_BS)

    def one(n):
        grid = default_sweep_grid(_fock(n), vac, nodes)
        return n, average_coherence(_fock(n), vac, bs, grid, cfg).value, l1_coherence(_fock(n), cfg).value

    return _sweep(one, N_SWEEP, workers)


def fig7(cfg, workers, nodes):
    rows = [[n, avg] for n, avg, _ in _averages(cfg, workers, nodes)]
    return Figure("fig7", ["n", "Cavg"], rows, ["outcome-averaged output coherence versus n; vacuum ancilla, t = 1/sqrt(2)"])


def fig8(cfg, workers, nodes):
    rows = [[n, avg / c] for n, avg, c in _averages(cfg, workers, nodes)]
    return Figure("fig8", ["n", "ratio"], rows, ["averaged output coherence over input coherence versus n; vacuum ancilla, t = 1/sqrt(2)"])


def fig9(cfg, workers, nodes):
    def row(t):
        scan = single_photon_entropy_scan(float(t), SweepGrid.gauss_legendre(6.0 * math.sqrt(2.0), nodes), cfg)
        return [t, scan.average, scan.reduced]

    return Figure(
        "fig9",
        ["t", "S_avg", "S_red"],
        _sweep(row, T_FIG9, workers),
        ["relative-entropy coherence for n = 1 with vacuum ancilla: outcome average and reduced state versus t"],
    )


FIGURES: dict[str, Callable[[IntegrationConfig, int, int], Figure]] = {
    "fig2": fig2,
    "fig3": fig3,
    "fig4": fig4,
    "fig5": fig5,
    "fig6": fig6,
    "fig7": fig7,
    "fig8": fig8,
    "fig9": fig9,
}


def make_figure(name: str, config: IntegrationConfig | None = None, workers: int = 1, sweep_nodes: int = 129) -> Figure:
    if name not in FIGURES:
        raise KeyError(f"unknown figure {name!r}; expected one of {', '.join(FIGURES)}")
    return FIGURES[name](config or IntegrationConfig(), workers, sweep_nodes)
