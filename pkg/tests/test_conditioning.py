import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadcoherence.analytic import output_l1, thermal_l1
from quadcoherence.coherence import l1_coherence, rel_entropy_coherence_pure
from quadcoherence.conditioning import (
    BeamSplitter,
    CoverageError,
    NegligibleOutcomeError,
    SweepGrid,
    average_coherence,
    conditional_coherence,
    conditional_state,
    conditional_unnormalized,
    default_sweep_grid,
    outcome_density,
    reduced_state,
    single_photon_conditional_wavefunction,
    single_photon_entropy_scan,
)
from quadcoherence.numquad import IntegrationConfig
from quadcoherence.states import (
    GaussianSchellParams,
    fock_wavefunction,
    gaussian_schell_kernel,
    hermite_functions,
    kernel_purity,
    kernel_trace,
    pure_kernel,
    thermal_params,
)
from quadcoherence.verification import outcome_mass

HALF = 1 / math.sqrt(2)
GRID = np.linspace(-2.5, 2.5, 11)
X, XP = np.meshgrid(GRID, GRID, indexing="ij")


def fock(n):
    return pure_kernel(fock_wavefunction(n))


def thermal(n_bar):
    return gaussian_schell_kernel(thermal_params(n_bar))


VAC = fock(0)


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 1))
def test_beam_splitter_energy_conserving(t):
    bs = BeamSplitter(t)
    assert bs.t**2 + bs.r**2 == pytest.approx(1.0, abs=1e-15)
    assert 0 <= bs.r <= 1


@pytest.mark.parametrize("t", [-0.1, 1.1, math.nan])
def test_beam_splitter_rejects(t):
    with pytest.raises(ValueError):
        BeamSplitter(t)


def test_sweep_grid_validation():
    with pytest.raises(ValueError):
        SweepGrid(np.array([0.0, 0.0]), np.array([1.0, 1.0]))
    with pytest.raises(ValueError):
        SweepGrid(np.array([0.0, 1.0]), np.array([1.0, -1.0]))
    g = SweepGrid.gauss_legendre(3.0, 21)
    assert len(g) == 21 and g.weights.sum() == pytest.approx(6.0)


def test_unnormalized_transparent():
    rho = thermal(1)
    k = conditional_unnormalized(rho, VAC, BeamSplitter(1.0), 0.4)
    np.testing.assert_allclose(k(X, XP), rho(X, XP) * VAC(0.4, 0.4), rtol=1e-14)


def test_unnormalized_single_photon_rank_one():
    bs = BeamSplitter(HALF)
    for x0p in (-1.0, 0.3, 2.0):
        k = conditional_unnormalized(fock(1), VAC, bs, x0p)(X, XP)
        h0, h1 = hermite_functions(1, x0p)
        psi = hermite_functions(1, GRID)
        phi = bs.t * psi[1] * h0 + bs.r * psi[0] * h1
        np.testing.assert_allclose(k, np.outer(phi, phi), atol=1e-14)


def test_unnormalized_symmetric():
    k = conditional_unnormalized(thermal(2), fock(3), BeamSplitter(0.6), 0.7)
    np.testing.assert_allclose(k(X, XP), k(XP, X), rtol=1e-14)


def test_outcome_density_single_photon():
    bs = BeamSplitter(HALF)
    for x0p in (0.0, 0.5, 1.7):
        h0, h1 = hermite_functions(1, x0p)
        assert outcome_density(fock(1), VAC, bs, x0p) == pytest.approx(0.5 * (h0**2 + h1**2), abs=1e-12)


@pytest.mark.parametrize("rho", [thermal(1), fock(2)], ids=["thermal", "fock2"])
def test_outcome_density_transparent(rho):
    for x0p in (-1.0, 0.0, 0.8):
        assert outcome_density(rho, VAC, BeamSplitter(1.0), x0p) == pytest.approx(VAC(x0p, x0p), rel=1e-10)


@pytest.mark.parametrize(
    "rho, rho0, t",
    [(thermal(1), VAC, 0.8), (fock(1), VAC, HALF), (fock(2), thermal(1), 0.4), (thermal(5), thermal(1), 0.3)],
    ids=["thermal1-vac", "fock1-vac", "fock2-thermal", "thermal5-thermal1"],
)
def test_outcome_density_normalized(rho, rho0, t):
    assert outcome_mass(rho, rho0, BeamSplitter(t), IntegrationConfig()) == pytest.approx(1.0, abs=1e-6)


def test_conditional_state_transparent():
    rho = thermal(1)
    res = conditional_state(rho, VAC, BeamSplitter(1.0), 0.3)
    np.testing.assert_allclose(res.kernel(X, XP), rho(X, XP), atol=1e-10)


def test_conditional_state_unit_trace():
    res = conditional_state(fock(2), thermal(1), BeamSplitter(0.6), -0.9)
    assert res.density > 0
    assert kernel_trace(res.kernel).value == pytest.approx(1.0, abs=1e-8)


def test_conditional_single_photon_at_zero_is_fock1():
    res = conditional_state(fock(1), VAC, BeamSplitter(HALF), 0.0)
    np.testing.assert_allclose(res.kernel.diagonal(GRID), hermite_functions(1, GRID)[1] ** 2, atol=1e-12)


@pytest.mark.parametrize("t", [0.2, 0.6, 0.95])
@pytest.mark.parametrize("x0p", [-1.5, 0.0, 2.0])
def test_pure_gaussian_stays_pure(t, x0p):
    res = conditional_state(gaussian_schell_kernel(GaussianSchellParams(0.5)), VAC, BeamSplitter(t), x0p)
    assert kernel_purity(res.kernel) == pytest.approx(1.0, abs=1e-8)


def test_negligible_outcome():
    with pytest.raises(NegligibleOutcomeError) as info:
        conditional_state(fock(1), VAC, BeamSplitter(HALF), 9.0)
    assert info.value.x0p == 9.0
    with pytest.raises(NegligibleOutcomeError):
        single_photon_conditional_wavefunction(BeamSplitter(HALF), 9.0)


@pytest.mark.parametrize("x0p", [-2.0, 0.0, 0.5, 1.3])
def test_conditional_coherence_thermal_vacuum(x0p):
    assert conditional_coherence(thermal(1), VAC, BeamSplitter(HALF), x0p).value == pytest.approx(
        math.sqrt(math.pi), rel=1e-8
    )


def test_conditional_coherence_transparent():
    rho = fock(2)
    assert conditional_coherence(rho, thermal(1), BeamSplitter(1.0), 0.4).value == pytest.approx(
        l1_coherence(rho).value, rel=1e-9
    )


def test_conditional_coherence_single_photon_zero():
    assert conditional_coherence(fock(1), VAC, BeamSplitter(HALF), 0.0).value == pytest.approx(
        4 * math.sqrt(2 / math.pi), rel=1e-9
    )


def test_single_photon_wavefunction_matches_kernel():
    bs = BeamSplitter(0.6)
    for x0p in (-0.7, 0.4, 1.9):
        phi = single_photon_conditional_wavefunction(bs, x0p)
        k = conditional_state(fock(1), VAC, bs, x0p).kernel
        np.testing.assert_allclose(np.outer(phi(GRID), phi(GRID)), k(X, XP), atol=1e-10)
        assert abs(phi(np.array(phi.nodes))[0]) < 1e-14


def test_amplification_limit():
    c = thermal_l1(100)
    cp = conditional_coherence(thermal(100), VAC, BeamSplitter(0.5), 0.3).value
    assert 0.97 <= cp / (c / 0.5) <= 1.0


def test_locking_limit():
    bs = BeamSplitter(math.sqrt(0.75))
    target = thermal_l1(100) / bs.r
    cp = conditional_coherence(VAC, thermal(100), bs, -0.4).value
    assert target * 0.95 <= cp <= target


@pytest.mark.parametrize("t", [0.3, 0.5, 0.9])
def test_incoherent_input_limit(t):
    c = thermal_l1(200)
    cp = conditional_coherence(thermal(200), VAC, BeamSplitter(t), 0.0).value
    assert cp <= c / t * (1 + 1e-3)
    assert cp == pytest.approx(output_l1(c, thermal_l1(0), BeamSplitter(t)), rel=1e-4)


def test_average_transparent():
    rho = fock(2)
    avg = average_coherence(rho, VAC, BeamSplitter(1.0))
    assert avg.value == pytest.approx(l1_coherence(rho).value, rel=1e-6)


@pytest.mark.parametrize("ns, na, t", [(1, 0, 0.8), (0, 1, 0.5), (5, 1, HALF)])
def test_average_equals_conditional_for_gaussians(ns, na, t):
    rho, rho0, bs = thermal(ns), thermal(na), BeamSplitter(t)
    avg = average_coherence(rho, rho0, bs, default_sweep_grid(rho, rho0, 65)).value
    assert avg == pytest.approx(conditional_coherence(rho, rho0, bs, 0.7).value, rel=1e-4)


def test_average_worker_threads_agree():
    grid = SweepGrid.gauss_legendre(6.0, 33)
    a = average_coherence(thermal(1), VAC, BeamSplitter(0.8), grid)
    b = average_coherence(thermal(1), VAC, BeamSplitter(0.8), grid, workers=3)
    assert a.value == b.value


def test_coverage_error():
    narrow = SweepGrid.gauss_legendre(1.0, 33)
    with pytest.raises(CoverageError) as info:
        average_coherence(thermal(1), VAC, BeamSplitter(0.8), narrow)
    assert 0 < info.value.mass < 1
    with pytest.raises(CoverageError):
        reduced_state(fock(1), VAC, BeamSplitter(HALF), narrow)


def test_default_grid_grows_with_width():
    assert len(default_sweep_grid(fock(0), VAC)) == 129
    assert len(default_sweep_grid(fock(10), VAC)) > 129


def test_reduced_transparent():
    rho = thermal(1)
    red = reduced_state(rho, VAC, BeamSplitter(1.0))
    np.testing.assert_allclose(red(X, XP), rho(X, XP), atol=1e-8)


@pytest.mark.parametrize("t", [0.3, HALF, 0.9])
def test_reduced_single_photon_is_number_diagonal(t):
    bs = BeamSplitter(t)
    red = reduced_state(fock(1), VAC, bs)
    psi = hermite_functions(1, GRID)
    want = bs.r**2 * np.outer(psi[0], psi[0]) + bs.t**2 * np.outer(psi[1], psi[1])
    np.testing.assert_allclose(red(X, XP), want, atol=1e-10)
    np.testing.assert_allclose(red.diagonal(GRID), bs.r**2 * psi[0] ** 2 + bs.t**2 * psi[1] ** 2, atol=1e-10)


def test_thermal_average_equals_reduced():
    rho, bs = thermal(1), BeamSplitter(0.8)
    avg = average_coherence(rho, VAC, bs).value
    red = l1_coherence(reduced_state(rho, VAC, bs), IntegrationConfig(rel_tol=1e-6)).value
    assert avg == pytest.approx(red, rel=1e-3)


def test_fock_average_not_below_reduced():
    # |.| of an outcome integral never exceeds the integral of |.|.
    rho, bs = fock(1), BeamSplitter(HALF)
    avg = average_coherence(rho, VAC, bs).value
    red = l1_coherence(reduced_state(rho, VAC, bs), IntegrationConfig(rel_tol=1e-5)).value
    assert avg >= red * (1 - 1e-6)


def test_entropy_scan_endpoints():
    start = single_photon_entropy_scan(0.0)
    assert start.average == pytest.approx(0.7257914, abs=1e-6)
    assert start.reduced == pytest.approx(0.7257914, abs=1e-6)
    end = single_photon_entropy_scan(1.0)
    s1 = rel_entropy_coherence_pure(fock_wavefunction(1))
    assert end.average == pytest.approx(s1, abs=1e-6)
    assert end.reduced == pytest.approx(s1, abs=1e-6)


def test_entropy_scan_separates_at_balanced_splitter():
    scan = single_photon_entropy_scan(HALF)
    assert scan.average > scan.reduced + 1e-3
