"""Grids, spectral derivatives and trigonometric immersions."""

import math

import numpy as np
import pytest

from paneitzlab.fourier import (
    FourierImmersion,
    FourierTerm,
    TorusGrid,
    band_project,
    clifford_torus,
    donut_torus,
    pad,
    spectral_derivative,
    truncate,
)
from paneitzlab.geometry import curvature_point, induced_metric

RNG = np.random.default_rng(99)


# ------------------------------------------------------------------- grids

def test_grid_shapes_and_points():
    grid = TorusGrid((8, 12))
    assert grid.shape == (8, 12)
    assert grid.size == 96
    pts = grid.points()
    assert pts.shape == (8, 12, 2)
    assert pts[1, 0, 0] == pytest.approx(2 * math.pi / 8)
    assert pts[0, 3, 1] == pytest.approx(3 * 2 * math.pi / 12)


@pytest.mark.parametrize("bad", [(4,), (8, 6), (0, 8)])
def test_small_grids_refused(bad):
    with pytest.raises(ValueError):
        TorusGrid(bad)


def test_fine_grid_is_three_halves():
    grid = TorusGrid((8, 16))
    assert grid.fine().shape == (12, 24)


def test_pad_truncate_are_adjoint():
    coarse = TorusGrid((8, 8))
    fine = coarse.fine()
    u = RNG.standard_normal(coarse.shape)
    v = RNG.standard_normal(fine.shape)
    pu = pad(u, coarse, fine)
    tv = truncate(v, coarse, fine)
    # quadrature pairing with each grid's cell volume
    lhs = np.sum(pu * v) * (2 * math.pi) ** 2 / fine.size
    rhs = np.sum(u * tv) * (2 * math.pi) ** 2 / coarse.size
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_truncate_undoes_pad():
    coarse = TorusGrid((8, 8, 8))
    fine = coarse.fine()
    u = band_project(RNG.standard_normal(coarse.shape), coarse)
    assert np.allclose(truncate(pad(u, coarse, fine), coarse, fine), u, atol=1e-12)


def test_band_project_idempotent_and_kills_nyquist():
    grid = TorusGrid((8, 8))
    u = RNG.standard_normal(grid.shape)
    bu = band_project(u, grid)
    assert np.allclose(band_project(bu, grid), bu, atol=1e-13)
    theta = grid.points()
    sawtooth = np.cos(4 * theta[..., 0])  # Nyquist mode of an 8-grid
    assert np.max(np.abs(band_project(sawtooth, grid))) <= 1e-12


def test_spectral_derivative_exact_on_band():
    grid = TorusGrid((16, 16))
    theta = grid.points()
    u = np.sin(3 * theta[..., 0]) * np.cos(2 * theta[..., 1])
    du0 = spectral_derivative(u, 0, grid)
    du1 = spectral_derivative(u, 1, grid)
    assert np.allclose(du0, 3 * np.cos(3 * theta[..., 0]) * np.cos(2 * theta[..., 1]), atol=1e-12)
    assert np.allclose(du1, -2 * np.sin(3 * theta[..., 0]) * np.sin(2 * theta[..., 1]), atol=1e-12)


def test_spectral_derivative_batched_axes():
    grid = TorusGrid((8, 8))
    theta = grid.points()
    stack = np.stack([np.sin(theta[..., 0]), np.cos(2 * theta[..., 1])])
    d = spectral_derivative(stack, 0, grid)
    assert d.shape == stack.shape
    assert np.allclose(d[0], np.cos(theta[..., 0]), atol=1e-12)
    assert np.allclose(d[1], 0.0, atol=1e-12)


def test_nyquist_mode_derivative_annihilated():
    grid = TorusGrid((8,))
    theta = grid.points()[..., 0]
    saw = np.cos(4 * theta)
    assert np.max(np.abs(spectral_derivative(saw, 0, grid))) <= 1e-12


# -------------------------------------------------------------- immersions

def test_clifford_jet_matches_closed_form():
    radii = (1.0, 0.5, 2.0)
    imm = clifford_torus(radii)
    pts = RNG.uniform(0, 2 * math.pi, size=(6, 3))
    jet = imm.jet(pts)
    assert jet.ambient_dim == 6
    for i, r in enumerate(radii):
        assert np.allclose(jet.y[:, 2 * i], r * np.cos(pts[:, i]), atol=1e-14)
        assert np.allclose(jet.y[:, 2 * i + 1], r * np.sin(pts[:, i]), atol=1e-14)
    metric = induced_metric(jet)
    assert np.allclose(metric.g, np.diag(np.array(radii) ** 2), atol=1e-13)


def test_jet_derivatives_match_finite_differences():
    base = clifford_torus((1.0, 1.0))
    bumped = base.perturbed([FourierTerm(k=(2, 1), cos=(0.1, 0.0, 0.05, 0.0),
                                         sin=(0.0, 0.07, 0.0, 0.0))])
    p0 = np.array([[0.7, 1.9]])
    h = 1e-4  # balances truncation (h^2) against cancellation in the 2nd difference
    jet = bumped.jet(p0)
    for axis in range(2):
        dp = np.zeros((1, 2))
        dp[0, axis] = h
        fd = (bumped.jet(p0 + dp).y - bumped.jet(p0 - dp).y) / (2 * h)
        assert np.allclose(jet.dy[0, :, axis], fd[0], atol=1e-6)
        fd2 = (bumped.jet(p0 + dp).y - 2 * jet.y + bumped.jet(p0 - dp).y) / h**2
        assert np.allclose(jet.d2y[0, :, axis, axis], fd2[0], atol=1e-6)


def test_sphere_deviation_zero_only_on_unit_products():
    grid = TorusGrid((16, 16))
    on_sphere = clifford_torus((math.sqrt(0.5), math.sqrt(0.5)))
    off_sphere = clifford_torus((1.0, 1.0))
    assert on_sphere.sphere_deviation(grid) <= 1e-12
    assert off_sphere.sphere_deviation(grid) == pytest.approx(1.0, rel=1e-12)


def test_perturbed_leaves_base_untouched():
    base = clifford_torus((1.0, 1.0))
    term = FourierTerm(k=(1, 1), cos=(0.2, 0, 0, 0), sin=(0, 0, 0, 0))
    bumped = base.perturbed([term])
    assert len(bumped.terms) == len(base.terms) + 1
    assert len(base.terms) == 2  # one cos/sin pair per circle factor


def test_donut_curvature_against_surface_formula():
    R, r = 2.0, 0.5
    imm = donut_torus(R, r)
    pts = RNG.uniform(0, 2 * math.pi, size=(40, 2))
    jet = imm.jet(pts)
    metric = induced_metric(jet)
    curv = curvature_point(jet, metric)
    # scalar curvature of a torus of revolution: 2 cos(v) / (r (R + r cos v))
    v = pts[:, 1]
    expected = 2 * np.cos(v) / (r * (R + r * np.cos(v)))
    assert np.allclose(curv.scalar, expected, rtol=1e-9, atol=1e-11)


def test_fourier_term_validation():
    with pytest.raises(ValueError):
        FourierTerm(k=(1, 0), cos=(1.0,), sin=(0.0, 0.0))     # ragged coefficients
    with pytest.raises(ValueError):
        FourierTerm(k=(1.5, 0), cos=(1.0,), sin=(0.0,))       # fractional wavenumber
    with pytest.raises(ValueError):
        FourierImmersion(2, [FourierTerm(k=(1,), cos=(0.1, 0.0), sin=(0.0, 0.0))])
    with pytest.raises(ValueError):
        FourierImmersion(2, [])
