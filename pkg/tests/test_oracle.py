import numpy as np
import pytest
from pydantic import ValidationError

from conftest import packet
from uhyp.grid import Field, InitialData, sample
from uhyp.oracle import (
    PlaneWave,
    direct_fourier,
    direct_inverse_fourier,
    gaussian_spectrum,
    gaussian_spectrum_on_grid,
    plane_wave_field,
    plane_wave_symbol,
    plane_wave_value,
)
from uhyp.propagator import evolve
from uhyp.spectral import FrequencyGrid, forward, inverse


def test_plane_wave_values():
    pw = PlaneWave(lam=1.0, xi=(0.0,), eta=(1.0,))
    assert plane_wave_value(pw, 0.0, 0.0, [0.0], [0.0]) == pytest.approx(1.0)
    assert plane_wave_value(pw, np.pi, 0.0, [0.0], [0.0]) == pytest.approx(-1.0, abs=1e-15)


def test_plane_wave_needs_nonzero_lambda():
    with pytest.raises(ValidationError):
        PlaneWave(lam=0.0, xi=(1.0,), eta=(0.0,))


def test_plane_wave_symbol_vanishes(rng):
    for _ in range(20):
        pw = PlaneWave(lam=float(rng.uniform(0.2, 4)) * rng.choice([-1, 1]), xi=tuple(rng.normal(size=2)), eta=tuple(rng.normal(size=1)))
        scale = 1 + pw.xi_sq + pw.eta_sq
        assert abs(plane_wave_symbol(pw)) < 1e-14 * scale


def test_plane_wave_group_law(rng):
    pw = PlaneWave(lam=-1.3, xi=(0.4,), eta=(1.1,))
    for t1, t2 in rng.uniform(-5, 5, size=(5, 2)):
        composed = plane_wave_value(pw, t1, 0.2, [0.3], [-0.7]) * np.exp(1j * t2 * pw.rho)
        assert plane_wave_value(pw, t1 + t2, 0.2, [0.3], [-0.7]) == pytest.approx(composed, abs=1e-12)


def test_plane_wave_field_is_evolved_by_propagator(small_grid):
    freq = FrequencyGrid(grid=small_grid)
    lam, xi, eta = (axis[k] for axis, k in zip(freq.axes(), (22, 13, 18)))
    pw = PlaneWave(lam=lam, xi=(xi,), eta=(eta,))
    evolved = evolve(plane_wave_field(pw, small_grid, 0.0), 2.5)
    assert np.max(np.abs(evolved.values - plane_wave_field(pw, small_grid, 2.5).values)) < 1e-12


def test_direct_fourier_of_zero(small_grid):
    zero = Field(grid=small_grid, values=np.zeros(small_grid.shape))
    assert direct_fourier(zero, (1.0, 0.5, -0.5)) == 0


def test_direct_fourier_matches_fft(default_grid, packet_field):
    g = forward(packet_field)
    dense = direct_fourier(packet_field, g.freq.axes())
    assert dense.shape == g.freq.shape
    assert np.max(np.abs(dense - g.coefficients)) < 1e-10


def test_direct_fourier_gaussian_closed_form(default_grid, unit_gaussian):
    value = direct_fourier(sample(unit_gaussian, default_grid), (1.0, 0.0, 0.0))
    assert value == pytest.approx(2 * (2 * np.pi) ** 1.5 * np.exp(-0.5), abs=1e-8)


def test_direct_fourier_mixed_scalar_and_vector(default_grid, packet_field):
    freq = np.linspace(2.0, 4.0, 5)
    line = direct_fourier(packet_field, (freq, 0.0, 0.0))
    assert line.shape == (5,)
    assert line[2] == pytest.approx(direct_fourier(packet_field, (3.0, 0.0, 0.0)), abs=1e-12)


def test_gaussian_spectrum_closed_forms(unit_gaussian):
    assert gaussian_spectrum(unit_gaussian, [0.0, 0.0, 0.0], d=1) == pytest.approx(2 * (2 * np.pi) ** 1.5)

    carried = InitialData(terms=(packet(carrier=(3.0, 0.0, 0.0)),))
    w = np.array([[3.5, 0.2, -0.4], [2.0, 1.0, 0.0]])
    shifted = w - np.array([3.0, 0.0, 0.0])
    np.testing.assert_allclose(gaussian_spectrum(carried, w, d=1), gaussian_spectrum(unit_gaussian, shifted, d=1), atol=1e-14)

    centred = InitialData(terms=(packet(carrier=(0.0, 0.0, 0.0), center=(0.7, 0.0, 0.0)),), enforce_concentration=False)
    np.testing.assert_allclose(
        gaussian_spectrum(centred, w, d=1),
        gaussian_spectrum(unit_gaussian, w, d=1) * np.exp(-1j * w[:, 0] * 0.7),
        atol=1e-13,
    )


def test_oracle_triangle(default_grid):
    data = InitialData(terms=(packet(center=(0.5, -0.3, 0.8), carrier=(3.0, 1.0, -0.5)),))
    field = sample(data, default_grid)
    fast = forward(field)
    closed = gaussian_spectrum_on_grid(data, fast.freq)
    assert np.max(np.abs(fast.coefficients - closed.coefficients)) < 1e-8

    points = np.array([[3.1, 0.9, -0.4], [2.2, 1.5, 0.3]])
    dense = np.array([direct_fourier(field, tuple(p)) for p in points])
    np.testing.assert_allclose(dense, gaussian_spectrum(data, points, d=1), atol=1e-8)


def test_direct_inverse_matches_fft_inverse(small_grid, packet_data):
    g = forward(sample(packet_data, small_grid))
    nodes = direct_inverse_fourier(g)
    assert np.max(np.abs(nodes.values - inverse(g).values)) < 1e-12

    s, x, y = (axis[[3, 17]] for axis in small_grid.axes())
    points = np.column_stack([s, x, y])
    at_points = direct_inverse_fourier(g, points)
    np.testing.assert_allclose(at_points, [nodes.values[3, 3, 3], nodes.values[17, 17, 17]], atol=1e-12)
    assert direct_inverse_fourier(g, points[0]) == pytest.approx(nodes.values[3, 3, 3], abs=1e-12)
