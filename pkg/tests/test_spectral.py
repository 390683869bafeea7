import numpy as np
import pytest

from conftest import packet
from uhyp.errors import UndefinedRatioError
from uhyp.grid import Field, InitialData, mode_field, sample
from uhyp.spectral import (
    FrequencyGrid,
    SpectralField,
    forward,
    inverse,
    plancherel_ratio,
    spectral_energy,
)

PLANCHEREL = 4 * (2 * np.pi) ** 3


def gaussian_transform(freq: FrequencyGrid) -> np.ndarray:
    lam, xi, eta = freq.mesh()
    return 2 * (2 * np.pi) ** 1.5 * np.exp(-(lam**2 + xi**2 + eta**2) / 2)


def test_frequency_grid(default_grid):
    freq = FrequencyGrid(grid=default_grid)
    axes = freq.axes()
    np.testing.assert_allclose(np.diff(axes[0]), np.pi / 10)
    assert np.count_nonzero(axes[0] == 0.0) == 1
    assert axes[0][freq.zero_index] == 0.0
    assert freq.zero_plane().sum() == 64 * 64
    assert freq.cell_volume == pytest.approx((np.pi / 10) ** 3)


def test_zero_field_has_zero_spectrum(small_grid):
    zero = Field(grid=small_grid, values=np.zeros(small_grid.shape))
    assert np.all(forward(zero).coefficients == 0)
    assert np.all(inverse(forward(zero)).values == 0)


def test_forward_matches_gaussian_transform(default_grid, unit_gaussian):
    g = forward(sample(unit_gaussian, default_grid))
    assert np.max(np.abs(g.coefficients - gaussian_transform(g.freq))) < 1e-8


def test_shift_theorem(default_grid):
    shifted = InitialData(terms=(packet(carrier=(0.0, 0.0, 0.0), center=(1.0, 0.0, 0.0)),), enforce_concentration=False)
    g = forward(sample(shifted, default_grid))
    expected = gaussian_transform(g.freq) * np.exp(-1j * g.freq.lam)
    assert np.max(np.abs(g.coefficients - expected)) < 1e-8


def test_round_trip_is_exact(packet_field):
    back = inverse(forward(packet_field))
    assert np.max(np.abs(back.values - packet_field.values)) < 1e-12 * np.max(np.abs(packet_field.values))
    assert back.time == packet_field.time


def test_single_node_inversion(small_grid):
    freq = FrequencyGrid(grid=small_grid)
    index = (18, 13, 20)
    coefficients = np.zeros(freq.shape, dtype=complex)
    coefficients[index] = 1.0
    field = inverse(SpectralField(freq=freq, coefficients=coefficients))

    lam, xi, eta = (axis[k] for axis, k in zip(freq.axes(), index))
    s, x, y = small_grid.mesh()
    expected = 0.5 * (2 * np.pi) ** -3 * freq.cell_volume * np.exp(1j * (s * lam + x * xi - y * eta))
    np.testing.assert_allclose(field.values, expected, atol=1e-16)


def test_spectral_field_shape_is_checked(small_grid):
    with pytest.raises(ValueError):
        SpectralField(freq=FrequencyGrid(grid=small_grid), coefficients=np.zeros((4, 4, 4)))


def test_linearity(packet_field, default_grid, unit_gaussian):
    other = sample(unit_gaussian, default_grid)
    alpha, beta = 2 - 1j, 0.5j
    combined = forward(packet_field.with_values(alpha * packet_field.values + beta * other.values))
    separate = alpha * forward(packet_field).coefficients + beta * forward(other).coefficients
    assert np.max(np.abs(combined.coefficients - separate)) < 1e-12 * np.max(np.abs(separate))


def test_sign_convention_on_y_axis(default_grid):
    eta0 = np.pi * 6 / 10
    data = InitialData(terms=(packet(carrier=(0.0, 0.0, eta0)),), enforce_concentration=False)
    g = forward(sample(data, default_grid))
    peak = np.unravel_index(np.argmax(np.abs(g.coefficients)), g.freq.shape)
    assert g.freq.axes()[2][peak[2]] == pytest.approx(eta0)


@pytest.mark.parametrize("factor", [1.0, 5.0])
def test_plancherel_ratio_for_packet(packet_field, factor):
    scaled = packet_field.with_values(factor * packet_field.values)
    assert plancherel_ratio(scaled) == pytest.approx(PLANCHEREL, rel=1e-10)
    assert PLANCHEREL == pytest.approx(992.200854, rel=1e-9)


def test_plancherel_ratio_for_mode(small_grid):
    assert plancherel_ratio(mode_field(small_grid, (3, -1, 2))) == pytest.approx(PLANCHEREL, rel=1e-10)


def test_plancherel_ratio_of_zero_field(small_grid):
    with pytest.raises(UndefinedRatioError):
        plancherel_ratio(Field(grid=small_grid, values=np.zeros(small_grid.shape)))


def test_spectral_energy_of_zero(small_grid):
    freq = FrequencyGrid(grid=small_grid)
    assert spectral_energy(SpectralField(freq=freq, coefficients=np.zeros(freq.shape))) == 0.0
