import numpy as np
import pytest
from pydantic import ValidationError

from conftest import packet
from uhyp.errors import ResolutionError
from uhyp.grid import (
    Field,
    GridSpec,
    InitialData,
    l2_norm,
    max_abs_diff,
    mode_field,
    sample,
    scale,
)


def test_gridspec_broadcasts_scalars(default_grid):
    assert default_grid.shape == (64, 64, 64)
    assert default_grid.ndim == 3
    assert default_grid.N == 2
    assert default_grid.size == 64**3
    np.testing.assert_allclose(default_grid.spacing, 0.3125)
    assert default_grid.axes()[0][0] == -10.0
    assert default_grid.axes()[0][32] == 0.0


def test_gridspec_per_axis_values():
    grid = GridSpec(d=2, n=1, extent=(4.0, 5.0, 6.0, 7.0), points=(8, 10, 12, 14))
    assert grid.shape == (8, 10, 12, 14)
    np.testing.assert_array_equal(grid.phase_signs, [1, 1, 1, -1])


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(d=0, n=1, extent=1.0, points=4),
        dict(d=1, n=4, extent=1.0, points=4),
        dict(d=1, n=1, extent=1.0, points=5),
        dict(d=1, n=1, extent=-1.0, points=4),
        dict(d=1, n=1, extent=(1.0, 1.0), points=4),
    ],
)
def test_gridspec_rejects_invalid(kwargs):
    with pytest.raises(ValidationError):
        GridSpec(**kwargs)


def test_field_validates_values(small_grid):
    with pytest.raises(ValidationError):
        Field(grid=small_grid, values=np.zeros(10))
    values = np.zeros(small_grid.shape, dtype=complex)
    values[0, 0, 0] = np.nan
    with pytest.raises(ValidationError):
        Field(grid=small_grid, values=values)
    flat = Field(grid=small_grid, values=np.arange(small_grid.size))
    assert flat.values.shape == small_grid.shape
    assert flat.flat()[5] == 5


def test_sample_zero_amplitude(small_grid):
    data = InitialData(terms=(packet(amplitude=0),))
    assert np.all(sample(data, small_grid).values == 0)


def test_sample_closed_form_values():
    grid = GridSpec(d=1, n=1, extent=4.0, points=16)
    field = sample(InitialData(terms=(packet(),)), grid)
    centre = (8, 8, 8)
    assert field.values[centre] == pytest.approx(1.0, abs=1e-15)
    assert field.time == 0.0
    # s = 1 sits at index 10 with h = 0.5
    assert field.values[10, 8, 8] == pytest.approx(np.exp(-0.5) * np.exp(3j), abs=1e-14)


def test_sample_is_linear_in_amplitudes(small_grid):
    a = InitialData(terms=(packet(amplitude=2 - 1j),))
    b = InitialData(terms=(packet(amplitude=1 + 0j),))
    np.testing.assert_allclose(sample(a, small_grid).values, (2 - 1j) * sample(b, small_grid).values, atol=1e-14)


def test_sample_empty_terms_is_zero(small_grid):
    assert l2_norm(sample(InitialData(), small_grid)) == 0.0


def test_concentration_rule():
    with pytest.raises(ValidationError):
        InitialData(terms=(packet(carrier=(2.0, 0.0, 0.0)),))
    InitialData(terms=(packet(carrier=(2.0, 0.0, 0.0)),), enforce_concentration=False)
    InitialData(terms=(packet(carrier=(-1.5, 0.0, 0.0), width=(2.0, 1.0, 1.0)),))


def test_packet_rejects_non_positive_width():
    with pytest.raises(ValidationError):
        packet(width=(1.0, 0.0, 1.0))


def test_resolution_error_on_coarse_grid():
    grid = GridSpec(d=1, n=1, extent=10.0, points=8)
    with pytest.raises(ResolutionError):
        sample(InitialData(terms=(packet(),)), grid)


def test_l2_norm_of_gaussian(default_grid, unit_gaussian):
    assert l2_norm(sample(unit_gaussian, default_grid)) == pytest.approx(np.pi**0.75, rel=1e-10)


def test_l2_norm_of_ones():
    grid = GridSpec(d=1, n=1, extent=1.0, points=4)
    ones = Field(grid=grid, values=np.ones(grid.shape))
    assert l2_norm(ones) == pytest.approx(np.sqrt(8.0), rel=1e-15)


def test_l2_norm_zero_and_homogeneous(packet_field):
    assert l2_norm(packet_field.with_values(np.zeros(packet_field.grid.shape))) == 0.0
    alpha = 3 - 4j
    assert l2_norm(scale(packet_field, alpha)) == pytest.approx(5 * l2_norm(packet_field), rel=1e-14)


def test_mode_field(small_grid):
    field = mode_field(small_grid, (4, -2, 1))
    np.testing.assert_allclose(np.abs(field.values), 1.0, atol=1e-15)
    lam = np.pi * 4 / 10
    s = small_grid.axes()[0]
    np.testing.assert_allclose(field.values[:, 0, 0] / field.values[0, 0, 0], np.exp(1j * lam * (s - s[0])), atol=1e-13)
    with pytest.raises(ValueError):
        mode_field(small_grid, (16, 0, 0))


def test_max_abs_diff(small_grid, packet_data):
    field = sample(packet_data, small_grid)
    assert max_abs_diff(field, field) == 0.0
    with pytest.raises(ValueError):
        max_abs_diff(field, sample(packet_data, GridSpec(d=1, n=1, extent=10.0, points=34)))
