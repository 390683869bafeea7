from pathlib import Path

import numpy as np
import pytest

from uhyp.config import central_node_indices, load_run_config, parse_run_config, parse_sections
from uhyp.errors import ConfigError
from uhyp.propagator import ZeroPlaneRule

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

MINIMAL = """\
[grid]
d = 1
n = 1
extent = 10
points = 16

[packet]
center = 0
width = 1
carrier = 3, 0, 0
"""


def test_default_config_loads():
    config = load_run_config(CONFIGS / "default.ini")
    assert config.grid.points == (64, 64, 64)
    assert config.grid.extent == (10.0, 10.0, 10.0)
    assert config.run.times == (0.5, 1.0, 2.0)
    assert config.policy.zero_plane is ZeroPlaneRule.ZERO_OUT
    assert config.output.format == "bin"
    assert len(config.packets) == 1
    assert config.packets[0].carrier == (3.0, 0.0, 0.0)
    assert config.text.startswith("# Desk-scale run")


def test_every_shipped_config_parses():
    for path in sorted(CONFIGS.glob("*.ini")):
        load_run_config(path)


def test_scalar_packet_values_broadcast():
    config = parse_run_config(MINIMAL)
    packet = config.packets[0]
    assert packet.center == (0.0, 0.0, 0.0)
    assert packet.width == (1.0, 1.0, 1.0)
    assert config.run.times == (0.0,)


def test_single_time_is_a_tuple():
    config = parse_run_config(MINIMAL + "\n[run]\ntimes = 1.5\n")
    assert config.run.times == (1.5,)


def test_missing_points_reports_section_line():
    text = "# header\n[grid]\nd = 1\nn = 1\nextent = 10\n"
    with pytest.raises(ConfigError) as error:
        parse_run_config(text)
    assert error.value.line == 2
    assert "points" in str(error.value)


def test_bad_value_reports_its_line():
    text = MINIMAL.replace("points = 16", "points = sixteen")
    with pytest.raises(ConfigError) as error:
        parse_run_config(text)
    assert error.value.line == 5
    assert str(error.value).startswith("line 5:")


def test_bad_policy_value():
    with pytest.raises(ConfigError) as error:
        parse_run_config(MINIMAL + "\n[policy]\nzero_plane = ignore\n")
    assert error.value.line == 13


@pytest.mark.parametrize(
    "text, line",
    [
        ("d = 1\n", 1),
        ("[grid]\nd = 1\nd = 2\n", 3),
        ("[grid]\n[grid]\n", 2),
        ("[grid\n", 1),
        ("[grid]\nnonsense\n", 2),
    ],
)
def test_malformed_lines(text, line):
    with pytest.raises(ConfigError) as error:
        parse_sections(text)
    assert error.value.line == line


def test_unknown_section():
    with pytest.raises(ConfigError) as error:
        parse_run_config(MINIMAL + "\n[extras]\nfoo = 1\n")
    assert "unknown section" in str(error.value)
    assert error.value.line == 12


def test_missing_grid():
    with pytest.raises(ConfigError, match="missing required section"):
        parse_run_config("[run]\ntimes = 1\n")


def test_mode_and_packets_conflict():
    with pytest.raises(ConfigError, match="not both"):
        parse_run_config(MINIMAL + "\n[mode]\nindices = 1, 2, 0\n")


def test_mode_config_builds_a_plane_wave():
    config = load_run_config(CONFIGS / "mode.ini")
    field = config.initial_field()
    assert field.values.shape == config.grid.shape
    np.testing.assert_allclose(np.abs(field.values), 1.0)


def test_odd_points_rejected():
    with pytest.raises(ConfigError):
        parse_run_config(MINIMAL.replace("points = 16", "points = 15"))


def test_verify_resolution_keys_are_routed():
    config = parse_run_config(
        MINIMAL + "\n[verify]\ntolerance = 1e-4\nbranch_tolerance = 5e-3\nsphere_nodes = 160\nmu_panels = 4\nlambda_nodes = 24\n"
    )
    assert config.verify.tolerance == 1e-4
    assert config.verify.branch_tolerance == 5e-3
    assert config.verify.resolution.lambda_nodes == 24
    assert config.verify.resolution.sphere_nodes == 160
    assert config.verify.resolution.mu_panels == 4
    assert config.verify.resolution.radial_nodes == 16


def test_load_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_run_config(tmp_path / "absent.ini")


def test_central_node_indices(default_grid):
    chosen = central_node_indices(default_grid, 2.5, 20, seed=0)
    assert chosen.size == 20
    assert np.unique(chosen).size == 20
    coords = np.stack(np.unravel_index(chosen, default_grid.shape), axis=-1)
    axes = default_grid.axes()
    for row in coords:
        assert all(abs(axes[k][i]) <= 2.5 for k, i in enumerate(row))
    np.testing.assert_array_equal(chosen, central_node_indices(default_grid, 2.5, 20, seed=0))
