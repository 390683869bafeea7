"""End-to-end runs of the shipped configs at default resolution"""

from pathlib import Path

import numpy as np
import pandas as pd
import pytest
from click.testing import CliRunner

from uhyp.cli import cli
from uhyp.grid import mode_field
from uhyp.oracle import direct_fourier
from uhyp.propagator import evolve
from uhyp.spectral import FrequencyGrid, forward, plancherel_ratio

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

pytestmark = pytest.mark.slow


def invoke(command, config, out, *extra):
    result = CliRunner().invoke(cli, [command, "--config", str(CONFIGS / config), "--output-dir", str(out), *extra])
    assert result.exit_code == 0, result.output
    return result


def test_default_run_conserves_norm(tmp_path):
    invoke("run", "default.ini", tmp_path)
    table = pd.read_csv(tmp_path / "diagnostics.csv")
    assert table["deviation"].max() < 1e-10
    assert len(list(tmp_path.glob("snapshot_*.bin"))) == 3


def test_fifty_random_modes(default_grid, rng):
    axes = FrequencyGrid(grid=default_grid).axes()
    half = default_grid.points[0] // 2
    worst = 0.0
    for _ in range(50):
        k = int(rng.choice([i for i in range(-half, half) if i != 0]))
        j, m = (int(i) for i in rng.integers(-half, half, size=2))
        t = float(rng.uniform(-5, 5))
        v0 = mode_field(default_grid, (k, j, m))
        lam, xi, eta = axes[0][k + half], axes[1][j + half], axes[2][m + half]
        expected = v0.values * np.exp(1j * t * (eta**2 - xi**2) / lam)
        worst = max(worst, float(np.max(np.abs(evolve(v0, t).values - expected))))
    assert worst < 1e-12


def test_transform_fidelity(default_grid, packet_field):
    g = forward(packet_field)
    assert np.max(np.abs(direct_fourier(packet_field, g.freq.axes()) - g.coefficients)) < 1e-10
    assert plancherel_ratio(packet_field) == pytest.approx(4 * (2 * np.pi) ** 3, rel=1e-10)


def test_identity_corpus(tmp_path):
    invoke("verify-identity", "default.ini", tmp_path)
    table = pd.read_csv(tmp_path / "identity.csv")
    assert len(table) >= 3
    assert (table["status"] == "PASS").all()
    isotropic = table.set_index("name").loc["isotropic"]
    assert isotropic["spherical"] == pytest.approx(np.pi**2, rel=1e-6)


def test_cross_check_config(tmp_path):
    invoke("cross-check", "cross_check.ini", tmp_path)
    table = pd.read_csv(tmp_path / "cross_check.csv")
    assert table.loc[table["t"] == 0, "abs_diff"].max() < 1e-4
    assert table.loc[table["t"] == 1, "abs_diff"].max() < 1e-3


def test_residual_and_convergence(tmp_path):
    invoke("residual", "mode.ini", tmp_path / "residual")
    assert pd.read_csv(tmp_path / "residual" / "residual.csv")["residual"].max() < 1e-3
    invoke("convergence", "convergence.ini", tmp_path / "convergence")
    orders = pd.read_csv(tmp_path / "convergence" / "convergence.csv")["order"].dropna()
    assert len(orders) == 2
    assert ((orders - 2.0).abs() <= 0.2).all()
