"""Text and binary emitters."""

import numpy as np
import pytest

from doubletripod import (EffectiveHamiltonianSpec, GridSpec, LaserConfig,
                          analytic_gauge_fields, dispersion, evolve_reduced,
                          gaussian_packet, radial_k_grid)
from doubletripod.output import (read_snapshot, write_columns, write_dispersion,
                                 write_evolution_report, write_snapshot)


def test_write_columns_parseable(tmp_path):
    path = tmp_path / "table.txt"
    write_columns(path, ["a", "b"], [np.array([1.0, 2.0]), np.array([3.0, 4.0])],
                  header_lines=["demo table"])
    text = path.read_text().splitlines()
    assert text[0] == "# demo table"
    assert text[1].startswith("# columns: a b")
    data = np.loadtxt(path)
    np.testing.assert_allclose(data, [[1.0, 3.0], [2.0, 4.0]])


def test_write_evolution_report(tmp_path):
    cfg = LaserConfig.default(omega=1.0)
    spec = EffectiveHamiltonianSpec(fields=analytic_gauge_fields(cfg), mass=1.0)
    grid = GridSpec(nx=64, ny=64, lx=40.0, ly=40.0, dt=0.05, n_steps=20,
                    sample_stride=5)
    rep = evolve_reduced(spec, gaussian_packet(grid, (0, 0), 2.6, (0.2, 0), (1, 0)))
    path = tmp_path / "observables.txt"
    write_evolution_report(path, rep, header_lines=["units: recoil"])
    data = np.loadtxt(path)
    assert data.shape[0] == len(rep.times)
    np.testing.assert_allclose(data[:, 0], rep.times, rtol=1e-12)
    np.testing.assert_allclose(data[:, 3], rep.norm, rtol=1e-12)


def test_write_dispersion_footer(tmp_path):
    cfg = LaserConfig.default(omega=1.0)
    spec = EffectiveHamiltonianSpec(fields=analytic_gauge_fields(cfg), mass=1.0)
    result = dispersion(spec, radial_k_grid(1.0, n_radial=200, n_angles=4),
                        kappa=1.0)
    path = tmp_path / "bands.txt"
    write_dispersion(path, result)
    lines = path.read_text().splitlines()
    footer = [ln for ln in lines if ln.startswith("# ring_radius")]
    assert len(footer) == 1
    assert float(footer[0].split("=")[1]) == pytest.approx(0.25, abs=1e-2)


def test_snapshot_roundtrip(tmp_path):
    rng = np.random.default_rng(0)
    psi = rng.normal(size=(5, 8, 16)) + 1j * rng.normal(size=(5, 8, 16))
    path = tmp_path / "state.snap"
    write_snapshot(path, psi, lx=12.5, ly=25.0, time=3.75)
    back, lx, ly, time = read_snapshot(path)
    assert (lx, ly, time) == (12.5, 25.0, 3.75)
    np.testing.assert_array_equal(back, psi)


def test_snapshot_rejects_garbage(tmp_path):
    path = tmp_path / "bad.snap"
    path.write_bytes(b"not a snapshot header at all........")
    with pytest.raises(ValueError):
        read_snapshot(path)
