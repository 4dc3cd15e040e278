"""Split-step propagation: packets, unitarity, splitting order, experiments."""

from dataclasses import replace

import numpy as np
import pytest

from doubletripod import (DegenerateCoupling, EffectiveHamiltonianSpec, FullField,
                          GridSpec, LaserConfig, PacketTooNarrow,
                          PacketTouchesBoundary, SpinorField, UnstableStep,
                          analytic_gauge_fields, band_packet, compare_adiabatic,
                          dominant_frequency, dressed_frame, evolve_full,
                          evolve_reduced, field_inner, field_norm, frame_on_grid,
                          gaussian_packet, harmonic_trap, map_reduced_to_full,
                          overlap, project_full_to_reduced, ring_packet,
                          zitterbewegung_experiment)
from doubletripod import GaugeFields
from doubletripod.dynamics import (momentum_grids, packet_mean_band_splitting,
                                   position_grids)
from doubletripod.geometry import HBAR

CFG = LaserConfig.default()                       # omega = 20 E_r, kappa = m = 1
FIELDS = analytic_gauge_fields(CFG)
SPEC = EffectiveHamiltonianSpec(fields=FIELDS, mass=1.0)


def zero_spec():
    z = np.zeros((2, 2), dtype=complex)
    return EffectiveHamiltonianSpec(fields=GaugeFields(a_x=z, a_y=z, phi=z),
                                    mass=1.0)


def small_grid(**kw):
    defaults = dict(nx=64, ny=64, lx=40.0, ly=40.0, dt=0.02, n_steps=50,
                    sample_stride=10)
    defaults.update(kw)
    return GridSpec(**defaults)


def l2_distance(a, b):
    return np.sqrt((np.abs(a.psi - b.psi) ** 2).sum() * a.grid.cell_area)


# ------------------------------------------------------------------ grids

def test_grid_requires_powers_of_two():
    with pytest.raises(ValueError):
        GridSpec(nx=48, ny=64, lx=10, ly=10, dt=0.1, n_steps=1)


def test_momentum_grid_is_fourier_dual():
    g = small_grid()
    kx, ky = momentum_grids(g)
    assert kx.max() == pytest.approx(np.pi / g.dx - 2 * np.pi / g.lx)
    assert kx.min() == pytest.approx(-np.pi / g.dx)


# ---------------------------------------------------------------- packets

def test_gaussian_packet_normalized():
    pkt = gaussian_packet(small_grid(), (0, 0), 2.6, (0.3, 0), (1, 1j))
    assert field_norm(pkt) == pytest.approx(1.0, abs=1e-12)


def test_gaussian_packet_momentum_width():
    # second moment of |psi(k)|^2 gives width 1/w in the same convention
    g = GridSpec(nx=128, ny=128, lx=80.0, ly=80.0, dt=0.1, n_steps=1)
    w = 5.0
    pkt = gaussian_packet(g, (0, 0), w, (0, 0), (1, 0))
    kx, _ = momentum_grids(g)
    weight = (np.abs(np.fft.fft2(pkt.psi, axes=(-2, -1))) ** 2).sum(axis=0)
    k2 = (weight * kx**2).sum() / weight.sum()
    assert np.sqrt(2.0 * k2) == pytest.approx(1.0 / w, rel=0.02)


def test_gaussian_packet_initial_spin():
    pkt = gaussian_packet(small_grid(), (0, 0), 2.6, (0, 0), (1, 0))
    rep = evolve_reduced(SPEC, pkt)
    np.testing.assert_allclose(rep.spin_expectations[0], [0, 0, 1], atol=1e-12)


def test_packet_too_narrow():
    with pytest.raises(PacketTooNarrow):
        gaussian_packet(small_grid(), (0, 0), 1.0, (0, 0), (1, 0))


def test_packet_touches_boundary():
    with pytest.raises(PacketTouchesBoundary):
        gaussian_packet(small_grid(), (15.0, 0), 2.6, (0, 0), (1, 0))


def test_ring_packet_momentum_ring():
    g = GridSpec(nx=128, ny=128, lx=120.0, ly=120.0, dt=0.1, n_steps=1)
    pkt = ring_packet(g, k_radius=0.7, width=8.0, spin=(1, 1))
    assert field_norm(pkt) == pytest.approx(1.0, abs=1e-12)
    kx, ky = momentum_grids(g)
    weight = (np.abs(np.fft.fft2(pkt.psi, axes=(-2, -1))) ** 2).sum(axis=0)
    kmag = np.hypot(kx, ky)
    mean_k = (weight * kmag).sum() / weight.sum()
    mean_kvec = np.array([(weight * kx).sum(), (weight * ky).sum()]) / weight.sum()
    assert mean_k == pytest.approx(0.7, rel=0.02)
    np.testing.assert_allclose(mean_kvec, [0, 0], atol=1e-10)


# ------------------------------------------------------------ free particle

def test_free_drift_ehrenfest():
    # box wide enough that the drifting tails never reach the boundary
    g = GridSpec(nx=128, ny=128, lx=60.0, ly=60.0, dt=0.05, n_steps=200,
                 sample_stride=50)
    k0 = np.array([0.4, 0.15])
    pkt = gaussian_packet(g, (0.0, 0.0), 2.6, k0, (1, 0))
    rep = evolve_reduced(zero_spec(), pkt)
    expected = HBAR * np.outer(rep.times, k0)
    err = np.abs(rep.mean_position - expected).max()
    assert err / np.abs(expected).max() < 1e-8


# ------------------------------------------------------------- conservation

def test_norm_conservation_1000_steps_reduced():
    g = small_grid(n_steps=1000, sample_stride=200)
    pkt = gaussian_packet(g, (0, 0), 2.6, (0.2, 0.1), (1, 0.3))
    rep = evolve_reduced(SPEC, pkt)
    assert np.abs(rep.norm - rep.norm[0]).max() <= 1e-10


def test_norm_conservation_1000_steps_full():
    g = small_grid(dt=0.01, n_steps=1000, sample_stride=200)
    full0 = map_reduced_to_full(gaussian_packet(g, (0, 0), 2.6, (0.2, 0), (1, 0)),
                                CFG)
    rep = evolve_full(CFG, full0)
    assert np.abs(rep.norm - rep.norm[0]).max() <= 1e-10


def test_populations_sum_to_norm():
    g = small_grid(n_steps=100)
    pkt = gaussian_packet(g, (0, 0), 2.6, (0.3, 0), (0.6, 0.8j))
    rep = evolve_reduced(SPEC, pkt)
    np.testing.assert_allclose(rep.populations.sum(axis=1), rep.norm, atol=1e-10)
    full = evolve_full(CFG, map_reduced_to_full(pkt, CFG))
    np.testing.assert_allclose(full.populations.sum(axis=1), full.norm, atol=1e-10)


def test_energy_conservation_reduced():
    g = small_grid(dt=0.002, n_steps=200, sample_stride=40)
    spec = EffectiveHamiltonianSpec(fields=FIELDS, mass=1.0,
                                    external_potential=harmonic_trap(1.0, 0.3))
    rep = evolve_reduced(spec, gaussian_packet(g, (0, 0), 2.6, (0.3, 0), (1, 0)))
    drift = np.abs(rep.energy / rep.energy[0] - 1.0).max()
    assert drift <= 1e-8


def test_energy_conservation_full():
    g = small_grid(dt=5e-4, n_steps=200, sample_stride=40)
    full0 = map_reduced_to_full(gaussian_packet(g, (0, 0), 2.6, (0.3, 0), (1, 0)),
                                CFG)
    rep = evolve_full(CFG, full0)
    drift = np.abs(rep.energy / rep.energy[0] - 1.0).max()
    assert drift <= 1e-8


# ------------------------------------------------------------ splitting order

def strang_ratio(run, grid):
    finals = {}
    for div in (1, 2, 8):
        g = replace(grid, dt=grid.dt / div, n_steps=grid.n_steps * div)
        finals[div] = run(g)
    e1 = l2_distance(finals[1], finals[8])
    e2 = l2_distance(finals[2], finals[8])
    return e1 / e2


def test_strang_order_reduced_with_trap():
    g = small_grid(dt=0.04, n_steps=100, sample_stride=100)
    spec = EffectiveHamiltonianSpec(fields=FIELDS, mass=1.0,
                                    external_potential=harmonic_trap(1.0, 0.3))
    pkt = gaussian_packet(g, (0, 0), 2.6, (0.3, 0.1), (1, 0.5))

    def run(grid):
        return evolve_reduced(spec, SpinorField(pkt.psi.copy(), grid)).final_state

    assert strang_ratio(run, g) == pytest.approx(4.0, rel=0.2)


def test_strang_order_full():
    g = small_grid(dt=0.01, n_steps=100, sample_stride=100)
    full0 = map_reduced_to_full(gaussian_packet(g, (0, 0), 2.6, (0.3, 0), (1, 0)),
                                CFG)

    def run(grid):
        return evolve_full(CFG, FullField(full0.psi.copy(), grid)).final_state

    assert strang_ratio(run, g) == pytest.approx(4.0, rel=0.2)


# ---------------------------------------------------------------- stability

def test_unstable_step_reduced():
    g = small_grid(dt=10.0)
    pkt = gaussian_packet(g, (0, 0), 2.6, (0, 0), (1, 0))
    with pytest.raises(UnstableStep):
        evolve_reduced(SPEC, pkt)


def test_unstable_step_full():
    g = small_grid(dt=1.0)
    full0 = map_reduced_to_full(gaussian_packet(g, (0, 0), 2.6, (0, 0), (1, 0)),
                                CFG)
    with pytest.raises(UnstableStep):
        evolve_full(CFG, full0)


def test_evolve_full_rejects_zero_omega():
    g = small_grid()
    cfg0 = LaserConfig(omega=0.0, kappa=1.0, wavevectors=CFG.wavevectors,
                       phases=CFG.phases, mass=1.0)
    field = FullField(np.zeros((5, g.nx, g.ny), dtype=complex), g)
    with pytest.raises(DegenerateCoupling):
        evolve_full(cfg0, field)


# ------------------------------------------------------- frame and mapping

def test_frame_on_grid_matches_pointwise():
    g = small_grid(nx=16, ny=16, lx=10.0, ly=10.0)
    w = frame_on_grid(CFG, g)
    x, y = position_grids(g)
    rng = np.random.default_rng(2)
    for _ in range(10):
        i, j = rng.integers(0, 16, 2)
        u = dressed_frame(CFG, [x[i, j], y[i, j]]).unitary
        np.testing.assert_allclose(w[:, :, i, j], u, atol=1e-13)


def test_map_reduced_to_full_preserves_norm_and_roundtrips():
    g = small_grid()
    pkt = gaussian_packet(g, (0, 0), 2.6, (0.4, -0.2), (0.8, 0.6j))
    full = map_reduced_to_full(pkt, CFG)
    assert field_norm(full) == pytest.approx(1.0, abs=1e-12)
    back = project_full_to_reduced(full, CFG)
    assert l2_distance(back, pkt) < 1e-12


def test_mapped_overlap_is_unity_at_t0():
    g = small_grid()
    pkt = gaussian_packet(g, (0, 0), 2.6, (0.2, 0.1), (1, 0.4))
    a = map_reduced_to_full(pkt, CFG)
    b = map_reduced_to_full(pkt, CFG)
    assert overlap(a, b) == pytest.approx(1.0, abs=1e-12)


# --------------------------------------------------------------- full runs

def test_ground_manifold_fidelity_dressed_packet():
    # |1,+>-dressed packet at Omega = 20 E_r stays in the ground manifold
    g = small_grid(dt=0.01, n_steps=2000, sample_stride=400)   # t = 10 hbar/E_r
    full0 = map_reduced_to_full(gaussian_packet(g, (0, 0), 2.6, (0, 0), (1, 0)),
                                CFG)
    rep = evolve_full(CFG, full0)
    assert rep.times[-1] == pytest.approx(10.0 / CFG.recoil_energy)
    assert rep.ground_fidelity.min() >= 0.99


def test_dark_state_leakage_small_at_large_omega():
    # |D>-dressed rest packet at Omega = 50 E_r leaks less than 1e-2
    cfg = LaserConfig.default(omega=50 * 0.5)
    g = small_grid(dt=0.002, n_steps=10000, sample_stride=2000)  # t = 10 hbar/E_r
    w = frame_on_grid(cfg, g)
    envelope = gaussian_packet(g, (0, 0), 2.6, (0, 0), (1, 0)).psi[0]
    full0 = FullField(w[:, 2] * envelope[None], g)
    rep = evolve_full(cfg, full0)
    dark_pop = rep.populations[:, 2] / rep.norm
    assert dark_pop[0] == pytest.approx(1.0, abs=1e-12)
    assert 1.0 - dark_pop.min() <= 1e-2


def test_dark_state_leakage_decreases_with_omega():
    leaks = []
    for omega_er in (5.0, 50.0):
        cfg = LaserConfig.default(omega=omega_er * 0.5)
        g = small_grid(dt=0.002, n_steps=2500, sample_stride=500)
        w = frame_on_grid(cfg, g)
        envelope = gaussian_packet(g, (0, 0), 2.6, (0, 0), (1, 0)).psi[0]
        rep = evolve_full(cfg, FullField(w[:, 2] * envelope[None], g))
        leaks.append(1.0 - (rep.populations[:, 2] / rep.norm).min())
    assert leaks[1] < leaks[0]


# ------------------------------------------------------------- experiments

def test_group_velocity_of_band_packet():
    # a lower-band packet moves at the ring-dispersion group velocity;
    # the momentum spread 1/(w sqrt 2) must be narrow against |k0|
    g = GridSpec(nx=128, ny=128, lx=200.0, ly=200.0, dt=0.2, n_steps=150,
                 sample_stride=50)
    k0 = np.array([0.45, 0.0])
    pkt = band_packet(g, SPEC, (0.0, 0.0), 12.0, k0, band=0)
    rep = evolve_reduced(SPEC, pkt)
    v_measured = (rep.mean_position[-1] - rep.mean_position[0]) / rep.times[-1]
    # d/dk of (hbar^2/2m)(k^2 - kappa k / 2) at |k| = k0
    v_expected = HBAR * (k0[0] - 0.25)
    assert v_measured[0] == pytest.approx(v_expected, rel=0.02)
    assert abs(v_measured[1]) < 0.02 * abs(v_expected)


def test_compare_adiabatic_monotone():
    g = GridSpec(nx=64, ny=64, lx=40.0, ly=40.0, dt=0.02, n_steps=200,
                 sample_stride=200)                             # t = 2 hbar/E_r
    pkt = gaussian_packet(g, (0, 0), 2.6, (0.2, 0), (1, 0))
    comp = compare_adiabatic(CFG, g, pkt, [2.0, 20.0, 100.0])
    assert np.all(np.diff(comp.overlaps) >= -1e-12)
    assert comp.overlaps[-1] >= 0.999


def test_zitterbewegung_frequency_matches_band_splitting():
    g = GridSpec(nx=256, ny=256, lx=400.0, ly=400.0, dt=0.25, n_steps=300,
                 sample_stride=1)
    res = zitterbewegung_experiment(CFG, g)
    assert res.relative_error <= 0.10
    # the rest packet oscillates around a slowly drifting center
    x = res.report.mean_position[:, 0]
    assert np.ptp(x) > 0.1


def test_dominant_frequency_pure_tone():
    t = np.linspace(0.0, 100.0, 1001)
    omega = 0.83
    series = 2.0 + 0.01 * t + 0.5 * np.cos(omega * t + 0.3)
    assert dominant_frequency(t, series) == pytest.approx(omega, rel=0.02)


def test_packet_mean_band_splitting_ring():
    g = GridSpec(nx=128, ny=128, lx=160.0, ly=160.0, dt=0.1, n_steps=1)
    pkt = ring_packet(g, k_radius=0.6, width=10.0, spin=(1, 1))
    mean_split = packet_mean_band_splitting(SPEC, pkt)
    # splitting (hbar^2/2m) kappa |k| at |k| = 0.6, slightly broadened
    assert mean_split == pytest.approx(0.3, rel=0.03)
