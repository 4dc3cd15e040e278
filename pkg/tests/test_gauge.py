"""Geometric vector and scalar potentials: closed forms vs central differences."""

import numpy as np
import pytest

from doubletripod import (GaugeFields, InvalidKappa, LaserConfig, StepTooSmall,
                          analytic_gauge_fields, default_phases, dressed_frame,
                          gauge_convergence_report, numeric_gauge_fields,
                          random_closed_wavevectors, rashba_relabel, recoil_energy,
                          regular_triangle_wavevectors, scalar_potential_analytic,
                          scalar_potential_numeric, vector_potential_analytic,
                          vector_potential_numeric)
from doubletripod.gauge import SIGMA_X, SIGMA_Y
from doubletripod.geometry import HBAR

SQRT3 = np.sqrt(3.0)


def triangle_config(omega=1.0, kappa=1.0, mass=1.0):
    return LaserConfig.default(omega=omega, kappa=kappa, mass=mass)


def custom_config(wavevectors, kappa=1.0):
    return LaserConfig(omega=1.0, kappa=kappa, wavevectors=wavevectors,
                       phases=default_phases(), mass=1.0)


# ---------------------------------------------------------------- geometry

def test_regular_triangle_vertices():
    k = regular_triangle_wavevectors(1.0)
    np.testing.assert_allclose(k[1], [1.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(k[0], [-0.5, -SQRT3 / 2], atol=1e-15)
    np.testing.assert_allclose(k[2], [-0.5, SQRT3 / 2], atol=1e-15)


def test_regular_triangle_closure_and_norms():
    for kappa in (1.0, 2.5):
        k = regular_triangle_wavevectors(kappa)
        np.testing.assert_allclose(k.sum(axis=0), [0.0, 0.0], atol=1e-15)
        np.testing.assert_allclose(np.linalg.norm(k, axis=1), kappa, rtol=1e-15)


def test_invalid_kappa():
    with pytest.raises(InvalidKappa):
        regular_triangle_wavevectors(0.0)
    with pytest.raises(InvalidKappa):
        regular_triangle_wavevectors(-2.0)


# ------------------------------------------------------- analytic potential

def test_analytic_vector_potential_regular_triangle():
    ax, ay = vector_potential_analytic(triangle_config())
    np.testing.assert_allclose(ax, HBAR / 4.0 * SIGMA_X, atol=1e-15)
    np.testing.assert_allclose(ay, HBAR / 4.0 * SIGMA_Y, atol=1e-15)
    # upper-right element carries x component 1/4 and y component -i/4
    assert ax[0, 1] == pytest.approx(0.25)
    assert ay[0, 1] == pytest.approx(-0.25j)


def test_analytic_vector_potential_literal_sum():
    # independent oracle: literal term-by-term sum of
    # (hbar/6) sum_j k_j exp(i 2pi/3 (j-2)(s-q))
    rng = np.random.default_rng(5)
    for _ in range(10):
        k = random_closed_wavevectors(rng)
        cfg = custom_config(k)
        expect = np.zeros((2, 2, 2), dtype=complex)
        for s in (1, 2):
            for q in (1, 2):
                for j in (1, 2, 3):
                    w = np.exp(1j * 2 * np.pi / 3 * (j - 2) * (s - q))
                    expect[:, s - 1, q - 1] += HBAR / 6.0 * k[j - 1] * w
        ax, ay = vector_potential_analytic(cfg)
        np.testing.assert_allclose(ax, expect[0], atol=1e-14)
        np.testing.assert_allclose(ay, expect[1], atol=1e-14)


def test_analytic_vector_potential_zero_wavevectors():
    cfg = custom_config(np.zeros((3, 2)))
    ax, ay = vector_potential_analytic(cfg)
    assert np.all(ax == 0) and np.all(ay == 0)


def test_closed_triangle_diagonals_vanish():
    rng = np.random.default_rng(99)
    for _ in range(50):
        cfg = custom_config(random_closed_wavevectors(rng))
        ax, ay = vector_potential_analytic(cfg)
        for a in (ax, ay):
            assert abs(a[0, 0]) <= 1e-12 * HBAR * cfg.kappa
            assert abs(a[1, 1]) <= 1e-12 * HBAR * cfg.kappa


# -------------------------------------------------------- numeric potential

def test_numeric_vector_potential_matches_analytic():
    cfg = triangle_config()
    ax_ref, ay_ref = vector_potential_analytic(cfg)
    ax, ay = vector_potential_numeric(cfg, [0.0, 0.0], h=1e-4)
    assert np.abs(ax - ax_ref).max() <= 1e-6 * HBAR * cfg.kappa
    assert np.abs(ay - ay_ref).max() <= 1e-6 * HBAR * cfg.kappa


def test_numeric_vector_potential_convergence_order():
    rep = gauge_convergence_report(triangle_config(), [0.3, -0.7], h=1e-4)
    assert rep.vector_order >= 1.9
    assert rep.scalar_order >= 1.9
    assert rep.vector_deviation <= 1e-6 * HBAR
    assert rep.scalar_deviation <= 1e-6 * recoil_energy(1.0, 1.0)


def test_numeric_vector_potential_zero_wavevectors():
    cfg = custom_config(np.zeros((3, 2)))
    ax, ay = vector_potential_numeric(cfg, [0.5, 0.5], h=1e-4)
    assert np.abs(ax).max() < 1e-10
    assert np.abs(ay).max() < 1e-10


def test_numeric_vector_potential_position_independent():
    cfg = triangle_config()
    rng = np.random.default_rng(17)
    values = [np.stack(vector_potential_numeric(cfg, rng.uniform(-10, 10, 2),
                                                h=1e-4)) for _ in range(20)]
    stack = np.stack(values)
    spread = np.abs(stack - stack[0]).max()
    assert spread <= 1e-6 * HBAR * cfg.kappa


def test_step_too_small_rejected():
    with pytest.raises(StepTooSmall):
        vector_potential_numeric(triangle_config(), [0.0, 0.0], h=1e-13)
    with pytest.raises(StepTooSmall):
        scalar_potential_numeric(triangle_config(), [0.0, 0.0], h=1e-13)


# --------------------------------------------------------- scalar potential

def test_scalar_potential_regular_triangle_value():
    # the geometric scalar potential of the ground doublet for the regular
    # triangle is (3/16) hbar^2 kappa^2 / m = (3/8) E_r, times identity
    cfg = triangle_config()
    phi = scalar_potential_numeric(cfg, [0.0, 0.0], h=1e-4)
    expected = 3.0 / 16.0 * HBAR**2 * cfg.kappa**2 / cfg.mass * np.eye(2)
    assert np.abs(phi - expected).max() <= 1e-6 * cfg.recoil_energy
    np.testing.assert_allclose(scalar_potential_analytic(cfg), expected,
                               atol=1e-14)
    # in recoil units: 0.375 E_r on the diagonal
    assert phi[0, 0].real / cfg.recoil_energy == pytest.approx(0.375, abs=1e-6)


def test_scalar_potential_completeness_oracle():
    # independent oracle: Phi = (hbar^2/2m) <grad s,+| (1 - P_ground) |grad q,+>
    # evaluated with raw finite differences of the frame unitary
    rng = np.random.default_rng(31)
    cfg = triangle_config()
    h = 1e-4
    for _ in range(5):
        r = rng.uniform(-5, 5, 2)
        ground = dressed_frame(cfg, r).unitary[:, :2]
        acc = np.zeros((2, 2), dtype=complex)
        for c in range(2):
            dr = np.zeros(2)
            dr[c] = h
            dg = (dressed_frame(cfg, r + dr).unitary[:, :2]
                  - dressed_frame(cfg, r - dr).unitary[:, :2]) / (2 * h)
            acc += dg.conj().T @ dg - (dg.conj().T @ ground) @ (ground.conj().T @ dg)
        oracle = HBAR**2 / (2.0 * cfg.mass) * acc
        phi = scalar_potential_numeric(cfg, r, h=h)
        np.testing.assert_allclose(phi, oracle, atol=1e-9)


def test_scalar_potential_zero_wavevectors():
    cfg = custom_config(np.zeros((3, 2)))
    phi = scalar_potential_numeric(cfg, [0.2, -0.4], h=1e-4)
    assert np.abs(phi).max() < 1e-10


def test_scalar_potential_position_independent():
    cfg = triangle_config()
    rng = np.random.default_rng(8)
    phis = np.stack([scalar_potential_numeric(cfg, rng.uniform(-10, 10, 2), h=1e-4)
                     for _ in range(10)])
    assert np.abs(phis - phis[0]).max() <= 1e-6 * cfg.recoil_energy


def test_scalar_potential_irregular_closed_triangles():
    # numeric and closed-form scalar potentials agree off the regular geometry
    rng = np.random.default_rng(21)
    for _ in range(5):
        cfg = custom_config(random_closed_wavevectors(rng))
        phi_num = scalar_potential_numeric(cfg, [0.3, 0.1], h=1e-4)
        phi_ana = scalar_potential_analytic(cfg)
        assert np.abs(phi_num - phi_ana).max() < 1e-7
        np.testing.assert_allclose(phi_ana, phi_ana.conj().T, atol=1e-14)


def test_gauge_fields_hermitian_and_phi_psd():
    gf = numeric_gauge_fields(triangle_config(), [1.3, 0.4])
    for m in (gf.a_x, gf.a_y, gf.phi):
        np.testing.assert_allclose(m, m.conj().T, atol=1e-12)
    assert np.linalg.eigvalsh(gf.phi).min() >= -1e-12


# ----------------------------------------------------------------- relabel

def test_rashba_relabel_swaps_components():
    cfg = triangle_config()
    fields = analytic_gauge_fields(cfg)
    swapped = rashba_relabel(fields)
    np.testing.assert_allclose(swapped.a_x, fields.a_y, atol=1e-15)
    np.testing.assert_allclose(swapped.a_y, fields.a_x, atol=1e-15)
    np.testing.assert_allclose(swapped.phi, fields.phi, atol=1e-15)
    # Dresselhaus (sigma_x, sigma_y) -> Rashba (sigma_y, sigma_x)
    np.testing.assert_allclose(swapped.a_x, HBAR / 4.0 * SIGMA_Y, atol=1e-15)


def test_rashba_relabel_involution_and_zero():
    zero = GaugeFields(a_x=np.zeros((2, 2)), a_y=np.zeros((2, 2)),
                       phi=np.zeros((2, 2)))
    z2 = rashba_relabel(zero)
    assert np.all(z2.a_x == 0) and np.all(z2.a_y == 0)
    fields = analytic_gauge_fields(triangle_config())
    twice = rashba_relabel(rashba_relabel(fields))
    np.testing.assert_allclose(twice.a_x, fields.a_x, atol=1e-15)
    np.testing.assert_allclose(twice.a_y, fields.a_y, atol=1e-15)
