"""Effective spin-1/2 band structure of the dressed ground doublet.

With no external potential the projected Hamiltonian is translation
invariant and block-diagonal in momentum:

    H(k) = (1/2m) (hbar k I - A) . (hbar k I - A) + Phi

with the dot contracting the two Cartesian matrix components.  For the
regular-triangle gauge fields this gives two isotropic bands

    E_-+(k) = (hbar^2/2m) (k^2 -+ kappa |k| / 2 + kappa^2 / 8) + phi_offset

whose lower member has its minimum on the ring |k| = kappa / 4 with a band
gap of E_r / 4 there.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import GridTooCoarse, PotentialPresent
from .gauge import GaugeFields
from .geometry import HBAR


@dataclass(frozen=True)
class EffectiveHamiltonianSpec:
    """Gauge fields, mass, and optional external potential V(x, y).

    `external_potential` may be None (translation invariant case), a callable
    V(X, Y) -> array, or a precomputed array matching the evolution grid.
    Momentum-space operations require it to be None.
    """

    fields: GaugeFields
    mass: float
    external_potential: Callable | np.ndarray | None = None

    def __post_init__(self):
        if self.mass <= 0:
            raise ValueError("mass must be > 0")


def _require_no_potential(spec: EffectiveHamiltonianSpec, what: str):
    if spec.external_potential is not None:
        raise PotentialPresent(
            f"{what} requires a translation-invariant Hamiltonian; "
            "external_potential is set")


def bloch_hamiltonian(spec: EffectiveHamiltonianSpec, k) -> np.ndarray:
    """2x2 Bloch Hamiltonian H(k) = (1/2m)(hbar k - A)^2 + Phi."""
    _require_no_potential(spec, "bloch_hamiltonian")
    k = np.asarray(k, dtype=float)
    eye = np.eye(2, dtype=complex)
    mx = HBAR * k[0] * eye - spec.fields.a_x
    my = HBAR * k[1] * eye - spec.fields.a_y
    return (mx @ mx + my @ my) / (2.0 * spec.mass) + spec.fields.phi


def band_energies(spec: EffectiveHamiltonianSpec, k_points: np.ndarray) -> np.ndarray:
    """Sorted eigenvalues of H(k) for an (N, 2) array of momenta; shape (N, 2).

    Vectorized over k via the Pauli decomposition of the 2x2 Hermitian
    matrices: H = c0 I + c . sigma has eigenvalues c0 -+ |c|.
    """
    _require_no_potential(spec, "band_energies")
    k_points = np.atleast_2d(np.asarray(k_points, dtype=float))
    f = spec.fields
    eye = np.eye(2, dtype=complex)
    # constant matrix pieces: (A_x^2 + A_y^2)/2m + Phi
    const = (f.a_x @ f.a_x + f.a_y @ f.a_y) / (2.0 * spec.mass) + f.phi
    # H(k) = const + (hbar^2 k^2 / 2m) I - (hbar/m) (k_x A_x + k_y A_y)
    h = (const[None] + (HBAR**2 * (k_points**2).sum(axis=1) / (2.0 * spec.mass))[:, None, None] * eye
         - (HBAR / spec.mass) * (k_points[:, 0, None, None] * f.a_x
                                 + k_points[:, 1, None, None] * f.a_y))
    c0 = 0.5 * np.real(h[:, 0, 0] + h[:, 1, 1])
    cx = np.real(h[:, 0, 1])
    cy = -np.imag(h[:, 0, 1])
    cz = 0.5 * np.real(h[:, 0, 0] - h[:, 1, 1])
    cm = np.sqrt(cx**2 + cy**2 + cz**2)
    return np.stack([c0 - cm, c0 + cm], axis=1)


def closed_form_band_energies(k_points: np.ndarray, kappa: float, mass: float,
                              phi_offset: float = 0.0) -> np.ndarray:
    """Dispersion of the regular-triangle scheme without matrix algebra.

    E_-+ = (hbar^2/2m)(k^2 -+ kappa |k|/2 + kappa^2/8) + phi_offset, valid
    when A = (hbar kappa/4)(sigma_x, sigma_y) and Phi = phi_offset * I.
    Returns shape (N, 2) with the lower band first.
    """
    k_points = np.atleast_2d(np.asarray(k_points, dtype=float))
    kmag = np.sqrt((k_points**2).sum(axis=1))
    base = HBAR**2 / (2.0 * mass)
    lower = base * (kmag**2 - kappa * kmag / 2.0 + kappa**2 / 8.0) + phi_offset
    upper = base * (kmag**2 + kappa * kmag / 2.0 + kappa**2 / 8.0) + phi_offset
    return np.stack([lower, upper], axis=1)


@dataclass(frozen=True)
class DispersionResult:
    """Band energies over a momentum grid plus the lower-band minimum ring."""

    k_grid: np.ndarray        # (N, 2)
    lower_band: np.ndarray    # (N,)
    upper_band: np.ndarray    # (N,)
    ring_radius: float        # |k| of the refined lower-band minimum
    min_energy: float


def radial_k_grid(k_max: float, n_radial: int = 256, n_angles: int = 16) -> np.ndarray:
    """Polar product grid of momenta covering |k| <= k_max, shape (N, 2)."""
    radii = np.linspace(0.0, k_max, n_radial)
    angles = np.linspace(0.0, 2.0 * np.pi, n_angles, endpoint=False)
    kx = radii[:, None] * np.cos(angles)[None, :]
    ky = radii[:, None] * np.sin(angles)[None, :]
    return np.stack([kx.ravel(), ky.ravel()], axis=1)


def dispersion(spec: EffectiveHamiltonianSpec, k_grid: np.ndarray,
               kappa: float | None = None) -> DispersionResult:
    """Bands over a momentum grid and the refined lower-band minimum.

    The minimum is located on the grid and then refined by a parabolic fit
    along the radial direction through the minimizing point, sampling H(k)
    directly at the two neighboring radii.  The radial resolution of the
    grid must be at least kappa/128 (defaulting kappa to the largest radius
    present when not given).
    """
    k_grid = np.atleast_2d(np.asarray(k_grid, dtype=float))
    radii = np.sqrt((k_grid**2).sum(axis=1))
    unique_r = np.unique(np.round(radii, decimals=12))
    if len(unique_r) < 2:
        raise GridTooCoarse("momentum grid has fewer than two distinct radii")
    dr = float(np.diff(unique_r).max())
    scale = kappa if kappa is not None else float(radii.max())
    if dr > scale / 128.0:
        raise GridTooCoarse(
            f"radial spacing {dr:.4g} exceeds {scale / 128.0:.4g} (= scale/128)")

    bands = band_energies(spec, k_grid)
    lower, upper = bands[:, 0], bands[:, 1]
    imin = int(np.argmin(lower))
    r0 = radii[imin]
    direction = (k_grid[imin] / r0) if r0 > 0 else np.array([1.0, 0.0])

    # parabolic refinement through (r0 - dr, r0, r0 + dr) along the ray;
    # a negative signed radius is simply the opposite-direction point
    probe_r = np.array([r0 - dr, r0, r0 + dr])
    probe_k = probe_r[:, None] * direction[None, :]
    e = band_energies(spec, probe_k)[:, 0]
    denom = e[0] - 2.0 * e[1] + e[2]
    if abs(denom) > 0:
        shift = 0.5 * (e[0] - e[2]) / denom
        shift = float(np.clip(shift, -1.0, 1.0))
    else:
        shift = 0.0
    ring_radius = abs(r0 + shift * dr)
    min_energy = float(band_energies(spec, ring_radius * direction[None, :])[0, 0])
    return DispersionResult(k_grid=k_grid, lower_band=lower, upper_band=upper,
                            ring_radius=float(ring_radius), min_energy=min_energy)
