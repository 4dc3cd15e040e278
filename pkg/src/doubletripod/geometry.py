"""Wave-vector geometries and unit helpers.

Internal unit conventions: hbar = 1, lengths in 1/kappa, energies most
naturally quoted in recoil units E_r = hbar^2 kappa^2 / (2 m).
"""

import numpy as np

from .errors import InvalidKappa

HBAR = 1.0


def recoil_energy(kappa: float, mass: float) -> float:
    """Recoil energy E_r = hbar^2 kappa^2 / (2 m)."""
    return HBAR**2 * kappa**2 / (2.0 * mass)


def regular_triangle_wavevectors(kappa: float) -> np.ndarray:
    """Three wave vectors of magnitude `kappa` at 120 degrees to each other.

    k_j = kappa (cos(2 pi (j-2)/3), sin(2 pi (j-2)/3)) for j = 1, 2, 3,
    so k_2 points along +x and the triangle closes exactly: sum_j k_j = 0.
    Returns an array of shape (3, 2).
    """
    if kappa <= 0:
        raise InvalidKappa(f"kappa must be > 0, got {kappa}")
    j = np.arange(1, 4)
    angles = 2.0 * np.pi * (j - 2) / 3.0
    k = kappa * np.stack([np.cos(angles), np.sin(angles)], axis=1)
    # pin the closure to zero exactly (cos/sin of +-2pi/3 round symmetrically,
    # but do not rely on it)
    k[0] = -(k[1] + k[2])
    return k


def random_closed_wavevectors(rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """Random triangle of wave vectors with exact closure sum_j k_j = 0.

    The first two legs are drawn uniformly from [-scale, scale]^2 and the
    third is their exact floating-point negation, so the closure residual
    is identically zero.
    """
    k = np.zeros((3, 2))
    k[:2] = rng.uniform(-scale, scale, size=(2, 2))
    k[2] = -(k[0] + k[1])
    return k
