"""Five-level atom-light coupling and its exact dressed eigensystem.

Three internal states |1>, |2>, |3> are laser-coupled to two mutually
uncoupled states |e1>, |e2> (a double-tripod topology).  The coupling
Hamiltonian is

    H0 = -hbar sum_{p=1,2} sum_{j=1..3} Omega_{j,p} |e_p><j|  +  H.c.

with plane-wave Rabi frequencies Omega_{j,p} = Omega exp(i k_j.r + i S_{j,p}).
For phases that make the two bright superpositions orthogonal, H0 has a
doubly degenerate ground pair |1,+>, |2,+> at -sqrt(3) hbar Omega, a dark
state at zero, and an excited pair at +sqrt(3) hbar Omega.

Everything here is built from closed formulas rather than a numerical
eigensolver, so the eigenvector phases are smooth functions of position
(a fixed gauge).  The basis order is (|1>, |2>, |3>, |e1>, |e2>) throughout.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DegenerateCoupling, OrthogonalityViolation
from .geometry import HBAR, recoil_energy, regular_triangle_wavevectors

# acceptance threshold for custom phase matrices, relative to the bright norms
ORTHOGONALITY_TOL = 1e-10

DEFAULT_OMEGA_RECOIL = 20.0


def default_phases() -> np.ndarray:
    """Laser phase matrix S_{j,p} = (-1)^p (pi/3) (j - 2), shape (3, 2).

    This choice makes the two bright states orthogonal at every position:
    sum_j exp(i (S_{j,2} - S_{j,1})) = exp(-2i pi/3) + 1 + exp(2i pi/3) = 0.
    """
    j = np.arange(1, 4)[:, None]
    p = np.arange(1, 3)[None, :]
    return ((-1.0) ** p) * (np.pi / 3.0) * (j - 2)


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class LaserConfig:
    """All physical parameters of the coupling scheme.

    omega        common Rabi amplitude (energy units, hbar = 1)
    kappa        laser wave-number scale (inverse length)
    wavevectors  (3, 2) array of k_j
    phases       (3, 2) phase matrix S_{j,p} in radians
    mass         atomic mass
    """

    omega: float
    kappa: float
    wavevectors: np.ndarray
    phases: np.ndarray
    mass: float

    def __post_init__(self):
        if self.omega < 0:
            raise ValueError("omega must be >= 0")
        if self.kappa <= 0:
            raise ValueError("kappa must be > 0")
        if self.mass <= 0:
            raise ValueError("mass must be > 0")
        wv = _readonly(self.wavevectors)
        ph = _readonly(self.phases)
        if wv.shape != (3, 2):
            raise ValueError(f"wavevectors must have shape (3, 2), got {wv.shape}")
        if ph.shape != (3, 2):
            raise ValueError(f"phases must have shape (3, 2), got {ph.shape}")
        object.__setattr__(self, "wavevectors", wv)
        object.__setattr__(self, "phases", ph)

    @classmethod
    def default(cls, omega: float | None = None, kappa: float = 1.0,
                mass: float = 1.0) -> "LaserConfig":
        """Canonical setup: regular wave-vector triangle, standard phases.

        If `omega` is not given it defaults to 20 recoil energies.
        """
        if omega is None:
            omega = DEFAULT_OMEGA_RECOIL * recoil_energy(kappa, mass)
        return cls(omega=omega, kappa=kappa,
                   wavevectors=regular_triangle_wavevectors(kappa),
                   phases=default_phases(), mass=mass)

    @property
    def recoil_energy(self) -> float:
        return recoil_energy(self.kappa, self.mass)

    def orthogonality_residual(self) -> float:
        """|sum_j Omega_{j,2} Omega*_{j,1}| in units of Omega^2.

        Position independent for plane-wave couplings (the k_j.r phases
        cancel between the two columns).
        """
        s = np.exp(1j * (self.phases[:, 1] - self.phases[:, 0])).sum()
        return float(abs(s))


@dataclass(frozen=True)
class RabiMatrix:
    """Rabi couplings Omega_{j,p} at one position and their column totals."""

    values: np.ndarray        # (3, 2) complex
    totals: np.ndarray        # (2,) real, Omega_p = sqrt(sum_j |Omega_{j,p}|^2)


def rabi_matrix(config: LaserConfig, r) -> RabiMatrix:
    """Evaluate Omega_{j,p} = Omega exp(i k_j.r + i S_{j,p}) at position r."""
    r = np.asarray(r, dtype=float)
    phase = config.wavevectors @ r
    values = config.omega * np.exp(1j * (phase[:, None] + config.phases))
    totals = np.sqrt((np.abs(values) ** 2).sum(axis=0))
    return RabiMatrix(values=values, totals=totals)


def build_hamiltonian(rabi: RabiMatrix) -> np.ndarray:
    """Assemble the 5x5 coupling Hamiltonian in the fixed basis order.

    The excited-row/ground-column block carries -hbar Omega_{j,p}; the
    conjugate transpose completes the Hermitian matrix.  Bare-bare and
    excited-excited blocks are zero (exact resonance).
    """
    h = np.zeros((5, 5), dtype=complex)
    h[3:, :3] = -HBAR * rabi.values.T
    h[:3, 3:] = h[3:, :3].conj().T
    return h


@dataclass(frozen=True)
class DressedFrame:
    """Closed-form eigensystem of the coupling Hamiltonian at one point.

    bright  (5, 2): |B_1>, |B_2>, supported on the bare states only
    dark    (5,):   |D>, orthogonal to both bright states, zero energy
    plus    (5, 2): |1,+>, |2,+>, the degenerate ground pair
    minus   (5, 2): |1,->, |2,->, the excited pair
    energies (5,):  eigenvalues ordered as (1+, 2+, D, 1-, 2-)
    """

    position: np.ndarray
    bright: np.ndarray
    dark: np.ndarray
    plus: np.ndarray
    minus: np.ndarray
    energies: np.ndarray

    @property
    def unitary(self) -> np.ndarray:
        """5x5 matrix whose columns are (|1,+>, |2,+>, |D>, |1,->, |2,->)."""
        return np.column_stack([self.plus[:, 0], self.plus[:, 1], self.dark,
                                self.minus[:, 0], self.minus[:, 1]])


def _dark_from_brights(bright3: np.ndarray, wavevectors: np.ndarray,
                       r: np.ndarray) -> np.ndarray:
    """Unit vector in the bare-state space orthogonal to both bright states.

    Built as the componentwise cross product of the conjugated bright
    amplitudes, which is orthogonal to both in the Hermitian inner product
    and smooth in position.  The remaining global phase is pinned by making
    the plane-wave-stripped coefficient of a fixed component real positive.
    """
    d = np.cross(bright3[:, 0].conj(), bright3[:, 1].conj())
    nrm = np.linalg.norm(d)
    if nrm < 1e-14:
        raise DegenerateCoupling("bright states are parallel; dark state undefined")
    d = d / nrm
    mags = np.abs(d)
    # prefer component 0 so the pin does not hop between equal-magnitude
    # components from round-off; fall back only when it nearly vanishes
    m = 0 if mags[0] >= 0.5 * mags.max() else int(np.argmax(mags))
    c = d[m] * np.exp(1j * (wavevectors[m] @ r))
    return d * (c.conj() / abs(c))


def dressed_frame(config: LaserConfig, r) -> DressedFrame:
    """Bright, dark, and dressed states at position r in the fixed gauge.

    Bright states |B_p> = (1/Omega_p) sum_j Omega*_{j,p} |j>; dressed pairs
    |p,+-> = (|B_p> +- |e_p>)/sqrt(2) with energies -+ hbar Omega_p; the dark
    state is the bare-space complement of the bright pair.

    Raises DegenerateCoupling for omega = 0 and OrthogonalityViolation when
    the bright states fail to be orthogonal (the (|B_p> +- |e_p>)/sqrt(2)
    combinations are then no longer eigenstates).
    """
    r = np.asarray(r, dtype=float)
    if config.omega == 0.0:
        raise DegenerateCoupling("omega = 0: all five levels are degenerate")
    rabi = rabi_matrix(config, r)
    if np.any(rabi.totals <= 0.0):
        raise DegenerateCoupling("vanishing total Rabi frequency")

    bright = np.zeros((5, 2), dtype=complex)
    bright[:3] = rabi.values.conj() / rabi.totals

    overlap = np.vdot(bright[:, 1], bright[:, 0])
    if abs(overlap) > ORTHOGONALITY_TOL:
        raise OrthogonalityViolation(
            f"|<B2|B1>| = {abs(overlap):.3e} exceeds {ORTHOGONALITY_TOL:.0e}; "
            "phases do not satisfy the bright-state orthogonality condition")

    dark = np.zeros(5, dtype=complex)
    dark[:3] = _dark_from_brights(bright[:3], config.wavevectors, r)

    excited = np.zeros((5, 2), dtype=complex)
    excited[3, 0] = 1.0
    excited[4, 1] = 1.0
    plus = (bright + excited) / np.sqrt(2.0)
    minus = (bright - excited) / np.sqrt(2.0)

    energies = HBAR * np.array([-rabi.totals[0], -rabi.totals[1], 0.0,
                                rabi.totals[0], rabi.totals[1]])
    return DressedFrame(position=r, bright=bright, dark=dark, plus=plus,
                        minus=minus, energies=energies)


@dataclass(frozen=True)
class FrameResidualReport:
    """Cross-check of the analytic frame against a dense eigensolver."""

    max_energy_deviation: float
    subspace_angle: float | None     # None when the spectrum is fully degenerate
    degenerate: bool = False


def verify_frame_against_eigensolver(config: LaserConfig, r) -> FrameResidualReport:
    """Compare analytic energies and ground-doublet span with numpy's eigh.

    Reports (a) the worst absolute eigenvalue deviation between the sorted
    analytic energies and the dense Hermitian solve, and (b) the largest
    principal angle between the analytic span{|1,+>, |2,+>} and the
    numerically computed lowest-two-eigenvector subspace.  For omega = 0 the
    spectrum is totally degenerate, the subspace is undefined, and the report
    says so instead of raising.
    """
    if config.omega == 0.0:
        return FrameResidualReport(max_energy_deviation=0.0,
                                   subspace_angle=None, degenerate=True)
    frame = dressed_frame(config, r)
    h = build_hamiltonian(rabi_matrix(config, r))
    evals, evecs = np.linalg.eigh(h)
    dev = float(np.abs(np.sort(frame.energies) - evals).max())
    angles = scipy.linalg.subspace_angles(frame.plus, evecs[:, :2])
    return FrameResidualReport(max_energy_deviation=dev,
                               subspace_angle=float(angles.max()))
