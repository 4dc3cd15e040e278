"""Geometric vector and scalar potentials of the dressed ground doublet.

Projecting the motion onto the degenerate pair |1,+>, |2,+> produces a
matrix-valued Berry connection A and a scalar potential Phi:

    A_{s,q}   =  i hbar <s,+,r| grad |q,+,r>
    Phi_{s,q} = -(hbar^2 / 2m) sum_X <s,+,r| grad |X,r> . <X,r| grad |q,+,r>

with X running over the excluded states |1,->, |2,->, |D>.  Both are
computed two independent ways: in closed form from the plane-wave structure
of the bright states, and by central differences of the fixed-gauge frame.

For plane-wave couplings with phases S the closed forms are

    A_{s,q}   = (hbar / 6) sum_j k_j exp(i (S_{j,s} - S_{j,q}))
    Phi_{s,q} = (hbar^2 / 2m) [ (1/6) sum_j |k_j|^2 exp(i (S_{j,s} - S_{j,q}))
                                - (A_x^2 + A_y^2)_{s,q} / hbar^2 ]

(the Phi form follows from completeness of the dressed basis).  When the
wave vectors close into a triangle the diagonal of A vanishes, and for the
regular triangle A = (hbar kappa / 4)(sigma_x, sigma_y): Dresselhaus-type
spin-orbit coupling, equivalent to the Rashba form under x <-> y relabeling.
"""

from dataclasses import dataclass

import numpy as np

from .atomlight import LaserConfig, dressed_frame
from .errors import StepTooSmall
from .geometry import HBAR, regular_triangle_wavevectors  # noqa: F401  (re-export)

DEFAULT_STEP_FACTOR = 1e-4      # default differencing step is 1e-4 / kappa
MIN_STEP_FACTOR = 1e-12

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


@dataclass(frozen=True)
class GaugeFields:
    """Cartesian components of A and the scalar potential for the doublet.

    a_x, a_y are 2x2 Hermitian matrices in momentum units (hbar kappa);
    phi is a 2x2 Hermitian matrix in energy units.
    """

    a_x: np.ndarray
    a_y: np.ndarray
    phi: np.ndarray


def _hermitize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def _phase_factors(config: LaserConfig) -> np.ndarray:
    """exp(i (S_{j,s} - S_{j,q})) with shape (3, 2, 2) indexed [j, s, q]."""
    s_phase = config.phases
    return np.exp(1j * (s_phase[:, :, None] - s_phase[:, None, :]))


def vector_potential_analytic(config: LaserConfig) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form Berry connection (a_x, a_y); position independent.

    A_{s,q} = (hbar/6) sum_j k_j exp(i (S_{j,s} - S_{j,q})).  For the default
    phases the exponent reduces to (2 pi / 3)(j - 2)(s - q).
    """
    w = _phase_factors(config)
    a = HBAR / 6.0 * np.einsum("jc,jsq->csq", config.wavevectors, w)
    return _hermitize(a[0]), _hermitize(a[1])


def scalar_potential_analytic(config: LaserConfig) -> np.ndarray:
    """Closed-form geometric scalar potential of the ground doublet.

    Derived by summing the excluded-state projectors with the completeness
    identity; independently validated by `scalar_potential_numeric`.  For
    the regular triangle it equals (3/16)(hbar^2 kappa^2 / m) times identity,
    i.e. (3/8) E_r.
    """
    w = _phase_factors(config)
    k2 = (config.wavevectors**2).sum(axis=1)
    grad2 = np.einsum("j,jsq->sq", k2, w) / 6.0
    a_x, a_y = vector_potential_analytic(config)
    phi = HBAR**2 / (2.0 * config.mass) * (
        grad2 - (a_x @ a_x + a_y @ a_y) / HBAR**2)
    return _hermitize(phi)


def analytic_gauge_fields(config: LaserConfig) -> GaugeFields:
    """Closed-form A and Phi bundled together."""
    a_x, a_y = vector_potential_analytic(config)
    return GaugeFields(a_x=a_x, a_y=a_y, phi=scalar_potential_analytic(config))


def _check_step(config: LaserConfig, h: float | None) -> float:
    if h is None:
        h = DEFAULT_STEP_FACTOR / config.kappa
    if h < MIN_STEP_FACTOR / config.kappa:
        raise StepTooSmall(
            f"h = {h:.3e} below {MIN_STEP_FACTOR / config.kappa:.3e}; "
            "round-off would dominate the central differences")
    return h


def _frame_stencil(config: LaserConfig, r, h: float):
    """Frame unitary at r and its central-difference Cartesian derivatives."""
    r = np.asarray(r, dtype=float)
    u0 = dressed_frame(config, r).unitary
    du = []
    for c in range(2):
        dr = np.zeros(2)
        dr[c] = h
        up = dressed_frame(config, r + dr).unitary
        um = dressed_frame(config, r - dr).unitary
        du.append((up - um) / (2.0 * h))
    return u0, du


def vector_potential_numeric(config: LaserConfig, r, h: float | None = None
                             ) -> tuple[np.ndarray, np.ndarray]:
    """Berry connection from central differences of the fixed-gauge frame.

    Differentiates the analytically gauged dressed states (never raw
    eigensolver output, whose phases are arbitrary in the degenerate
    doublet), then Hermitian-symmetrizes.  Agrees with the closed form to
    O(h^2).
    """
    h = _check_step(config, h)
    u0, du = _frame_stencil(config, r, h)
    ground = u0[:, :2]
    out = []
    for c in range(2):
        a = 1j * HBAR * ground.conj().T @ du[c][:, :2]
        out.append(_hermitize(a))
    return out[0], out[1]


def scalar_potential_numeric(config: LaserConfig, r, h: float | None = None
                             ) -> np.ndarray:
    """Scalar potential from central differences, summed over the excluded
    states |1,->, |2,->, |D> in the fixed gauge."""
    h = _check_step(config, h)
    u0, du = _frame_stencil(config, r, h)
    ground = u0[:, :2]
    excluded = u0[:, 2:]
    phi = np.zeros((2, 2), dtype=complex)
    for c in range(2):
        bra_dx = ground.conj().T @ du[c][:, 2:]    # <s,+ | d_c X>
        x_dq = excluded.conj().T @ du[c][:, :2]    # <X | d_c q,+>
        phi += bra_dx @ x_dq
    phi *= -HBAR**2 / (2.0 * config.mass)
    return _hermitize(phi)


def numeric_gauge_fields(config: LaserConfig, r, h: float | None = None) -> GaugeFields:
    """Finite-difference A and Phi bundled together."""
    a_x, a_y = vector_potential_numeric(config, r, h)
    return GaugeFields(a_x=a_x, a_y=a_y, phi=scalar_potential_numeric(config, r, h))


def rashba_relabel(fields: GaugeFields) -> GaugeFields:
    """Swap the Cartesian roles of the two A components (x <-> y relabel).

    Turns the Dresselhaus form (kappa/4)(sigma_x, sigma_y) into the Rashba
    form (kappa/4)(sigma_y, sigma_x); applying it twice is the identity.
    """
    return GaugeFields(a_x=fields.a_y, a_y=fields.a_x, phi=fields.phi)


@dataclass(frozen=True)
class ConvergenceReport:
    """Step-halving check of the numeric differentiation against closed forms."""

    h: float
    vector_deviation: float        # max elementwise |A_num(h) - A_analytic|
    scalar_deviation: float        # max elementwise |Phi_num(h) - Phi_analytic|
    vector_order: float            # log2(err(h) / err(h/2))
    scalar_order: float


def gauge_convergence_report(config: LaserConfig, r, h: float | None = None
                             ) -> ConvergenceReport:
    """Measure the differencing error and its order via step halving."""
    h = _check_step(config, h)
    ax_ref, ay_ref = vector_potential_analytic(config)
    phi_ref = scalar_potential_analytic(config)

    def errs(step):
        ax, ay = vector_potential_numeric(config, r, step)
        phi = scalar_potential_numeric(config, r, step)
        va = max(np.abs(ax - ax_ref).max(), np.abs(ay - ay_ref).max())
        vp = np.abs(phi - phi_ref).max()
        return va, vp

    va1, vp1 = errs(h)
    va2, vp2 = errs(h / 2.0)
    tiny = np.finfo(float).tiny
    return ConvergenceReport(
        h=h, vector_deviation=va1, scalar_deviation=vp1,
        vector_order=float(np.log2(max(va1, tiny) / max(va2, tiny))),
        scalar_order=float(np.log2(max(vp1, tiny) / max(vp2, tiny))))
