"""Wavepacket propagation on a periodic 2D grid.

Two evolvers are provided and cross-compared:

* `evolve_reduced` propagates a 2-component spinor under the projected
  Hamiltonian (p - A)^2 / 2m + Phi + V with constant matrix-valued A, Phi.
* `evolve_full` propagates all 5 bare components under p^2 / 2m + H0(r).

Both use Strang splitting with *exact* sub-propagators, so operator
splitting is the only source of time-stepping error (O(dt^2)).  The
kinetic+gauge step of the reduced evolver is a per-k 2x2 matrix exponential
evaluated in closed form through the Pauli decomposition; the coupling step
of the full evolver uses the closed-form dressed eigendecomposition of
H0(r) at every grid point.
"""

import os
from dataclasses import dataclass, replace

import numpy as np
import scipy.fft
from scipy.special import j0

from .atomlight import ORTHOGONALITY_TOL, LaserConfig
from .bands import EffectiveHamiltonianSpec
from .errors import (DegenerateCoupling, GridTooCoarse, OrthogonalityViolation,
                     PacketTooNarrow, PacketTouchesBoundary, UnstableStep)
from .geometry import HBAR

_FFT_WORKERS = min(4, os.cpu_count() or 1)

BOUNDARY_TAIL_TOL = 1e-12


def _fft2(a):
    return scipy.fft.fft2(a, axes=(-2, -1), workers=_FFT_WORKERS)


def _ifft2(a):
    return scipy.fft.ifft2(a, axes=(-2, -1), workers=_FFT_WORKERS)


# ----------------------------------------------------------------------
# grids and fields
# ----------------------------------------------------------------------

def _is_pow2(n: int) -> bool:
    return n >= 2 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class GridSpec:
    """Periodic rectangular grid and time-stepping parameters.

    nx, ny must be powers of two.  The box spans [-lx/2, lx/2) x
    [-ly/2, ly/2); the momentum grid is the discrete Fourier dual.
    Observables are sampled every `sample_stride` steps.
    """

    nx: int
    ny: int
    lx: float
    ly: float
    dt: float
    n_steps: int
    sample_stride: int = 10

    def __post_init__(self):
        if not (_is_pow2(self.nx) and _is_pow2(self.ny)):
            raise ValueError("nx and ny must be powers of two")
        if self.lx <= 0 or self.ly <= 0:
            raise ValueError("box lengths must be > 0")
        if self.dt <= 0 or self.n_steps < 1 or self.sample_stride < 1:
            raise ValueError("dt > 0, n_steps >= 1, sample_stride >= 1 required")

    @property
    def dx(self) -> float:
        return self.lx / self.nx

    @property
    def dy(self) -> float:
        return self.ly / self.ny

    @property
    def cell_area(self) -> float:
        return self.dx * self.dy

    @property
    def total_time(self) -> float:
        return self.dt * self.n_steps


def position_grids(grid: GridSpec):
    """Meshgrids X, Y of shape (nx, ny) with 'ij' indexing."""
    x = -grid.lx / 2.0 + grid.dx * np.arange(grid.nx)
    y = -grid.ly / 2.0 + grid.dy * np.arange(grid.ny)
    return np.meshgrid(x, y, indexing="ij")


def momentum_grids(grid: GridSpec):
    """Meshgrids KX, KY of angular wave numbers dual to the position grid."""
    kx = 2.0 * np.pi * np.fft.fftfreq(grid.nx, d=grid.dx)
    ky = 2.0 * np.pi * np.fft.fftfreq(grid.ny, d=grid.dy)
    return np.meshgrid(kx, ky, indexing="ij")


@dataclass
class SpinorField:
    """Two-component wavefunction of the dressed ground doublet."""

    psi: np.ndarray           # (2, nx, ny) complex
    grid: GridSpec

    def __post_init__(self):
        self.psi = np.asarray(self.psi, dtype=complex)
        if self.psi.shape != (2, self.grid.nx, self.grid.ny):
            raise ValueError(f"psi must have shape (2, nx, ny), got {self.psi.shape}")


@dataclass
class FullField:
    """Five-component wavefunction in the bare basis (1, 2, 3, e1, e2)."""

    psi: np.ndarray           # (5, nx, ny) complex
    grid: GridSpec

    def __post_init__(self):
        self.psi = np.asarray(self.psi, dtype=complex)
        if self.psi.shape != (5, self.grid.nx, self.grid.ny):
            raise ValueError(f"psi must have shape (5, nx, ny), got {self.psi.shape}")


def field_norm(field) -> float:
    """Total probability sum |psi|^2 dx dy."""
    return float((np.abs(field.psi) ** 2).sum() * field.grid.cell_area)


def field_inner(a, b) -> complex:
    """Inner product <a|b> = sum conj(a) b dx dy over components and grid."""
    if a.grid != b.grid:
        raise ValueError("fields live on different grids")
    return complex(np.vdot(a.psi, b.psi) * a.grid.cell_area)


def overlap(a, b) -> float:
    """Normalized squared overlap |<a|b>|^2 / (<a|a><b|b>)."""
    return abs(field_inner(a, b)) ** 2 / (field_norm(a) * field_norm(b))


# ----------------------------------------------------------------------
# wavepacket construction
# ----------------------------------------------------------------------

def _check_envelope(grid: GridSpec, center, width: float):
    center = np.asarray(center, dtype=float)
    if width < 4.0 * max(grid.dx, grid.dy):
        raise PacketTooNarrow(
            f"width {width:.3g} below 4 grid spacings "
            f"({4 * max(grid.dx, grid.dy):.3g})")
    margin = min(grid.lx / 2.0 - abs(center[0]), grid.ly / 2.0 - abs(center[1]))
    if margin <= 0 or np.exp(-margin**2 / (2.0 * width**2)) > BOUNDARY_TAIL_TOL:
        raise PacketTouchesBoundary(
            f"envelope amplitude at the box boundary exceeds {BOUNDARY_TAIL_TOL:.0e}")
    return center


def _normalize(psi: np.ndarray, grid: GridSpec) -> np.ndarray:
    nrm = np.sqrt((np.abs(psi) ** 2).sum() * grid.cell_area)
    return psi / nrm


def gaussian_packet(grid: GridSpec, center, width: float, momentum,
                    spin) -> SpinorField:
    """Normalized Gaussian times plane wave times constant spinor.

    The envelope is exp(-|r - c|^2 / (2 width^2)); `momentum` is the central
    wave vector k0 and `spin` the (unnormalized) 2-component amplitude.
    """
    center = _check_envelope(grid, center, width)
    momentum = np.asarray(momentum, dtype=float)
    spin = np.asarray(spin, dtype=complex)
    spin = spin / np.linalg.norm(spin)
    x, y = position_grids(grid)
    envelope = np.exp(-((x - center[0])**2 + (y - center[1])**2) / (2.0 * width**2))
    wave = np.exp(1j * (momentum[0] * x + momentum[1] * y))
    psi = spin[:, None, None] * (envelope * wave)[None]
    return SpinorField(psi=_normalize(psi, grid), grid=grid)


def ring_packet(grid: GridSpec, k_radius: float, width: float, spin,
                center=(0.0, 0.0)) -> SpinorField:
    """Rest packet whose momentum support is an annulus of radius k_radius.

    Built as J0(k_radius |r - c|) times a Gaussian envelope: the mean
    momentum is zero while |k| concentrates near k_radius with spread
    ~ 1/width.  Useful for interference experiments that need a narrow
    band-splitting distribution without a net drift.
    """
    center = _check_envelope(grid, center, width)
    if k_radius <= 0:
        raise ValueError("k_radius must be > 0")
    # annulus momentum content (radius plus spread) must sit below Nyquist
    if (k_radius + 4.0 / width) * max(grid.dx, grid.dy) > 0.9 * np.pi:
        raise PacketTooNarrow("ring momentum k_radius not resolved by the grid")
    spin = np.asarray(spin, dtype=complex)
    spin = spin / np.linalg.norm(spin)
    x, y = position_grids(grid)
    rad = np.sqrt((x - center[0])**2 + (y - center[1])**2)
    envelope = j0(k_radius * rad) * np.exp(-rad**2 / (2.0 * width**2))
    psi = spin[:, None, None] * envelope[None]
    return SpinorField(psi=_normalize(psi, grid), grid=grid)


def band_packet(grid: GridSpec, spec: EffectiveHamiltonianSpec, center,
                width: float, momentum, band: int = 0) -> SpinorField:
    """Gaussian packet projected per momentum onto one dispersion band.

    The scalar Gaussian is Fourier transformed and each k component is
    aligned with the requested band's eigenspinor of H(k), so the packet
    moves at the band group velocity without interband beating.
    """
    scalar = gaussian_packet(grid, center, width, momentum, (1.0, 0.0))
    gk = _fft2(scalar.psi[0])
    kx, ky = momentum_grids(grid)
    c0, cx, cy, cz = _pauli_fields(spec.fields, spec.mass, kx, ky,
                                   include_phi=True)
    cm = np.sqrt(cx**2 + cy**2 + cz**2)
    sign = -1.0 if band == 0 else 1.0
    # eigenvector of c.sigma for eigenvalue sign*|c|
    v0 = cz + sign * cm
    v1 = cx + 1j * cy
    nrm = np.sqrt(np.abs(v0)**2 + np.abs(v1)**2)
    degenerate = nrm < 1e-14
    v0 = np.where(degenerate, 1.0, v0 / np.where(degenerate, 1.0, nrm))
    v1 = np.where(degenerate, 0.0, v1 / np.where(degenerate, 1.0, nrm))
    psi = _ifft2(np.stack([v0 * gk, v1 * gk]))
    return SpinorField(psi=_normalize(psi, grid), grid=grid)


def harmonic_trap(mass: float, trap_frequency: float):
    """External potential V(r) = m w^2 r^2 / 2 as a callable for grids."""
    def _v(x, y):
        return 0.5 * mass * trap_frequency**2 * (x**2 + y**2)
    return _v


# ----------------------------------------------------------------------
# observables container
# ----------------------------------------------------------------------

@dataclass
class EvolutionReport:
    """Time series of observables from one propagation run.

    populations has 2 columns (dressed-spin components) for reduced runs
    and 5 (dressed levels 1+, 2+, D, 1-, 2-) for full runs; populations sum
    to the total norm at every sample.  spin_expectations (normalized
    <sigma_xyz>) exist only for reduced runs, ground_fidelity only for full
    runs.  The terminal state is kept for overlap studies.
    """

    times: np.ndarray
    mean_position: np.ndarray          # (T, 2)
    norm: np.ndarray                   # (T,) total probability
    populations: np.ndarray            # (T, 2) or (T, 5)
    energy: np.ndarray                 # (T,)
    spin_expectations: np.ndarray | None = None   # (T, 3)
    ground_fidelity: np.ndarray | None = None     # (T,)
    final_state: object = None


def _sample_steps(grid: GridSpec) -> list[int]:
    steps = list(range(0, grid.n_steps + 1, grid.sample_stride))
    if steps[-1] != grid.n_steps:
        steps.append(grid.n_steps)
    return steps


def _mean_position(density: np.ndarray, grid: GridSpec, total: float):
    x, y = position_grids(grid)
    mx = float((density * x).sum() * grid.cell_area / total)
    my = float((density * y).sum() * grid.cell_area / total)
    return mx, my


# ----------------------------------------------------------------------
# reduced (2-level) evolver
# ----------------------------------------------------------------------

def _pauli_fields(fields, mass: float, kx, ky, include_phi: bool):
    """Pauli decomposition c0, cx, cy, cz of (hbar k - A)^2/2m (+ Phi)."""
    a_x, a_y = fields.a_x, fields.a_y
    const = (a_x @ a_x + a_y @ a_y) / (2.0 * mass)
    if include_phi:
        const = const + fields.phi
    k2 = HBAR**2 * (kx**2 + ky**2) / (2.0 * mass)
    h00 = k2 - (HBAR / mass) * (kx * a_x[0, 0].real + ky * a_y[0, 0].real) \
        + const[0, 0].real
    h11 = k2 - (HBAR / mass) * (kx * a_x[1, 1].real + ky * a_y[1, 1].real) \
        + const[1, 1].real
    h01 = -(HBAR / mass) * (kx * a_x[0, 1] + ky * a_y[0, 1]) + const[0, 1]
    c0 = 0.5 * (h00 + h11)
    cz = 0.5 * (h00 - h11)
    cx = h01.real
    cy = -h01.imag
    return c0, cx, cy, cz


def _expm_pauli(c0, cx, cy, cz, t: float):
    """exp(-i t (c0 I + c.sigma)) as four complex fields (m00, m01, m10, m11)."""
    cm = np.sqrt(cx**2 + cy**2 + cz**2)
    phase = np.exp(-1j * t * c0)
    cos = np.cos(t * cm)
    # sin(t|c|)/|c| -> t as |c| -> 0
    small = cm < 1e-300
    sinc = np.where(small, t, np.sin(t * np.where(small, 1.0, cm))
                    / np.where(small, 1.0, cm))
    p = phase * cos
    qx = -1j * phase * sinc * cx
    qy = -1j * phase * sinc * cy
    qz = -1j * phase * sinc * cz
    return p + qz, qx - 1j * qy, qx + 1j * qy, p - qz


def _apply_2x2(m, psi):
    m00, m01, m10, m11 = m
    out = np.empty_like(psi)
    out[0] = m00 * psi[0] + m01 * psi[1]
    out[1] = m10 * psi[0] + m11 * psi[1]
    return out


def _evaluate_potential(spec: EffectiveHamiltonianSpec, grid: GridSpec):
    v = spec.external_potential
    if v is None:
        return None
    if callable(v):
        x, y = position_grids(grid)
        v = v(x, y)
    v = np.asarray(v, dtype=float)
    if v.shape != (grid.nx, grid.ny):
        raise ValueError(f"potential shape {v.shape} does not match grid "
                         f"({grid.nx}, {grid.ny})")
    return v


def evolve_reduced(spec: EffectiveHamiltonianSpec, initial: SpinorField
                   ) -> EvolutionReport:
    """Strang split-step evolution of the projected 2-level Hamiltonian.

    Position half-step exp(-i (Phi + V) dt / 2), exact momentum step
    exp(-i (hbar k - A)^2 dt / 2m) per k, position half-step.  Both
    sub-propagators are exact, so norm is conserved to round-off and the
    only time-stepping error is the O(dt^2) splitting error.
    """
    grid = initial.grid
    kx, ky = momentum_grids(grid)
    c0, cx, cy, cz = _pauli_fields(spec.fields, spec.mass, kx, ky,
                                   include_phi=False)
    v = _evaluate_potential(spec, grid)

    phi = spec.fields.phi
    phi_evals, phi_vecs = np.linalg.eigh(phi)
    kinetic_max = float((np.abs(c0) + np.sqrt(cx**2 + cy**2 + cz**2)).max())
    h_max = kinetic_max + float(np.abs(phi_evals).max()) \
        + (float(np.abs(v).max()) if v is not None else 0.0)
    if grid.dt > np.pi * HBAR / h_max:
        raise UnstableStep(
            f"dt = {grid.dt:.3g} exceeds pi*hbar/max|H| = {np.pi * HBAR / h_max:.3g}")

    u_kin = _expm_pauli(c0, cx, cy, cz, grid.dt / HBAR)
    # exp(-i Phi dt / 2): constant 2x2, diagonalized once
    u_phi = (phi_vecs * np.exp(-1j * phi_evals * grid.dt / (2.0 * HBAR))) \
        @ phi_vecs.conj().T
    v_phase = (np.exp(-1j * v * grid.dt / (2.0 * HBAR))
               if v is not None else None)

    def half_position(psi):
        psi = np.einsum("ab,bxy->axy", u_phi, psi)
        if v_phase is not None:
            psi = psi * v_phase[None]
        return psi

    samples = _sample_steps(grid)
    recs = {"t": [], "pos": [], "norm": [], "pop": [], "spin": [], "en": []}

    def record(step, psi):
        dens = np.abs(psi) ** 2
        pops = dens.sum(axis=(1, 2)) * grid.cell_area
        total = float(pops.sum())
        recs["t"].append(step * grid.dt)
        recs["norm"].append(total)
        recs["pop"].append(pops)
        recs["pos"].append(_mean_position(dens.sum(axis=0), grid, total))
        sx = 2.0 * np.real(psi[0].conj() * psi[1]).sum() * grid.cell_area
        sy = 2.0 * np.imag(psi[0].conj() * psi[1]).sum() * grid.cell_area
        sz = float(pops[0] - pops[1])
        recs["spin"].append((sx / total, sy / total, sz / total))
        psik = _fft2(psi)
        kin = np.real(
            np.conj(psik[0]) * ((c0 + cz) * psik[0] + (cx - 1j * cy) * psik[1])
            + np.conj(psik[1]) * ((cx + 1j * cy) * psik[0] + (c0 - cz) * psik[1])
        ).sum() * grid.cell_area / (grid.nx * grid.ny)
        pot = np.real(np.einsum("axy,ab,bxy->", psi.conj(), phi, psi)) \
            * grid.cell_area
        if v is not None:
            pot += float((dens.sum(axis=0) * v).sum() * grid.cell_area)
        recs["en"].append((float(kin) + float(pot)) / total)

    psi = initial.psi.copy()
    record(0, psi)
    next_sample = 1
    for step in range(1, grid.n_steps + 1):
        psi = half_position(psi)
        psi = _ifft2(_apply_2x2(u_kin, _fft2(psi)))
        psi = half_position(psi)
        if step == samples[next_sample]:
            record(step, psi)
            next_sample += 1

    return EvolutionReport(
        times=np.array(recs["t"]), mean_position=np.array(recs["pos"]),
        norm=np.array(recs["norm"]), populations=np.array(recs["pop"]),
        energy=np.array(recs["en"]),
        spin_expectations=np.array(recs["spin"]),
        final_state=SpinorField(psi=psi, grid=grid))


# ----------------------------------------------------------------------
# full (5-level) evolver
# ----------------------------------------------------------------------

def frame_on_grid(config: LaserConfig, grid: GridSpec) -> np.ndarray:
    """Dressed-frame unitaries over the whole grid, shape (5, 5, nx, ny).

    Columns follow the fixed order (1+, 2+, D, 1-, 2-) and use the same
    closed formulas and gauge pinning as `atomlight.dressed_frame`.
    """
    if config.omega == 0.0:
        raise DegenerateCoupling("omega = 0: all five levels are degenerate")
    x, y = position_grids(grid)
    kr = np.einsum("jc,cxy->jxy", config.wavevectors, np.stack([x, y]))
    values = config.omega * np.exp(1j * (kr[:, None] + config.phases[:, :, None, None]))
    totals = np.sqrt((np.abs(values) ** 2).sum(axis=0))       # (2, nx, ny)

    ortho = np.abs((values[:, 1] * values[:, 0].conj()).sum(axis=0)) \
        / (totals[0] * totals[1])
    if float(ortho.max()) > ORTHOGONALITY_TOL:
        raise OrthogonalityViolation(
            f"|<B2|B1>| up to {float(ortho.max()):.3e} on the grid")

    bright = values.conj() / totals[None]                     # (3, 2, nx, ny)

    a = bright[:, 0].conj()
    b = bright[:, 1].conj()
    dark = np.stack([a[1] * b[2] - a[2] * b[1],
                     a[2] * b[0] - a[0] * b[2],
                     a[0] * b[1] - a[1] * b[0]])
    dark = dark / np.sqrt((np.abs(dark) ** 2).sum(axis=0))[None]
    mags = np.abs(dark)
    pick = np.where(mags[0] >= 0.5 * mags.max(axis=0), 0, np.argmax(mags, axis=0))
    d_sel = np.choose(pick, dark)
    kr_sel = np.choose(pick, kr)
    c = d_sel * np.exp(1j * kr_sel)
    dark = dark * (c.conj() / np.abs(c))[None]

    w = np.zeros((5, 5, grid.nx, grid.ny), dtype=complex)
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    for p in range(2):
        w[:3, p] = bright[:, p] * inv_sqrt2          # |p,+>
        w[3 + p, p] = inv_sqrt2
        w[:3, 3 + p] = bright[:, p] * inv_sqrt2      # |p,->
        w[3 + p, 3 + p] = -inv_sqrt2
    w[:3, 2] = dark
    return w


def dressed_energies(config: LaserConfig) -> np.ndarray:
    """Eigenvalues (1+, 2+, D, 1-, 2-) of the coupling Hamiltonian."""
    s3 = np.sqrt(3.0) * HBAR * config.omega
    return np.array([-s3, -s3, 0.0, s3, s3])


def map_reduced_to_full(field: SpinorField, config: LaserConfig) -> FullField:
    """Lift a doublet spinor into the bare basis via the local dressed frame:
    psi_full(r) = sum_q Psi_q(r) |q,+,r>."""
    w = frame_on_grid(config, field.grid)
    psi = np.einsum("cqxy,qxy->cxy", w[:, :2], field.psi)
    return FullField(psi=psi, grid=field.grid)


def project_full_to_reduced(field: FullField, config: LaserConfig) -> SpinorField:
    """Project a bare-basis field onto the dressed ground doublet."""
    w = frame_on_grid(config, field.grid)
    psi = np.einsum("cqxy,cxy->qxy", w[:, :2].conj(), field.psi)
    return SpinorField(psi=psi, grid=field.grid)


def _dressed_amplitudes(w: np.ndarray, psi: np.ndarray) -> np.ndarray:
    """Per-point projections <n,r|psi(r)>, shape (5, nx, ny)."""
    return np.einsum("cnxy,cxy->nxy", w.conj(), psi)


def _check_plane_wave_resolution(config: LaserConfig, grid: GridSpec):
    k_max = float(np.sqrt((config.wavevectors**2).sum(axis=1)).max())
    if k_max <= 0:
        return
    limit = (2.0 * np.pi / k_max) / 8.0
    if max(grid.dx, grid.dy) > limit:
        raise GridTooCoarse(
            f"grid spacing {max(grid.dx, grid.dy):.3g} exceeds {limit:.3g}; "
            "laser plane waves would be unresolved")


def evolve_full(config: LaserConfig, initial: FullField) -> EvolutionReport:
    """Strang split-step evolution of the full 5-level Hamiltonian.

    Coupling half-step exp(-i H0(r) dt / 2) evaluated exactly per grid point
    from the closed-form eigendecomposition, exact kinetic step in momentum
    space, coupling half-step.  Populations are projections onto the five
    dressed states; ground-manifold fidelity sums the |1,+> and |2,+>
    populations.
    """
    if config.omega == 0.0:
        raise DegenerateCoupling(
            "omega = 0: dressed populations undefined; use a free propagator")
    grid = initial.grid
    _check_plane_wave_resolution(config, grid)

    kx, ky = momentum_grids(grid)
    kinetic = HBAR**2 * (kx**2 + ky**2) / (2.0 * config.mass)
    energies = dressed_energies(config)

    h_max = float(kinetic.max()) + float(np.abs(energies).max())
    if grid.dt > np.pi * HBAR / h_max:
        raise UnstableStep(
            f"dt = {grid.dt:.3g} exceeds pi*hbar/max|H| = {np.pi * HBAR / h_max:.3g}")

    w = frame_on_grid(config, grid)
    half_phases = np.exp(-1j * energies * grid.dt / (2.0 * HBAR))
    u_half = np.einsum("anxy,n,bnxy->abxy", w, half_phases, w.conj())
    kin_phase = np.exp(-1j * kinetic * grid.dt / HBAR)[None]

    def couple_half(psi):
        return np.einsum("abxy,bxy->axy", u_half, psi)

    samples = _sample_steps(grid)
    recs = {"t": [], "pos": [], "norm": [], "pop": [], "fid": [], "en": []}

    def record(step, psi):
        dens = np.abs(psi) ** 2
        total = float(dens.sum() * grid.cell_area)
        amps = _dressed_amplitudes(w, psi)
        pops = (np.abs(amps) ** 2).sum(axis=(1, 2)) * grid.cell_area
        psik = _fft2(psi)
        kin = float(np.real(np.abs(psik) ** 2 * kinetic[None]).sum()
                    * grid.cell_area / (grid.nx * grid.ny))
        recs["t"].append(step * grid.dt)
        recs["norm"].append(total)
        recs["pop"].append(pops)
        recs["fid"].append(float(pops[0] + pops[1]) / total)
        recs["pos"].append(_mean_position(dens.sum(axis=0), grid, total))
        recs["en"].append((kin + float((energies * pops).sum())) / total)

    psi = initial.psi.copy()
    record(0, psi)
    next_sample = 1
    for step in range(1, grid.n_steps + 1):
        psi = couple_half(psi)
        psi = _ifft2(kin_phase * _fft2(psi))
        psi = couple_half(psi)
        if step == samples[next_sample]:
            record(step, psi)
            next_sample += 1

    return EvolutionReport(
        times=np.array(recs["t"]), mean_position=np.array(recs["pos"]),
        norm=np.array(recs["norm"]), populations=np.array(recs["pop"]),
        energy=np.array(recs["en"]),
        ground_fidelity=np.array(recs["fid"]),
        final_state=FullField(psi=psi, grid=grid))


# ----------------------------------------------------------------------
# experiments
# ----------------------------------------------------------------------

@dataclass
class AdiabaticComparison:
    """Reduced-vs-full overlap as a function of the Rabi amplitude."""

    omega_recoil: np.ndarray      # tested Omega / E_r values
    overlaps: np.ndarray          # |<mapped reduced | full>|^2 at t_final
    t_final: float


def compare_adiabatic(config: LaserConfig, grid: GridSpec,
                      initial: SpinorField, omega_recoil_list,
                      coupling_phase_per_step: float = 0.15
                      ) -> AdiabaticComparison:
    """Propagate the same packet in both representations for each Omega.

    The reduced dynamics does not depend on Omega (A and Phi are geometric),
    so it runs once; for each Omega the packet is lifted through the local
    dressed frame, evolved under the full Hamiltonian with a time step small
    enough that the coupling phase sqrt(3) Omega dt stays below
    `coupling_phase_per_step`, and compared at the common final time.
    """
    from .gauge import analytic_gauge_fields

    e_r = config.recoil_energy
    spec = EffectiveHamiltonianSpec(fields=analytic_gauge_fields(config),
                                    mass=config.mass)
    reduced = evolve_reduced(spec, initial)
    t_final = grid.total_time

    overlaps = []
    for om_er in omega_recoil_list:
        cfg = replace(config, omega=float(om_er) * e_r)
        coupling_rate = np.sqrt(3.0) * cfg.omega / HBAR
        dt_max = coupling_phase_per_step / coupling_rate
        n = max(grid.n_steps, int(np.ceil(t_final / dt_max)))
        g = replace(grid, dt=t_final / n, n_steps=n,
                    sample_stride=max(n, 1))
        full0 = map_reduced_to_full(SpinorField(initial.psi, g), cfg)
        full = evolve_full(cfg, full0)
        mapped = map_reduced_to_full(
            SpinorField(reduced.final_state.psi, g), cfg)
        overlaps.append(overlap(mapped, full.final_state))

    return AdiabaticComparison(omega_recoil=np.asarray(omega_recoil_list, float),
                               overlaps=np.array(overlaps), t_final=t_final)


def dominant_frequency(times: np.ndarray, series: np.ndarray) -> float:
    """Angular frequency of the strongest spectral line of a time series.

    The series is linearly detrended, discrete-Fourier transformed, and the
    peak bin refined by parabolic interpolation of the log magnitude.
    """
    times = np.asarray(times, float)
    series = np.asarray(series, float)
    dt = times[1] - times[0]
    detrended = series - np.polyval(np.polyfit(times, series, 1), times)
    spectrum = np.abs(np.fft.rfft(detrended))
    if len(spectrum) < 3:
        raise ValueError("series too short for frequency extraction")
    peak = int(np.argmax(spectrum[1:])) + 1
    if 1 <= peak < len(spectrum) - 1:
        with np.errstate(divide="ignore"):
            la, lb, lc = np.log(spectrum[peak - 1:peak + 2])
        denom = la - 2.0 * lb + lc
        shift = 0.5 * (la - lc) / denom if np.isfinite(denom) and denom != 0 else 0.0
        shift = float(np.clip(shift, -0.5, 0.5))
    else:
        shift = 0.0
    return 2.0 * np.pi * (peak + shift) / (len(times) * dt)


def packet_mean_band_splitting(spec: EffectiveHamiltonianSpec,
                               field: SpinorField) -> float:
    """Band splitting E_+ - E_- averaged over the packet's |Psi(k)|^2."""
    kx, ky = momentum_grids(field.grid)
    _, cx, cy, cz = _pauli_fields(spec.fields, spec.mass, kx, ky,
                                  include_phi=True)
    splitting = 2.0 * np.sqrt(cx**2 + cy**2 + cz**2)
    weight = (np.abs(_fft2(field.psi)) ** 2).sum(axis=0)
    return float((weight * splitting).sum() / weight.sum())


@dataclass
class ZitterbewegungResult:
    """Measured trembling frequency against the packet-averaged splitting."""

    measured_frequency: float       # angular, from the <x(t)> spectrum
    expected_frequency: float       # packet-averaged (E_+ - E_-) / hbar
    report: EvolutionReport

    @property
    def relative_error(self) -> float:
        return abs(self.measured_frequency - self.expected_frequency) \
            / self.expected_frequency


def zitterbewegung_experiment(config: LaserConfig, grid: GridSpec,
                              k_radius: float | None = None,
                              width: float | None = None,
                              spin=(1.0, 1.0)) -> ZitterbewegungResult:
    """Trembling of <x(t)> for a rest packet populating both bands.

    A zero-mean-momentum annular packet (momentum support near |k| =
    k_radius) with a spin not aligned to either band is evolved under the
    reduced Hamiltonian; interference between the spin-orbit-split bands
    makes <x(t)> oscillate at the local band splitting.  The dominant
    frequency of the oscillation is compared with the splitting averaged
    over the packet's momentum distribution.
    """
    from .gauge import analytic_gauge_fields

    if k_radius is None:
        k_radius = 0.8 * config.kappa
    if width is None:
        width = 8.0 / config.kappa
    spec = EffectiveHamiltonianSpec(fields=analytic_gauge_fields(config),
                                    mass=config.mass)
    packet = ring_packet(grid, k_radius=k_radius, width=width, spin=spin)
    expected = packet_mean_band_splitting(spec, packet) / HBAR
    report = evolve_reduced(spec, packet)
    measured = dominant_frequency(report.times, report.mean_position[:, 0])
    return ZitterbewegungResult(measured_frequency=measured,
                                expected_frequency=expected, report=report)
