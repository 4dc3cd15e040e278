"""Rashba-Dresselhaus spin-orbit coupling from a double-tripod laser scheme.

Simulation and validation suite: exact dressed states of the 5-level
atom-light Hamiltonian, geometric gauge potentials of the ground doublet
(closed form and numerical Berry connection), the effective spin-1/2 band
structure, and split-step wavepacket dynamics in both the full and the
adiabatically reduced descriptions.
"""

from .atomlight import (DressedFrame, LaserConfig, RabiMatrix, build_hamiltonian,
                        default_phases, dressed_frame, rabi_matrix,
                        verify_frame_against_eigensolver)
from .bands import (DispersionResult, EffectiveHamiltonianSpec, band_energies,
                    bloch_hamiltonian, closed_form_band_energies, dispersion,
                    radial_k_grid)
from .dynamics import (AdiabaticComparison, EvolutionReport, FullField, GridSpec,
                       SpinorField, ZitterbewegungResult, band_packet,
                       compare_adiabatic, dominant_frequency, evolve_full,
                       evolve_reduced, field_inner, field_norm, frame_on_grid,
                       gaussian_packet, harmonic_trap, map_reduced_to_full,
                       overlap, project_full_to_reduced, ring_packet,
                       zitterbewegung_experiment)
from .errors import (ConfigError, DegenerateCoupling, DoubleTripodError,
                     GridTooCoarse, InvalidKappa, OrthogonalityViolation,
                     PacketTooNarrow, PacketTouchesBoundary, PotentialPresent,
                     StepTooSmall, UnstableStep)
from .gauge import (GaugeFields, analytic_gauge_fields, gauge_convergence_report,
                    numeric_gauge_fields, rashba_relabel, scalar_potential_analytic,
                    scalar_potential_numeric, vector_potential_analytic,
                    vector_potential_numeric)
from .geometry import (HBAR, random_closed_wavevectors, recoil_energy,
                       regular_triangle_wavevectors)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
