"""Command-line interface: config ingestion, subcommands, output emission.

Subcommands: `spectrum`, `gauge`, `bands`, `evolve`, `validate`.  A run is
configured by a YAML file (strict: unknown keys are rejected) plus a few
flags; identical config and seed produce byte-identical output files.
Exit codes: 0 success, 1 validation failure, 2 usage or config error.
"""

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import validation
from .atomlight import (LaserConfig, default_phases, dressed_frame,
                        verify_frame_against_eigensolver)
from .bands import EffectiveHamiltonianSpec, band_energies, dispersion, radial_k_grid
from .dynamics import (GridSpec, compare_adiabatic, evolve_full, evolve_reduced,
                       gaussian_packet, harmonic_trap, map_reduced_to_full,
                       zitterbewegung_experiment)
from .errors import ConfigError, DegenerateCoupling, DoubleTripodError
from .gauge import (GaugeFields, analytic_gauge_fields, gauge_convergence_report,
                    numeric_gauge_fields, rashba_relabel)
from .geometry import HBAR, recoil_energy, regular_triangle_wavevectors
from .output import (write_columns, write_dispersion, write_evolution_report,
                     write_snapshot)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2


# ----------------------------------------------------------------------
# configuration schema (strict key checking at every level)
# ----------------------------------------------------------------------

@dataclass
class RunConfig:
    scheme: dict = field(default_factory=dict)
    grid: dict = field(default_factory=dict)
    experiment: dict = field(default_factory=dict)
    bands: dict = field(default_factory=dict)
    gauge: dict = field(default_factory=dict)
    spectrum: dict = field(default_factory=dict)
    seed: int = 12345


_SCHEMA = {
    "scheme": {"omega_recoil", "omega", "kappa", "mass", "wavevectors", "phases"},
    "grid": {"nx", "ny", "lx", "ly", "dt", "n_steps", "sample_stride"},
    "experiment": {"kind", "packet", "omega_recoil_list", "trap_frequency",
                   "ring_k_radius", "ring_width", "snapshots_every"},
    "bands": {"n_radial", "n_angles", "k_max_kappa", "zero_coupling"},
    "gauge": {"step", "position"},
    "spectrum": {"n_positions", "box"},
}
_PACKET_KEYS = {"center", "width", "momentum", "spin"}


def _check_keys(mapping, allowed, where):
    unknown = set(mapping) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {sorted(unknown)}")


def load_config(path: str | None) -> RunConfig:
    """Parse the YAML run configuration, rejecting unknown keys."""
    if path is None:
        return RunConfig()
    try:
        raw = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed YAML: {exc}") from exc
    if raw is None:
        return RunConfig()
    if not isinstance(raw, dict):
        raise ConfigError("top-level config must be a mapping")
    _check_keys(raw, set(_SCHEMA) | {"seed"}, "config root")
    cfg = RunConfig()
    for section, allowed in _SCHEMA.items():
        block = raw.get(section, {})
        if block is None:
            block = {}
        if not isinstance(block, dict):
            raise ConfigError(f"section '{section}' must be a mapping")
        _check_keys(block, allowed, f"section '{section}'")
        setattr(cfg, section, block)
    packet = cfg.experiment.get("packet")
    if packet is not None:
        if not isinstance(packet, dict):
            raise ConfigError("experiment.packet must be a mapping")
        _check_keys(packet, _PACKET_KEYS, "experiment.packet")
    if "seed" in raw:
        cfg.seed = int(raw["seed"])
    return cfg


def laser_config(cfg: RunConfig) -> LaserConfig:
    """Build the physical configuration, defaulting to the canonical setup."""
    s = cfg.scheme
    kappa = float(s.get("kappa", 1.0))
    mass = float(s.get("mass", 1.0))
    e_r = recoil_energy(kappa, mass)
    if "omega" in s and s["omega"] is not None:
        omega = float(s["omega"])
    else:
        omega = float(s.get("omega_recoil", 20.0)) * e_r
    wavevectors = (np.asarray(s["wavevectors"], dtype=float)
                   if s.get("wavevectors") is not None
                   else regular_triangle_wavevectors(kappa))
    phases = (np.asarray(s["phases"], dtype=float)
              if s.get("phases") is not None else default_phases())
    try:
        return LaserConfig(omega=omega, kappa=kappa, wavevectors=wavevectors,
                           phases=phases, mass=mass)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def grid_spec(cfg: RunConfig) -> GridSpec:
    g = cfg.grid
    try:
        return GridSpec(nx=int(g.get("nx", 256)), ny=int(g.get("ny", 256)),
                        lx=float(g.get("lx", 140.0)), ly=float(g.get("ly", 140.0)),
                        dt=float(g.get("dt", 0.02)),
                        n_steps=int(g.get("n_steps", 500)),
                        sample_stride=int(g.get("sample_stride", 10)))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _packet_params(cfg: RunConfig):
    p = cfg.experiment.get("packet") or {}
    center = tuple(p.get("center", (0.0, 0.0)))
    width = float(p.get("width", 9.0))
    momentum = tuple(p.get("momentum", (0.2, 0.0)))
    spin_raw = p.get("spin")
    spin_explicit = spin_raw is not None
    if spin_raw is None:
        spin_raw = [[1.0, 0.0], [0.0, 0.0]]
    spin = np.array([complex(re, im) for re, im in spin_raw])
    return center, width, momentum, spin, spin_explicit


def _out_dir(args) -> Path | None:
    if args.out is None:
        return None
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write_probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise ConfigError(f"output directory not writable: {exc}") from exc
    return out


def _fields_block(title, fields: GaugeFields):
    lines = [title]
    for name, m in (("A_x", fields.a_x), ("A_y", fields.a_y), ("Phi", fields.phi)):
        lines.append(f"  {name}:")
        for row in m:
            lines.append("    " + "  ".join(f"{v.real:+.9e}{v.imag:+.9e}j"
                                            for v in row))
    return lines


# ----------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------

def cmd_spectrum(cfg: RunConfig, args) -> int:
    lcfg = laser_config(cfg)
    if lcfg.omega == 0.0:
        raise DegenerateCoupling("omega = 0: spectrum is totally degenerate")
    n = int(cfg.spectrum.get("n_positions", 100))
    box = float(cfg.spectrum.get("box", 20.0))
    rng = np.random.default_rng(args.seed if args.seed is not None else cfg.seed)
    scale = np.sqrt(3.0) * HBAR * lcfg.omega
    worst_dev = worst_angle = 0.0
    # raises OrthogonalityViolation with the measured residual for bad phases
    dressed_frame(lcfg, [0.0, 0.0])
    for _ in range(n):
        rep = verify_frame_against_eigensolver(lcfg, rng.uniform(-box, box, 2))
        worst_dev = max(worst_dev, rep.max_energy_deviation)
        worst_angle = max(worst_angle, rep.subspace_angle)
    energies = scale * np.array([-1.0, -1.0, 0.0, 1.0, 1.0])
    print("dressed spectrum (energy units, hbar = 1):")
    for label, e in zip(("|1,+>", "|2,+>", "|D>  ", "|1,->", "|2,->"), energies):
        print(f"  {label}  {e:+.12e}")
    print(f"max eigenvalue deviation over {n} positions: {worst_dev:.3e}")
    print(f"max ground-doublet subspace angle: {worst_angle:.3e} rad")
    ok = worst_dev <= 1e-12 * scale and worst_angle <= 1e-10
    out = _out_dir(args)
    if out is not None:
        write_columns(out / "spectrum.txt", ["level", "energy"],
                      [np.arange(5, dtype=float), energies],
                      header_lines=[f"dressed energies, omega={lcfg.omega:.6g}",
                                    f"max_eigenvalue_deviation={worst_dev:.6e}",
                                    f"max_subspace_angle={worst_angle:.6e}"])
    print("spectrum check:", "PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_VALIDATION


def cmd_gauge(cfg: RunConfig, args) -> int:
    lcfg = laser_config(cfg)
    e_r = lcfg.recoil_energy
    h = float(cfg.gauge.get("step", 1e-4 / lcfg.kappa))
    r = np.asarray(cfg.gauge.get("position", (0.0, 0.0)), dtype=float)
    analytic = analytic_gauge_fields(lcfg)
    numeric = numeric_gauge_fields(lcfg, r, h=h)
    if args.rashba:
        analytic = rashba_relabel(analytic)
        numeric = rashba_relabel(numeric)
    rep = gauge_convergence_report(lcfg, r, h=h)
    dev_a = max(np.abs(numeric.a_x - analytic.a_x).max(),
                np.abs(numeric.a_y - analytic.a_y).max())
    dev_phi = np.abs(numeric.phi - analytic.phi).max()

    lines = []
    lines += _fields_block("analytic gauge fields:", analytic)
    lines += _fields_block("numeric gauge fields (central differences):", numeric)
    lines.append(f"elementwise deviation: A {dev_a:.3e}, Phi {dev_phi:.3e}")
    lines.append(f"differencing step h = {h:.3e}")
    lines.append(f"convergence order: A {rep.vector_order:.3f}, "
                 f"Phi {rep.scalar_order:.3f}")
    print("\n".join(lines))

    ok = (dev_a <= 1e-6 * HBAR * lcfg.kappa and dev_phi <= 1e-6 * e_r
          and rep.vector_order >= 1.9 and rep.scalar_order >= 1.9)
    out = _out_dir(args)
    if out is not None:
        (out / "gauge.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    print("gauge check:", "PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_VALIDATION


def cmd_bands(cfg: RunConfig, args) -> int:
    lcfg = laser_config(cfg)
    b = cfg.bands
    if bool(b.get("zero_coupling", False)):
        zero = np.zeros((2, 2), dtype=complex)
        fields = GaugeFields(a_x=zero, a_y=zero, phi=zero)
    else:
        fields = analytic_gauge_fields(lcfg)
    if args.rashba:
        fields = rashba_relabel(fields)
    spec = EffectiveHamiltonianSpec(fields=fields, mass=lcfg.mass)
    k_grid = radial_k_grid(float(b.get("k_max_kappa", 1.0)) * lcfg.kappa,
                           n_radial=int(b.get("n_radial", 256)),
                           n_angles=int(b.get("n_angles", 16)))
    result = dispersion(spec, k_grid, kappa=lcfg.kappa)
    gap = float(np.diff(band_energies(
        spec, np.array([[result.ring_radius, 0.0]]))[0])[0])
    print(f"lower-band minimum ring radius: {result.ring_radius:.8f} "
          f"(kappa = {lcfg.kappa:g})")
    print(f"minimum energy: {result.min_energy:.8f}")
    print(f"band gap at the ring: {gap:.8f}")
    out = _out_dir(args)
    if out is not None:
        write_dispersion(out / "bands.txt", result,
                         header_lines=["band energies over the momentum grid",
                                       f"omega={lcfg.omega:.6g} kappa={lcfg.kappa:g} "
                                       f"mass={lcfg.mass:g}"])
    return EXIT_OK


def cmd_evolve(cfg: RunConfig, args) -> int:
    lcfg = laser_config(cfg)
    grid = grid_spec(cfg)
    kind = cfg.experiment.get("kind", "reduced")
    center, width, momentum, spin, spin_explicit = _packet_params(cfg)
    out = _out_dir(args)
    snapshots_every = int(cfg.experiment.get("snapshots_every", 0))

    if kind == "reduced":
        trap = float(cfg.experiment.get("trap_frequency", 0.0))
        potential = harmonic_trap(lcfg.mass, trap) if trap > 0 else None
        spec = EffectiveHamiltonianSpec(fields=analytic_gauge_fields(lcfg),
                                        mass=lcfg.mass,
                                        external_potential=potential)
        pkt = gaussian_packet(grid, center, width, momentum, spin)
        report = evolve_reduced(spec, pkt)
        label = "reduced two-level evolution"
    elif kind == "full":
        pkt = gaussian_packet(grid, center, width, momentum, spin)
        report = evolve_full(lcfg, map_reduced_to_full(pkt, lcfg))
        label = "full five-level evolution"
    elif kind == "compare":
        omegas = cfg.experiment.get("omega_recoil_list", [2, 5, 10, 20, 50, 100])
        pkt = gaussian_packet(grid, center, width, momentum, spin)
        comp = compare_adiabatic(lcfg, grid, pkt, omegas)
        print("adiabatic comparison (overlap of reduced and full at "
              f"t = {comp.t_final:g}):")
        for om, ov in zip(comp.omega_recoil, comp.overlaps):
            print(f"  Omega = {om:8.2f} E_r   overlap = {ov:.8f}")
        monotone = bool(np.all(np.diff(comp.overlaps) >= -1e-9))
        print(f"monotone non-decreasing: {monotone}")
        if out is not None:
            write_columns(out / "adiabatic.txt", ["omega_recoil", "overlap"],
                          [comp.omega_recoil, comp.overlaps],
                          header_lines=["reduced-vs-full overlap sweep",
                                        f"t_final={comp.t_final:.6g}"])
        return EXIT_OK if monotone else EXIT_VALIDATION
    elif kind == "zitterbewegung":
        k_radius = cfg.experiment.get("ring_k_radius")
        ring_width = cfg.experiment.get("ring_width")
        # a pure dressed-spin-up rest packet gives no net trembling (odd
        # in k), so the default spin populates both bands unevenly
        res = zitterbewegung_experiment(
            lcfg, grid,
            k_radius=None if k_radius is None else float(k_radius),
            width=None if ring_width is None else float(ring_width),
            spin=spin if spin_explicit else (1.0, 1.0))
        report = res.report
        print(f"measured trembling frequency: {res.measured_frequency:.6f}")
        print(f"packet-averaged band splitting / hbar: "
              f"{res.expected_frequency:.6f}")
        print(f"relative error: {res.relative_error:.4f}")
        if out is not None:
            write_evolution_report(out / "observables.txt", report,
                                   header_lines=["zitterbewegung run"])
            write_columns(out / "zitterbewegung.txt",
                          ["measured", "expected", "relative_error"],
                          [np.array([res.measured_frequency]),
                           np.array([res.expected_frequency]),
                           np.array([res.relative_error])],
                          header_lines=["trembling frequency summary"])
        return EXIT_OK
    else:
        raise ConfigError(f"unknown experiment kind '{kind}'")

    drift = float(np.abs(report.norm - report.norm[0]).max())
    print(f"{label}: {grid.n_steps} steps, dt = {grid.dt:g}")
    print(f"norm drift: {drift:.3e}")
    print(f"final mean position: ({report.mean_position[-1][0]:+.6f}, "
          f"{report.mean_position[-1][1]:+.6f})")
    if out is not None:
        write_evolution_report(out / "observables.txt", report,
                               header_lines=[label])
        if snapshots_every > 0:
            psi = report.final_state.psi
            write_snapshot(out / f"state_{grid.n_steps:06d}.snap", psi,
                           grid.lx, grid.ly, report.times[-1])
    return EXIT_OK


def cmd_validate(cfg: RunConfig, args) -> int:
    results = validation.run_all()
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)} / {len(results)} criteria passed")
    return EXIT_OK if not failed else EXIT_VALIDATION


# ----------------------------------------------------------------------
# entry point
# ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="doubletripod",
        description="Double-tripod laser scheme: dressed states, geometric "
                    "gauge potentials, bands, and wavepacket dynamics")
    parser.add_argument("--config", metavar="PATH", help="YAML run configuration")
    parser.add_argument("--out", metavar="DIR", help="output directory")
    parser.add_argument("--seed", type=int, help="seed override")
    parser.add_argument("--rashba", action="store_true",
                        help="relabel x <-> y (Rashba form of the coupling)")
    parser.add_argument("command",
                        choices=["spectrum", "gauge", "bands", "evolve",
                                 "validate"],
                        help="what to run")
    return parser


_HANDLERS = {"spectrum": cmd_spectrum, "gauge": cmd_gauge, "bands": cmd_bands,
             "evolve": cmd_evolve, "validate": cmd_validate}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
        return _HANDLERS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DoubleTripodError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
