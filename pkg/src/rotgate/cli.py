"""Command-line interface: solve, pulse, simulate, scan, circuit, observe, constants, repro, rerun."""
from __future__ import annotations

import argparse
import sys
import tempfile
import time
import warnings
from pathlib import Path

import numpy as np
import yaml

from . import __version__, kernels
from . import io as rio
from .angles import format_angle, parse_angle
from .circuit import CircuitSpec, PulseTemplate, run_circuit
from .config import RunConfig, from_mapping, load_config, merge
from .errors import NumericalError, ValidationError
from .metrics import average_gate_fidelity
from .observables import (angular_distribution, extract_phase, magic_angle, orientation,
                          orientation_trace)
from .propagator import basis_state, propagate, propagate_converged
from .pulses import apply_errors, synthesize
from .rotor import RotationalBasis, dipole_element
from .scan import PRESETS, ScanAxis, line_cut, preset_scan, scan_2d
from .synthesis import NAMED_GATES, complex_pulse_area, solve_two_pulse, wrap_phase

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 1, 2
TABLE_GATES = ("Z", "H", "S", "T")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _add_common(p):
    p.add_argument("--config", help="YAML/JSON run configuration")
    p.add_argument("--molecule", help="molecule file (keys name, B_cm1, mu0_debye, j_max)")
    p.add_argument("--j-max", type=int, dest="j_max")
    p.add_argument("--bandwidth-ratio", type=float, dest="bandwidth_ratio", help="bandwidth in omega01")
    p.add_argument("--delay-revivals", type=float, dest="delay_revivals", help="pulse delay in tau0")
    p.add_argument("--dt", type=float, help="time step override (s)")
    p.add_argument("--scheme", choices=("midpoint", "cf4"))
    p.add_argument("--out", help="output directory")
    p.add_argument("--backend", choices=("cython", "python"), help="propagation kernel")


def _add_gate(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--gate", help=f"named gate ({', '.join(NAMED_GATES)})")
    g.add_argument("--matrix", nargs=8, type=float, metavar="X", help="8 reals, row-major re/im pairs")
    p.add_argument("--params", nargs=4, metavar=("THETA1", "PHI1", "THETA2", "PHI2"),
                   help="custom pulse areas/phases (accepts forms like pi/2)")


def _add_errors(p):
    p.add_argument("--bandwidth-error", type=float, dest="bandwidth_error", help="fractional")
    p.add_argument("--phase-error", dest="common_phase_error", help="common phase error (rad)")
    p.add_argument("--detuning", type=float, dest="detuning_ratio", help="carrier detuning in omega01")
    p.add_argument("--delay-error", type=float, dest="delay_ratio", help="delay error in tau")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="rotgate", description=__doc__)
    ap.add_argument("--version", action="version", version=f"rotgate {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="two-pulse parameters for a gate")
    _add_common(p)
    _add_gate(p)
    p.add_argument("--json", action="store_true", help="print JSON instead of the table row")

    p = sub.add_parser("pulse", help="synthesize and export the waveform")
    _add_common(p)
    _add_gate(p)
    _add_errors(p)

    p = sub.add_parser("simulate", help="solve, synthesize, propagate and score one gate")
    _add_common(p)
    _add_gate(p)
    _add_errors(p)
    p.add_argument("--no-converge", action="store_false", dest="converge", default=None,
                   help="single run at dt, skip the convergence ladder")

    p = sub.add_parser("scan", help="two-parameter fidelity sweep")
    _add_common(p)
    _add_gate(p)
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--axis", action="append", metavar="PARAM:START:STOP:NUM",
                   help="custom axis in error-model units (give twice)")
    p.add_argument("--workers", type=int)

    p = sub.add_parser("circuit", help="run a phase-locked gate sequence")
    _add_common(p)
    p.add_argument("--gates", help="comma-separated gate names, e.g. H,T,S,Z")
    p.add_argument("--gap", type=float, help="extra idle time between gate windows (s)")

    p = sub.add_parser("observe", help="orientation readout after a gate sequence")
    _add_common(p)
    p.add_argument("--after", help="comma-separated gates applied to |0> first ('none' for |0>)")

    p = sub.add_parser("constants", help="print derived molecular constants")
    _add_common(p)

    p = sub.add_parser("repro", help="regenerate data for a figure analog")
    _add_common(p)
    p.add_argument("figure", choices=("fig2", "fig3", "fig4", "fig5"))
    p.add_argument("--workers", type=int)

    p = sub.add_parser("rerun", help="re-execute a manifest and compare output hashes")
    p.add_argument("manifest")
    p.add_argument("--out", help="directory for the re-run (default: temporary)")
    return ap


def _config_from_args(args) -> RunConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else RunConfig()
    over = {k: getattr(args, k, None) for k in
            ("molecule", "j_max", "bandwidth_ratio", "delay_revivals", "dt", "scheme", "out",
             "gate", "matrix", "params", "gates", "gap", "workers", "converge")}
    if getattr(args, "after", None) is not None:
        over["after"] = [] if args.after.lower() == "none" else args.after
    over["errors"] = {k: getattr(args, k, None) for k in
                      ("bandwidth_error", "common_phase_error", "detuning_ratio", "delay_ratio")}
    if getattr(args, "preset", None) or getattr(args, "axis", None):
        scan = {"preset": args.preset}
        if args.axis:
            scan["axes"] = [_parse_axis(a) for a in args.axis]
        over["scan"] = scan
    if any(over.get(k) is not None for k in ("gate", "matrix", "params")):
        # an explicit gate flag replaces whatever the config file selected
        data = cfg.to_dict()
        data.update(gate=None, matrix=None, params=None)
        cfg = from_mapping(data)
    return merge(cfg, over)


def _parse_axis(text) -> dict:
    parts = text.split(":")
    if len(parts) != 4:
        raise ValidationError(f"axis {text!r} must look like PARAM:START:STOP:NUM")
    try:
        return {"parameter": parts[0], "start": parse_angle(parts[1]), "stop": parse_angle(parts[2]),
                "num": int(parts[3])}
    except ValueError:
        raise ValidationError(f"bad number in axis {text!r}") from None


def _pi(x) -> str:
    return format_angle(float(x))


def _echo(*a):
    print(*a, flush=True)


# commands -------------------------------------------------------------------

def cmd_solve(cfg: RunConfig, args, tree) -> int:
    spec = cfg.rotor()
    gate = cfg.target()
    params, alpha = solve_two_pulse(gate, **cfg.timing(spec))
    row = {"gate": gate.name, "alpha": alpha, "theta1": params.theta1, "phi1": params.phi1,
           "theta2": params.theta2, "phi2": params.phi2}
    data = {**row, "pi_fractions": {k: _pi(v) for k, v in row.items() if k != "gate"}}
    if args.json:
        _echo(rio.dumps(data))
    else:
        _echo(f"{'gate':<8}{'alpha':>10}{'theta1':>10}{'phi1':>10}{'theta2':>10}{'phi2':>10}")
        _echo(f"{gate.name:<8}" + "".join(f"{_pi(row[k]):>10}" for k in
                                           ("alpha", "theta1", "phi1", "theta2", "phi2")))
        _echo(f"{'(rad)':<8}" + "".join(f"{row[k]:>10.6f}" for k in
                                         ("alpha", "theta1", "phi1", "theta2", "phi2")))
    if tree is not None:
        tree.add(rio.write_json(tree.path("solve.json"), data))
    return EXIT_OK


def _gate_params(cfg, spec):
    if cfg.params is not None and cfg.gate is None and cfg.matrix is None:
        return cfg.custom_params(spec), 0.0
    return solve_two_pulse(cfg.target(), **cfg.timing(spec))


def _summarize_window(w):
    _echo(f"window        [{w.window[0] * 1e9:.4f}, {w.window[1] * 1e9:.4f}] ns "
          f"(duration {w.duration * 1e9:.3f} ns)")


def cmd_pulse(cfg, args, tree) -> int:
    spec = cfg.rotor()
    params, alpha = _gate_params(cfg, spec)
    err = cfg.error_model(spec)
    p = apply_errors(params, err)
    mu01 = dipole_element(spec, 0, 0)
    w = synthesize(p, mu01)
    _summarize_window(w)
    for i, seg in enumerate(w.segments):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            th, ph = complex_pulse_area(w.segment(i), carrier=spec.omega01, mu01=mu01)
        _echo(f"pulse {i + 1}: E0 = {seg.amplitude:.6g} V/m, center {seg.center_time * 1e12:.3f} ps, "
              f"area {th:.6f} rad, phase {wrap_phase(ph):.6f} rad")
    dt = 2 * np.pi / p.carrier / 64
    tree.add(rio.waveform_csv(tree.path("waveform.csv"), w, dt))
    tree.add(rio.waveform_metadata(tree.path("waveform.json"), w, p, err, alpha))
    return EXIT_OK


def cmd_simulate(cfg, args, tree) -> int:
    spec = cfg.rotor()
    basis = RotationalBasis.from_spec(spec)
    target = cfg.target()
    params, alpha = _gate_params(cfg, spec)
    err = cfg.error_model(spec)
    p = apply_errors(params, err)
    w = synthesize(p, dipole_element(spec, 0, 0))
    _summarize_window(w)
    if cfg.converge:
        r = propagate_converged(spec, basis, w, dt=cfg.dt, scheme=cfg.scheme)
    else:
        r = propagate(spec, basis, w, dt=cfg.dt, scheme=cfg.scheme)
    rep = average_gate_fidelity(r.unitary_interaction, target, params=p, error_model=err,
                                leakage=r.leakage_final)
    meta = r.metadata()
    tree.add(rio.report_json(tree.path("report.json"), rep, {"alpha": alpha, "propagation": meta}))
    tree.add(rio.waveform_csv(tree.path("waveform.csv"), w, 2 * np.pi / p.carrier / 64))
    tree.add(rio.waveform_metadata(tree.path("waveform.json"), w, p, err, alpha))
    tree.add(rio.unitary_json(tree.path("unitary_lab.json"), r.unitary_lab, "lab", meta))
    tree.add(rio.unitary_json(tree.path("unitary_interaction.json"), r.unitary_interaction,
                              "interaction", meta))
    tree.add(rio.trajectory_csv(tree.path("trajectory.csv"), r))
    tree.extra.update(dt=r.dt_used, j_max=basis.j_max, scheme=r.scheme, convergence=r.convergence)
    _echo(f"gate          {rep.gate_name}")
    _echo(f"F_av          {rep.f_av:.10f}  (1 - F = {rep.infidelity:.3e})")
    _echo(f"leakage       {r.leakage_final:.3e} at end, {r.leakage_max:.3e} peak during pulses")
    _echo(f"dt            {r.dt_used:.6g} s ({r.n_steps} steps, {r.scheme})")
    if cfg.converge:
        c = r.convergence
        _echo(f"converged     {r.converged} (dt error {c['dt_error']:.2e}, "
              f"basis error {c.get('basis_error', float('nan')):.2e})")
        if not r.converged:
            print("convergence criteria not met; see report.json", file=sys.stderr)
            return EXIT_NUMERICAL
    else:
        _echo("converged     not checked (--no-converge)")
    return EXIT_OK


def _scan_axes(cfg, spec):
    sc = cfg.scan or {}
    if sc.get("axes"):
        axes = []
        for a in sc["axes"]:
            vals = a.get("values")
            if vals is None:
                vals = np.linspace(float(a["start"]), float(a["stop"]), int(a["num"]))
            axes.append(ScanAxis(a["parameter"], vals))
        if len(axes) != 2:
            raise ValidationError("a custom scan needs exactly two axes")
        return tuple(axes), cfg.delay_revivals
    name = sc.get("preset")
    if name is None:
        raise ValidationError("give --preset or two --axis options")
    if name not in PRESETS:
        raise ValidationError(f"unknown preset {name!r}")
    return PRESETS[name]["axes"](spec), PRESETS[name]["delay_revivals"]


def _write_scan(tree, result, tag):
    tree.add(rio.scan_csv(tree.path(f"scan_{tag}.csv"), result))
    tree.add(rio.write_json(tree.path(f"scan_{tag}.json"),
                            {**{k: v for k, v in result.to_dict().items() if k != "runtime_s"},
                             "cells": result.cells}))
    tree.extra.setdefault("runtime_s_per_scan", {})[tag] = result.runtime_s
    tree.failures += [{"scan": tag, **c} for c in result.failures]


def cmd_scan(cfg, args, tree) -> int:
    spec = cfg.rotor()
    (ax1, ax2), delay = _scan_axes(cfg, spec)
    gate = cfg.target()
    p, _ = solve_two_pulse(gate, delay * spec.tau0, cfg.bandwidth_ratio * spec.omega01,
                           cfg.carrier_ratio * spec.omega01)
    kw = {"workers": cfg.workers}
    if cfg.scheme != "midpoint" or (cfg.scan or {}).get("scheme"):
        kw["scheme"] = (cfg.scan or {}).get("scheme", cfg.scheme)
    res = scan_2d(gate, ax1, ax2, p, spec, **kw)
    _write_scan(tree, res, gate.name)
    ok = np.isfinite(res.f_av)
    _echo(f"{gate.name}: {res.shape[0]}x{res.shape[1]} cells in {res.runtime_s:.1f} s; "
          f"F_av range [{np.nanmin(res.f_av):.6f}, {np.nanmax(res.f_av):.6f}], "
          f"{(~ok).sum()} failed")
    return EXIT_OK if ok.all() else EXIT_NUMERICAL


def _circuit_run(cfg, spec, names):
    template = PulseTemplate(**cfg.timing(spec))
    circ = CircuitSpec.from_names(names, inter_gate_gap=cfg.gap)
    basis = RotationalBasis.from_spec(spec)
    return circ, run_circuit(circ, spec, basis, template, dt=cfg.dt, scheme=cfg.scheme), basis


def cmd_circuit(cfg, args, tree) -> int:
    spec = cfg.rotor()
    names = cfg.gates or ["H", "T", "S", "Z"]
    circ, res, basis = _circuit_run(cfg, spec, names)
    snaps = res.snapshot_dict(circ.names)
    tree.add(rio.write_json(tree.path("snapshots.json"), {"gates": circ.names, "snapshots": snaps}))
    tree.add(rio.reports_csv(tree.path("cumulative_fidelity.csv"), res.reports))
    tree.add(rio.waveform_csv(tree.path("waveform.csv"), res.compiled.waveform,
                              2 * np.pi / spec.omega01 / 64))
    tree.extra.update(dt=res.dt_used, j_max=basis.j_max, scheme=cfg.scheme)
    _echo(f"{'after':<8}{'t (ps)':>12}{'|rho01|':>10}{'arg rho10':>12}{'cum F_av':>14}")
    for s, rho in zip(snaps, res.rhos):
        _echo(f"{s['after']:<8}{s['t_ps']:>12.2f}{abs(rho.rho[0, 1]):>10.5f}"
              f"{rho.coherence_phase:>12.5f}{s['cumulative_f_av']:>14.8f}")
    return EXIT_OK


def _observe(cfg, spec, names, tree, tag=""):
    basis = RotationalBasis.from_spec(spec)
    if names:
        _, res, _ = _circuit_run(cfg, spec, names)
        state, t_end = res.states[-1], res.boundaries[-1]
    else:
        state, t_end = basis_state(basis, 0, 0.0), 0.0
    trace = orientation_trace(state, spec, t_start=t_end)
    sfx = f"_{tag}" if tag else ""
    tree.add(rio.trace_csv(tree.path(f"trace{sfx}.csv"), trace))
    lab = state.to_frame("lab", basis.energies(spec)) if state.frame == "interaction" else state
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        fit = extract_phase(trace)
    theta = np.linspace(0, np.pi, 181)
    from .observables import free_evolution
    from .propagator import QuantumState

    for k in range(4):
        t = t_end + k * spec.tau0 / 4
        amps = free_evolution(lab, spec, [t])[0]
        dens = angular_distribution(amps, theta)
        tree.add(rio.distribution_csv(tree.path(f"distribution{sfx}_{k}.csv"), theta, dens))
    summary = {"after": names, "fit": fit.to_dict(), "t_start_ps": t_end * 1e12,
               "orientation_at_start": orientation(QuantumState(lab.amplitudes, lab.time)),
               "max_abs_orientation": float(np.abs(trace.values).max()),
               "tau0_ps": spec.tau0 * 1e12}
    tree.add(rio.write_json(tree.path(f"fit{sfx}.json"), summary))
    _echo(f"after {','.join(names) or '|0>'}: A = {fit.amplitude:.6f}, phi01 = {fit.phase:.6f} rad "
          f"({format_angle(fit.phase) if fit.phase_defined else 'undefined'}), "
          f"max |<cos>| = {summary['max_abs_orientation']:.3e}")
    return fit


def cmd_observe(cfg, args, tree) -> int:
    spec = cfg.rotor()
    names = cfg.after if cfg.after is not None else ["H"]
    _observe(cfg, spec, names, tree)
    return EXIT_OK


def cmd_constants(cfg, args, tree) -> int:
    spec = cfg.rotor()
    t = cfg.timing(spec)
    sig = 1 / t["bandwidth"]
    rows = [
        ("molecule", spec.molecule_name),
        ("B", f"{spec.rotational_constant_B} cm^-1 = {spec.B:.6e} rad/s"),
        ("omega01", f"{spec.omega01:.6e} rad/s ({spec.omega01 / 2 / np.pi / 1e9:.5f} GHz)"),
        ("tau0 = pi/B", f"{spec.tau0 * 1e12:.4f} ps"),
        ("mu0", f"{spec.dipole_moment_mu0} D"),
        ("mu01", f"{dipole_element(spec, 0, 0):.6f} D"),
        ("bandwidth", f"{t['bandwidth']:.6e} rad/s ({cfg.bandwidth_ratio} omega01, "
                      f"{t['bandwidth'] / 2 / np.pi / 1e6:.1f} MHz)"),
        ("sigma_t", f"{sig * 1e12:.3f} ps"),
        ("tau", f"{t['tau'] * 1e12:.3f} ps ({cfg.delay_revivals} tau0)"),
        ("window", f"{(t['tau'] + 10 * sig) * 1e9:.4f} ns"),
        ("j_max", str(spec.j_max)),
        ("magic angle", f"{np.degrees(magic_angle()):.4f} deg"),
    ]
    for k, v in rows:
        _echo(f"{k:<14}{v}")
    return EXIT_OK


def cmd_repro(cfg, args, tree) -> int:
    spec = cfg.rotor()
    fig = args.figure
    code = EXIT_OK
    if fig in ("fig2", "fig3"):
        cuts = []
        for g in TABLE_GATES:
            res = preset_scan(fig, g, spec, workers=cfg.workers)
            _write_scan(tree, res, g)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                cut = line_cut(res, 0, 0.0)
            disp = res.axes[0].display
            cuts += [[g, d, v, f] for d, (v, f) in zip(disp, cut)]
            _echo(f"{fig} {g}: F_av in [{np.nanmin(res.f_av):.6f}, {np.nanmax(res.f_av):.6f}] "
                  f"({res.runtime_s:.1f} s)")
            if not np.isfinite(res.f_av).all():
                code = EXIT_NUMERICAL
        tree.add(rio.write_csv(tree.path("line_cuts.csv"),
                               ["gate", res.axes[0].label, res.axes[0].parameter, "f_av"], cuts))
    elif fig == "fig4":
        names = ["H", "T", "S", "Z"]
        circ, res, basis = _circuit_run(cfg, spec, names)
        tree.add(rio.write_json(tree.path("snapshots.json"),
                                {"gates": names, "snapshots": res.snapshot_dict(names)}))
        tree.add(rio.reports_csv(tree.path("cumulative_fidelity.csv"), res.reports))
        tree.add(rio.waveform_csv(tree.path("waveform.csv"), res.compiled.waveform,
                                  2 * np.pi / spec.omega01 / 64))
        for rep, rho in zip(res.reports, res.rhos):
            _echo(f"{rep.gate_name:<10} |rho01| = {abs(rho.rho[0, 1]):.5f}  "
                  f"arg rho10 = {rho.coherence_phase:+.5f}  cumulative F = {rep.f_av:.8f}")
    else:
        _observe(cfg, spec, [], tree, "ground")
        _observe(cfg, spec, ["H"], tree, "H")
        _observe(cfg, spec, ["H", "T"], tree, "HT")
    return code


COMMANDS = {"solve": cmd_solve, "pulse": cmd_pulse, "simulate": cmd_simulate, "scan": cmd_scan,
            "circuit": cmd_circuit, "observe": cmd_observe, "constants": cmd_constants,
            "repro": cmd_repro}
_WRITES = {"pulse", "simulate", "scan", "circuit", "observe", "repro"}


def cmd_rerun(args) -> int:
    manifest = rio.read_json(args.manifest)
    out = Path(args.out) if args.out else Path(tempfile.mkdtemp(prefix="rotgate-rerun-"))
    with tempfile.NamedTemporaryFile("w", suffix=".yaml", delete=False) as fh:
        yaml.safe_dump({**manifest["config"], "out": str(out)}, fh)
        cfg_path = fh.name
    argv = [manifest["command"][0], "--config", cfg_path, "--backend", manifest["backend"]]
    argv += manifest["command"][1:]
    code = main(argv)
    fresh = rio.read_json(out / "manifest.json")
    bad = [f for f, h in manifest["files"].items() if fresh["files"].get(f) != h]
    for f in bad:
        print(f"differs: {f}", file=sys.stderr)
    _echo(f"re-ran into {out}: {len(manifest['files']) - len(bad)}/{len(manifest['files'])} files identical")
    return code if not bad else EXIT_NUMERICAL


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "rerun":
            return cmd_rerun(args)
        if args.backend:
            kernels.use_backend(args.backend)
        cfg = _config_from_args(args)
        tree = None
        if args.command in _WRITES or (args.command == "solve" and args.out):
            positional = [args.figure] if args.command == "repro" else []
            tree = rio.OutputTree(cfg.out, cfg.to_dict(), [args.command] + positional)
        t0 = time.perf_counter()
        code = COMMANDS[args.command](cfg, args, tree)
        if tree is not None:
            if code != EXIT_OK and not tree.failures:
                tree.failures.append({"exit_code": code})
            path = tree.finish(runtime_s=time.perf_counter() - t0)
            _echo(f"wrote {len(tree.files)} files + {path}")
        return code
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (NumericalError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
