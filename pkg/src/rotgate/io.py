"""CSV/JSON exporters and the provenance manifest."""
from __future__ import annotations

import csv
import hashlib
import json
import os
from pathlib import Path

import numpy as np

from . import __version__, kernels

PS = 1e12  # s -> ps


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(obj, default=_jsonable, indent=2, sort_keys=True)


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj) + "\n")
    return path


def read_json(path):
    return json.loads(Path(path).read_text())


def write_csv(path, header, rows) -> Path:
    """Rows of floats written with repr precision so they round-trip exactly."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return path


def read_csv(path):
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        rows = [[float(v) for v in row] for row in r]
    return header, np.array(rows)


def sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def matrix_dict(U) -> dict:
    U = np.asarray(U)
    return {"re": U.real.tolist(), "im": U.imag.tolist()}


# module exporters -----------------------------------------------------------

def waveform_csv(path, waveform, dt):
    from .pulses import sample

    t, e = sample(waveform, dt)
    return write_csv(path, ["t_ps", "E_V_per_m"], zip(t * PS, e))


def waveform_metadata(path, waveform, params=None, error_model=None, alpha=None):
    meta = {"waveform": waveform.to_dict(),
            "units": {"time": "s", "field": "V/m", "carrier": "rad/s", "phase": "rad"}}
    if params is not None:
        meta["params"] = params.to_dict()
    if error_model is not None:
        meta["error_model"] = error_model.to_dict()
    if alpha is not None:
        meta["alpha"] = float(alpha)
    return write_json(path, meta)


def trajectory_csv(path, result):
    """t_ps, re/im of every c_J, leakage, for the |0> column of the run."""
    states = result.trajectory
    n = states[0].amplitudes.size
    header = ["t_ps"] + [f"{p}_c{J}" for J in range(n) for p in ("re", "im")] + ["leakage"]
    rows = []
    for s in states:
        row = [s.time * PS]
        for c in s.amplitudes:
            row += [c.real, c.imag]
        row.append(max(1.0 - float(np.sum(s.populations()[:2])), 0.0))
        rows.append(row)
    return write_csv(path, header, rows)


def unitary_json(path, U, frame, meta=None):
    return write_json(path, {"frame": frame, "matrix": matrix_dict(U), **(meta or {})})


def report_json(path, report, extra=None):
    return write_json(path, {**report.to_dict(), **(extra or {})})


def reports_csv(path, reports):
    return write_csv(path, ["gate", "f_av", "infidelity", "leakage"],
                     ([r.gate_name, r.f_av, 1.0 - r.f_av, r.leakage] for r in reports))


def scan_csv(path, result):
    a1, a2 = result.axes
    rows = []
    for i, (d1, v1) in enumerate(zip(a1.display, a1.values)):
        for j, (d2, v2) in enumerate(zip(a2.display, a2.values)):
            cell = result.cells[i * len(a2) + j]
            rows.append([d1, d2, v1, v2, result.f_av[i, j], result.leakage[i, j], cell.get("error", "")])
    header = [a1.label, a2.label, a1.parameter, a2.parameter, "f_av", "leakage", "error"]
    return write_csv(path, header, rows)


def trace_csv(path, trace):
    return write_csv(path, ["t_ps", "cos_theta"], zip(trace.t * PS, trace.values))


def distribution_csv(path, theta, density):
    return write_csv(path, ["theta_rad", "density"], zip(theta, density))


class OutputTree:
    """Collects written files and finishes with a manifest of hashes and provenance."""

    def __init__(self, root, config: dict, command: list | None = None):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.config = config
        self.command = command or []
        self.files = []
        self.extra = {}
        self.failures = []

    def path(self, name) -> Path:
        return self.root / name

    def add(self, path) -> Path:
        self.files.append(Path(path))
        return Path(path)

    def finish(self, runtime_s=None, name="manifest.json") -> Path:
        cfg = json.loads(dumps(self.config))
        manifest = {
            "tool": "rotgate",
            "version": __version__,
            "backend": kernels.BACKEND,
            "command": self.command,
            "config": cfg,
            "config_hash": config_hash({k: v for k, v in cfg.items() if k != "out"}),
            "files": {os.path.relpath(p, self.root): sha256(p) for p in self.files},
            "failures": self.failures,
            **self.extra,
        }
        if runtime_s is not None:
            manifest["runtime_s"] = runtime_s
        return write_json(self.root / name, manifest)


def config_hash(config: dict) -> str:
    return hashlib.sha256(json.dumps(config, sort_keys=True, default=_jsonable).encode()).hexdigest()
