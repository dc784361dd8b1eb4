"""Command-line entry point: ``simulate``, ``verify`` and ``rigid-body``."""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import fields
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__, beam, lie, verify

EXIT_OK, EXIT_CONFIG, EXIT_UNSTABLE, EXIT_FAILED = 0, 1, 2, 1
FLOAT_FORMAT = "%.17g"
SUMMARY_SCHEMA_VERSION = 1

_VEC6 = {"type": "array", "items": {"type": "number"}, "minItems": 6, "maxItems": 6}
_MAT6 = {
    "oneOf": [
        _VEC6,  # diagonal
        {"type": "array", "items": _VEC6, "minItems": 6, "maxItems": 6},
    ]
}

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "length": {"type": "number", "exclusiveMinimum": 0},
        "n_s": {"type": "integer", "minimum": 1},
        "n_t": {"type": "integer", "minimum": 1},
        "dt": {"type": "number", "exclusiveMinimum": 0},
        "J": _MAT6,
        "C": _MAT6,
        "eps0": _VEC6,
        "bc": {
            "type": "array",
            "items": {"enum": list(beam.BOUNDARY_KINDS)},
            "minItems": 2,
            "maxItems": 2,
        },
        "chi_uniform": _VEC6,
        "chi_cosine": _VEC6,
        "eps_initial": {"oneOf": [_VEC6, {"type": "null"}]},
        "output_every": {"type": "integer", "minimum": 1},
        "c_safety": {"type": "number", "exclusiveMinimum": 0},
        "dissipation": {"type": "number", "minimum": 0},
        "seed": {"type": "integer"},
        "outputs": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "timeseries": {"type": "string", "minLength": 1},
                "diagnostics": {"type": "string", "minLength": 1},
                "summary": {"type": "string", "minLength": 1},
            },
        },
        "convergence_check": {"type": "boolean"},
    },
}

DEFAULT_OUTPUTS = {"timeseries": "timeseries.csv", "diagnostics": "diagnostics.csv", "summary": "summary.json"}
_BEAM_FIELDS = {f.name for f in fields(beam.BeamConfig)}


class ConfigError(ValueError):
    pass


def default_config_text() -> str:
    return resources.files("liejet").joinpath("data/default_config.json").read_text()


def _line_of_key(text: str, path) -> int | None:
    """1-based line of the last key in ``path`` that occurs in ``text``."""
    keys = [p for p in path if isinstance(p, str)]
    if not keys:
        return None
    needle = json.dumps(keys[-1])
    for i, line in enumerate(text.splitlines(), 1):
        if needle in line:
            return i
    return None


def _context(text: str, lineno: int | None) -> str:
    if lineno is None:
        return ""
    lines = text.splitlines()
    if not 1 <= lineno <= len(lines):
        return ""
    return f"\n  line {lineno}: {lines[lineno - 1].strip()}"


def parse_config(text: str, source: str = "<config>") -> dict:
    """JSON text to a schema-checked dict; :class:`ConfigError` with line context."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{source}:{e.lineno}:{e.colno}: {e.msg}{_context(text, e.lineno)}") from None
    try:
        jsonschema.validate(doc, CONFIG_SCHEMA)
    except jsonschema.ValidationError as e:
        path = list(e.absolute_path)
        if e.validator == "additionalProperties":
            extra = sorted(set(e.instance) - set(e.schema.get("properties", {})))
            path = path + extra[:1]
        lineno = _line_of_key(text, path)
        where = "/".join(map(str, e.absolute_path)) or "<root>"
        loc = f"{source}:{lineno}" if lineno else source
        raise ConfigError(f"{loc}: {where}: {e.message}{_context(text, lineno)}") from None
    return doc


def _matrix(v):
    a = np.asarray(v, dtype=float)
    return np.diag(a) if a.ndim == 1 else a


def build_config(doc: dict) -> beam.BeamConfig:
    kw = {k: v for k, v in doc.items() if k in _BEAM_FIELDS}
    for k in ("J", "C"):
        if k in kw:
            kw[k] = _matrix(kw[k])
    try:
        return beam.BeamConfig(**kw).validate()
    except ValueError as e:
        raise ConfigError(str(e)) from None


def load_config(path) -> tuple:
    """``(doc, BeamConfig)`` from a JSON file; ``None`` path loads the bundled default."""
    if path is None:
        text, source = default_config_text(), "default_config.json"
    else:
        try:
            text, source = Path(path).read_text(), str(path)
        except OSError as e:
            raise ConfigError(f"cannot read config {path}: {e.strerror}") from None
    doc = parse_config(text, source)
    return doc, build_config(doc)


def config_echo(cfg: beam.BeamConfig) -> dict:
    out = {}
    for f in fields(cfg):
        v = getattr(cfg, f.name)
        if isinstance(v, np.ndarray):
            v = v.tolist()
        elif isinstance(v, tuple):
            v = list(v)
        out[f.name] = v
    return out


def _fmt(x) -> str:
    return FLOAT_FORMAT % x


TIMESERIES_HEADER = (
    ["t", "s"]
    + [f"chi_L{i}" for i in range(6)]
    + [f"eps_L{i}" for i in range(6)]
    + [f"sigma_R{i}" for i in range(6)]
    + [f"pi_R{i}" for i in range(6)]
)
DIAGNOSTICS_HEADER = (
    ["t", "energy"]
    + [f"momentum_R{i}" for i in range(6)]
    + ["conservation", "compatibility", "cell", "orthonormality"]
)


def write_timeseries(path, cfg: beam.BeamConfig, states) -> None:
    s = cfg.s
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TIMESERIES_HEADER)
        for st in states:
            sR, pR = beam.spatial_momenta(cfg, st)
            block = np.column_stack([np.full(cfg.n_s, st.t), s, st.chi, st.eps, sR, pR])
            w.writerows([[_fmt(v) for v in row] for row in block])


def write_diagnostics(path, diag: beam.Diagnostics) -> None:
    a = diag.as_arrays()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(DIAGNOSTICS_HEADER)
        for k in range(len(a["t"])):
            row = [a["t"][k], a["energy"][k], *a["momentum"][k], a["conservation"][k], a["compatibility"][k], a["cell"][k], a["ortho"][k]]
            w.writerow([_fmt(v) for v in row])


def _finite(x):
    """JSON-safe float: non-finite values become ``None``."""
    if isinstance(x, (list, tuple)):
        return [_finite(v) for v in x]
    x = float(x)
    return x if np.isfinite(x) else None


def simulate(config_path, out_dir, echo=print) -> int:
    try:
        doc, cfg = load_config(config_path)
    except ConfigError as e:
        echo(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    outputs = {**DEFAULT_OUTPUTS, **doc.get("outputs", {})}
    out = Path(out_dir)
    t0 = time.perf_counter()
    status, message = "ok", ""
    try:
        result = beam.run(cfg)
        diag, snaps = result.diagnostics, result.snapshots
    except beam.BeamInstability as e:
        status, message = "unstable", str(e)
        diag, snaps, result = e.diagnostics, [e.state], None
    ratios = {}
    if result is not None and doc.get("convergence_check", False):
        ratios = beam.refinement_ratios(cfg)
    wall = time.perf_counter() - t0

    out.mkdir(parents=True, exist_ok=True)
    write_timeseries(out / outputs["timeseries"], cfg, snaps)
    write_diagnostics(out / outputs["diagnostics"], diag)
    summary = {
        "schema_version": SUMMARY_SCHEMA_VERSION,
        "version": __version__,
        "status": status,
        "message": message,
        "config": config_echo(cfg),
        "grid": {"n_s": cfg.n_s, "n_t": cfg.n_t, "ds": cfg.ds, "dt": cfg.dt, "dt_max": _finite(cfg.dt_max)},
        "steps_completed": len(diag.t) - 1,
        "snapshots": len(snaps),
        "final": {k: _finite(v) for k, v in diag.summary().items()},
        "convergence_ratios": {k: _finite(v) for k, v in ratios.items()},
        "wall_clock_seconds": wall,
    }
    (out / outputs["summary"]).write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    if status != "ok":
        echo(f"instability: {message}", file=sys.stderr)
        return EXIT_UNSTABLE
    echo(f"wrote {', '.join(outputs.values())} to {out}")
    return EXIT_OK


def run_verify(suite: str, seed: int, echo=print) -> int:
    results = verify.run_suite(suite, seed=seed, echo=echo)
    failed = [c for c in results if not c.passed]
    echo(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_OK if not failed else EXIT_FAILED


def rigid_body(axis: int, steps: int, dt: float = 1e-3, perturb: float = 0.0) -> dict:
    """Free rigid body spinning about principal axis ``axis`` of ``J = diag(1, 2, 3)``."""
    chi = np.zeros(6)
    chi[axis - 1] = 1.0
    chi[:3] += perturb
    cfg = beam.rigid_body_config(chi=chi, dt=dt, n_t=steps)
    res = beam.run(cfg)
    first, last = res.snapshots[0], res.final
    _, p0 = beam.spatial_momenta(cfg, first)
    _, p1 = beam.spatial_momenta(cfg, last)
    c0, c1 = beam.casimir(first, cfg), beam.casimir(last, cfg)
    d = res.diagnostics
    return {
        "axis": axis,
        "steps": steps,
        "dt": dt,
        "perturb": perturb,
        "chi_change": float(np.abs(last.chi - first.chi).max()),
        "energy_drift_relative": d.energy_drift,
        "energy_excursion_relative": d.energy_excursion,
        "casimir_drift": abs(c1 - c0),
        "spatial_momentum_norm_drift": abs(float(np.linalg.norm(p1[0, :3]) - np.linalg.norm(p0[0, :3]))),
        "spatial_momentum_drift": float(np.abs(p1 - p0).max()),
        "orthonormality_error": float(lie.orthonormality_error(last.H).max()),
    }


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="liejet", description=__doc__)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run a beam simulation")
    s.add_argument("--config", default=None, help="JSON config (default: bundled config)")
    s.add_argument("--out", required=True, help="output directory")

    v = sub.add_parser("verify", help="run a property suite")
    v.add_argument("--suite", choices=[*verify.SUITES, "all"], default="all")
    v.add_argument("--seed", type=int, default=verify.DEFAULT_SEED)

    r = sub.add_parser("rigid-body", help="free rigid body about a principal axis")
    r.add_argument("--axis", type=int, choices=(1, 2, 3), default=1)
    r.add_argument("--steps", type=int, default=1000)
    r.add_argument("--dt", type=float, default=1e-3)
    r.add_argument("--perturb", type=float, default=0.0, help="added to each angular velocity component")

    sub.add_parser("default-config", help="print the bundled config")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "simulate":
        return simulate(args.config, args.out)
    if args.command == "verify":
        return run_verify(args.suite, args.seed)
    if args.command == "rigid-body":
        if args.steps < 1 or not args.dt > 0:
            print("steps and dt must be positive", file=sys.stderr)
            return EXIT_CONFIG
        print(json.dumps(rigid_body(args.axis, args.steps, args.dt, args.perturb), indent=2))
        return EXIT_OK
    if args.command == "default-config":
        print(default_config_text(), end="")
        return EXIT_OK
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
