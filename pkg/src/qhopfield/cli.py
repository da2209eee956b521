"""Command-line entry point: one subcommand per solver or experiment.

Subcommands: exact | meanfield | phase-diagram | selfavg | converge |
retrieval | norms | verify.  Every run writes the records to the output path
(CSV or JSON, frozen column order per subcommand) plus a JSON manifest
``<output>.manifest.json`` echoing the full configuration, and is
deterministic per seed.  Exit codes: 0 success, 2 config error, 3 resource
guard, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .disorder import sample_patterns
from .errors import ConfigError, NumericalError, ResourceGuardError
from .experiments import (
    CONVERGE_COLUMNS,
    NORMS_COLUMNS,
    RETRIEVAL_COLUMNS,
    SELFAVG_COLUMNS,
    VERIFY_COLUMNS,
    run_convergence,
    run_norm_checks,
    run_retrieval,
    run_self_averaging,
    verify_properties,
)
from .meanfield import asymptote_ratio, minimize_f0, phase_curve
from .quantum import (
    FieldMode,
    dump_spectrum_csv,
    gibbs_observables,
    params_from_patterns,
    spectrum,
)

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RESOURCE = 3
EXIT_NUMERICAL = 4

COMMANDS = ("exact", "meanfield", "phase-diagram", "selfavg", "converge", "retrieval", "norms", "verify")

EXACT_COLUMNS = ("n", "p", "beta", "d", "h", "field", "mu", "seed", "free_energy", "overlap1", "mean_abs_z", "mean_x")
MEANFIELD_COLUMNS = ("beta", "d", "h", "m_star", "f0_value", "residual", "branch")
PHASE_COLUMNS = ("d", "beta_c", "residual", "asymptote_ratio")

# Per-command parameter keys; anything else in a config file is a hard error.
_COMMON_KEYS = ("seed", "output", "format", "threads")
_PARAM_KEYS = {
    "exact": ("n", "p", "beta", "d", "h", "field", "mu", "dump_spectrum"),
    "meanfield": ("beta", "d", "h"),
    "phase-diagram": ("d_grid",),
    "selfavg": ("n_grid", "p", "beta", "d", "h", "field", "samples", "slq"),
    "converge": ("n_grid", "beta", "d", "h", "samples"),
    "retrieval": ("n", "beta", "d", "h"),
    "norms": ("n_grid", "alpha", "samples"),
    "verify": ("trials",),
}

_DEFAULTS = {
    "beta": 1.0,
    "d": 0.5,
    "h": 0.0,
    "seed": 0,
    "format": "csv",
    "p": 1,
    "n": 4,
    "mu": 1,
    "field": "uniform",
    "n_grid": "6,8,10,12",
    "d_grid": "0.1:0.9:0.1",
    "samples": 50,
    "alpha": 0.25,
    "trials": 1000,
    "slq": False,
    "dump_spectrum": "",
}
_COMMAND_DEFAULTS = {
    "converge": {"samples": 1},
    "norms": {"n_grid": "64,128,256", "samples": 100},
    "retrieval": {"n": 10, "h": 0.2, "beta": 30.0, "d": 0.2},
}


@dataclass(frozen=True)
class RunConfig:
    """Fully merged and validated configuration of one CLI invocation."""

    command: str
    params: dict
    seed: int
    output_path: str
    format: str
    threads: int


def _default_for(command: str, key: str):
    return _COMMAND_DEFAULTS.get(command, {}).get(key, _DEFAULTS.get(key))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qhopfield",
        description="Transverse-field Hopfield model: exact solvers, mean-field theory, disorder experiments.",
    )
    parser.add_argument("--version", action="version", version=f"qhopfield {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=None, help="64-bit master seed (default 0)")
        sp.add_argument("--output", "-o", default=None, help="output file (default <command>.csv)")
        sp.add_argument("--format", choices=("csv", "json"), default=None, help="output format (default csv)")
        sp.add_argument("--config", default=None, help="JSON config file; CLI flags take precedence")
        sp.add_argument("--threads", type=int, default=None,
                        help="worker threads for ensemble experiments (default: QHOP_THREADS or all cores)")

    sp = sub.add_parser("exact", help="one exact instance: free energy and Gibbs observables")
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--p", type=int, default=None)
    sp.add_argument("--beta", type=float, default=None)
    sp.add_argument("--d", type=float, default=None)
    sp.add_argument("--h", type=float, default=None)
    sp.add_argument("--field", choices=("uniform", "pattern"), default=None)
    sp.add_argument("--mu", type=int, default=None, help="1-based pattern index for pattern-aligned fields")
    sp.add_argument("--dump-spectrum", dest="dump_spectrum", default=None, help="also dump (index, eigenvalue) CSV here")
    common(sp)

    sp = sub.add_parser("meanfield", help="minimize the Curie-Weiss free energy")
    sp.add_argument("--beta", type=float, default=None)
    sp.add_argument("--d", type=float, default=None)
    sp.add_argument("--h", type=float, default=None)
    common(sp)

    sp = sub.add_parser("phase-diagram", help="critical curve beta_c(d) over a grid")
    sp.add_argument("--d-grid", dest="d_grid", default=None, help="start:stop:step (inclusive) or comma list")
    common(sp)

    sp = sub.add_parser("selfavg", help="disorder variance of the free energy vs system size")
    sp.add_argument("--n-grid", dest="n_grid", default=None, help="comma-separated site counts")
    sp.add_argument("--p", type=int, default=None)
    sp.add_argument("--beta", type=float, default=None)
    sp.add_argument("--d", type=float, default=None)
    sp.add_argument("--h", type=float, default=None)
    sp.add_argument("--field", choices=("uniform", "pattern"), default=None)
    sp.add_argument("--samples", type=int, default=None)
    sp.add_argument("--slq", action="store_true", default=None, help="evaluate members by SLQ (allows n up to 16)")
    common(sp)

    sp = sub.add_parser("converge", help="|mean f_N - min f0| vs system size at p = 1")
    sp.add_argument("--n-grid", dest="n_grid", default=None)
    sp.add_argument("--beta", type=float, default=None)
    sp.add_argument("--d", type=float, default=None)
    sp.add_argument("--h", type=float, default=None)
    sp.add_argument("--samples", type=int, default=None)
    common(sp)

    sp = sub.add_parser("retrieval", help="exact overlap <m1> vs the mean-field minimizer")
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--beta", type=float, default=None)
    sp.add_argument("--d", type=float, default=None)
    sp.add_argument("--h", type=float, default=None)
    common(sp)

    sp = sub.add_parser("norms", help="sampled spectral norms of J and A vs system size")
    sp.add_argument("--n-grid", dest="n_grid", default=None)
    sp.add_argument("--alpha", type=float, default=None)
    sp.add_argument("--samples", type=int, default=None)
    common(sp)

    sp = sub.add_parser("verify", help="Bogolyubov / Duhamel / gauge-invariance property suites")
    sp.add_argument("--trials", type=int, default=None)
    common(sp)

    return parser


def _load_config_file(path: str, command: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config: {path} must hold a JSON object")
    allowed = set(_PARAM_KEYS[command]) | set(_COMMON_KEYS)
    for key in data:
        if key not in allowed:
            raise ConfigError(f"config: unknown key {key!r} for command {command!r}")
    return data


def _merge_value(key: str, flag_value, file_config: dict, command: str):
    if flag_value is not None:
        return flag_value
    if key in file_config:
        return file_config[key]
    return _default_for(command, key)


def _require_int(key: str, value, minimum=None, maximum=None) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise ConfigError(f"{key} must be an integer, got {value!r}")
    value = int(value)
    if minimum is not None and value < minimum:
        raise ConfigError(f"{key} must be >= {minimum}, got {value}")
    if maximum is not None and value > maximum:
        raise ConfigError(f"{key} must be <= {maximum}, got {value}")
    return value


def _require_float(key: str, value, minimum=None, strict_min=None) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float, np.floating)):
        raise ConfigError(f"{key} must be a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"{key} must be finite, got {value}")
    if minimum is not None and value < minimum:
        raise ConfigError(f"{key} must be >= {minimum}, got {value}")
    if strict_min is not None and value <= strict_min:
        raise ConfigError(f"{key} must be > {strict_min}, got {value}")
    return value


def _parse_int_grid(key: str, value, minimum: int, maximum: int) -> list[int]:
    if isinstance(value, str):
        items = [part.strip() for part in value.split(",") if part.strip()]
        try:
            grid = [int(part) for part in items]
        except ValueError as exc:
            raise ConfigError(f"{key}: expected comma-separated integers, got {value!r}") from exc
    elif isinstance(value, (list, tuple)):
        grid = [_require_int(key, item) for item in value]
    else:
        raise ConfigError(f"{key} must be a comma-separated string or a list, got {value!r}")
    if not grid:
        raise ConfigError(f"{key} must not be empty")
    for n in grid:
        if not minimum <= n <= maximum:
            raise ConfigError(f"{key}: entries must lie in {minimum}..{maximum}, got {n}")
    return grid


def _parse_float_grid(key: str, value) -> list[float]:
    if isinstance(value, str) and ":" in value:
        parts = value.split(":")
        if len(parts) != 3:
            raise ConfigError(f"{key}: range syntax is start:stop:step, got {value!r}")
        try:
            start, stop, step = (float(part) for part in parts)
        except ValueError as exc:
            raise ConfigError(f"{key}: range syntax is start:stop:step, got {value!r}") from exc
        if step <= 0 or stop < start:
            raise ConfigError(f"{key}: need step > 0 and stop >= start, got {value!r}")
        count = int(round((stop - start) / step)) + 1
        return [start + k * step for k in range(count)]
    if isinstance(value, str):
        items = [part.strip() for part in value.split(",") if part.strip()]
        try:
            return [float(part) for part in items]
        except ValueError as exc:
            raise ConfigError(f"{key}: expected comma-separated numbers, got {value!r}") from exc
    if isinstance(value, (list, tuple)):
        return [_require_float(key, item) for item in value]
    raise ConfigError(f"{key} must be a string or list, got {value!r}")


def _validate_params(command: str, params: dict) -> None:
    """Range-check every numeric parameter before any computation starts."""
    p = params
    if "beta" in p:
        _require_float("beta", p["beta"], strict_min=0.0)
    if "d" in p:
        _require_float("d", p["d"], minimum=0.0)
    if "h" in p:
        _require_float("h", p["h"])
    if command == "exact":
        _require_int("n", p["n"], minimum=1, maximum=12)
        _require_int("p", p["p"], minimum=0)
        _require_int("mu", p["mu"], minimum=1)
        if p["field"] not in ("uniform", "pattern"):
            raise ConfigError(f"field must be 'uniform' or 'pattern', got {p['field']!r}")
        if p["field"] == "pattern" and p["p"] < p["mu"]:
            raise ConfigError(f"mu={p['mu']} requires p >= mu, got p={p['p']}")
    elif command == "meanfield":
        _require_float("h", p["h"], minimum=0.0)
    elif command == "phase-diagram":
        for d in _parse_float_grid("d_grid", p["d_grid"]):
            if not 0.0 <= d < 1.0:
                raise ConfigError(f"d_grid: entries must lie in [0, 1), got {d}")
    elif command == "selfavg":
        max_n = 16 if p["slq"] else 12
        _parse_int_grid("n_grid", p["n_grid"], 1, max_n)
        _require_int("p", p["p"], minimum=0)
        _require_int("samples", p["samples"], minimum=50)
        if p["field"] not in ("uniform", "pattern"):
            raise ConfigError(f"field must be 'uniform' or 'pattern', got {p['field']!r}")
        if p["field"] == "pattern" and p["p"] < 1:
            raise ConfigError("field='pattern' requires p >= 1")
    elif command == "converge":
        _parse_int_grid("n_grid", p["n_grid"], 1, 12)
        _require_float("h", p["h"], minimum=0.0)
        _require_int("samples", p["samples"], minimum=1)
    elif command == "retrieval":
        _require_int("n", p["n"], minimum=1, maximum=12)
        _require_float("h", p["h"], strict_min=0.0)
    elif command == "norms":
        _parse_int_grid("n_grid", p["n_grid"], 1, 4096)
        _require_float("alpha", p["alpha"], minimum=0.0)
        _require_int("samples", p["samples"], minimum=1)
    elif command == "verify":
        _require_int("trials", p["trials"], minimum=1)


def parse_config(argv: Optional[Sequence[str]] = None) -> RunConfig:
    """Parse CLI arguments (plus optional JSON config file) into a RunConfig.

    Merge precedence per key: CLI flag > config-file entry > documented
    default.  Unknown config-file keys and out-of-range values raise
    ConfigError naming the key.
    """
    parser = build_parser()
    ns = parser.parse_args(argv)
    command = ns.command
    file_config = _load_config_file(ns.config, command) if ns.config else {}

    params = {}
    for key in _PARAM_KEYS[command]:
        params[key] = _merge_value(key, getattr(ns, key, None), file_config, command)
    if "slq" in params:
        if not isinstance(params["slq"], bool):
            raise ConfigError(f"slq must be a boolean, got {params['slq']!r}")
    if "dump_spectrum" in params and not isinstance(params["dump_spectrum"], str):
        raise ConfigError(f"dump_spectrum must be a path string, got {params['dump_spectrum']!r}")

    seed = _merge_value("seed", ns.seed, file_config, command)
    seed = _require_int("seed", seed, minimum=0, maximum=2**64 - 1)

    fmt = _merge_value("format", ns.format, file_config, command)
    if fmt not in ("csv", "json"):
        raise ConfigError(f"format must be 'csv' or 'json', got {fmt!r}")

    output = _merge_value("output", ns.output, file_config, command)
    if output is None:
        output = command.replace("-", "_") + "." + fmt
    if not isinstance(output, str) or not output:
        raise ConfigError(f"output must be a non-empty path, got {output!r}")

    threads = _merge_value("threads", ns.threads, file_config, command)
    if threads is None:
        env = os.environ.get("QHOP_THREADS")
        if env is not None:
            try:
                threads = int(env)
            except ValueError as exc:
                raise ConfigError(f"QHOP_THREADS must be an integer, got {env!r}") from exc
        else:
            threads = os.cpu_count() or 1
    threads = _require_int("threads", threads, minimum=1)

    _validate_params(command, params)
    return RunConfig(
        command=command, params=params, seed=seed, output_path=output, format=fmt, threads=threads
    )


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def _render_csv(columns: Sequence[str], rows: Sequence[dict]) -> str:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(row[col]) for col in columns))
    return "\n".join(lines) + "\n"


def _render_json(columns: Sequence[str], rows: Sequence[dict]) -> str:
    def clean(value):
        if isinstance(value, (np.floating, float)):
            return float(value)
        if isinstance(value, (np.integer, int)) and not isinstance(value, bool):
            return int(value)
        return value

    payload = {
        "columns": list(columns),
        "rows": [{col: clean(row[col]) for col in columns} for row in rows],
    }
    return json.dumps(payload, indent=2) + "\n"


def _atomic_write(path: str, data: str) -> None:
    target = Path(path)
    if target.parent != Path(""):
        target.parent.mkdir(parents=True, exist_ok=True)
    tmp = target.with_name(f".{target.name}.tmp-{os.getpid()}")
    tmp.write_text(data, encoding="utf-8")
    os.replace(tmp, target)


def _field_mode(params: dict) -> FieldMode:
    if params["field"] == "uniform":
        return FieldMode.uniform(params["h"])
    return FieldMode.pattern_aligned(params["h"], params.get("mu", 1))


def _dispatch(config: RunConfig) -> tuple[tuple, list[dict], dict]:
    """Returns (columns, rows, manifest extras)."""
    params, seed, threads = config.params, config.seed, config.threads
    command = config.command

    if command == "exact":
        xi = sample_patterns(params["n"], params["p"], seed)
        mp = params_from_patterns(xi, params["beta"], params["d"], _field_mode(params))
        spec = spectrum(mp, keep_vectors=True)
        if params["dump_spectrum"]:
            dump_spectrum_csv(spec, params["dump_spectrum"])
        obs = gibbs_observables(mp, spec, xi if params["p"] else None)
        row = {
            "n": params["n"], "p": params["p"], "beta": params["beta"], "d": params["d"],
            "h": params["h"], "field": params["field"], "mu": params["mu"], "seed": seed,
            "free_energy": obs.free_energy_per_site,
            "overlap1": float(obs.overlaps[0]) if params["p"] else math.nan,
            "mean_abs_z": float(np.mean(np.abs(obs.z_magnetizations))),
            "mean_x": float(np.mean(obs.x_magnetizations)),
        }
        return EXACT_COLUMNS, [row], {"patterns": xi.to_record()}

    if command == "meanfield":
        sol = minimize_f0(params["beta"], params["d"], params["h"])
        row = {
            "beta": params["beta"], "d": params["d"], "h": params["h"],
            "m_star": sol.m_star, "f0_value": sol.f0_value,
            "residual": sol.residual, "branch": sol.branch.value,
        }
        return MEANFIELD_COLUMNS, [row], {}

    if command == "phase-diagram":
        grid = _parse_float_grid("d_grid", params["d_grid"])
        points = phase_curve(grid)
        rows = [
            {"d": pt.d, "beta_c": pt.beta_c, "residual": pt.residual,
             "asymptote_ratio": asymptote_ratio(pt)}
            for pt in points
        ]
        return PHASE_COLUMNS, rows, {}

    if command == "selfavg":
        grid = _parse_int_grid("n_grid", params["n_grid"], 1, 16 if params["slq"] else 12)
        summaries = run_self_averaging(
            grid, params["p"], params["beta"], params["d"], _field_mode(params),
            params["samples"], seed, use_slq=params["slq"], threads=threads,
        )
        return SELFAVG_COLUMNS, [s.as_row() for s in summaries], {}

    if command == "converge":
        grid = _parse_int_grid("n_grid", params["n_grid"], 1, 12)
        records = run_convergence(
            grid, params["beta"], params["d"], params["h"], params["samples"], seed,
            threads=threads,
        )
        return CONVERGE_COLUMNS, [r.as_row() for r in records], {}

    if command == "retrieval":
        result = run_retrieval(params["n"], params["beta"], params["d"], params["h"], seed)
        row = {
            "n": params["n"], "beta": params["beta"], "d": params["d"], "h": params["h"],
            "seed": seed, "overlap": result.overlap, "meanfield_m": result.meanfield_m,
            "abs_diff": abs(result.overlap - result.meanfield_m),
        }
        return RETRIEVAL_COLUMNS, [row], {}

    if command == "norms":
        grid = _parse_int_grid("n_grid", params["n_grid"], 1, 4096)
        records = run_norm_checks(grid, params["alpha"], params["samples"], seed, threads=threads)
        return NORMS_COLUMNS, [r.as_row() for r in records], {}

    if command == "verify":
        results = verify_properties(params["trials"], seed)
        return VERIFY_COLUMNS, [r.as_row() for r in results], {}

    raise ConfigError(f"unknown command {command!r}")


def run(config: RunConfig) -> int:
    """Execute a validated RunConfig; returns the process exit code."""
    started = time.perf_counter()
    try:
        columns, rows, extras = _dispatch(config)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, "config", exc)
    except ResourceGuardError as exc:
        return _fail(EXIT_RESOURCE, "resource-guard", exc)
    except NumericalError as exc:
        return _fail(EXIT_NUMERICAL, "numerical", exc)
    except ValueError as exc:
        return _fail(EXIT_CONFIG, "config", exc)

    manifest = {
        "schema_version": SCHEMA_VERSION,
        "package_version": __version__,
        "command": config.command,
        "params": config.params,
        "seed": config.seed,
        "output_path": config.output_path,
        "format": config.format,
        "threads": config.threads,
        "wall_time_s": time.perf_counter() - started,
    }
    manifest.update(extras)
    render = _render_csv if config.format == "csv" else _render_json
    try:
        _atomic_write(config.output_path, render(columns, rows))
        _atomic_write(
            config.output_path + ".manifest.json", json.dumps(manifest, indent=2) + "\n"
        )
    except OSError as exc:
        return _fail(1, "io", exc)

    print(f"wrote {config.output_path} ({len(rows)} rows)")
    if config.command == "verify":
        failed_total = 0
        for row in rows:
            print(f"  {row['suite']}: {row['passed']}/{row['trials']} passed, {row['failed']} failed")
            failed_total += row["failed"]
        if failed_total:
            return _fail(EXIT_NUMERICAL, "numerical",
                         NumericalError(f"{failed_total} verification trials failed"))
    return EXIT_OK


def _fail(code: int, kind: str, exc: Exception) -> int:
    record = {"error": {"exit_code": code, "type": kind, "message": str(exc)}}
    print(json.dumps(record), file=sys.stderr)
    return code


def config_from_manifest(path) -> RunConfig:
    """Rebuild the exact RunConfig a manifest was written from."""
    with open(path, "r", encoding="utf-8") as fh:
        manifest = json.load(fh)
    return RunConfig(
        command=manifest["command"],
        params=manifest["params"],
        seed=manifest["seed"],
        output_path=manifest["output_path"],
        format=manifest["format"],
        threads=manifest["threads"],
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        config = parse_config(argv)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, "config", exc)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
