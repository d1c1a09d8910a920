"""Command-line experiment runner.

Usage::

    qaction grover-h1 --N 16 --E 1
    qaction shor-phase --n 3 --omega 1 --alpha pi --format json
    qaction cavity --target 12 --window 8:16 --omega 1 --seed 7
    qaction sweep grover-h1 --grid N=4,16,64
    qaction hypothesis --seed 0

Settings resolve as: built-in defaults, then a flat ``key = value`` file
given with ``--config``, then command-line flags. Output goes to
``--output`` (``-`` for stdout), else ``$QACTION_OUTPUT_DIR/<model>.<fmt>``
(current directory when unset).

Exit codes: 0 success, 2 configuration error, 3 numerical contract
violation (norm drift, no flip, failed fidelity).
"""

from __future__ import annotations

import argparse
import io
import itertools
import json
import math
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__, analysis, experiments
from .errors import ConfigError, NumericalContractError, QactionError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

OUTPUT_DIR_ENV = "QACTION_OUTPUT_DIR"
SCHEMA_VERSION = 1

MODELS = ("prep", "grover-h1", "grover-h2", "directory", "cavity", "shor-phase", "bound-suite", "hypothesis")
RANDOM_MODELS = ("directory", "cavity", "bound-suite", "hypothesis")


# ---------------------------------------------------------------------------
# value parsing
# ---------------------------------------------------------------------------

_PI_EXPR = re.compile(r"^\s*([-+]?\d*\.?\d*(?:[eE][-+]?\d+)?)\s*\*?\s*pi\s*(?:/\s*(\d*\.?\d+))?\s*$")


def parse_real(text) -> float:
    """Float literal or a multiple of pi: ``pi``, ``2pi``, ``3*pi/4``."""
    if isinstance(text, (int, float)):
        return float(text)
    s = str(text).strip()
    try:
        return float(s)
    except ValueError:
        pass
    m = _PI_EXPR.match(s)
    if not m:
        raise ConfigError(f"not a real number: {text!r}")
    coef = m.group(1)
    k = float(coef) if coef not in ("", "+", "-") else (-1.0 if coef == "-" else 1.0)
    value = k * math.pi
    if m.group(2):
        value /= float(m.group(2))
    return value


def parse_int(text) -> int:
    try:
        return int(str(text).strip())
    except ValueError:
        raise ConfigError(f"not an integer: {text!r}") from None


def parse_bool(text) -> bool:
    s = str(text).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def parse_window(text) -> tuple[int, int]:
    parts = str(text).split(":")
    if len(parts) != 2:
        raise ConfigError(f"window must look like lo:hi, got {text!r}")
    return parse_int(parts[0]), parse_int(parts[1])


def parse_mask(text) -> str:
    s = str(text).strip().lower()
    if s in ("all", "random", "none"):
        return s
    try:
        [int(b) for b in s.split(",") if b]
    except ValueError:
        raise ConfigError(f"mask must be all, random, none or a comma list of bits: {text!r}") from None
    return s


def read_config_file(path) -> dict[str, str]:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        k, v = line.split("=", 1)
        out[k.strip()] = v.strip()
    return out


# ---------------------------------------------------------------------------
# parameter tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Param:
    parse: object
    default: object = None
    check: object = None
    doc: str = ""


def _pos(x):
    return x > 0


PARAMS: dict[str, dict[str, Param]] = {
    "prep": {
        "n": Param(parse_int, 8, lambda v: 1 <= v <= 64, "number of q-bits, 1..64"),
        "t_c": Param(parse_real, 1.0, _pos, "time budget > 0"),
        "mask": Param(parse_mask, "all", None, "all | random | none | comma list of bits"),
        "seed": Param(parse_int, None, lambda v: v >= 0, "seed for mask=random"),
    },
    "grover-h1": {
        "N": Param(parse_int, 16, lambda v: 2 <= v <= 2**40, "database size, 2..2^40"),
        "E": Param(parse_real, 1.0, _pos, "energy scale > 0"),
        "target": Param(parse_int, 0, lambda v: v >= 0, "marked index"),
        "full_space": Param(parse_bool, None, None, "dense engine (default when N <= 16384)"),
        "include_io": Param(parse_bool, True, None, "add preparation and readout stages"),
    },
    "directory": {
        "N": Param(parse_int, 16, lambda v: 2 <= v <= 512, "number of labels, 2..512"),
        "emax": Param(parse_real, 1.0, _pos, "largest label energy > 0"),
        "epsilon": Param(parse_real, 0.01, lambda v: 0 <= v <= 0.05, "perturbation scale, 0..0.05"),
        "target": Param(parse_int, None, lambda v: v >= 1, "target index (default N//2)"),
        "steps_per_period": Param(parse_int, 40, lambda v: v >= 40, ">= 40"),
        "horizon": Param(parse_real, None, _pos, "evolution horizon (default 1.2 * 2pi / spacing)"),
        "seed": Param(parse_int, None, lambda v: v >= 0, "seed for the random perturbation (required)"),
    },
    "cavity": {
        "target": Param(parse_int, 12, lambda v: 2 <= v <= 10**6, "label to select, 2..1e6"),
        "window": Param(parse_window, None, lambda w: 2 <= w[0] <= w[1] <= 10**6, "lo:hi (default target-5:target+5)"),
        "omega": Param(parse_real, 1.0, _pos, "frequency unit > 0"),
        "epsilon": Param(parse_real, 0.01, lambda v: 0 <= v <= 0.05, "coupling / spacing, 0..0.05"),
        "coupling": Param(parse_real, None, lambda v: v >= 0, "explicit coupling magnitude"),
        "qmax": Param(parse_int, None, lambda v: v >= 2, "largest allowed prime (default window hi)"),
        "steps_per_period": Param(parse_int, 40, lambda v: v >= 40, ">= 40"),
        "horizon": Param(parse_real, None, _pos, "evolution horizon"),
        "seed": Param(parse_int, None, lambda v: v >= 0, "seed for coupling phases (required)"),
    },
    "shor-phase": {
        "n": Param(parse_int, 3, lambda v: 1 <= v <= 14, "number of q-bits, 1..14"),
        "omega": Param(parse_real, 1.0, _pos, "frequency unit > 0"),
        "alpha": Param(parse_real, math.pi, lambda v: 0 <= v < 2 * math.pi, "phase in [0, 2pi)"),
    },
    "bound-suite": {
        "count": Param(parse_int, 200, lambda v: 1 <= v <= 100000, "number of random problems"),
        "max_dim": Param(parse_int, 64, lambda v: 2 <= v <= 512, "largest dimension, 2..512"),
        "seed": Param(parse_int, None, lambda v: v >= 0, "seed (required)"),
    },
    "hypothesis": {
        "seed": Param(parse_int, None, lambda v: v >= 0, "seed for the driven models (required)"),
    },
}
PARAMS["grover-h2"] = PARAMS["grover-h1"]


@dataclass
class ExperimentConfig:
    model: str
    params: dict
    fmt: str = "csv"
    output: str | None = None

    def resolved(self) -> dict:
        """Full config as written into outputs (sorted, stringified)."""
        out = {"model": self.model, "format": self.fmt}
        for k, v in self.params.items():
            out[k] = _config_str(v)
        return dict(sorted(out.items()))


def _config_str(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    if isinstance(v, tuple):
        return ":".join(str(x) for x in v)
    return str(v)


def resolve_config(model: str, raw: dict, fmt: str = "csv", output: str | None = None) -> ExperimentConfig:
    """Parse and validate raw string settings for ``model``."""
    if model not in PARAMS:
        raise ConfigError(f"unknown model {model!r}; choose from {', '.join(MODELS)}")
    table = PARAMS[model]
    unknown = sorted(set(raw) - set(table))
    if unknown:
        raise ConfigError(f"unknown setting(s) for {model}: {', '.join(unknown)}")
    params = {}
    for name, p in table.items():
        if name in raw and raw[name] is not None and raw[name] != "":
            value = p.parse(raw[name])
            if p.check is not None and not p.check(value):
                raise ConfigError(f"{model}.{name}={raw[name]!r} out of range ({p.doc})")
        else:
            value = p.default
        params[name] = value
    needs_seed = model in RANDOM_MODELS or (model == "prep" and params["mask"] == "random")
    if needs_seed and params.get("seed") is None:
        raise ConfigError(f"{model} uses randomness: a seed is mandatory")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {fmt!r}")
    return ExperimentConfig(model, params, fmt, output)


# ---------------------------------------------------------------------------
# execution
# ---------------------------------------------------------------------------


@dataclass
class Output:
    columns: list[str]
    rows: list[dict]
    flags: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    summary: dict = field(default_factory=dict)


def _prep_mask(params):
    import numpy as np

    from .models import random_flip_mask

    mask = params["mask"]
    n = params["n"]
    if mask == "all":
        return tuple(range(n))
    if mask == "none":
        return ()
    if mask == "random":
        return random_flip_mask(n, np.random.default_rng(params["seed"]))
    return tuple(int(b) for b in mask.split(",") if b)


def execute(cfg: ExperimentConfig) -> Output:
    """Run one configured experiment; numerical failures propagate."""
    p = cfg.params
    m = cfg.model
    try:
        if m == "prep":
            res = experiments.run_prep(p["n"], p["t_c"], _prep_mask(p))
        elif m in ("grover-h1", "grover-h2"):
            full = p["full_space"] if p["full_space"] is not None else p["N"] <= 16384
            res = experiments.run_grover(
                p["N"], p["E"], "H1" if m == "grover-h1" else "H2", p["target"],
                full_space=full, include_io=p["include_io"],
            )
        elif m == "directory":
            res = experiments.run_directory(
                p["N"], p["emax"], p["epsilon"], p["seed"], p["target"], p["steps_per_period"], p["horizon"]
            )
        elif m == "cavity":
            res = experiments.run_cavity(
                p["target"], p["window"], p["omega"], p["seed"], p["epsilon"], p["coupling"],
                p["qmax"], p["steps_per_period"], p["horizon"],
            )
        elif m == "shor-phase":
            res = experiments.run_shor_phase(p["n"], p["omega"], p["alpha"])
        elif m == "bound-suite":
            res = experiments.run_bound_suite(p["count"], p["max_dim"], p["seed"])
        elif m == "hypothesis":
            return _execute_hypothesis(p["seed"])
        else:  # pragma: no cover - guarded by resolve_config
            raise ConfigError(f"unknown model {m!r}")
    except NumericalContractError:
        raise
    except QactionError as exc:
        raise ConfigError(str(exc)) from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return Output(list(res.row), [res.row], list(res.flags))


def _execute_hypothesis(seed: int) -> Output:
    results = experiments.run_standard_suite(seed)
    reports = [r.report for r in results]
    table = analysis.hypothesis_table(reports)
    flags = []
    for r in reports:
        flags.extend(f"{r.model}: {f}" for f in r.flags)
    return Output(list(analysis.TABLE_COLUMNS), [dict(r) for r in table.rows], flags, list(table.notes))


# default fit per model for sweeps: (y column, x column, transform)
DEFAULT_FITS = {
    "grover-h1": ("t_star", "N", "sqrt"),
    "grover-h2": ("t_star", "N", "identity"),
    "directory": ("discrimination_time", "N", "identity"),
    "cavity": ("discrimination_time", "target", "identity"),
    "shor-phase": ("mean_energy", "n", "pow2"),
    "prep": ("total_product", "n", "identity"),
}

_TRANSFORMS = {"identity": lambda x: x, "sqrt": math.sqrt, "pow2": lambda x: 2.0**x}


def parse_grid(items) -> list[tuple[str, list[str]]]:
    grid = []
    for item in items or ():
        if "=" not in item:
            raise ConfigError(f"grid entry must look like key=v1,v2,...: {item!r}")
        k, vs = item.split("=", 1)
        values = [v for v in vs.split(",") if v.strip()]
        if not values:
            raise ConfigError(f"grid entry {k!r} has no values")
        grid.append((k.strip(), values))
    if not grid:
        raise ConfigError("sweep grid is empty")
    return grid


def _sweep_cell(args):
    model, raw, fmt = args
    try:
        cfg = resolve_config(model, raw, fmt)
        out = execute(cfg)
        return "ok", out.rows[0], ""
    except (QactionError, ValueError) as exc:
        return "failed", {}, f"{type(exc).__name__}: {exc}"


def sweep(model: str, base: dict, grid, fmt: str = "csv", jobs: int = 1, fit=None) -> tuple[ExperimentConfig, Output]:
    """Cartesian sweep; cell ``i`` gets seed ``base_seed + i`` when seeded.

    Failed cells are kept as rows with ``status=failed``. Rows follow the
    grid order regardless of ``jobs``.
    """
    base_cfg = resolve_config(model, {k: v for k, v in base.items()}, fmt)
    keys = [k for k, _ in grid]
    for k in keys:
        if k not in PARAMS[model]:
            raise ConfigError(f"unknown grid key {k!r} for {model}")
    cells = []
    base_seed = base_cfg.params.get("seed")
    for i, combo in enumerate(itertools.product(*(vs for _, vs in grid))):
        raw = dict(base)
        raw.update(dict(zip(keys, combo)))
        if base_seed is not None and "seed" not in keys:
            raw["seed"] = str(base_seed + i)
        cells.append((model, raw, fmt))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_cell, cells))
    else:
        results = [_sweep_cell(c) for c in cells]

    columns = ["cell", *[f"grid.{k}" for k in keys], "status", "error"]
    rows = []
    for i, ((_, raw, _), (status, row, err)) in enumerate(zip(cells, results)):
        for c in row:
            if c not in columns:
                columns.append(c)
        rows.append({"cell": i, **{f"grid.{k}": raw[k] for k in keys}, "status": status, "error": err, **row})

    summary = {}
    y_col, x_col, transform = fit or DEFAULT_FITS.get(model, (None, None, None))
    ok = [r for r in rows if r["status"] == "ok" and r.get(y_col) is not None]
    if y_col and len(ok) >= 2 and all(x_col in r for r in ok):
        xs = [_TRANSFORMS[transform](float(r[x_col])) for r in ok]
        ys = [float(r[y_col]) for r in ok]
        slope, r2 = analysis.fit_through_origin(xs, ys)
        summary = {"fit.y": y_col, "fit.x": f"{transform}({x_col})", "fit.slope": slope, "fit.r2": r2}
    cfg = ExperimentConfig(f"sweep:{model}", dict(base_cfg.params), fmt)
    for k in keys:
        cfg.params.pop(k, None)
    cfg.params["grid"] = ";".join(f"{k}={','.join(vs)}" for k, vs in grid)
    cfg.params["jobs"] = jobs
    cfg.params.pop("seed", None)
    if base_seed is not None:
        cfg.params["base_seed"] = base_seed
    return cfg, Output(columns, rows, notes=[], summary=summary)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def _fmt_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _json_value(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def render(cfg: ExperimentConfig, out: Output) -> str:
    schema = f"qaction/{cfg.model}/v{SCHEMA_VERSION}"
    if cfg.fmt == "json":
        doc = {
            "schema": schema,
            "version": __version__,
            "config": cfg.resolved(),
            "units": analysis.UNITS,
            "flags": out.flags,
            "notes": out.notes,
            "summary": {k: _json_value(v) for k, v in out.summary.items()},
            "columns": out.columns,
            "rows": [{c: _json_value(r.get(c)) for c in out.columns} for r in out.rows],
        }
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    buf.write(f"# schema: {schema}\n")
    buf.write(f"# version: {__version__}\n")
    buf.write("# units: " + "; ".join(f"{k}={v}" for k, v in analysis.UNITS.items()) + "\n")
    for k, v in cfg.resolved().items():
        buf.write(f"# config.{k}: {v}\n")
    for f in out.flags:
        buf.write(f"# flag: {f}\n")
    for n in out.notes:
        buf.write(f"# note: {n}\n")
    for k, v in out.summary.items():
        buf.write(f"# summary.{k}: {_fmt_value(v)}\n")
    buf.write(",".join(out.columns) + "\n")
    for r in out.rows:
        buf.write(",".join(_csv_cell(_fmt_value(r.get(c))) for c in out.columns) + "\n")
    return buf.getvalue()


def _csv_cell(s: str) -> str:
    if any(ch in s for ch in ',"\n'):
        return '"' + s.replace('"', '""') + '"'
    return s


def output_path(cfg: ExperimentConfig) -> str:
    if cfg.output:
        return cfg.output
    base = Path(os.environ.get(OUTPUT_DIR_ENV, "."))
    name = cfg.model.replace(":", "-")
    return str(base / f"{name}.{cfg.fmt}")


def write_output(cfg: ExperimentConfig, out: Output, stdout=None) -> str:
    text = render(cfg, out)
    path = output_path(cfg)
    if path == "-":
        (stdout or sys.stdout).write(text)
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return path


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _add_common(sp):
    sp.add_argument("--config", help="flat key = value settings file")
    sp.add_argument("--format", dest="fmt", choices=("csv", "json"), default=None)
    sp.add_argument("--output", "-o", help="output file, '-' for stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qaction", description="Energy-time cost of Hamiltonian computations.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for model in MODELS:
        sp = sub.add_parser(model)
        _add_common(sp)
        for name, p in PARAMS[model].items():
            sp.add_argument(f"--{name}", dest=f"p_{name}", default=None, help=p.doc)
    sp = sub.add_parser("sweep", help="run a model over a parameter grid")
    sp.add_argument("model", choices=[m for m in MODELS if m not in ("hypothesis", "bound-suite")])
    _add_common(sp)
    sp.add_argument("--grid", action="append", default=[], help="key=v1,v2,... (repeatable)")
    sp.add_argument("--set", action="append", default=[], help="fixed key=value (repeatable)")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--fit", help="y_column:x_column[:identity|sqrt|pow2]")
    return parser


def _raw_settings(args) -> tuple[dict, dict]:
    file_settings = read_config_file(args.config) if args.config else {}
    fmt = file_settings.pop("format", None)
    output = file_settings.pop("output", None)
    meta = {"format": args.fmt or fmt or "csv", "output": args.output or output}
    return file_settings, meta


def main(argv=None, stdout=None, stderr=None) -> int:
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        raw, meta = _raw_settings(args)
        if args.command == "sweep":
            for item in args.set:
                if "=" not in item:
                    raise ConfigError(f"--set expects key=value, got {item!r}")
                k, v = item.split("=", 1)
                raw[k.strip()] = v.strip()
            fit = None
            if args.fit:
                parts = args.fit.split(":")
                if len(parts) not in (2, 3) or (len(parts) == 3 and parts[2] not in _TRANSFORMS):
                    raise ConfigError(f"--fit expects y:x[:transform], got {args.fit!r}")
                fit = (parts[0], parts[1], parts[2] if len(parts) == 3 else "identity")
            if args.jobs < 1:
                raise ConfigError("--jobs must be >= 1")
            cfg, out = sweep(args.model, raw, parse_grid(args.grid), meta["format"], args.jobs, fit)
            cfg.output = meta["output"]
        else:
            for k, v in vars(args).items():
                if k.startswith("p_") and v is not None:
                    raw[k[2:]] = v
            cfg = resolve_config(args.command, raw, meta["format"], meta["output"])
            out = execute(cfg)
        path = write_output(cfg, out, stdout)
        if path != "-":
            print(path, file=stdout or sys.stdout)
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=stderr)
        return EXIT_CONFIG
    except NumericalContractError as exc:
        print(f"numerical contract violated ({type(exc).__name__}): {exc}", file=stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
