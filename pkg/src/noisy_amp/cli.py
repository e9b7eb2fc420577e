"""Command-line front end: figure datasets as reproducible CSV/JSON files.

Each subcommand evaluates one dataset with defaults matching the published
curves (seed |alpha| = 0.2, amplifier gain 1.2 for fixed-gain panels, tap
transmittance 0.99 and target effective gain 2 for the scissor comparison).
Outputs are byte-stable: the header comment block embeds every effective
config entry, the library version, and a hash of the config; the timestamp
sits on its own comment line so that identical configs produce identical data
bytes.  A PNG rendering is written next to the data file unless --no-plot.

Exit codes: 0 success, 2 config error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import hashlib
import io
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .channels import Add, Coherent, Subtract
from .errors import InvalidInput, NoisyAmpError
from .experiments import (
    PilaOnly,
    PilaThen,
    PilaThenBsSubtraction,
    Scissor,
    SweepPlan,
    fig1_table,
    fig2_table,
    fig3a_table,
    fig3b_table,
    fig4_table,
    fig7_table,
    fig8_table,
    fig9_table,
    run_sweep,
    wigner_table,
)
from . import plots

__all__ = ["main"]


class ConfigError(Exception):
    """A problem with flags, config file, or parameter values."""


# ---------------------------------------------------------------------------
# Parameter schema: name -> (python type, default, help).  Names double as
# config-file keys; flags are the dashed versions.
# ---------------------------------------------------------------------------

_GAIN_AXIS = {
    "alpha_mod": (float, 0.2, "seed coherent amplitude |alpha|"),
    "g_min": (float, 1.0, "amplifier gain sweep start"),
    "g_max": (float, 2.5, "amplifier gain sweep end"),
    "steps": (int, 16, "number of sweep points"),
    "dim": (int, 0, "starting Fock cutoff override (0 = automatic)"),
}

_RATIO_AXIS = {
    "alpha_mod": (float, 0.2, "seed coherent amplitude |alpha|"),
    "g": (float, 1.2, "fixed amplifier gain"),
    "steps": (int, 21, "number of r points on [0, 1]"),
    "n_phases": (int, 64, "input phases averaged per point"),
    "dim": (int, 0, "starting Fock cutoff override (0 = automatic)"),
}

_SCHEMES = (
    "pila",
    "pila+sub1",
    "pila+sub2",
    "pila+add1",
    "pila+add2",
    "pila+coh",
    "pila+bs-sub",
    "scissor",
)

COMMANDS: dict[str, dict] = {
    "fig1": {
        "help": "effective gain of sub/add operations versus amplifier gain",
        "params": _GAIN_AXIS,
    },
    "fig2": {
        "help": "phase-averaged effective gain versus coherent-operation ratio r",
        "params": _RATIO_AXIS,
    },
    "fig3a": {
        "help": "fidelity of sub/add operations versus amplifier gain",
        "params": _GAIN_AXIS,
    },
    "fig3b": {
        "help": "gain/fidelity trade-off: bare amplifier versus subtraction",
        "params": _GAIN_AXIS,
    },
    "fig4": {
        "help": "scissor versus beam-splitter subtraction at effective gain 2",
        "params": {
            "alpha_mod": (str, "0.2,1.0", "comma-separated seed amplitudes"),
            "n_max": (int, 4, "largest scissor count N"),
            "t": (float, 0.99, "tap transmittance of the subtraction scheme"),
            "target_ge": (float, 2.0, "calibrated effective gain"),
            "dim": (int, 0, "starting Fock cutoff override (0 = automatic)"),
        },
    },
    "fig7": {
        "help": "phase-averaged fidelity versus coherent-operation ratio r",
        "params": _RATIO_AXIS,
    },
    "fig8": {
        "help": "Holevo phase variance versus amplifier gain",
        "params": _GAIN_AXIS,
    },
    "fig9": {
        "help": "phase-averaged Holevo variance versus coherent-operation ratio r",
        "params": _RATIO_AXIS,
    },
    "wigner": {
        "help": "Wigner function of one pipeline output on a square grid",
        "params": {
            "op": (str, "sub1", "pipeline stage: pila|sub1|sub2|add1|add2|coh"),
            "alpha_mod": (float, 0.2, "seed coherent amplitude |alpha|"),
            "g": (float, 1.2, "amplifier gain"),
            "r": (float, math.sqrt(0.5), "coherent-operation ratio (op=coh)"),
            "phase": (float, 0.0, "seed phase (radians)"),
            "grid_min": (float, -3.0, "grid lower bound (both axes)"),
            "grid_max": (float, 3.0, "grid upper bound (both axes)"),
            "grid_step": (float, 0.05, "grid spacing"),
            "dim": (int, 0, "starting Fock cutoff override (0 = automatic)"),
        },
    },
    "custom": {
        "help": "free-form sweep over any scheme and variable",
        "params": {
            "scheme": (str, "pila+sub1", "one of " + "|".join(_SCHEMES)),
            "sweep": (str, "G", "swept variable: G|r|phase|grid"),
            "lo": (float, 1.0, "sweep start"),
            "hi": (float, 2.5, "sweep end"),
            "steps": (int, 16, "number of sweep points (per axis for grid)"),
            "outputs": (str, "G_e,F,V", "comma-separated subset of G_e,F,V,P_s,Wigner"),
            "alpha_mod": (float, 0.2, "seed coherent amplitude |alpha|"),
            "g": (float, 1.2, "fixed gain for r/phase/grid sweeps"),
            "t": (float, 0.99, "tap transmittance (scheme=pila+bs-sub)"),
            "n": (int, 1, "scissor count (scheme=scissor)"),
            "r": (float, math.sqrt(0.5), "coherent-op ratio (scheme=pila+coh)"),
            "n_phases": (int, 64, "input phases averaged per r point"),
            "dim": (int, 0, "starting Fock cutoff override (0 = automatic)"),
        },
    },
}


def _coerce(command: str, key: str, raw: str):
    kind, _, _ = COMMANDS[command]["params"][key]
    try:
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
        return str(raw)
    except ValueError as exc:
        raise ConfigError(f"invalid value for {key!r}: {raw!r}") from exc


def _parse_config_file(path: str, command: str) -> dict:
    """Flat `key = value` UTF-8 text with # comments."""
    known = COMMANDS[command]["params"]
    entries: dict = {}
    try:
        with open(path, encoding="utf-8") as handle:
            for lineno, raw in enumerate(handle, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected `key = value`")
                key, _, value = line.partition("=")
                key = key.strip()
                value = value.strip()
                if key in ("format", "workers"):
                    entries[key] = value
                    continue
                if key not in known:
                    raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
                entries[key] = _coerce(command, key, value)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return entries


def _default_workers() -> int:
    return os.cpu_count() or 1


def _worker_cap() -> int | None:
    raw = os.environ.get("NOISY_AMP_THREADS")
    if raw is None:
        return None
    try:
        cap = int(raw)
    except ValueError as exc:
        raise ConfigError(f"NOISY_AMP_THREADS must be an integer, got {raw!r}") from exc
    if cap < 1:
        raise ConfigError(f"NOISY_AMP_THREADS must be >= 1, got {cap}")
    return cap


def format_value(value) -> str:
    """Numeric cell formatting: 12 significant digits, `inf` literal."""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    x = float(value)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return "%.12g" % x


def _config_lines(command: str, params: dict) -> list[str]:
    lines = [f"command = {command}"]
    for key in COMMANDS[command]["params"]:
        lines.append(f"{key} = {format_value(params[key])}")
    return lines


def write_csv(path: str, command: str, params: dict, header: list[str], rows) -> None:
    buf = io.StringIO()
    config = _config_lines(command, params)
    digest = hashlib.sha256("\n".join(config).encode()).hexdigest()[:12]
    for line in config:
        buf.write(f"# {line}\n")
    buf.write(f"# library_version = {__version__}\n")
    buf.write(f"# config_hash = {digest}\n")
    stamp = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    buf.write(f"# timestamp = {stamp}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(cell) for cell in row])
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(buf.getvalue())


def write_json(path: str, header: list[str], rows) -> None:
    lines = ["["]
    for index, row in enumerate(rows):
        fields = []
        for key, value in zip(header, row):
            if value is None:
                fields.append(f"{json.dumps(key)}: null")
            elif isinstance(value, str):
                fields.append(f"{json.dumps(key)}: {json.dumps(value)}")
            else:
                text = format_value(value)
                if text in ("inf", "-inf"):
                    fields.append(f"{json.dumps(key)}: {json.dumps(text)}")
                else:
                    fields.append(f"{json.dumps(key)}: {text}")
        comma = "," if index < len(rows) - 1 else ""
        lines.append("  {" + ", ".join(fields) + "}" + comma)
    lines.append("]")
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write("\n".join(lines) + "\n")


def _parse_alpha_list(raw: str) -> tuple[float, ...]:
    try:
        values = tuple(float(tok) for tok in raw.split(",") if tok.strip())
    except ValueError as exc:
        raise ConfigError(f"invalid alpha_mod list: {raw!r}") from exc
    if not values or any(v <= 0 or not math.isfinite(v) for v in values):
        raise ConfigError(f"alpha_mod entries must be finite and > 0, got {raw!r}")
    return values


def _build_scheme(params: dict):
    name = params["scheme"]
    if name == "pila":
        return PilaOnly()
    if name == "pila+sub1":
        return PilaThen(Subtract(1))
    if name == "pila+sub2":
        return PilaThen(Subtract(2))
    if name == "pila+add1":
        return PilaThen(Add(1))
    if name == "pila+add2":
        return PilaThen(Add(2))
    if name == "pila+coh":
        ratio = params["r"]
        if not 0.0 <= ratio <= 1.0:
            raise ConfigError(f"r must be in [0, 1], got {ratio!r}")
        return PilaThen(Coherent(math.sqrt(max(0.0, 1.0 - ratio * ratio)), ratio))
    if name == "pila+bs-sub":
        return PilaThenBsSubtraction(params["t"])
    if name == "scissor":
        return Scissor(params["n"])
    raise ConfigError(f"unknown scheme {name!r}; valid: {', '.join(_SCHEMES)}")


def _run_custom(params: dict, workers: int):
    outputs = tuple(tok.strip() for tok in params["outputs"].split(",") if tok.strip())
    try:
        plan = SweepPlan(
            scheme=_build_scheme(params),
            alpha_mod=params["alpha_mod"],
            sweep_var=params["sweep"],
            sweep_range=(params["lo"], params["hi"], params["steps"]),
            outputs=outputs,
            gain=params["g"],
            n_phases=params["n_phases"],
            dim0=params["dim"] or None,
        )
    except InvalidInput as exc:
        raise ConfigError(str(exc)) from exc
    sweep_rows = run_sweep(plan, workers)
    if plan.sweep_var == "grid":
        header = ["x", "p", "W", "dim", "trunc_defect", "error"]
        rows = [
            [r.extras["x"], r.extras["p"], r.extras["W"], r.dim, r.trunc_defect, r.error or ""]
            for r in sweep_rows
        ]
        return header, rows, sweep_rows
    metric_of = {
        "G_e": lambda rep: rep.G_e,
        "F": lambda rep: rep.F,
        "V": lambda rep: rep.V,
        "P_s": lambda rep: rep.P_s,
    }
    header = [plan.sweep_var] + list(plan.outputs) + ["dim", "trunc_defect", "error"]
    rows = []
    for point in sweep_rows:
        cells: list = [point.value]
        for name in plan.outputs:
            cells.append(metric_of[name](point.report) if point.report else None)
        cells.extend([point.dim, point.trunc_defect, point.error or ""])
        rows.append(cells)
    return header, rows, sweep_rows


def _run_command(command: str, params: dict, workers: int):
    dim0 = params.get("dim") or None
    if command in ("fig1", "fig3a", "fig3b", "fig8"):
        builder = {
            "fig1": fig1_table,
            "fig3a": fig3a_table,
            "fig3b": fig3b_table,
            "fig8": fig8_table,
        }[command]
        _, header, rows = builder(
            alpha_mod=params["alpha_mod"],
            g_min=params["g_min"],
            g_max=params["g_max"],
            steps=params["steps"],
            workers=workers,
            dim0=dim0,
        )
        return header, rows, None
    if command in ("fig2", "fig7", "fig9"):
        builder = {"fig2": fig2_table, "fig7": fig7_table, "fig9": fig9_table}[command]
        _, header, rows = builder(
            alpha_mod=params["alpha_mod"],
            gain=params["g"],
            steps=params["steps"],
            n_phases=params["n_phases"],
            workers=workers,
            dim0=dim0,
        )
        return header, rows, None
    if command == "fig4":
        _, header, rows = fig4_table(
            alpha_mods=_parse_alpha_list(params["alpha_mod"]),
            n_max=params["n_max"],
            transmittance=params["t"],
            target_ge=params["target_ge"],
            dim0=dim0,
        )
        return header, rows, None
    if command == "wigner":
        _, header, rows = wigner_table(
            op=params["op"],
            alpha_mod=params["alpha_mod"],
            gain=params["g"],
            ratio=params["r"],
            phase=params["phase"],
            grid_min=params["grid_min"],
            grid_max=params["grid_max"],
            grid_step=params["grid_step"],
            dim0=dim0,
        )
        return header, rows, None
    if command == "custom":
        return _run_custom(params, workers)
    raise ConfigError(f"unknown command {command!r}")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="noisy-amp",
        description=(
            "Quantum-limited amplifier with conditional photonic corrections: "
            "figure datasets as reproducible CSV/JSON files."
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", metavar="command")
    for name, meta in COMMANDS.items():
        sub = subparsers.add_parser(
            name,
            help=meta["help"],
            description=meta["help"],
            formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        )
        for key, (kind, default, help_text) in meta["params"].items():
            sub.add_argument(
                f"--{key.replace('_', '-')}",
                dest=key,
                type=kind,
                default=None,
                help=f"{help_text} (default: {format_value(default)})",
            )
        sub.add_argument("-o", "--output", default=None, help="output file path")
        sub.add_argument(
            "--format", choices=("csv", "json"), default=None, help="output format (default: csv)"
        )
        sub.add_argument("--config", default=None, help="flat key=value config file")
        sub.add_argument(
            "--workers", type=int, default=None, help="parallel sweep processes (default: cores)"
        )
        sub.add_argument(
            "--no-plot", action="store_true", help="skip the PNG rendering next to the data file"
        )
    return parser


def _main(argv) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help(sys.stderr)
        return 2
    command = args.command
    schema = COMMANDS[command]["params"]

    params = {key: default for key, (_, default, _) in schema.items()}
    fmt = "csv"
    workers_requested = None
    if args.config:
        file_entries = _parse_config_file(args.config, command)
        if "format" in file_entries:
            fmt = file_entries.pop("format")
            if fmt not in ("csv", "json"):
                raise ConfigError(f"format must be csv or json, got {fmt!r}")
        if "workers" in file_entries:
            try:
                workers_requested = int(file_entries.pop("workers"))
            except ValueError as exc:
                raise ConfigError("workers must be an integer") from exc
        params.update(file_entries)
    for key in schema:
        flag_value = getattr(args, key)
        if flag_value is not None:
            params[key] = flag_value
    if args.format is not None:
        fmt = args.format
    if args.workers is not None:
        workers_requested = args.workers
    if workers_requested is not None and workers_requested < 1:
        raise ConfigError(f"workers must be >= 1, got {workers_requested}")

    cap = _worker_cap()
    workers = workers_requested if workers_requested is not None else _default_workers()
    if cap is not None:
        workers = min(workers, cap)

    if params.get("dim", 0) and params["dim"] < 2:
        raise ConfigError(f"dim must be 0 (automatic) or >= 2, got {params['dim']}")

    try:
        header, rows, sweep_rows = _run_command(command, params, workers)
    except InvalidInput as exc:
        raise ConfigError(str(exc)) from exc

    output = args.output or f"{command}.{fmt}"
    if fmt == "csv":
        write_csv(output, command, params, header, rows)
    else:
        write_json(output, header, rows)

    if not args.no_plot:
        png_path = os.path.splitext(output)[0] + ".png"
        try:
            plots.render(command, header, rows, png_path)
        except Exception as exc:  # rendering is auxiliary; the data file is written
            print(f"warning: plot rendering failed: {exc}", file=sys.stderr)

    failed = [r for r in (sweep_rows or []) if r.error]
    if failed:
        print(
            f"{len(failed)} of {len(sweep_rows)} sweep points failed; "
            f"first: value={failed[0].value:g}: {failed[0].error}",
            file=sys.stderr,
        )
        return 3
    return 0


def main(argv: list[str] | None = None) -> int:
    try:
        return _main(argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NoisyAmpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except SystemExit as exc:
        code = exc.code
        if code is None:
            return 0
        return code if isinstance(code, int) else 2


if __name__ == "__main__":
    sys.exit(main())
