"""Command-line surface: analyze | spectrum | wavefunction | validate.

Output is CSV (default) or JSON; every floating value is printed with 17
significant digits so a double round-trips losslessly.  Exit codes: 0
success, 2 configuration error, 3 no physical result, 4 validation failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidInputError, NonNormalizableError, NoStructureError, NuboundError
from .potential import InversePolyPotential, evaluate, landscape, preset
from .spectrum import eigenfunction, solve_spectrum

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NO_RESULT = 3
EXIT_VALIDATION = 4

_PRESET_PARAMS = {
    "magnetic": ("alpha", "A", "B", "C"),
    "neutrino": ("k", "eps"),
    "coulomb": ("alpha", "ell"),
}
_FILE_SECTIONS = {
    "potential": ("preset", "params", "coefficients"),
    "expansion": ("r0",),
    "spectrum": ("n_max", "branch", "n"),
    "oracle": ("tol", "j"),
    "output": ("format", "path", "grid"),
}


class ConfigError(Exception):
    """Invalid flag/file configuration; maps to exit code 2."""


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _bool(x: bool) -> str:
    return "true" if x else "false"


@dataclass
class RunConfig:
    command: str
    a0: float = 0.0
    inv_coeffs: tuple[float, ...] = ()
    preset_name: str | None = None
    preset_params: dict = field(default_factory=dict)
    r0: float | str | None = None
    n_max: int = 0
    branch: str = "plus"
    n: int = 0
    grid: tuple[str, float, float, int] = ("lin", 0.0, 20.0, 200)
    oracle_tol: float = 1e-6
    oracle_j: int | None = None
    fmt: str = "csv"
    out: str | None = None
    corrupt_lambda2: float = 0.0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("potential")
    g.add_argument("--preset", choices=sorted(_PRESET_PARAMS))
    g.add_argument("--coeffs", help="comma-separated a0,a-1,a-2,...")
    g.add_argument("--alpha", type=float, help="1/r strength (magnetic, coulomb)")
    g.add_argument("--A", type=float, help="1/r^2 strength (magnetic)")
    g.add_argument("--B", type=float, help="1/r^3 strength (magnetic)")
    g.add_argument("--C", type=float, help="1/r^4 strength (magnetic)")
    g.add_argument("--k", type=float, help="angular index, nonzero integer (neutrino)")
    g.add_argument("--eps", type=int, help="+1 or -1 (neutrino)")
    g.add_argument("--ell", type=int, help="orbital quantum number (coulomb)")
    common.add_argument("--r0", help="expansion point: a positive value or 'auto'")
    common.add_argument("--n-max", type=int, dest="n_max")
    common.add_argument("--branch", choices=["plus", "minus", "both"])
    common.add_argument("--format", choices=["csv", "json"], dest="fmt")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--config", help="JSON config file; flags override file values")
    common.add_argument("--oracle-tol", type=float, dest="oracle_tol")

    parser = argparse.ArgumentParser(
        prog="nubound",
        description="Bound states of inverse-power radial potentials in closed form, "
        "with an independent finite-difference cross-check.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("analyze", parents=[common], help="zeros and extrema of the potential")
    sub.add_parser("spectrum", parents=[common], help="closed-form eigenvalue table")
    wf = sub.add_parser("wavefunction", parents=[common], help="sampled normalized U(r)")
    wf.add_argument("--n", type=int, help="quantum number of the sampled state")
    wf.add_argument("--grid", help="lin|log:<lo>:<hi>:<count> sampling grid")
    va = sub.add_parser("validate", parents=[common], help="oracle cross-check table")
    va.add_argument("--corrupt-lambda2", type=float, dest="corrupt_lambda2", help=argparse.SUPPRESS)
    return parser


def _load_config_file(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in config file: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    for key, section in data.items():
        if key not in _FILE_SECTIONS:
            raise ConfigError(f"unknown config key '{key}'")
        if not isinstance(section, dict):
            raise ConfigError(f"config section '{key}' must be an object")
        for sub in section:
            if sub not in _FILE_SECTIONS[key]:
                raise ConfigError(f"unknown config key '{key}.{sub}'")
    return data


def _finite(value, name: str) -> float:
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"'{name}' must be a number") from None
    if not math.isfinite(out):
        raise ConfigError(f"'{name}' must be finite")
    return out


def _int_in_range(value, name: str, lo: int, hi: int) -> int:
    try:
        out = int(value)
    except (TypeError, ValueError):
        raise ConfigError(f"'{name}' must be an integer in [{lo}, {hi}]") from None
    if out != value or not lo <= out <= hi:
        raise ConfigError(f"'{name}' must be an integer in [{lo}, {hi}]")
    return out


def _parse_coeff_list(values, name: str) -> tuple[float, tuple[float, ...]]:
    coeffs = [_finite(v, name) for v in values]
    if len(coeffs) < 2:
        raise ConfigError(f"'{name}' needs at least a0 and one inverse coefficient")
    return coeffs[0], tuple(coeffs[1:])


def _parse_grid(spec: str) -> tuple[str, float, float, int]:
    parts = spec.split(":")
    if len(parts) != 4 or parts[0] not in ("lin", "log"):
        raise ConfigError("grid must be lin|log:<lo>:<hi>:<count>")
    kind = parts[0]
    lo = _finite(parts[1], "grid lo")
    hi = _finite(parts[2], "grid hi")
    try:
        count = int(parts[3])
    except ValueError:
        raise ConfigError("grid count must be an integer") from None
    if not 2 <= count <= 100000:
        raise ConfigError("grid count must be between 2 and 100000")
    if hi <= lo:
        raise ConfigError("grid requires lo < hi")
    if kind == "log" and lo <= 0.0:
        raise ConfigError("log grid requires lo > 0")
    if kind == "lin" and lo < 0.0:
        raise ConfigError("grid requires lo >= 0")
    return kind, lo, hi, count


def parse_config(args: argparse.Namespace) -> RunConfig:
    """Merge flags over the optional JSON config file into a validated RunConfig."""
    data = _load_config_file(args.config) if args.config else {}
    pot_file = data.get("potential", {})
    if "preset" in pot_file and "coefficients" in pot_file:
        raise ConfigError("config gives both 'potential.preset' and 'potential.coefficients'")

    cfg = RunConfig(command=args.command)

    flag_params = {
        name: getattr(args, name)
        for name in ("alpha", "A", "B", "C", "k", "eps", "ell")
        if getattr(args, name, None) is not None
    }
    if args.preset is not None and args.coeffs is not None:
        raise ConfigError("give either --preset or --coeffs, not both")
    if args.preset is not None:
        cfg.preset_name = args.preset
    elif args.coeffs is not None:
        cfg.a0, cfg.inv_coeffs = _parse_coeff_list(args.coeffs.split(","), "--coeffs")
    elif "preset" in pot_file:
        cfg.preset_name = pot_file["preset"]
    elif "coefficients" in pot_file:
        coeffs = pot_file["coefficients"]
        if not isinstance(coeffs, list):
            raise ConfigError("'potential.coefficients' must be a list")
        cfg.a0, cfg.inv_coeffs = _parse_coeff_list(coeffs, "potential.coefficients")
    else:
        raise ConfigError("no potential given (use --preset, --coeffs, or a config file)")

    if cfg.preset_name is not None:
        if cfg.preset_name not in _PRESET_PARAMS:
            raise ConfigError(f"unknown preset '{cfg.preset_name}'")
        params = {}
        file_params = pot_file.get("params", {})
        if pot_file.get("preset", cfg.preset_name) == cfg.preset_name:
            params.update(file_params)
        params.update(flag_params)
        allowed = _PRESET_PARAMS[cfg.preset_name]
        for key in params:
            if key not in allowed:
                raise ConfigError(f"parameter '{key}' does not apply to preset '{cfg.preset_name}'")
        cfg.preset_params = params
    elif flag_params:
        key = sorted(flag_params)[0]
        raise ConfigError(f"parameter '--{key}' requires --preset")

    r0 = args.r0 if args.r0 is not None else data.get("expansion", {}).get("r0")
    if r0 is not None:
        if isinstance(r0, str) and r0 == "auto":
            cfg.r0 = "auto"
        else:
            val = _finite(r0, "r0")
            if val <= 0.0:
                raise ConfigError("'r0' must be positive")
            cfg.r0 = val
    if cfg.command in ("spectrum", "wavefunction", "validate") and cfg.r0 is None:
        raise ConfigError("'r0' is required (a positive value or 'auto')")

    spec_file = data.get("spectrum", {})
    n_max = args.n_max if args.n_max is not None else spec_file.get("n_max")
    if n_max is not None:
        cfg.n_max = _int_in_range(n_max, "n_max", 0, 50)
    branch = args.branch if args.branch is not None else spec_file.get("branch")
    if branch is not None:
        if branch not in ("plus", "minus", "both"):
            raise ConfigError("'branch' must be plus, minus, or both")
        cfg.branch = branch

    if cfg.command == "wavefunction":
        n = args.n if args.n is not None else spec_file.get("n")
        if n is not None:
            cfg.n = _int_in_range(n, "n", 0, 50)
        if cfg.branch == "both":
            raise ConfigError("wavefunction needs a single branch (plus or minus)")
        grid = args.grid if args.grid is not None else data.get("output", {}).get("grid")
        if grid is not None:
            cfg.grid = _parse_grid(grid)

    tol = args.oracle_tol if args.oracle_tol is not None else data.get("oracle", {}).get("tol")
    if tol is not None:
        tol = _finite(tol, "oracle tol")
        if tol <= 0.0:
            raise ConfigError("'oracle tol' must be positive")
        cfg.oracle_tol = tol
    oj = data.get("oracle", {}).get("j")
    if oj is not None:
        cfg.oracle_j = _int_in_range(oj, "oracle.j", 1, 51)

    out_file = data.get("output", {})
    fmt = args.fmt if args.fmt is not None else out_file.get("format")
    if fmt is not None:
        if fmt not in ("csv", "json"):
            raise ConfigError("'format' must be csv or json")
        cfg.fmt = fmt
    cfg.out = args.out if args.out is not None else out_file.get("path")

    cfg.corrupt_lambda2 = getattr(args, "corrupt_lambda2", None) or 0.0
    return cfg


def _build_potential(cfg: RunConfig) -> InversePolyPotential:
    try:
        if cfg.preset_name is not None:
            return preset(cfg.preset_name, **cfg.preset_params)
        return InversePolyPotential(a0=cfg.a0, inv_coeffs=cfg.inv_coeffs)
    except InvalidInputError as exc:
        raise ConfigError(str(exc)) from exc


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _csv(header: str, rows: list[str]) -> str:
    return "\n".join([header, *rows]) + "\n"


def cmd_analyze(cfg: RunConfig) -> int:
    p = _build_potential(cfg)
    rep = landscape(p)
    rows = [(r, float(evaluate(p, r)), "zero") for r in rep.zeros]
    rows += [(e.r, e.value, e.kind) for e in rep.extrema]
    if cfg.fmt == "csv":
        text = _csv("r,V,kind", [f"{_fmt(r)},{_fmt(v)},{kind}" for r, v, kind in rows])
    else:
        text = json.dumps(
            {
                "command": "analyze",
                "method": rep.method,
                "rows": [{"r": _fmt(r), "V": _fmt(v), "kind": kind} for r, v, kind in rows],
            },
            indent=2,
        ) + "\n"
    _emit(text, cfg.out)
    return EXIT_OK


def _state_record(s) -> dict:
    return {
        "n": s.n,
        "branch": "+" if s.branch_sign > 0 else "-",
        "lambda2": _fmt(s.lambda2),
        "q": _fmt(s.q),
        "w": _fmt(s.w),
        "z": _fmt(s.z),
        "r0": _fmt(s.r0),
        "normalizable": s.normalizable,
    }


def cmd_spectrum(cfg: RunConfig) -> int:
    p = _build_potential(cfg)
    states = solve_spectrum(p, cfg.r0, cfg.n_max, cfg.branch)
    records = [_state_record(s) for s in states]
    if cfg.fmt == "csv":
        rows = [
            ",".join(
                [
                    str(r["n"]),
                    r["branch"],
                    r["lambda2"],
                    r["q"],
                    r["w"],
                    r["z"],
                    r["r0"],
                    _bool(r["normalizable"]),
                ]
            )
            for r in records
        ]
        text = _csv("n,branch,lambda2,q,w,z,r0,normalizable", rows)
    else:
        text = json.dumps(
            {"command": "spectrum", "laguerre_argument": "2*sqrt(z)*r", "states": records},
            indent=2,
        ) + "\n"
    _emit(text, cfg.out)
    if not any(s.normalizable for s in states):
        print("no normalizable states for this configuration", file=sys.stderr)
        return EXIT_NO_RESULT
    return EXIT_OK


def cmd_wavefunction(cfg: RunConfig) -> int:
    p = _build_potential(cfg)
    sign = 1 if cfg.branch == "plus" else -1
    states = solve_spectrum(p, cfg.r0, cfg.n, cfg.branch)
    match = [s for s in states if s.n == cfg.n and s.branch_sign == sign]
    if not match:
        print(f"state n={cfg.n} branch={cfg.branch} does not exist", file=sys.stderr)
        return EXIT_NO_RESULT
    wave = eigenfunction(match[0])  # raises NonNormalizableError -> exit 3
    kind, lo, hi, count = cfg.grid
    grid = np.linspace(lo, hi, count) if kind == "lin" else np.geomspace(lo, hi, count)
    vals = wave(grid)
    if cfg.fmt == "csv":
        text = _csv("r,U", [f"{_fmt(r)},{_fmt(u)}" for r, u in zip(grid, vals)])
    else:
        text = json.dumps(
            {
                "command": "wavefunction",
                "n": cfg.n,
                "branch": "+" if sign > 0 else "-",
                "samples": [{"r": _fmt(r), "U": _fmt(u)} for r, u in zip(grid, vals)],
            },
            indent=2,
        ) + "\n"
    _emit(text, cfg.out)
    return EXIT_OK


def cmd_validate(cfg: RunConfig) -> int:
    from .oracle import validate  # deferred: keeps the compiled kernels off other paths

    p = _build_potential(cfg)
    states = solve_spectrum(p, cfg.r0, cfg.n_max, cfg.branch)
    if cfg.corrupt_lambda2:
        states = [replace(s, lambda2=s.lambda2 + cfg.corrupt_lambda2 * s.n) for s in states]
    if cfg.oracle_j is not None:
        bound = [s for s in states if s.normalizable][: cfg.oracle_j]
        states = bound + [s for s in states if not s.normalizable]
    if not any(s.normalizable for s in states):
        print("no normalizable states to validate", file=sys.stderr)
        return EXIT_NO_RESULT
    report = validate(p, states, tol=cfg.oracle_tol)
    records = [
        {
            "n": row.n,
            "branch": "+" if row.branch_sign > 0 else "-",
            "lambda2_nu": _fmt(row.lambda2_nu),
            "lambda2_eff_oracle": _fmt(row.lambda2_eff_oracle),
            "eff_agreement": row.eff_agreement,
            "lambda2_true_oracle": _fmt(row.lambda2_true_oracle),
            "gap": _fmt(row.gap),
            "converged": row.converged,
        }
        for row in report.rows
    ]
    if cfg.fmt == "csv":
        rows = [
            ",".join(
                [
                    str(r["n"]),
                    r["branch"],
                    r["lambda2_nu"],
                    r["lambda2_eff_oracle"],
                    _bool(r["eff_agreement"]),
                    r["lambda2_true_oracle"],
                    r["gap"],
                    _bool(r["converged"]),
                ]
            )
            for r in records
        ]
        text = _csv(
            "n,branch,lambda2_nu,lambda2_eff_oracle,eff_agreement,lambda2_true_oracle,gap,converged",
            rows,
        )
    else:
        text = json.dumps({"command": "validate", "rows": records}, indent=2) + "\n"
    _emit(text, cfg.out)
    return EXIT_OK if report.all_eff_pass else EXIT_VALIDATION


_DISPATCH = {
    "analyze": cmd_analyze,
    "spectrum": cmd_spectrum,
    "wavefunction": cmd_wavefunction,
    "validate": cmd_validate,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = parse_config(args)
        return _DISPATCH[cfg.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NoStructureError as exc:
        print(f"no physical result: {exc}", file=sys.stderr)
        return EXIT_NO_RESULT
    except NonNormalizableError as exc:
        print(f"no physical result: {exc}", file=sys.stderr)
        return EXIT_NO_RESULT
    except NuboundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
