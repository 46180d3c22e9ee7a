"""Command-line front end.

Subcommands map configs to the library computations and write reproducible
CSV/JSON artifacts: occupation traces, steady-state momentum profiles,
current sweeps, accuracy-norm heatmaps, Kraus-channel dumps and
circuit-verification reports.

Exit codes: 0 success, 2 config/validation error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import copy
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import IntegrationError, NotCompletelyPositiveError, __version__
from .channel import (choi_from_map, completeness_residual, kraus_from_choi,
                      propagate_map)
from .circuit import (build_unitary_final, mitigate_readout,
                      rho_from_probabilities, rx, simulate_tomography)
from .master import (QubitState, TrajectoryRecord, evolve_density_matrix,
                     steady_state_occupation)
from .model import CoefficientSeries, ModelParams
from .observables import (current_vs_field, momentum_profile, norm_heatmap)
from .oracle import FiniteBathSpec, exact_occupation_trace

OUTPUT_DIR_ENV = "DDCHAIN_OUTPUT_DIR"

_DEFAULT_CONFIG = {
    "model": {"gamma": 1.0, "omega": 0.5, "big_gamma": 0.1, "beta": 10.0},
    "grid": {
        "n_k": 256,
        "omega_grid": [0.2, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0],
        "gamma_grid": [0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4],
    },
    "oracle": {"n_modes": 400, "bandwidth": 20.0, "dt": None,
               "burn_factor": 20.0},
    "output": {"directory": ".", "format": "csv"},
    "seed": 1234,
}


class ConfigError(ValueError):
    """Invalid or unknown configuration content; reported with field path."""


@dataclass
class RunConfig:
    """Fully-resolved run configuration (defaults merged with the JSON file
    and CLI overrides)."""

    data: dict

    @classmethod
    def load(cls, path: str | None) -> "RunConfig":
        merged = copy.deepcopy(_DEFAULT_CONFIG)
        if path is not None:
            try:
                with open(path) as fh:
                    user = json.load(fh)
            except (OSError, json.JSONDecodeError) as err:
                raise ConfigError(f"cannot read config {path}: {err}") from err
            _merge(merged, user, prefix="")
        return cls(merged)

    def model_params(self) -> ModelParams:
        m = self.data["model"]
        try:
            return ModelParams(omega=m["omega"], big_gamma=m["big_gamma"],
                               beta=m["beta"], gamma=m["gamma"])
        except ValueError as err:
            raise ConfigError(f"model: {err}") from err

    def output_dir(self) -> Path:
        env = os.environ.get(OUTPUT_DIR_ENV)
        d = Path(env if env else self.data["output"]["directory"])
        d.mkdir(parents=True, exist_ok=True)
        return d

    def header_lines(self) -> list[str]:
        return [f"ddchain {__version__}",
                "config: " + json.dumps(self.data, sort_keys=True)]


def _merge(base: dict, user: dict, prefix: str) -> None:
    for key, val in user.items():
        path = f"{prefix}{key}"
        if key not in base:
            raise ConfigError(f"unknown config key: {path}")
        if isinstance(base[key], dict):
            if not isinstance(val, dict):
                raise ConfigError(f"{path} must be an object")
            _merge(base[key], val, prefix=path + ".")
        else:
            base[key] = val


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _write_csv(path: Path, header_lines, columns: dict) -> None:
    names = list(columns)
    rows = len(next(iter(columns.values())))
    with open(path, "w", newline="") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write(",".join(names) + "\n")
        for i in range(rows):
            fh.write(",".join(_fmt(float(columns[n][i])) for n in names) + "\n")


def _write_json(path: Path, config: RunConfig, payload: dict) -> None:
    doc = {"artifact_version": __version__, "config": config.data}
    doc.update(payload)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_nk_trace(config: RunConfig, args) -> Path:
    params = config.model_params()
    k = args.k if args.k is not None else math.pi / 2 + 0.1
    t_final = args.t_final
    if t_final <= 0:
        raise ConfigError("t-final must be positive")
    if params.big_gamma == 0:
        times = np.linspace(0.0, t_final, 201)
        n0 = args.n0
        cols = {"t": times, "n_k": np.full_like(times, n0)}
    else:
        series = CoefficientSeries.build(params, k)
        rec = evolve_density_matrix(series, QubitState.from_occupation(args.n0),
                                    t_final, sample_stride=args.stride)
        cols = {"t": rec.times, "n_k": rec.occupations,
                "re_rho01": rec.coherences.real,
                "im_rho01": rec.coherences.imag}
        if args.with_oracle:
            ob = config.data["oracle"]
            bath = FiniteBathSpec.build(params, n_modes=ob["n_modes"],
                                        bandwidth=ob["bandwidth"] * params.gamma)
            orec = exact_occupation_trace(params, k, bath, t_final,
                                          dt=ob["dt"], n0=args.n0)
            cols["n_k_exact"] = np.interp(rec.times, orec.times,
                                          orec.occupations)
    out = config.output_dir() / "nk_trace.csv"
    _write_csv(out, config.header_lines(), cols)
    return out


def cmd_nkm_profile(config: RunConfig, args) -> Path:
    params = config.model_params()
    prof = momentum_profile(params, n_k=config.data["grid"]["n_k"])
    out = config.output_dir() / "nkm_profile.csv"
    _write_csv(out, config.header_lines(),
               {"k_m": prof.grid, "n": prof.values})
    return out


def cmd_current_sweep(config: RunConfig, args) -> Path:
    params = config.model_params()
    omegas = np.asarray(config.data["grid"]["omega_grid"], dtype=float)
    if omegas.size == 0 or omegas.min() <= 0 or np.any(np.diff(omegas) <= 0):
        raise ConfigError("grid.omega_grid must be positive and increasing")
    points = current_vs_field(omegas, params.big_gamma, params.beta,
                              params.gamma)
    out = config.output_dir() / "current_sweep.csv"
    _write_csv(out, config.header_lines(),
               {"omega": [p.omega for p in points],
                "current": [p.current for p in points]})
    return out


def _heatmap_cell(task):
    (omega, gg, beta, gamma, n_k, bandwidth, burn) = task
    from .observables import profile_accuracy
    params = ModelParams(omega=omega, big_gamma=gg, beta=beta, gamma=gamma)
    try:
        return profile_accuracy(params, n_k=n_k,
                                bandwidth=bandwidth * gamma,
                                burn_factor=burn)
    except (IntegrationError, ValueError):
        return math.nan


def cmd_norm_heatmap(config: RunConfig, args) -> Path:
    params = config.model_params()
    grid = config.data["grid"]
    ob = config.data["oracle"]
    omegas = [float(w) for w in grid["omega_grid"]]
    gammas = [float(g) for g in grid["gamma_grid"]]
    tasks = [(w, g, params.beta, params.gamma, 64,
              ob["bandwidth"] / 2.0, ob["burn_factor"])
             for g in gammas for w in omegas]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            values = list(pool.map(_heatmap_cell, tasks))
    else:
        values = [_heatmap_cell(t) for t in tasks]
    out = config.output_dir() / "norm_heatmap.csv"
    _write_csv(out, config.header_lines(),
               {"omega": [t[0] for t in tasks],
                "big_gamma": [t[1] for t in tasks],
                "norm": values})
    if any(math.isnan(v) for v in values):
        print("warning: some heatmap cells failed numerically (norm=nan)",
              file=sys.stderr)
    return out


def cmd_kraus_dump(config: RunConfig, args) -> Path:
    params = config.model_params()
    series = CoefficientSeries.build(params, args.k)
    t = args.t if args.t is not None else 20.0 / params.big_gamma
    f = propagate_map(series, t)
    choi = choi_from_map(f)
    kraus = kraus_from_choi(choi)
    vals = np.linalg.eigvalsh(choi)
    payload = {
        "n": steady_state_occupation(series, t),
        "time": t,
        "eigenvalues": [float(v) for v in vals],
        "kraus": [[[float(z.real), float(z.imag)] for z in op.ravel()]
                  for op in kraus],
        "completeness_residual": completeness_residual(kraus),
    }
    out = config.output_dir() / "kraus_dump.json"
    _write_json(out, config, payload)
    return out


_INIT_STATES = {
    "zero": lambda: np.diag([1.0, 0.0]).astype(complex),
    "plus": lambda: np.full((2, 2), 0.5, dtype=complex),
    "rx-pi-4": lambda: (rx(math.pi / 4) @ np.diag([1.0, 0.0]).astype(complex)
                        @ rx(math.pi / 4).conj().T),
}


def _initial_state(name: str) -> np.ndarray:
    if name in _INIT_STATES:
        return _INIT_STATES[name]()
    try:
        a_str, b_str = name.split(",")
        a = float(a_str)
        b = complex(b_str)
    except ValueError as err:
        raise ConfigError(f"unknown init state: {name}") from err
    rho = np.array([[a, b], [np.conj(b), 1.0 - a]])
    QubitState(rho).validate()
    return rho


def cmd_circuit_verify(config: RunConfig, args) -> Path:
    n = args.n_target
    if not 0.0 <= n <= 1.0:
        raise ConfigError("n-target must lie in [0, 1]")
    theta = 2.0 * math.asin(math.sqrt(n))
    u = build_unitary_final(theta)
    rho0 = QubitState(_initial_state(args.init))
    calibration = None
    if args.calibration is not None:
        calibration = np.asarray(json.loads(Path(args.calibration).read_text()),
                                 dtype=float)
        if calibration.shape != (2, 2):
            raise ConfigError("calibration must be a 2x2 matrix")
    seed = args.seed if args.seed is not None else config.data["seed"]
    result = simulate_tomography(u, rho0, args.shots, seed,
                                 calibration=calibration)
    payload = {
        "n_target": n,
        "theta": theta,
        "init": args.init,
        "shots": args.shots,
        "seed": seed,
        "counts": {b: [int(c) for c in v] for b, v in result.counts.items()},
        "rho_amplitudes": [[float(abs(z)) for z in row] for row in result.rho],
        "fidelity": result.fidelity,
        "positivity_clipped": result.clipped,
    }
    if calibration is not None:
        probs = mitigate_readout(result.counts, calibration)
        rho_mit, clipped = rho_from_probabilities(probs)
        from .circuit import fidelity as state_fidelity
        ideal = np.diag([1.0 - n, n]).astype(complex)
        payload["mitigated"] = {
            "rho_amplitudes": [[float(abs(z)) for z in row] for row in rho_mit],
            "fidelity": state_fidelity(rho_mit, ideal),
            "positivity_clipped": clipped,
        }
    out = config.output_dir() / "circuit_verify.json"
    _write_json(out, config, payload)
    return out


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ddchain",
        description="Driven-dissipative chain simulator: traces, profiles, "
                    "currents, channel and circuit verification.")
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--output-dir", help="output directory "
                        f"(overridden by ${OUTPUT_DIR_ENV})")
    parser.add_argument("--jobs", type=int, default=1,
                        help="worker processes for sweep subcommands")
    for name in ("gamma", "omega", "big-gamma", "beta"):
        parser.add_argument(f"--{name}", type=float, default=None,
                            help=f"override model.{name.replace('-', '_')}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("nk-trace", help="occupation trace of one momentum mode")
    p.add_argument("--k", type=float, default=None)
    p.add_argument("--t-final", type=float, default=120.0)
    p.add_argument("--n0", type=float, default=0.0)
    p.add_argument("--stride", type=int, default=10)
    p.add_argument("--with-oracle", action="store_true")
    p.add_argument("--gamma-coupling", dest="big_gamma_alias", type=float,
                   default=None, help="alias for --big-gamma")
    p.set_defaults(func=cmd_nk_trace)

    p = sub.add_parser("nkm-profile", help="steady-state momentum profile")
    p.set_defaults(func=cmd_nkm_profile)

    p = sub.add_parser("current-sweep", help="DC current vs drive frequency")
    p.set_defaults(func=cmd_current_sweep)

    p = sub.add_parser("norm-heatmap",
                       help="master-vs-exact accuracy norm over (omega, Gamma)")
    p.set_defaults(func=cmd_norm_heatmap)

    p = sub.add_parser("kraus-dump", help="long-time Kraus channel as JSON")
    p.add_argument("--k", type=float, default=1.1)
    p.add_argument("--t", type=float, default=None)
    p.set_defaults(func=cmd_kraus_dump)

    p = sub.add_parser("circuit-verify",
                       help="3-qubit dilation circuit + tomography report")
    p.add_argument("--n-target", type=float, default=0.3)
    p.add_argument("--init", default="zero",
                   help="zero | plus | rx-pi-4 | custom 'a,b'")
    p.add_argument("--shots", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--calibration", help="JSON file with a 2x2 confusion matrix")
    p.set_defaults(func=cmd_circuit_verify)
    return parser


def _apply_overrides(config: RunConfig, args) -> None:
    for field_name in ("gamma", "omega", "big_gamma", "beta"):
        val = getattr(args, field_name, None)
        if val is not None:
            config.data["model"][field_name] = val
    alias = getattr(args, "big_gamma_alias", None)
    if alias is not None:
        config.data["model"]["big_gamma"] = alias
    if args.output_dir is not None:
        config.data["output"]["directory"] = args.output_dir


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = RunConfig.load(args.config)
        _apply_overrides(config, args)
        out = args.func(config, args)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (IntegrationError, NotCompletelyPositiveError) as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return 3
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
