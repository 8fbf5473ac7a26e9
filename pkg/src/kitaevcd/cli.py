"""Command-line front end: spectrum sweeps, quench evolutions, CD
cross-checks, and cluster-state extraction, with TOML config + flag
overrides.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
Every output file embeds the fully resolved configuration (header comment
in CSV, field in JSON) and identical config + seed reproduces bit-identical
files.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

try:
    import tomllib  # py >= 3.11
except ModuleNotFoundError:  # pragma: no cover - environment dependent
    import tomli as tomllib

from . import __version__
from .cd import CdConvention, compare_cd, realspace_cd, spectral_cd
from .dynamics import Schedule, propagate
from .errors import LatticeDomainError, NormDriftError, StabilizerDimensionError, StepSizeError
from .lattice import bond_stabilizer, build_lattice, plaquette_stabilizer
from .pauli import realize
from .spectra import cluster_state, eig_sweep, ground_state, measure_stabilizer_signs

_FLOAT_FMT = "%.17g"


@dataclass
class RunConfig:
    np_: int = 4
    j: float = 1.0
    lambda0: float = 0.5
    lambdaf: float = 0.05
    t_list: list = field(default_factory=lambda: [0.1, 1.0, 10.0])
    dt: float | None = None
    cd_mode: str = "all"
    n_max: int | None = None
    lambda_grid: list = field(default_factory=lambda: [round(0.05 * k, 10) for k in range(11)])
    out: str = "out"
    seed: int = 0

    def validate(self) -> None:
        if self.np_ % 2 != 0 or self.np_ < 4:
            raise ConfigError(f"np must be even and >= 4, got {self.np_}")
        if self.j <= 0:
            raise ConfigError(f"j must be positive, got {self.j}")
        if self.cd_mode not in ("none", "oracle", "analytic", "all"):
            raise ConfigError(f"cd_mode must be none|oracle|analytic|all, got {self.cd_mode!r}")
        for lam in (self.lambda0, self.lambdaf):
            if not 0.0 <= lam <= 0.5 * self.j:
                raise ConfigError(f"lambda value {lam} outside [0, 0.5*j]")
        for lam in self.lambda_grid:
            if not 0.0 <= lam <= 0.5 * self.j:
                raise ConfigError(f"lambda grid point {lam} outside [0, 0.5*j]")
        if self.dt is not None and self.dt <= 0:
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if self.n_max is not None and not 1 <= self.n_max <= self.np_:
            raise ConfigError(f"n_max must lie in 1..{self.np_}, got {self.n_max}")
        if any(t <= 0 for t in self.t_list):
            raise ConfigError("every T in t_list must be positive")

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["np"] = d.pop("np_")
        return d


class ConfigError(ValueError):
    pass


_FIELD_NAMES = {"np": "np_"}


def _config_from_sources(toml_path: str | None, overrides: dict) -> RunConfig:
    cfg = RunConfig()
    if toml_path:
        try:
            with open(toml_path, "rb") as fh:
                data = tomllib.load(fh)
        except (OSError, tomllib.TOMLDecodeError) as exc:
            raise ConfigError(f"cannot read config {toml_path}: {exc}") from exc
        for key, val in data.items():
            attr = _FIELD_NAMES.get(key, key)
            if not hasattr(cfg, attr):
                raise ConfigError(f"unknown config key {key!r}")
            setattr(cfg, attr, val)
    for key, val in overrides.items():
        if val is not None:
            setattr(cfg, key, val)
    cfg.t_list = [float(t) for t in cfg.t_list]
    cfg.lambda_grid = [float(x) for x in cfg.lambda_grid]
    cfg.validate()
    return cfg


def _config_header(cfg: RunConfig) -> str:
    return "# config: " + json.dumps(cfg.to_dict(), sort_keys=True)


def _write_csv(path: Path, cfg: RunConfig, header_cols: list[str], rows) -> None:
    with open(path, "w") as fh:
        fh.write(_config_header(cfg) + "\n")
        fh.write(",".join(header_cols) + "\n")
        for row in rows:
            fh.write(",".join(_FLOAT_FMT % x for x in row) + "\n")


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


# -- subcommands ---------------------------------------------------------------


def run_spectrum(cfg: RunConfig) -> int:
    if not cfg.lambda_grid:
        raise ConfigError("lambda_grid is empty")
    lat = build_lattice(cfg.np_)
    table = eig_sweep(lat, cfg.j, cfg.lambda_grid)
    outdir = Path(cfg.out)
    outdir.mkdir(parents=True, exist_ok=True)

    dim_full = table.full.shape[1]
    cols = (
        ["lambda"]
        + [f"E_full_{k + 1}" for k in range(dim_full)]
        + [f"E_vf_{k + 1}" for k in range(table.sector_dim)]
        + ["gap_vf"]
    )
    rows = [
        np.concatenate(([table.lambdas[i]], table.full[i], table.sector[i], [table.gap_vf[i]]))
        for i in range(len(table.lambdas))
    ]
    _write_csv(outdir / "spectrum.csv", cfg, cols, rows)

    order = np.argsort(table.lambdas)
    gaps = table.gap_vf[order]
    lam0_gap = float(table.gap_vf[int(np.argmin(np.abs(table.lambdas - cfg.lambda0)))])
    _write_json(
        outdir / "spectrum_summary.json",
        {
            "config": cfg.to_dict(),
            "vortex_free_dim": int(table.sector_dim),
            "full_dim": int(dim_full),
            "gap_at_lambda0": lam0_gap,
            "gap_trend_nonincreasing_toward_zero": bool(np.all(np.diff(gaps) >= -1e-12)),
        },
    )
    return 0


def run_evolve(cfg: RunConfig) -> int:
    if not cfg.t_list:
        raise ConfigError("t_list is empty")
    lat = build_lattice(cfg.np_)
    _, psi0, _, _ = ground_state(lat, cfg.j, cfg.lambda0)
    signs = measure_stabilizer_signs(lat, psi0)
    target = cluster_state(lat, signs)
    modes = {
        "none": ["none"],
        "oracle": ["oracle-cd"],
        "analytic": ["analytic-cd"],
        "all": ["none", "oracle-cd", "analytic-cd"],
    }[cfg.cd_mode]
    outdir = Path(cfg.out)
    outdir.mkdir(parents=True, exist_ok=True)

    summary = {"config": cfg.to_dict(), "target_signs": signs, "runs": []}
    for T in cfg.t_list:
        for mode in modes:
            name = f"evolve_{mode}_{_FLOAT_FMT % T}"
            sched = Schedule(cfg.lambda0, cfg.lambdaf, T)
            try:
                rec = propagate(
                    lat, cfg.j, sched, mode, psi0, target, dt=cfg.dt, n_max=cfg.n_max
                )
            except NormDriftError as exc:
                if exc.record is not None:
                    _write_record_csv(outdir / f"{name}.csv", cfg, lat, exc.record)
                _write_json(
                    outdir / f"{name}.FAILED.json",
                    {"config": cfg.to_dict(), "error": str(exc), "mode": mode, "T": T},
                )
                print(f"error: norm drift aborted {name}: {exc}", file=sys.stderr)
                _write_json(outdir / "evolve_summary.json", summary)
                return 3
            _write_record_csv(outdir / f"{name}.csv", cfg, lat, rec)
            summary["runs"].append(
                {
                    "mode": mode,
                    "T": T,
                    "dt": rec.dt,
                    "n_steps": rec.n_steps,
                    "final_fidelity": rec.final_fidelity,
                    "max_norm_deviation": float(np.max(np.abs(rec.norm - 1.0))),
                    "max_stabilizer_drift": rec.max_w_drift(),
                }
            )
    _write_json(outdir / "evolve_summary.json", summary)
    return 0


def _write_record_csv(path: Path, cfg: RunConfig, lat, rec) -> None:
    cols = ["t", "lambda", "fidelity", "norm", "energy"] + [
        f"W_{j}" for j in range(1, lat.n_plaquettes + 1)
    ]
    rows = [
        np.concatenate(
            ([rec.t[i], rec.lam[i], rec.fidelity[i], rec.norm[i], rec.energy[i]], rec.w_expect[i])
        )
        for i in range(len(rec.t))
    ]
    _write_csv(path, cfg, cols, rows)


def run_cdcheck(cfg: RunConfig) -> int:
    lat = build_lattice(cfg.np_)
    rate = 1.0
    rows = []
    for lam in cfg.lambda_grid:
        if lam == 0.0:
            continue  # oracle undefined in the degenerate manifold
        _, psi0, _, _ = ground_state(lat, cfg.j, lam)
        oracle = spectral_cd(lat, cfg.j, lam, rate)
        analytic = realspace_cd(lat, cfg.j, lam, rate, cfg.n_max)
        rep = compare_cd(analytic, oracle, psi0)
        rows.append(
            {
                "lambda": lam,
                "rate": rate,
                "best_fit_scale": rep.best_fit_scale,
                "ground_action_error": rep.ground_action_error,
                "hermitian_residual": rep.hermitian_residual,
                "max_pauli_weight": analytic.max_weight(),
            }
        )
    outdir = Path(cfg.out)
    outdir.mkdir(parents=True, exist_ok=True)
    _write_json(
        outdir / "cd_report.json",
        {
            "config": cfg.to_dict(),
            "convention": dataclasses.asdict(CdConvention()),
            "samples": rows,
        },
    )
    return 0


def run_cluster(cfg: RunConfig, signs: list[int] | None = None) -> int:
    lat = build_lattice(cfg.np_)
    if signs is None:
        signs = [+1] * cfg.np_
    state = cluster_state(lat, signs)
    verification = {}
    for j in range(1, cfg.np_ + 1):
        w = realize(plaquette_stabilizer(lat, j))
        k = realize(bond_stabilizer(lat, j))
        verification[f"W_{j}"] = float(np.real(np.vdot(state, w @ state)))
        verification[f"K_{j}"] = float(np.real(np.vdot(state, k @ state)))
    outdir = Path(cfg.out)
    outdir.mkdir(parents=True, exist_ok=True)
    _write_json(
        outdir / "cluster_state.json",
        {
            "config": cfg.to_dict(),
            "signs": list(signs),
            "phase_convention": "first nonzero amplitude real positive",
            "amplitudes": [[float(a.real), float(a.imag)] for a in state],
            "verification": verification,
        },
    )
    return 0


def run_print_config(cfg: RunConfig) -> int:
    for key, val in cfg.to_dict().items():
        if isinstance(val, str):
            print(f'{key} = "{val}"')
        elif isinstance(val, bool):
            print(f"{key} = {str(val).lower()}")
        elif val is None:
            print(f"# {key} unset (auto)")
        else:
            print(f"{key} = {val}")
    return 0


# -- argument parsing ----------------------------------------------------------


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--np", dest="np_", type=int, help="columns per row (even, >= 4)")
    p.add_argument("--j", type=float, help="Ising bond strength J")
    p.add_argument("--lambda0", type=float, help="initial drive strength")
    p.add_argument("--lambdaf", type=float, help="final drive strength")
    p.add_argument("--t", dest="t_list", type=float, nargs="+", help="total evolution times")
    p.add_argument("--dt", type=float, help="integrator step (default min(T/2000, 0.001/J))")
    p.add_argument(
        "--cd-mode", dest="cd_mode", choices=["none", "oracle", "analytic", "all"]
    )
    p.add_argument("--nmax", dest="n_max", type=int, help="maximum pair separation")
    p.add_argument(
        "--lambda-grid", dest="lambda_grid", type=float, nargs="+", help="sweep grid"
    )
    p.add_argument("--out", help="output directory")
    p.add_argument("--seed", type=int, help="seed recorded in outputs")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kitaevcd",
        description="Cluster-state generation in a two-row Kitaev ring via "
        "counterdiabatic driving",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="TOML config file (flags override)")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("spectrum", "exact-diagonalization sweep over the lambda grid"),
        ("evolve", "quench evolutions with/without counterdiabatic driving"),
        ("cd-check", "compare the string CD against the spectral oracle"),
        ("cluster", "construct and verify the stabilizer cluster state"),
        ("print-config", "print the fully resolved configuration"),
    ]:
        p = sub.add_parser(name, help=help_text)
        _add_common_flags(p)
        if name == "cluster":
            p.add_argument(
                "--signs", type=int, nargs="+", help="target plaquette signs (+1/-1)"
            )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {
        k: v
        for k, v in vars(args).items()
        if k not in ("command", "config", "version", "signs")
    }
    try:
        cfg = _config_from_sources(args.config, overrides)
        signs = getattr(args, "signs", None)
        if signs is not None and (
            len(signs) != cfg.np_ or any(s not in (1, -1) for s in signs)
        ):
            raise ConfigError("--signs needs one +1/-1 entry per plaquette")
    except (ConfigError, LatticeDomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    try:
        if args.command == "spectrum":
            return run_spectrum(cfg)
        if args.command == "evolve":
            return run_evolve(cfg)
        if args.command == "cd-check":
            return run_cdcheck(cfg)
        if args.command == "cluster":
            return run_cluster(cfg, signs)
        if args.command == "print-config":
            return run_print_config(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (NormDriftError, StabilizerDimensionError, StepSizeError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
