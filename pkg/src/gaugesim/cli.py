"""Command-line experiment runner with deterministic file outputs.

Configs are flat ``key = value`` text files; ``include <preset>`` pulls
in one of the named presets shipped with the package (later keys
override earlier ones).  Every run writes CSV/JSON files whose bytes
depend only on the config, so reruns diff clean.  CSV files carry a
schema tag in their first comment line.

Exit codes: 0 success, 2 malformed or unsupported config, 3 numeric
failure.  ``GAUGESIM_THREADS`` bounds the worker pool used by the
d-scaling sweep.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from importlib import resources as importlib_resources
from pathlib import Path

import numpy as np

from .circuits import ChainModel, SquareModel
from .errors import (
    InvalidParameterError,
    NumericFailureError,
    UnsupportedFeatureError,
)
from .observables import family_energy, hadronic_correlator, hadronic_ft
from .oracle import exact_evolve, square_hamiltonian
from .register import Register
from .resources import count_gates, pulse_estimate, step_budget
from .stateprep import (
    VariationalPlan,
    adiabatic_search,
    baryon_ground_state,
    baryon_reference_state,
    flux_string_state,
    linear_ramp,
    variational_prepare,
)

__all__ = ["ExperimentConfig", "load_config", "run_experiment", "main"]

EXPERIMENTS = (
    "ahm-quench",
    "d-scaling",
    "baryon-prep",
    "hadronic-tensor",
    "resources",
)
BACKENDS = ("trotter", "exact", "both")
PRESETS = ("quench", "d-scaling", "resources-ahm", "baryon-prep", "hadronic")

_CSV_VERSION = "gaugesim-csv v1"


def _int_tuple(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in str(text).split(","))
    except ValueError as exc:
        raise InvalidParameterError(f"expected comma-separated integers: {text!r}") from exc


@dataclass
class ExperimentConfig:
    """Typed view of one flat config file."""

    experiment: str = ""
    backend: str = "both"
    out: str = "out"
    seed: int = 7
    order: int = 2
    d: int = 3
    width: int = 2
    height: int = 2
    d_values: tuple[int, ...] = (3, 4, 5, 6)
    lam_e: float = 1.0
    lam_b: float = 0.0
    lam_m: float = 0.0
    lam_j: float = 0.0
    string_links: tuple[int, ...] = (1, 5)
    n_sites: int = 4
    x: float = 0.8
    mu: float = 1.0
    dt: float = 0.1
    steps: int = 40
    sample_every: int = 5
    momentum: int = 0
    blocks: int = 5
    max_evals: int = 400
    ramp_steps: int = 20
    ramp_dt: float = 0.2
    threshold: float = 0.99
    max_doublings: int = 6
    floor: float = 0.9
    fid_general: float = 1.0
    fid_diagonal: float = 1.0
    fid_two_qudit: float = 1.0
    fid_controlled: float = 1.0
    fid_tunneling: float = 1.0

    @classmethod
    def from_mapping(cls, mapping: dict[str, str]) -> "ExperimentConfig":
        parsers = {f.name: f.type for f in fields(cls)}
        kwargs = {}
        for key, raw in mapping.items():
            if key not in parsers:
                raise InvalidParameterError(f"unknown config key {key!r}")
            if key in ("d_values", "string_links"):
                kwargs[key] = _int_tuple(raw)
            elif parsers[key] == "int":
                try:
                    kwargs[key] = int(raw)
                except ValueError as exc:
                    raise InvalidParameterError(f"{key} must be an integer: {raw!r}") from exc
            elif parsers[key] == "float":
                try:
                    kwargs[key] = float(raw)
                except ValueError as exc:
                    raise InvalidParameterError(f"{key} must be a number: {raw!r}") from exc
            else:
                kwargs[key] = str(raw)
        cfg = cls(**kwargs)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise InvalidParameterError(
                f"experiment must be one of {EXPERIMENTS}, got {self.experiment!r}"
            )
        if self.backend not in BACKENDS:
            raise InvalidParameterError(
                f"backend must be one of {BACKENDS}, got {self.backend!r}"
            )
        if self.order not in (1, 2):
            raise InvalidParameterError(f"order must be 1 or 2, got {self.order}")
        if self.d < 2:
            raise InvalidParameterError(f"d must be >= 2, got {self.d}")
        if any(d < 2 for d in self.d_values) or not self.d_values:
            raise InvalidParameterError(f"d_values must all be >= 2, got {self.d_values}")
        if self.dt <= 0:
            raise InvalidParameterError(f"dt must be positive, got {self.dt}")
        if self.steps < 1:
            raise InvalidParameterError(f"steps must be >= 1, got {self.steps}")
        if self.sample_every < 1:
            raise InvalidParameterError(
                f"sample_every must be >= 1, got {self.sample_every}"
            )
        if self.n_sites < 2 or self.n_sites % 2:
            raise InvalidParameterError(
                f"n_sites must be even and >= 2, got {self.n_sites}"
            )
        if self.blocks < 1:
            raise InvalidParameterError(f"blocks must be >= 1, got {self.blocks}")
        if self.ramp_steps < 1 or self.ramp_dt <= 0:
            raise InvalidParameterError("ramp needs ramp_steps >= 1 and ramp_dt > 0")

    def class_fidelities(self) -> dict[str, float]:
        return {
            "general_1q": self.fid_general,
            "diagonal_1q": self.fid_diagonal,
            "two_qudit": self.fid_two_qudit,
            "fermionic_controlled": self.fid_controlled,
            "fermionic_tunneling": self.fid_tunneling,
        }


def preset_text(name: str) -> str:
    if name not in PRESETS:
        raise InvalidParameterError(f"unknown preset {name!r}; presets: {PRESETS}")
    path = importlib_resources.files("gaugesim").joinpath("presets", f"{name}.cfg")
    return path.read_text(encoding="utf-8")


def _parse_lines(text: str, merged: dict[str, str], seen: frozenset) -> None:
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        head, _, tail = line.partition("=")
        if not tail and line.split(None, 1)[0] == "include":
            parts = line.split(None, 1)
            if len(parts) != 2:
                raise InvalidParameterError(f"line {number}: include needs a preset name")
            name = parts[1].strip()
            if name in seen:
                raise InvalidParameterError(f"line {number}: include cycle at {name!r}")
            _parse_lines(preset_text(name), merged, seen | {name})
            continue
        if not tail:
            raise InvalidParameterError(f"line {number}: expected 'key = value'")
        merged[head.strip()] = tail.strip()


def parse_config_text(text: str) -> ExperimentConfig:
    merged: dict[str, str] = {}
    _parse_lines(text, merged, frozenset())
    return ExperimentConfig.from_mapping(merged)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    if not path.is_file():
        raise InvalidParameterError(f"config file not found: {path}")
    return parse_config_text(path.read_text(encoding="utf-8"))


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.12e}"
    return str(value)


def _write_csv(path: Path, schema: str, columns, rows) -> Path:
    lines = [f"# {_CSV_VERSION} {schema}", ",".join(columns)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _write_json(path: Path, payload: dict) -> Path:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


_FAMILIES = ("electric", "magnetic", "mass", "coupling")


def _energy_row(t: float, energies: dict) -> tuple:
    return (t, *(energies[f] for f in _FAMILIES), energies["total"])


def _trotter_energy_rows(model: SquareModel, vec0: np.ndarray, cfg: ExperimentConfig):
    ham = square_hamiltonian(model)
    reg = Register(model.dims, model.fermionic, vec0.copy())
    step = model.trotter_step(cfg.dt, cfg.order)
    rows = [_energy_row(0.0, family_energy(ham, reg.vector))]
    for j in range(1, cfg.steps + 1):
        step.apply(reg)
        rows.append(_energy_row(j * cfg.dt, family_energy(ham, reg.vector)))
    return rows


def _exact_energy_rows(model: SquareModel, vec0: np.ndarray, cfg: ExperimentConfig):
    ham = square_hamiltonian(model)
    vec = vec0.copy()
    rows = [_energy_row(0.0, family_energy(ham, vec))]
    for j in range(1, cfg.steps + 1):
        vec = exact_evolve(ham, vec, cfg.dt)
        rows.append(_energy_row(j * cfg.dt, family_energy(ham, vec)))
    return rows


_ENERGY_COLUMNS = ("t", *_FAMILIES, "total")


def run_quench(cfg: ExperimentConfig, out: Path) -> list[Path]:
    model = SquareModel(
        cfg.d, cfg.lam_e, cfg.lam_b, cfg.lam_m, cfg.lam_j, cfg.width, cfg.height
    )
    vec0 = flux_string_state(model, cfg.string_links)
    written = []
    if cfg.backend in ("trotter", "both"):
        rows = _trotter_energy_rows(model, vec0, cfg)
        written.append(
            _write_csv(out / "quench_trotter.csv", "energy-trace", _ENERGY_COLUMNS, rows)
        )
    if cfg.backend in ("exact", "both"):
        rows = _exact_energy_rows(model, vec0, cfg)
        written.append(
            _write_csv(out / "quench_exact.csv", "energy-trace", _ENERGY_COLUMNS, rows)
        )
    return written


def run_d_scaling(cfg: ExperimentConfig, out: Path) -> list[Path]:
    if cfg.backend != "exact":
        raise InvalidParameterError("d-scaling runs on the exact backend only")

    def trace(d: int):
        model = SquareModel(
            d, cfg.lam_e, cfg.lam_b, cfg.lam_m, cfg.lam_j, cfg.width, cfg.height
        )
        return _exact_energy_rows(model, flux_string_state(model, cfg.string_links), cfg)

    workers = max(1, int(os.environ.get("GAUGESIM_THREADS", "1")))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        traces = list(pool.map(trace, cfg.d_values))
    return [
        _write_csv(out / f"dscaling_d{d}.csv", "energy-trace", _ENERGY_COLUMNS, rows)
        for d, rows in zip(cfg.d_values, traces)
    ]


def run_resources(cfg: ExperimentConfig, out: Path) -> list[Path]:
    fids = cfg.class_fidelities()
    square = SquareModel(
        cfg.d, cfg.lam_e, cfg.lam_b, cfg.lam_m, cfg.lam_j, cfg.width, cfg.height
    )
    chain = ChainModel(cfg.n_sites, cfg.lam_e, cfg.x, cfg.mu)
    square_report = count_gates(square.trotter_step(cfg.dt, cfg.order), fids)
    chain_first = count_gates(chain.trotter_step(cfg.dt, 1), fids)
    chain_second = count_gates(chain.trotter_step(cfg.dt, 2), fids)
    payload = {
        "square_step": square_report.as_dict(),
        "chain_step_order1": chain_first.as_dict(),
        "chain_step_order2": chain_second.as_dict(),
        "pulse_pairs_by_dim": {str(d): pulse_estimate(d) for d in range(2, 9)},
        "chain_step_budget": {
            "floor": cfg.floor,
            "by_totals": step_budget(chain_first, fids, cfg.floor, by="totals"),
            "by_depth": step_budget(chain_first, fids, cfg.floor, by="depth"),
        },
    }
    text = "\n".join(
        [
            "square-lattice step",
            square_report.summary(),
            "",
            "chain step (first order)",
            chain_first.summary(),
        ]
    )
    report_txt = out / "resources.txt"
    report_txt.write_text(text + "\n", encoding="utf-8")
    return [_write_json(out / "resources.json", payload), report_txt]


def run_baryon_prep(cfg: ExperimentConfig, out: Path) -> list[Path]:
    model = ChainModel(cfg.n_sites, cfg.lam_e, cfg.x, cfg.mu)
    energy, target = baryon_ground_state(model)
    initial = baryon_reference_state(model, cfg.momentum)
    start_model = ChainModel(cfg.n_sites, cfg.lam_e, 0.0, cfg.mu)
    ramp = linear_ramp({"x": cfg.x}, cfg.ramp_steps, cfg.ramp_dt)
    schedule, _, trace = adiabatic_search(
        start_model, initial, ramp, target, cfg.threshold, cfg.max_doublings
    )
    plan = VariationalPlan(cfg.blocks, max_evals=cfg.max_evals, seed=cfg.seed)
    var = variational_prepare(model, initial, plan, target)
    payload = {
        "n_sites": cfg.n_sites,
        "couplings": {"lam_e": cfg.lam_e, "x": cfg.x, "mu": cfg.mu},
        "sector_energy": energy,
        "adiabatic": {
            "steps": schedule.steps,
            "dt": schedule.dt,
            "fidelity": float(trace[-1]),
        },
        "variational": {
            "blocks": cfg.blocks,
            "fidelity": var.fidelity,
            "improved": var.improved,
            "evaluations": var.evaluations,
            "stage_fidelities": list(var.stage_fidelities),
            "angles": var.angles.tolist(),
        },
    }
    ramp_rows = [
        (i + 1, (i + 1) * schedule.dt, trace[i]) for i in range(schedule.steps)
    ]
    return [
        _write_json(out / "baryon.json", payload),
        _write_csv(out / "ramp_trace.csv", "ramp-trace", ("step", "t", "fidelity"), ramp_rows),
    ]


def _correlator_rows(table) -> list[tuple]:
    rows = []
    for i, cell in enumerate(table.cells):
        for j, t in enumerate(table.times):
            rows.append((table.mu, table.nu, int(cell), float(t), table.values[i, j]))
    return rows


_CORR_COLUMNS = ("mu", "nu", "x", "t", "value")
_FT_COLUMNS = ("mu", "nu", "k", "omega", "re", "im")


def run_hadronic(cfg: ExperimentConfig, out: Path) -> list[Path]:
    model = ChainModel(cfg.n_sites, cfg.lam_e, cfg.x, cfg.mu)
    _, target = baryon_ground_state(model)
    n_samples = cfg.steps // cfg.sample_every
    if n_samples < 1:
        raise InvalidParameterError("steps must cover at least one sample interval")
    times = cfg.dt * cfg.sample_every * np.arange(n_samples + 1)
    written = []
    exact_table = None
    if cfg.backend in ("exact", "both"):
        exact_table = hadronic_correlator(
            model, target, times, mu=0, nu=0, backend="exact", momentum=cfg.momentum
        )
        written.append(
            _write_csv(
                out / "w00_exact.csv", "correlator", _CORR_COLUMNS,
                _correlator_rows(exact_table),
            )
        )
    if cfg.backend in ("trotter", "both"):
        trotter_table = hadronic_correlator(
            model, target, times, mu=0, nu=0,
            backend="trotter", dt=cfg.dt, order=cfg.order, momentum=cfg.momentum,
        )
        written.append(
            _write_csv(
                out / "w00_trotter.csv", "correlator", _CORR_COLUMNS,
                _correlator_rows(trotter_table),
            )
        )
    if exact_table is not None:
        spacing = float(times[1] - times[0])
        omegas = 2.0 * np.pi * np.arange(n_samples + 1) / ((n_samples + 1) * spacing)
        ft = hadronic_ft(exact_table, np.arange(cfg.n_sites // 2), omegas)
        rows = []
        for i, k in enumerate(ft.k_values):
            for j, w in enumerate(ft.omega_values):
                rows.append(
                    (0, 0, int(k), float(w), ft.transform[i, j].real, ft.transform[i, j].imag)
                )
        written.append(_write_csv(out / "w00_ft.csv", "correlator-ft", _FT_COLUMNS, rows))
    return written


_RUNNERS = {
    "ahm-quench": run_quench,
    "d-scaling": run_d_scaling,
    "resources": run_resources,
    "baryon-prep": run_baryon_prep,
    "hadronic-tensor": run_hadronic,
}


def run_experiment(cfg: ExperimentConfig) -> list[Path]:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return _RUNNERS[cfg.experiment](cfg, out)


def _cmd_run(cfg: ExperimentConfig) -> int:
    for path in run_experiment(cfg):
        print(f"wrote {path}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="gaugesim",
        description="Run lattice gauge theory circuit experiments to data files.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run an experiment from a config file")
    p_run.add_argument("config", help="path to a key = value config file")
    p_pre = sub.add_parser("preset", help="materialize a named preset and run it")
    p_pre.add_argument("name", help=f"one of {', '.join(PRESETS)}")
    p_pre.add_argument("--out", required=True, help="output directory")
    p_val = sub.add_parser("validate", help="parse and check a config file")
    p_val.add_argument("config", help="path to a key = value config file")
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(load_config(args.config))
        if args.command == "preset":
            text = preset_text(args.name)
            outdir = Path(args.out)
            outdir.mkdir(parents=True, exist_ok=True)
            materialized = text + f"out = {outdir}\n"
            (outdir / f"{args.name}.cfg").write_text(materialized, encoding="utf-8")
            print(f"wrote {outdir / (args.name + '.cfg')}")
            return _cmd_run(parse_config_text(materialized))
        cfg = load_config(args.config)
        print(f"ok: {cfg.experiment} ({cfg.backend})")
        return 0
    except (InvalidParameterError, UnsupportedFeatureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericFailureError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
