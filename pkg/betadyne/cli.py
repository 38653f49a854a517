#!/usr/bin/env python3
"""
betadyne command line

    python -m betadyne spectrum --scenario driven-qubit --set sweep.parameter=omega \
        --set sweep.min=0.1 --set sweep.max=1.0 --set sweep.points=91
    python -m betadyne overlap-map --scenario gain-loss-qubit --out runs/overlap
    python -m betadyne ep-find --scenario driven-qubit --set search.x0.im=0.3
    python -m betadyne ep-find --scenario kerr --set sweep.parameter=drive \
        --set 'sweep.direction={"re": 0, "im": 1}' --set sweep.min=0.1 --set sweep.max=0.2
    python -m betadyne trajectories --scenario decay-qubit --set unraveling.betas=[0.5]
    python -m betadyne validate
    python -m betadyne scenario-dump --scenario kerr

Exit codes: 0 success (unconverged EP searches included), 1 configuration or
model errors, 2 numerical failures and failed validation properties.
"""

import argparse
import json
import logging
import sys
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, ValidationError, field_validator

from . import __version__
from .config import BetadyneConfig
from .dynamics import TimeGrid, ensemble_average, evolve_master_exact, propagate_nhh
from .exceptions import (
    BetadyneError,
    ConfigError,
    DimensionError,
    GridError,
    HermiticityError,
    StepSizeError,
    UnitarityError,
)
from .model import LindbladModel, UnravelingSpec, apply_unraveling, liouvillian_spectrum, nhh
from .output import OutputWriter
from .quantum_core import basis_ket, bloch_vector, ket_projector, normalize, populations, trace_distance
from .scenarios import SCENARIOS, get_scenario
from .serialization import ComplexMatrix, ModelFile, UnravelingFile, complex_from_json
from .spectral import coalescence, find_ep, scan_coalescence, trace_ep_locus, track_branches
from .validation import PropertyResult, run_validation_suite, validate_model

logger = logging.getLogger("betadyne")

COMMANDS = ("spectrum", "overlap-map", "ep-find", "trajectories", "validate", "scenario-dump")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERIC = 2

# StepSizeError is raised before sampling when the grid is too coarse
CONFIG_ERRORS = (ConfigError, ValidationError, DimensionError, HermiticityError, UnitarityError,
                 GridError, StepSizeError, FileNotFoundError, json.JSONDecodeError)


# === Run configuration ===

class SweepConfig(BaseModel):
    """Values offset + direction * t for t in linspace(min, max, points)"""

    parameter: str = "beta"
    min: float = 0.0
    max: float = 1.0
    points: int = Field(default=101, ge=2)
    offset: Any = 0.0
    direction: Any = 1.0

    @field_validator("offset", "direction", mode="before")
    @classmethod
    def _coerce(cls, value):
        return complex_from_json(value)

    def values(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.points)


class BetaGridConfig(BaseModel):
    re: Tuple[float, float] = (-1.5, 1.5)
    im: Tuple[float, float] = (-1.5, 1.5)
    points_re: int = Field(default=151, ge=1)
    points_im: int = Field(default=151, ge=1)


class SearchConfig(BaseModel):
    parameter: str = "beta"
    x0: Any = None
    box: Optional[List[Any]] = None
    points: int = Field(default=BetadyneConfig.MULTISTART_POINTS, ge=1)
    tol: float = Field(default=BetadyneConfig.EP_SEARCH_TOL, gt=0.0)


class TimeConfig(BaseModel):
    t0: float = 0.0
    t1: float = 5.0
    steps: int = 1000
    record_every: int = 10

    def to_grid(self) -> TimeGrid:
        return TimeGrid(self.t0, self.t1, self.steps, self.record_every)


class RunConfig(BaseModel):
    scenario: Optional[str] = None
    params: Dict[str, Any] = {}
    model: Optional[ModelFile] = None
    unraveling: Optional[UnravelingFile] = None
    sweep: Optional[SweepConfig] = None
    grid: Optional[BetaGridConfig] = None
    search: Optional[SearchConfig] = None
    time: TimeConfig = TimeConfig()
    trajectories: int = Field(default=1000, ge=1)
    initial_state: Any = 0
    validate_cases: int = Field(default=100, ge=1)
    seed: int = BetadyneConfig.DEFAULT_SEED
    threads: Optional[int] = None
    out: Optional[str] = None
    format: str = "csv"

    @field_validator("format")
    @classmethod
    def _check_format(cls, value):
        if value not in ("csv", "json"):
            raise ValueError("format must be 'csv' or 'json'")
        return value

    @property
    def workers(self) -> int:
        return self.threads or BetadyneConfig.threads()


# === Config assembly ===

def parse_override(text: str) -> Tuple[List[str], Any]:
    """'a.b=value' -> (['a', 'b'], value); JSON literals are decoded, anything else stays a string"""
    if "=" not in text:
        raise ConfigError(f"--set expects key=value, got '{text}'")
    key, raw = text.split("=", 1)
    path = [part for part in key.strip().split(".") if part]
    if not path:
        raise ConfigError(f"--set has an empty key in '{text}'")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return path, value


def apply_override(config: Dict[str, Any], path: List[str], value: Any) -> None:
    node = config
    for part in path[:-1]:
        child = node.get(part)
        if not isinstance(child, dict):
            child = {}
            node[part] = child
        node = child
    node[path[-1]] = value


def assemble_config(args: argparse.Namespace) -> Dict[str, Any]:
    """Config file, then --set overrides, then the dedicated flags"""
    config: Dict[str, Any] = {}
    if args.config:
        with open(args.config, "r") as f:
            loaded = json.load(f)
        if not isinstance(loaded, dict):
            raise ConfigError("Config file must hold a JSON object")
        # a bare model file
        config = {"model": loaded} if "hamiltonian" in loaded else loaded
    for text in args.set or []:
        path, value = parse_override(text)
        apply_override(config, path, value)
    for key in ("scenario", "out", "seed", "threads", "format"):
        value = getattr(args, key, None)
        if value is not None:
            config[key] = value
    return config


# === Model resolution ===

def _scenario_params(config: RunConfig, overrides: Optional[Dict[str, Any]] = None):
    scenario = get_scenario(config.scenario)
    values = dict(config.params)
    values.update(overrides or {})
    return scenario, scenario.params(**values)


def resolve_model(config: RunConfig) -> LindbladModel:
    if config.scenario and config.model:
        raise ConfigError("Give either a scenario or a model, not both")
    if config.model is not None:
        return config.model.to_model()
    if config.scenario:
        scenario, params = _scenario_params(config)
        return scenario.build(params)
    raise ConfigError("No model: pass --scenario or a model file with --config")


def resolve_unraveling(config: RunConfig, channels: int) -> UnravelingSpec:
    unraveling = config.unraveling
    if unraveling is None and config.model is not None:
        unraveling = config.model.unraveling
    return (unraveling or UnravelingFile()).to_spec(channels)


def _with_betas(spec: UnravelingSpec, beta: complex) -> UnravelingSpec:
    return UnravelingSpec(betas=[beta] * len(spec.betas), mixing=spec.mixing)


def resolve_family(config: RunConfig, parameter: str) -> Callable[[Any], np.ndarray]:
    """NHH of the configured unraveling as a function of one parameter

    "beta" sets the same displacement on every channel; any other name is a
    scenario parameter.
    """
    base = resolve_model(config)
    spec = resolve_unraveling(config, len(base.channels))
    if parameter == "beta":
        if not base.channels:
            raise ConfigError("A displacement sweep needs at least one channel")
        return lambda beta: nhh(apply_unraveling(base, _with_betas(spec, complex(beta))))
    scenario = _swept_scenario(config, parameter)

    def family(x):
        _, params = _scenario_params(config, {parameter: x})
        return nhh(apply_unraveling(scenario.build(params), spec))

    return family


def resolve_locus_family(config: RunConfig, parameter: str) -> Callable[[Any, complex], np.ndarray]:
    """NHH as a function of (scenario parameter, uniform displacement)"""
    if parameter == "beta":
        raise ConfigError("An EP locus sweeps a scenario parameter and searches the displacement")
    base = resolve_model(config)
    if not base.channels:
        raise ConfigError("A displacement search needs at least one channel")
    spec = resolve_unraveling(config, len(base.channels))
    scenario = _swept_scenario(config, parameter)

    def family(x, beta):
        _, params = _scenario_params(config, {parameter: x})
        return nhh(apply_unraveling(scenario.build(params), _with_betas(spec, complex(beta))))

    return family


def _swept_scenario(config: RunConfig, parameter: str):
    if not config.scenario:
        raise ConfigError(f"Parameter '{parameter}' needs a scenario; model files only support 'beta'")
    scenario = get_scenario(config.scenario)
    if parameter not in scenario.params.model_fields:
        raise ConfigError(f"Scenario '{scenario.name}' has no parameter '{parameter}'")
    return scenario


def _config_complex(value, what: str) -> complex:
    try:
        return complex_from_json(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{what} must be a number or a {{re, im}} record, got {value!r}") from exc


def resolve_initial_state(config: RunConfig, dim: int) -> np.ndarray:
    state = config.initial_state
    if isinstance(state, bool):
        raise ConfigError("initial_state must be a basis index or a list of amplitudes")
    if isinstance(state, int):
        return basis_ket(dim, state)
    if isinstance(state, list):
        return normalize([_config_complex(entry, "initial_state amplitude") for entry in state])
    raise ConfigError("initial_state must be a basis index or a list of amplitudes")


def _real_if_possible(value: complex):
    return value.real if value.imag == 0.0 else value


# === Commands ===

def cmd_spectrum(config: RunConfig, writer: OutputWriter) -> int:
    """Branch-tracked NHH eigenvalues along a one-parameter sweep"""
    if config.sweep is None:
        raise ConfigError("spectrum needs a 'sweep' section")
    sweep = config.sweep
    family = resolve_family(config, sweep.parameter)
    ts = sweep.values()
    points = [_real_if_possible(sweep.offset + sweep.direction * t) for t in ts]
    reports = scan_coalescence(family, points, workers=config.workers)
    branches = track_branches([report.eigensystem for report in reports])

    rows = []
    for k, t in enumerate(ts):
        for b in range(branches.values.shape[1]):
            rows.append({
                "param": float(t),
                "branch_index": b,
                "re_E": branches.values[k, b].real,
                "im_E": branches.values[k, b].imag,
                "min_gap": reports[k].min_gap,
                "max_overlap": reports[k].max_overlap,
            })
    frame = pd.DataFrame(rows, columns=["param", "branch_index", "re_E", "im_E", "min_gap", "max_overlap"])
    _write_table(config, writer, "spectrum", frame, "branch-tracked eigenvalues along the sweep")

    measures = [report.measure for report in reports]
    best = int(np.argmin(measures))
    writer.write_json("spectrum_summary.json", {
        "parameter": sweep.parameter,
        "closest_to_ep": {"param": float(ts[best]), "value": complex(points[best]), "measure": measures[best],
                          "min_gap": reports[best].min_gap},
        "points": sweep.points,
    }, "sweep point with the smallest coalescence measure")
    print(f"✅ Spectrum: {sweep.points} points, smallest coalescence measure {measures[best]:.3e} at {sweep.parameter}={ts[best]:.6g}")
    return EXIT_OK


def cmd_overlap_map(config: RunConfig, writer: OutputWriter) -> int:
    """Eigenvector overlap and eigenvalue gap over a complex displacement grid"""
    grid = config.grid or BetaGridConfig()
    family = resolve_family(config, "beta")
    re_axis = np.linspace(grid.re[0], grid.re[1], grid.points_re)
    im_axis = np.linspace(grid.im[0], grid.im[1], grid.points_im)
    betas = [complex(re, im) for re in re_axis for im in im_axis]
    reports = scan_coalescence(family, betas, workers=config.workers)
    frame = pd.DataFrame({
        "re_beta": [beta.real for beta in betas],
        "im_beta": [beta.imag for beta in betas],
        "max_overlap": [report.max_overlap for report in reports],
        "min_gap": [report.min_gap for report in reports],
    })
    _write_table(config, writer, "overlap_map", frame, "eigenvector overlap over the displacement grid")
    best = int(np.argmax(frame["max_overlap"].to_numpy()))
    writer.write_json("overlap_summary.json", {
        "max_overlap": reports[best].max_overlap,
        "beta": betas[best],
        "min_gap": reports[best].min_gap,
    }, "grid point of largest eigenvector overlap")
    print(f"✅ Overlap map: {len(betas)} points, largest overlap {reports[best].max_overlap:.6f} at beta={betas[best]:.4f}")
    return EXIT_OK


def _search_x0(search: SearchConfig):
    if search.parameter == "beta":
        return _config_complex(search.x0 if search.x0 is not None else 0.1j, "search.x0")
    if search.x0 is None:
        raise ConfigError(f"Searching over '{search.parameter}' needs search.x0")
    x0 = _config_complex(search.x0, "search.x0")
    return x0 if x0.imag != 0.0 else float(x0.real)


def _search_box(search: SearchConfig, is_complex: bool):
    if search.box is None:
        return None
    shape = "[[re_min, re_max], [im_min, im_max]]" if is_complex else "[min, max]"
    if len(search.box) != 2:
        raise ConfigError(f"search.box must be {shape}")
    try:
        if not is_complex:
            return (float(search.box[0]), float(search.box[1]))
        box = tuple(tuple(float(v) for v in axis) for axis in search.box)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"search.box must be {shape}, got {search.box!r}") from exc
    if any(len(axis) != 2 for axis in box):
        raise ConfigError(f"search.box must be {shape}, got {search.box!r}")
    return box


def cmd_ep_find(config: RunConfig, writer: OutputWriter) -> int:
    """Multistart search for the parameter value minimizing the coalescence measure"""
    search = config.search or SearchConfig()
    if config.sweep is not None:
        return _ep_locus(config, writer, search)
    family = resolve_family(config, search.parameter)
    x0 = _search_x0(search)
    box = _search_box(search, isinstance(x0, complex))
    result = find_ep(family, x0, tol=search.tol, box=box, points=search.points, workers=config.workers)
    system = result.report.eigensystem
    writer.write_json("ep_result.json", {
        "parameter": search.parameter,
        "location": result.location,
        "measure": result.report.measure,
        "min_gap": result.report.min_gap,
        "max_overlap": result.report.max_overlap,
        "pair": list(result.report.pair),
        "converged": result.converged,
        "iterations": result.iterations,
        "evaluations": result.evaluations,
        "eigenvalues": [complex(value) for value in system.eigenvalues],
        "eigenvectors": ComplexMatrix.from_array(system.vectors).model_dump(),
    }, "exceptional-point search result")
    if result.converged:
        print(f"✅ EP at {search.parameter}={result.location:.8g} (measure {result.report.measure:.2e})")
    else:
        logger.warning("⚠️ EP search did not reach tol=%.1e; best measure %.3e", search.tol, result.report.measure)
    return EXIT_OK


def _ep_locus(config: RunConfig, writer: OutputWriter, search: SearchConfig) -> int:
    """EP displacement along a scenario-parameter sweep, each search warm-started from the last"""
    if search.parameter != "beta":
        raise ConfigError("With a sweep section ep-find searches the displacement; set search.parameter=beta")
    sweep = config.sweep
    family2 = resolve_locus_family(config, sweep.parameter)
    ts = sweep.values()
    points = [_real_if_possible(sweep.offset + sweep.direction * t) for t in ts]
    locus = trace_ep_locus(family2, points, _search_x0(search), tol=search.tol)

    frame = pd.DataFrame({
        "param": ts,
        "re_beta": [point.beta.real for point in locus],
        "im_beta": [point.beta.imag for point in locus],
        "measure": [point.result.report.measure for point in locus],
        "converged": [point.result.converged for point in locus],
    })
    _write_table(config, writer, "ep_locus", frame, "EP displacement along the sweep")
    converged = int(frame["converged"].sum())
    writer.write_json("ep_locus_summary.json", {
        "parameter": sweep.parameter,
        "points": sweep.points,
        "converged": converged,
        "max_measure": float(frame["measure"].max()),
    }, "EP locus convergence summary")
    print(f"✅ EP locus: {converged}/{sweep.points} points converged along {sweep.parameter}")
    return EXIT_OK


def cmd_trajectories(config: RunConfig, writer: OutputWriter) -> int:
    """Trajectory ensemble against the master equation and the no-jump propagation"""
    model = resolve_model(config)
    spec = resolve_unraveling(config, len(model.channels))
    unraveled = apply_unraveling(model, spec)
    grid = config.time.to_grid()
    bound = grid.step_bound(unraveled)
    if bound > BetadyneConfig.JUMP_PROBABILITY_WARN:
        raise StepSizeError(
            f"dt * max jump rate = {bound:.3f} exceeds {BetadyneConfig.JUMP_PROBABILITY_WARN}; increase time.steps"
        )
    psi0 = resolve_initial_state(config, model.dim)
    n = config.trajectories

    print(f"🔄 Sampling {n} trajectories on {config.workers} worker(s)...")
    stats = ensemble_average(unraveled, psi0, grid, n, config.seed, workers=config.workers)
    master = evolve_master_exact(model, ket_projector(psi0), grid)
    kets, survival = propagate_nhh(nhh(unraveled), psi0, grid)

    columns: Dict[str, Any] = {"t": stats.times}
    distances = np.array([trace_distance(stats.mean_state[i], master[i]) for i in range(grid.n_records)])
    columns["trace_distance"] = distances
    for level in range(model.dim):
        columns[f"population_{level}"] = [populations(rho)[level] for rho in stats.mean_state]
        columns[f"master_population_{level}"] = [populations(rho)[level] for rho in master]
    if model.dim == 2:
        for name, index in (("x", 0), ("y", 1), ("z", 2)):
            columns[f"bloch_{name}"] = [bloch_vector(rho)[index] for rho in stats.mean_state]
            columns[f"master_bloch_{name}"] = [bloch_vector(rho)[index] for rho in master]
    columns["nojump_fraction"] = stats.nojump_fraction
    columns["survival"] = survival

    conditional_distance = np.full(grid.n_records, np.nan)
    for i in range(grid.n_records):
        if stats.nojump_count[i] > 0:
            expected = ket_projector(kets[i] / np.linalg.norm(kets[i]))
            conditional_distance[i] = trace_distance(stats.conditional_state[i], expected)
    columns["conditional_distance"] = conditional_distance
    _write_table(config, writer, "trajectories", pd.DataFrame(columns), "ensemble observables versus exact solutions")

    bound_statistical = 3.0 / np.sqrt(n)
    sampled = stats.nojump_fraction >= 0.05
    survival_error = np.abs(stats.nojump_fraction - survival)[sampled] / survival[sampled]
    summary = {
        "trajectories": n,
        "seed": config.seed,
        "betas": list(spec.betas),
        "max_trace_distance": float(distances.max()),
        "statistical_bound": bound_statistical,
        "within_bound": bool(distances.max() <= bound_statistical),
        "max_relative_survival_error": float(survival_error.max()) if survival_error.size else 0.0,
        "max_conditional_distance": float(np.nanmax(conditional_distance)) if np.any(stats.nojump_count > 0) else None,
        "final_nojump_fraction": float(stats.nojump_fraction[-1]),
        "final_survival": float(survival[-1]),
        "step_bound": bound,
    }
    writer.write_json("trajectories_summary.json", summary, "ensemble agreement summary")
    print(f"✅ Max trace distance to master equation {distances.max():.4f} (bound {bound_statistical:.4f})")
    return EXIT_OK


def cmd_validate(config: RunConfig, writer: OutputWriter) -> int:
    """Invariance suite, plus the configured model when one is given"""
    report = run_validation_suite(config.seed, config.validate_cases)
    properties = list(report.properties)
    if config.scenario or config.model is not None:
        try:
            model = resolve_model(config)
            spec = resolve_unraveling(config, len(model.channels))
            properties.extend(validate_model(model, spec, config.seed))
        except (BetadyneError, ValidationError) as exc:
            properties.append(PropertyResult(
                name="model_construction", passed=False, residual=float("inf"), tolerance=0.0, detail=str(exc)
            ))
    passed = all(prop.passed for prop in properties)
    writer.write_json("validation.json", {
        "seed": config.seed,
        "cases": config.validate_cases,
        "passed": passed,
        "properties": [prop.model_dump() for prop in properties],
    }, "invariance property results")
    failures = [prop.name for prop in properties if not prop.passed]
    if failures:
        print(f"❌ Validation failed: {', '.join(failures)}", file=sys.stderr)
        return EXIT_NUMERIC
    print(f"✅ All {len(properties)} properties passed")
    return EXIT_OK


def cmd_scenario_dump(config: RunConfig, writer: OutputWriter) -> int:
    """Model file, effective Hamiltonian and Liouvillian spectrum of the configured model"""
    model = resolve_model(config)
    spec = resolve_unraveling(config, len(model.channels))
    writer.write_json("model.json", ModelFile.from_model(model, spec).model_dump(), "model file with unraveling")
    writer.write_json("nhh.json", ComplexMatrix.from_array(nhh(apply_unraveling(model, spec))).model_dump(),
                      "effective Hamiltonian of the unraveling")
    spectrum = liouvillian_spectrum(model)
    _write_table(config, writer, "liouvillian_spectrum",
                 pd.DataFrame({"re": spectrum.real, "im": spectrum.imag}), "sorted Liouvillian eigenvalues")
    if config.scenario:
        _, params = _scenario_params(config)
        info = {"scenario": config.scenario, "params": params.model_dump()}
        for extra in ("gamma_eff", "photon_frequencies"):
            if hasattr(params, extra):
                info[extra] = getattr(params, extra)
        writer.write_json("scenario.json", info, "scenario parameters")
    report = coalescence(nhh(apply_unraveling(model, spec))) if model.dim > 1 else None
    print(f"✅ Dumped {config.scenario or 'model'} (dim {model.dim}, {len(model.channels)} channels"
          + (f", NHH coalescence {report.measure:.3e})" if report else ")"))
    return EXIT_OK


def _write_table(config: RunConfig, writer: OutputWriter, stem: str, frame: pd.DataFrame, description: str) -> None:
    if config.format == "json":
        writer.write_json(f"{stem}.json", frame.to_dict(orient="records"), description)
    else:
        writer.write_csv(f"{stem}.csv", frame, description)


HANDLERS: Dict[str, Callable[[RunConfig, OutputWriter], int]] = {
    "spectrum": cmd_spectrum,
    "overlap-map": cmd_overlap_map,
    "ep-find": cmd_ep_find,
    "trajectories": cmd_trajectories,
    "validate": cmd_validate,
    "scenario-dump": cmd_scenario_dump,
}


# === Entry point ===

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config or model file")
    common.add_argument("--scenario", choices=sorted(SCENARIOS), help="built-in model")
    common.add_argument("--set", action="append", metavar="KEY=VALUE", help="dotted config override (repeatable)")
    common.add_argument("--out", help="output directory (default runs/<command>)")
    common.add_argument("--seed", type=int, help="master seed")
    common.add_argument("--threads", type=int, help="worker count (default: BETADYNE_THREADS or CPU count)")
    common.add_argument("--format", choices=("csv", "json"), help="table format")
    common.add_argument("--log-level", default=BetadyneConfig.LOG_LEVEL, help="logging level")

    parser = argparse.ArgumentParser(prog="betadyne", description="Tunable unravelings of Lindblad dynamics")
    parser.add_argument("--version", action="version", version=f"betadyne {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        subparsers.add_parser(command, parents=[common], help=HANDLERS[command].__doc__)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )

    try:
        raw = assemble_config(args)
        config = RunConfig(**raw)
        out_dir = config.out or f"runs/{args.command}"
        with OutputWriter(out_dir, ["betadyne"] + argv, raw) as writer:
            return HANDLERS[args.command](config, writer)
    except CONFIG_ERRORS as exc:
        print(f"❌ Configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (BetadyneError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"❌ Numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
