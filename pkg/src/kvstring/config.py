"""Experiment configuration: one YAML document drives every subcommand.

Physics never comes from positional CLI arguments; the file pins the whole
experiment so a run is reproducible from a single artifact.  Unknown keys
anywhere in the document are rejected.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import yaml

from .errors import ConfigError
from .modal import (DEFAULT_COMPAT_TOL, DEFAULT_TAIL_GUARD, SimulationConfig)
from .fd import FdConfig
from .scenarios import (band_limited_initial, lift_plus_modes_initial,
                        named_initial)
from .signals import (BoundarySignal, DecayingExpBoundary, DistributedSignal,
                      PolyPulseBoundary, SampledBoundary, SampledDistributed,
                      SeparableDistributed, SineBoundary, SpatialProfile,
                      ZeroBoundary, ZeroDistributed, sine_mode_profile)
from .spectrum import DEFAULT_ASSUMPTION_TOL, StringParams, validate_params
from .state import uniform_grid


@dataclass(frozen=True)
class ExperimentConfig:
    """Parsed experiment document."""

    params: StringParams
    t_end: float
    dt: float
    truncation: int
    grid_n: int
    nx_fd: int
    dt_fd: float
    compat_tol: float
    tail_guard: float | None
    initial_spec: dict
    boundary_spec: dict
    distributed_spec: dict
    out_dir: str
    plots: bool
    csv_coefficients: bool
    verify_scenarios: int
    verify_seed: int

    def simulation_config(self) -> SimulationConfig:
        grid = uniform_grid(self.grid_n)
        initial = build_initial(self.initial_spec, self.params,
                                self.truncation, grid)
        return SimulationConfig(
            params=self.params, initial=initial,
            d=build_boundary(self.boundary_spec),
            u=build_distributed(self.distributed_spec),
            t_end=self.t_end, dt=self.dt, truncation=self.truncation,
            compat_tol=self.compat_tol, tail_guard=self.tail_guard)

    def fd_config(self, store_states: bool = False) -> FdConfig:
        return FdConfig(nx=self.nx_fd, dt=self.dt_fd, store_states=store_states)


def _section(doc: dict, name: str, allowed: set[str], required: set[str] = frozenset()):
    sec = doc.get(name, {})
    if sec is None:
        sec = {}
    if not isinstance(sec, dict):
        raise ConfigError(f"section {name!r} must be a mapping")
    unknown = set(sec) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in section {name!r}: {sorted(unknown)}")
    missing = required - set(sec)
    if missing:
        raise ConfigError(f"missing keys in section {name!r}: {sorted(missing)}")
    return sec


def _num(sec: dict, key: str, default=None, cast=float):
    if key not in sec:
        if default is None:
            raise ConfigError(f"missing numeric key {key!r}")
        return default
    try:
        return cast(sec[key])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"key {key!r} is not a valid {cast.__name__}: {sec[key]!r}") from exc


def load_config(path) -> ExperimentConfig:
    try:
        with open(path) as fh:
            doc = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed YAML in {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a mapping of sections")
    unknown = set(doc) - {"params", "simulation", "initial", "disturbance",
                          "outputs", "verify"}
    if unknown:
        raise ConfigError(f"unknown top-level sections: {sorted(unknown)}")

    p = _section(doc, "params", {"alpha", "beta", "assumption_tol"},
                 {"alpha", "beta"})
    params = validate_params(_num(p, "alpha"), _num(p, "beta"),
                             _num(p, "assumption_tol", DEFAULT_ASSUMPTION_TOL))

    s = _section(doc, "simulation",
                 {"t_end", "dt", "truncation", "grid_n", "nx_fd", "dt_fd",
                  "compat_tol", "tail_guard"})
    tail_guard = s.get("tail_guard", DEFAULT_TAIL_GUARD)
    if tail_guard is not None:
        tail_guard = _num(s, "tail_guard", DEFAULT_TAIL_GUARD)

    init = _section(doc, "initial",
                    {"kind", "name", "amplitude", "coefficients", "boundary_value"})
    dist = _section(doc, "disturbance", {"boundary", "distributed"})
    boundary_spec = dist.get("boundary", {"kind": "zero"}) or {"kind": "zero"}
    distributed_spec = dist.get("distributed", {"kind": "zero"}) or {"kind": "zero"}

    out = _section(doc, "outputs", {"directory", "plots", "coefficients"})
    ver = _section(doc, "verify", {"scenarios", "seed"})

    return ExperimentConfig(
        params=params,
        t_end=_num(s, "t_end", 10.0),
        dt=_num(s, "dt", 0.01),
        truncation=_num(s, "truncation", 64, int),
        grid_n=_num(s, "grid_n", 256, int),
        nx_fd=_num(s, "nx_fd", 512, int),
        dt_fd=_num(s, "dt_fd", 1e-4),
        compat_tol=_num(s, "compat_tol", DEFAULT_COMPAT_TOL),
        tail_guard=tail_guard,
        initial_spec=dict(init) or {"kind": "zero"},
        boundary_spec=dict(boundary_spec),
        distributed_spec=dict(distributed_spec),
        out_dir=str(out.get("directory", "out")),
        plots=bool(out.get("plots", True)),
        csv_coefficients=bool(out.get("coefficients", False)),
        verify_scenarios=_num(ver, "scenarios", 0, int),
        verify_seed=_num(ver, "seed", 20240901, int),
    )


def build_boundary(spec: dict) -> BoundarySignal:
    kind = spec.get("kind", "zero")
    extra = set(spec) - {"kind", "amplitude", "frequency", "phase", "rate",
                         "t0", "t1", "times", "values", "dvalues", "ddvalues"}
    if extra:
        raise ConfigError(f"unknown boundary-signal keys: {sorted(extra)}")
    try:
        if kind == "zero":
            return ZeroBoundary()
        if kind == "sine":
            return SineBoundary(amplitude=_num(spec, "amplitude"),
                                frequency=_num(spec, "frequency"),
                                phase=_num(spec, "phase", 0.0))
        if kind == "decaying_exp":
            return DecayingExpBoundary(amplitude=_num(spec, "amplitude"),
                                       rate=_num(spec, "rate"))
        if kind == "poly_pulse":
            return PolyPulseBoundary(t0=_num(spec, "t0"), t1=_num(spec, "t1"),
                                     amplitude=_num(spec, "amplitude"))
        if kind == "sampled":
            return SampledBoundary(
                times=np.asarray(spec["times"], dtype=float),
                values=np.asarray(spec["values"], dtype=float),
                dvalues=np.asarray(spec["dvalues"], dtype=float) if "dvalues" in spec else None,
                ddvalues=np.asarray(spec["ddvalues"], dtype=float) if "ddvalues" in spec else None)
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad boundary signal: {exc}") from exc
    raise ConfigError(f"unknown boundary-signal kind {kind!r}")


def _build_profile(spec: dict) -> SpatialProfile:
    kind = spec.get("kind", "sine_mode")
    if kind == "sine_mode":
        return sine_mode_profile(int(spec.get("k", 0)), int(spec.get("n", 256)))
    if kind == "samples":
        values = np.asarray(spec["values"], dtype=float)
        return SpatialProfile(grid=np.linspace(0.0, 1.0, values.size), values=values)
    raise ConfigError(f"unknown profile kind {kind!r}")


def build_distributed(spec: dict) -> DistributedSignal:
    kind = spec.get("kind", "zero")
    extra = set(spec) - {"kind", "profile", "time", "times", "grid_n", "table"}
    if extra:
        raise ConfigError(f"unknown distributed-signal keys: {sorted(extra)}")
    try:
        if kind == "zero":
            return ZeroDistributed()
        if kind == "separable":
            return SeparableDistributed(profile=_build_profile(spec.get("profile", {})),
                                        time_factor=build_boundary(spec.get("time", {})))
        if kind == "sampled":
            times = np.asarray(spec["times"], dtype=float)
            table = np.asarray(spec["table"], dtype=float)
            grid = np.linspace(0.0, 1.0, table.shape[1])
            return SampledDistributed(times=times, grid=grid, table=table)
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad distributed signal: {exc}") from exc
    raise ConfigError(f"unknown distributed-signal kind {kind!r}")


def build_initial(spec: dict, params: StringParams, truncation: int,
                  grid: np.ndarray):
    kind = spec.get("kind", "zero")
    try:
        if kind == "zero":
            return named_initial("zero", grid)
        if kind == "named":
            return named_initial(str(spec.get("name", "half_sine")), grid,
                                 _num(spec, "amplitude", 1.0))
        if kind == "modes":
            return band_limited_initial(params, _coefficient_entries(spec),
                                        truncation, grid)
        if kind == "lift_plus_modes":
            return lift_plus_modes_initial(params, _num(spec, "boundary_value"),
                                           _coefficient_entries(spec),
                                           truncation, grid)
    except ValueError as exc:
        raise ConfigError(f"bad initial state: {exc}") from exc
    raise ConfigError(f"unknown initial kind {kind!r}")


def _coefficient_entries(spec: dict):
    entries = []
    for row in spec.get("coefficients", []):
        if len(row) != 4:
            raise ConfigError(f"coefficient rows are [k, eps, re, im], got {row!r}")
        k, eps, re, im = row
        entries.append((int(k), int(eps), complex(float(re), float(im))))
    return entries
