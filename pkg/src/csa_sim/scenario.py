"""
Scenario configuration: one TOML file with dotted keys fully determines a run.

Example::

    scenario.name = "linear6"
    field.k_factor = 0.0
    field.seed = 1
    mount.aperture = 0.5
    trajectory.total_distance = 6.0
    trajectory.step = 0.05
    run.modes = ["regular", "csa", "stationary"]

``mount.aperture`` is required; everything else has a default.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field as dc_field, replace
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from csa_sim.errors import ConfigError
from csa_sim.experiment import ChannelTrace, run_mode
from csa_sim.field import FieldParams, synthesize_field
from csa_sim.kinematics import AntennaMount, linear_trajectory
from csa_sim.model import PiecewiseStaticModel, RiceInitial, Transform, generate_model_trace

REQUIRED = ("mount.aperture",)
FIELD_MODES = ("regular", "csa", "stationary")

# dotted key -> (type checker name, default)
_SCHEMA = {
    "scenario.name": ("str", "default"),
    "scenario.carrier_frequency": ("float", 2.45e9),
    "scenario.link_distance": ("float", 1.2),
    "scenario.large_scale_profile": ("bool", False),
    "field.k_factor": ("k", 0.0),
    "field.num_paths": ("int", 256),
    "field.los_angle": ("float", 0.0),
    "field.los_phase": ("float", 0.0),
    "field.large_scale_gain": ("float", 1.0),
    "field.seed": ("int", 0),
    "mount.aperture": ("float", None),
    "mount.initial_offset": ("float", None),
    "mount.fixed_offset": ("float", 0.0),
    "trajectory.total_distance": ("float", 6.0),
    "trajectory.step": ("float", 0.05),
    "trajectory.speed": ("float", None),
    "run.modes": ("modes", FIELD_MODES),
    "run.residual_sigma": ("float", 0.0),
    "run.noise_seed": ("int", 0),
    "run.ensemble": ("int", 1),
    "model.interval_length": ("float", 0.5),
    "model.initial": ("str", "rice"),
    "model.k_factor": ("k", 0.0),
    "model.omega": ("float", 1.0),
    "model.constant_re": ("float", 1.0),
    "model.constant_im": ("float", 0.0),
    "model.residual_sigma": ("float", 0.0),
    "model.transform": ("str", "identity"),
    "model.transform_gain": ("float", 1.0),
    "model.transform_phase": ("float", 0.0),
    "model.transform_bias_re": ("float", 0.0),
    "model.transform_bias_im": ("float", 0.0),
    "model.seed": ("int", 0),
}


@dataclass(frozen=True)
class Scenario:
    name: str = "default"
    carrier_frequency: float = 2.45e9
    link_distance: float = 1.2
    large_scale_profile: bool = False
    field: FieldParams = dc_field(default_factory=FieldParams)
    mount: AntennaMount = dc_field(default_factory=AntennaMount)
    total_distance: float = 6.0
    step: float = 0.05
    speed: float | None = None
    modes: tuple = FIELD_MODES
    residual_sigma: float = 0.0
    noise_seed: int = 0
    ensemble: int = 1
    model: PiecewiseStaticModel = dc_field(default_factory=PiecewiseStaticModel)

    def with_seeds(self, seed: int | None = None, noise_seed: int | None = None) -> "Scenario":
        out = self
        if seed is not None:
            out = replace(out, field=replace(out.field, seed=seed), model=replace(out.model, seed=seed))
        if noise_seed is not None:
            out = replace(out, noise_seed=noise_seed)
        return out

    def simulate(self, mode: str) -> ChannelTrace:
        if mode not in FIELD_MODES:
            raise ConfigError(f"mode {mode!r} is not a field mode; use the model command")
        traj = linear_trajectory(self.total_distance, self.step)
        return run_mode(
            synthesize_field(self.field),
            traj,
            self.mount,
            mode,
            self.residual_sigma,
            self.noise_seed,
            speed=self.speed,
            link_distance=self.link_distance if self.large_scale_profile else None,
            carrier_frequency=self.carrier_frequency,
            scenario=self.name,
        )

    def generate_model(self) -> ChannelTrace:
        return generate_model_trace(
            self.model, self.total_distance, self.step, speed=self.speed, scenario=self.name
        )


def _check(key, kind, value):
    def fail(expected):
        raise ConfigError(f"field '{key}': expected {expected}, got {value!r}")

    if kind == "str":
        if not isinstance(value, str):
            fail("a string")
        return value
    if kind == "bool":
        if not isinstance(value, bool):
            fail("true or false")
        return value
    if kind == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            fail("an integer")
        return value
    if kind == "float":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            fail("a number")
        return float(value)
    if kind == "k":
        if isinstance(value, str) and value.strip().lower() in ("inf", "infinite"):
            return math.inf
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            fail("a number or \"infinite\"")
        return float(value)
    if kind == "modes":
        if isinstance(value, str):
            value = [value]
        if not isinstance(value, list) or not value or any(m not in FIELD_MODES for m in value):
            fail(f"a non-empty list drawn from {list(FIELD_MODES)}")
        return tuple(value)
    raise AssertionError(kind)


def _flatten(table: dict, prefix: str = "") -> dict:
    flat = {}
    for key, value in table.items():
        dotted = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, dotted + "."))
        else:
            flat[dotted] = value
    return flat


def parse_scenario(text: str, source: str = "<config>") -> Scenario:
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{source}: {exc}") from None
    flat = _flatten(raw)
    unknown = sorted(set(flat) - set(_SCHEMA))
    if unknown:
        raise ConfigError(f"{source}: unknown field '{unknown[0]}'")
    for key in REQUIRED:
        if key not in flat:
            raise ConfigError(f"{source}: missing required field '{key}'")
    v = {key: _check(key, kind, flat[key]) if key in flat else default for key, (kind, default) in _SCHEMA.items()}

    try:
        if v["model.initial"] == "rice":
            initial = RiceInitial(v["model.k_factor"], v["model.omega"])
        elif v["model.initial"] == "constant":
            initial = complex(v["model.constant_re"], v["model.constant_im"])
        else:
            raise ConfigError("field 'model.initial': expected \"rice\" or \"constant\"")
        tparams = {
            "identity": {},
            "scale": {"gain": v["model.transform_gain"], "phase": v["model.transform_phase"]},
            "bias": {"bias": complex(v["model.transform_bias_re"], v["model.transform_bias_im"])},
        }
        if v["model.transform"] not in tparams:
            raise ConfigError(f"field 'model.transform': unknown transform {v['model.transform']!r}")
        if v["run.ensemble"] < 1:
            raise ConfigError("field 'run.ensemble': must be >= 1")
        return Scenario(
            name=v["scenario.name"],
            carrier_frequency=v["scenario.carrier_frequency"],
            link_distance=v["scenario.link_distance"],
            large_scale_profile=v["scenario.large_scale_profile"],
            field=FieldParams(
                k_factor=v["field.k_factor"],
                num_paths=v["field.num_paths"],
                los_angle=v["field.los_angle"],
                los_phase=v["field.los_phase"],
                large_scale_gain=v["field.large_scale_gain"],
                seed=v["field.seed"],
            ),
            mount=AntennaMount(v["mount.aperture"], v["mount.initial_offset"], v["mount.fixed_offset"]),
            total_distance=v["trajectory.total_distance"],
            step=v["trajectory.step"],
            speed=v["trajectory.speed"],
            modes=v["run.modes"],
            residual_sigma=v["run.residual_sigma"],
            noise_seed=v["run.noise_seed"],
            ensemble=v["run.ensemble"],
            model=PiecewiseStaticModel(
                interval_length=v["model.interval_length"],
                initial=initial,
                residual_sigma=v["model.residual_sigma"],
                transform=Transform(v["model.transform"], tparams[v["model.transform"]]),
                seed=v["model.seed"],
            ),
        )
    except ConfigError as exc:
        raise ConfigError(f"{source}: {exc}") from None
    except ValueError as exc:
        # parameter validation inside the domain types
        raise ConfigError(f"{source}: {exc}") from None


def load_scenario(path) -> Scenario:
    """Read and validate a scenario file. I/O failures propagate as ``OSError``."""
    path = Path(path)
    return parse_scenario(path.read_text(encoding="utf-8"), str(path))
