"""
Channel traces for the three antenna policies evaluated over a fading field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from csa_sim.errors import InvalidInputError, InvalidParameterError
from csa_sim.field import FieldModel, eval_channel, inverse_distance_gain
from csa_sim.kinematics import (
    AntennaMount,
    DeviceTrajectory,
    counter_movement,
    interval_starts,
    regular_positions,
    stationary_positions,
)

MODES = ("regular", "csa", "stationary", "model")

_POLICIES = {
    "regular": regular_positions,
    "csa": counter_movement,
    "stationary": stationary_positions,
}


@dataclass(eq=False)
class ChannelTrace:
    """Sampled complex channel along a device trajectory.

    `metadata` carries run provenance: ``scenario``, ``seed``,
    ``noise_seed``, ``step``, ``speed`` and, for field runs, the positioning
    parameters needed to re-derive anchors.
    """

    n: np.ndarray
    h: np.ndarray
    mode: str
    interval_id: np.ndarray
    repositioned: np.ndarray | None = None
    metadata: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        if self.mode not in MODES:
            raise InvalidParameterError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        self.n = np.asarray(self.n, dtype=float).reshape(-1)
        self.h = np.asarray(self.h, dtype=complex).reshape(-1)
        self.interval_id = np.asarray(self.interval_id, dtype=np.int64).reshape(-1)
        if self.repositioned is None:
            self.repositioned = np.zeros(self.n.size, dtype=bool)
        self.repositioned = np.asarray(self.repositioned, dtype=bool).reshape(-1)
        for name in ("h", "interval_id", "repositioned"):
            if getattr(self, name).size != self.n.size:
                raise InvalidInputError(f"{name} length does not match n ({self.n.size})")

    def __len__(self):
        return self.n.size

    def __eq__(self, other):
        if not isinstance(other, ChannelTrace):
            return NotImplemented
        return (
            self.mode == other.mode
            and self.metadata == other.metadata
            and np.array_equal(self.n, other.n)
            and np.array_equal(self.h, other.h)
            and np.array_equal(self.interval_id, other.interval_id)
            and np.array_equal(self.repositioned, other.repositioned)
        )

    @property
    def speed(self) -> float | None:
        return self.metadata.get("speed")

    @property
    def t(self) -> np.ndarray | None:
        """Elapsed time ``n / v`` when a constant device speed is configured."""
        v = self.speed
        return None if v is None else self.n / v

    @property
    def num_intervals(self) -> int:
        return int(np.unique(self.interval_id).size)

    def boundaries(self) -> list[int]:
        return interval_starts(self.interval_id)

    def intervals(self):
        """Yield ``(interval_id, index_slice)`` for each contiguous interval."""
        starts = self.boundaries() + [self.n.size]
        for a, b in zip(starts[:-1], starts[1:]):
            yield int(self.interval_id[a]), slice(a, b)


def complex_gaussian(rng: np.random.Generator, size: int, sigma: float) -> np.ndarray:
    """Circular complex Gaussian samples with ``E|z|^2 = sigma**2``."""
    scale = sigma / math.sqrt(2.0)
    return scale * rng.standard_normal(size) + 1j * scale * rng.standard_normal(size)


def run_mode(
    field: FieldModel,
    traj: DeviceTrajectory,
    mount: AntennaMount,
    mode: str,
    residual_sigma: float = 0.0,
    noise_seed: int = 0,
    *,
    speed: float | None = None,
    link_distance: float | None = None,
    carrier_frequency: float = 2.45e9,
    scenario: str = "default",
) -> ChannelTrace:
    """Sample `field` at the antenna positions produced by policy `mode`.

    Additive residual noise with total power ``residual_sigma**2`` is drawn
    per sample from `noise_seed`. When `link_distance` (metres) is given the
    field is scaled by an inverse-distance trend in the absolute position.
    """
    if mode not in _POLICIES:
        raise InvalidParameterError(f"unknown mode {mode!r}; expected one of {tuple(_POLICIES)}")
    if not residual_sigma >= 0:
        raise InvalidParameterError(f"residual_sigma must be >= 0, got {residual_sigma}")
    if speed is not None and not speed > 0:
        raise InvalidParameterError(f"speed must be > 0, got {speed}")
    log = _POLICIES[mode](traj, mount)
    h = eval_channel(field, log.absolute_pos)
    if link_distance is not None:
        h = h * inverse_distance_gain(log.absolute_pos, link_distance, carrier_frequency)
    if residual_sigma > 0:
        h = h + complex_gaussian(np.random.default_rng(noise_seed), h.size, residual_sigma)
    metadata = {
        "scenario": scenario,
        "seed": field.params.seed,
        "noise_seed": int(noise_seed),
        "step": float(traj.step),
        "speed": None if speed is None else float(speed),
        "residual_sigma": float(residual_sigma),
        "aperture": float(mount.aperture),
        "initial_offset": float(mount.initial_offset),
        "fixed_offset": float(mount.fixed_offset),
        "link_distance": None if link_distance is None else float(link_distance),
        "carrier_frequency": float(carrier_frequency),
    }
    return ChannelTrace(log.device_pos, h, mode, log.interval_id, log.repositioned, metadata)


@dataclass(frozen=True)
class CoincidenceRow:
    interval_id: int
    anchor: float
    csa_value: complex
    regular_value: complex
    difference: float


def anchor_coincidence_check(
    field: FieldModel, csa_trace: ChannelTrace, mount: AntennaMount
) -> list[CoincidenceRow]:
    """Compare each held CSA value with a fixed antenna placed at the anchor.

    The regular antenna sees the anchor when the device has moved to
    ``anchor - fixed_offset``; its trace is evaluated there directly.
    """
    if csa_trace.mode != "csa":
        raise InvalidInputError(f"expected a csa trace, got mode {csa_trace.mode!r}")
    if csa_trace.metadata.get("residual_sigma", 0.0) not in (0, 0.0):
        raise InvalidInputError("anchor coincidence requires a noiseless csa trace")
    log = counter_movement(DeviceTrajectory.from_samples(csa_trace.n), mount)
    if not np.array_equal(log.interval_id, csa_trace.interval_id):
        raise InvalidInputError("trace interval structure does not match the given mount")
    link = csa_trace.metadata.get("link_distance")
    carrier = csa_trace.metadata.get("carrier_frequency", 2.45e9)
    rows = []
    for interval, sl in csa_trace.intervals():
        anchor = float(log.absolute_pos[sl.start])
        device_at = anchor - mount.fixed_offset
        x = np.array([device_at + mount.fixed_offset])
        reg = eval_channel(field, x)
        if link is not None:
            reg = reg * inverse_distance_gain(x, link, carrier)
        reg_value = complex(reg[0])
        csa_value = complex(csa_trace.h[sl.start])
        rows.append(CoincidenceRow(interval, anchor, csa_value, reg_value, abs(csa_value - reg_value)))
    return rows
