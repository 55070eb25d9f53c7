"""
Device trajectories and antenna counter-movement under a finite aperture.

All positions are 1-D, measured along the motion axis in carrier
wavelengths. The antenna sits at a relative offset ``r`` on the device,
``0 <= r <= aperture``; its absolute position is ``n + r`` where ``n`` is the
device displacement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from csa_sim.errors import InvalidParameterError

# Slack for float comparisons of accumulated positions (in wavelengths).
POSITION_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class DeviceTrajectory:
    samples: np.ndarray
    step: float

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float).reshape(-1)
        if samples.size == 0:
            raise InvalidParameterError("trajectory needs at least one sample")
        if not np.all(np.isfinite(samples)):
            raise InvalidParameterError("trajectory samples must be finite")
        if samples[0] != 0.0:
            raise InvalidParameterError("trajectory must start at displacement 0")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    def __len__(self):
        return self.samples.size

    def __eq__(self, other):
        if not isinstance(other, DeviceTrajectory):
            return NotImplemented
        return self.step == other.step and np.array_equal(self.samples, other.samples)

    @classmethod
    def from_samples(cls, samples) -> "DeviceTrajectory":
        """Wrap an arbitrary (possibly non-monotone) displacement sequence."""
        samples = np.asarray(samples, dtype=float).reshape(-1)
        step = float(np.median(np.abs(np.diff(samples)))) if samples.size > 1 else 0.0
        return cls(samples, step)


@dataclass(frozen=True)
class AntennaMount:
    aperture: float = 0.5
    initial_offset: float | None = None
    fixed_offset: float = 0.0

    def __post_init__(self):
        if not (self.aperture > 0 and math.isfinite(self.aperture)):
            raise InvalidParameterError(f"aperture must be positive, got {self.aperture}")
        if self.initial_offset is None:
            object.__setattr__(self, "initial_offset", float(self.aperture))
        for name in ("initial_offset", "fixed_offset"):
            value = getattr(self, name)
            if not 0.0 <= value <= self.aperture:
                raise InvalidParameterError(
                    f"{name}={value} outside [0, aperture={self.aperture}]"
                )


@dataclass(frozen=True, eq=False)
class ControllerLog:
    """Per-sample antenna state produced by one of the positioning policies."""

    device_pos: np.ndarray
    relative_offset: np.ndarray
    absolute_pos: np.ndarray
    interval_id: np.ndarray
    repositioned: np.ndarray = field(default=None)

    def __post_init__(self):
        n = np.asarray(self.device_pos).size
        if self.repositioned is None:
            object.__setattr__(self, "repositioned", np.zeros(n, dtype=bool))
        for name, dtype in (
            ("device_pos", float),
            ("relative_offset", float),
            ("absolute_pos", float),
            ("interval_id", np.int64),
            ("repositioned", bool),
        ):
            arr = np.asarray(getattr(self, name), dtype=dtype).reshape(-1)
            if arr.size != n:
                raise InvalidParameterError(f"{name} has {arr.size} samples, expected {n}")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self):
        return self.device_pos.size

    def __eq__(self, other):
        if not isinstance(other, ControllerLog):
            return NotImplemented
        return all(
            np.array_equal(getattr(self, k), getattr(other, k))
            for k in ("device_pos", "relative_offset", "absolute_pos", "interval_id", "repositioned")
        )

    @property
    def num_intervals(self) -> int:
        return int(np.unique(self.interval_id).size)

    def boundaries(self) -> list[int]:
        """Sample indices at which each static interval starts (always includes 0)."""
        return interval_starts(self.interval_id)

    def anchors(self) -> np.ndarray:
        """Absolute position held during each interval, in interval order."""
        return self.absolute_pos[self.boundaries()]


def interval_starts(interval_id) -> list[int]:
    ids = np.asarray(interval_id)
    if ids.size == 0:
        return []
    return [0] + (np.flatnonzero(np.diff(ids) != 0) + 1).tolist()


def linear_trajectory(total_distance: float, step: float) -> DeviceTrajectory:
    """Uniformly sampled forward motion from 0 to `total_distance` inclusive.

    If `total_distance` is not a multiple of `step`, the last sample is
    placed at `total_distance` itself.
    """
    if not (step > 0 and math.isfinite(step)):
        raise InvalidParameterError(f"step must be positive, got {step}")
    if not (total_distance >= 0 and math.isfinite(total_distance)):
        raise InvalidParameterError(f"total_distance must be >= 0, got {total_distance}")
    ratio = total_distance / step
    count = int(math.floor(ratio + 1e-9))
    samples = np.arange(count + 1, dtype=float) * step
    if count >= 1 and abs(ratio - count) <= 1e-9:
        samples[-1] = total_distance
    elif total_distance > samples[-1]:
        samples = np.append(samples, total_distance)
    return DeviceTrajectory(samples, float(step))


def counter_movement(traj: DeviceTrajectory, mount: AntennaMount) -> ControllerLog:
    """Hold the antenna at a fixed absolute anchor, repositioning at the aperture ends.

    The antenna reaches an aperture end at the instant the device crosses it,
    so the new anchor is the old one shifted by a full aperture: forward
    motion snaps ``r`` to ``aperture``, backward motion snaps it to 0. An
    exact hit of the aperture end is still served from the old anchor. If
    one sampling step spans several apertures the anchor advances by a
    whole number of apertures, but the interval counter only increments
    once, since the skipped intervals hold no samples.
    """
    aperture = mount.aperture
    n = traj.samples
    size = n.size
    rel = np.empty(size)
    absolute = np.empty(size)
    ids = np.empty(size, dtype=np.int64)
    jumped = np.zeros(size, dtype=bool)

    # anchor = initial_offset + shift * aperture, kept in integer multiples to avoid drift
    shift = 0
    current = 0
    for i, pos in enumerate(n):
        anchor = mount.initial_offset + shift * aperture
        r = anchor - pos
        if r < -POSITION_TOL:
            shift += math.ceil((pos - anchor - POSITION_TOL) / aperture)
        elif r > aperture + POSITION_TOL:
            shift -= math.ceil((r - aperture - POSITION_TOL) / aperture)
        new_anchor = mount.initial_offset + shift * aperture
        if new_anchor != anchor:
            current += 1
            jumped[i] = True
            anchor = new_anchor
        absolute[i] = anchor
        rel[i] = min(max(anchor - pos, 0.0), aperture)
        ids[i] = current
    return ControllerLog(n.copy(), rel, absolute, ids, jumped)


def regular_positions(traj: DeviceTrajectory, mount: AntennaMount) -> ControllerLog:
    """Antenna fixed to the device at `mount.fixed_offset`."""
    n = traj.samples
    rel = np.full(n.size, float(mount.fixed_offset))
    return ControllerLog(n.copy(), rel, n + mount.fixed_offset, np.zeros(n.size, dtype=np.int64))


def stationary_positions(traj: DeviceTrajectory, mount: AntennaMount) -> ControllerLog:
    """Antenna parked at its initial absolute position; the device index only tracks time."""
    n = traj.samples
    rel = np.full(n.size, float(mount.initial_offset))
    return ControllerLog(
        n.copy(), rel, np.full(n.size, float(mount.initial_offset)), np.zeros(n.size, dtype=np.int64)
    )
