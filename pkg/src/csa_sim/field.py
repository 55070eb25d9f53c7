"""
Frozen 1-D small-scale fading field built from plane-wave multipath.

The diffuse part is a sum of ``M`` equal-amplitude plane waves with
uniformly distributed arrival angles and phases (isotropic 2-D scattering),
so at any fixed position the diffuse gain is approximately circular complex
Gaussian and its spatial autocorrelation tends to ``J0(2*pi*d)``. A
deterministic line-of-sight wave is mixed in with Rice factor ``K``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from csa_sim.errors import InvalidParameterError

TWO_PI = 2.0 * math.pi
SPEED_OF_LIGHT = 299_792_458.0

# Caps the (positions x paths) phase matrix built per evaluation chunk.
_EVAL_CHUNK_ELEMENTS = 1 << 21


@dataclass(frozen=True)
class FieldParams:
    k_factor: float = 0.0
    num_paths: int = 256
    los_angle: float = 0.0
    los_phase: float = 0.0
    large_scale_gain: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if isinstance(self.k_factor, str):
            if self.k_factor.strip().lower() not in ("inf", "infinite"):
                raise InvalidParameterError(f"k_factor must be a number or 'infinite', got {self.k_factor!r}")
            object.__setattr__(self, "k_factor", math.inf)
        if math.isnan(self.k_factor) or self.k_factor < 0:
            raise InvalidParameterError(f"k_factor must be >= 0, got {self.k_factor}")
        if int(self.num_paths) != self.num_paths or self.num_paths < 1:
            raise InvalidParameterError(f"num_paths must be an integer >= 1, got {self.num_paths}")
        if not (self.large_scale_gain > 0 and math.isfinite(self.large_scale_gain)):
            raise InvalidParameterError(f"large_scale_gain must be > 0, got {self.large_scale_gain}")
        if int(self.seed) != self.seed or self.seed < 0:
            raise InvalidParameterError(f"seed must be a non-negative integer, got {self.seed}")
        object.__setattr__(self, "num_paths", int(self.num_paths))
        object.__setattr__(self, "seed", int(self.seed))


@dataclass(frozen=True, eq=False)
class FieldModel:
    params: FieldParams
    amplitudes: np.ndarray
    angles: np.ndarray
    phases: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, FieldModel):
            return NotImplemented
        return (
            self.params == other.params
            and np.array_equal(self.amplitudes, other.amplitudes)
            and np.array_equal(self.angles, other.angles)
            and np.array_equal(self.phases, other.phases)
        )

    @property
    def num_paths(self) -> int:
        return self.angles.size

    def __call__(self, x):
        return eval_channel(self, x)


def synthesize_field(params: FieldParams) -> FieldModel:
    """Draw the path table once from a generator seeded with `params.seed`."""
    m = params.num_paths
    if m < 1:
        raise InvalidParameterError("num_paths must be >= 1")
    rng = np.random.default_rng(params.seed)
    angles = rng.uniform(0.0, TWO_PI, m)
    phases = rng.uniform(0.0, TWO_PI, m)
    # uniform() can round up to the open end
    angles[angles >= TWO_PI] = 0.0
    phases[phases >= TWO_PI] = 0.0
    amplitudes = np.full(m, 1.0 / math.sqrt(m))
    for arr in (amplitudes, angles, phases):
        arr.setflags(write=False)
    return FieldModel(params, amplitudes, angles, phases)


def eval_channel(field: FieldModel, x):
    """Complex channel gain at absolute position(s) `x` (wavelengths).

    Returns a Python ``complex`` for scalar input and a complex array
    otherwise.
    """
    scalar = np.ndim(x) == 0
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    p = field.params
    los = np.exp(1j * (TWO_PI * xs * math.cos(p.los_angle) + p.los_phase))
    if math.isinf(p.k_factor):
        h = p.large_scale_gain * los
    else:
        k = p.k_factor
        diffuse = _diffuse(field, xs)
        h = p.large_scale_gain * (math.sqrt(k / (k + 1.0)) * los + math.sqrt(1.0 / (k + 1.0)) * diffuse)
    return complex(h[0]) if scalar else h


def _diffuse(field: FieldModel, xs: np.ndarray) -> np.ndarray:
    # repeated positions must give bit-identical gains, whatever BLAS does per row
    ux, inverse = np.unique(xs, return_inverse=True)
    kx = TWO_PI * np.cos(field.angles)
    out = np.empty(ux.size, dtype=complex)
    chunk = max(1, _EVAL_CHUNK_ELEMENTS // field.num_paths)
    for start in range(0, ux.size, chunk):
        part = ux[start:start + chunk]
        phase = np.outer(part, kx) + field.phases
        out[start:start + chunk] = np.exp(1j * phase) @ field.amplitudes
    return out[inverse.reshape(-1)]


def eval_shifted(field: FieldModel, x, offsets) -> np.ndarray:
    """Channel at every ``x[i] + offsets[j]``, shape ``(len(x), len(offsets))``.

    Uses ``exp(j*k*(x+d)) = exp(j*k*x) * exp(j*k*d)`` so the cost is one
    matrix product rather than a full evaluation per offset.
    """
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    ds = np.atleast_1d(np.asarray(offsets, dtype=float))
    p = field.params
    k0 = TWO_PI * math.cos(p.los_angle)
    los = np.exp(1j * (k0 * xs + p.los_phase))[:, None] * np.exp(1j * k0 * ds)[None, :]
    if math.isinf(p.k_factor):
        return p.large_scale_gain * los
    kx = TWO_PI * np.cos(field.angles)
    weighted = np.exp(1j * (np.outer(xs, kx) + field.phases)) * field.amplitudes
    diffuse = weighted @ np.exp(1j * np.outer(kx, ds))
    k = p.k_factor
    return p.large_scale_gain * (math.sqrt(k / (k + 1.0)) * los + math.sqrt(1.0 / (k + 1.0)) * diffuse)


def wavelength(carrier_frequency: float) -> float:
    """Free-space wavelength in metres."""
    return SPEED_OF_LIGHT / carrier_frequency


def inverse_distance_gain(x, link_distance: float, carrier_frequency: float):
    """Amplitude trend of a link that shortens as the antenna advances.

    `x` is the absolute antenna position in wavelengths and `link_distance`
    the separation in metres at ``x = 0``. Unity at the start.
    """
    d = link_distance - np.asarray(x, dtype=float) * wavelength(carrier_frequency)
    if np.any(d <= 0):
        raise InvalidParameterError("antenna travel exceeds the configured link distance")
    return link_distance / d
