"""
Piecewise-static statistical channel model.

Each static interval holds an initial channel ``H0``, drawn fresh at the
interval start, passed through a transform ``F`` and perturbed per sample
by circular complex Gaussian residual noise::

    h(n) = F(H0) + N(n)

With no noise and the identity transform every sample of an interval equals
its ``H0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable

import numpy as np

from csa_sim.errors import ConfigError, InsufficientDataError, InvalidParameterError
from csa_sim.experiment import ChannelTrace, complex_gaussian
from csa_sim.kinematics import POSITION_TOL, interval_starts, linear_trajectory


@dataclass(frozen=True)
class RiceInitial:
    """Rice-distributed ``H0`` with factor `k` and mean power ``omega = E|H0|^2``.

    In scipy's parameterisation the magnitude is ``rice(b=nu/s, scale=s)``
    with ``nu = sqrt(omega*k/(k+1))`` and ``s = sqrt(omega/(2*(k+1)))``.
    The phase of the specular part is drawn uniformly per interval.
    """

    k: float = 0.0
    omega: float = 1.0

    def __post_init__(self):
        if math.isnan(self.k) or self.k < 0:
            raise InvalidParameterError(f"Rice k must be >= 0, got {self.k}")
        if not (self.omega > 0 and math.isfinite(self.omega)):
            raise InvalidParameterError(f"Rice omega must be > 0, got {self.omega}")

    @property
    def nu(self) -> float:
        if math.isinf(self.k):
            return math.sqrt(self.omega)
        return math.sqrt(self.omega * self.k / (self.k + 1.0))

    @property
    def sigma(self) -> float:
        """Per-component standard deviation of the diffuse part."""
        if math.isinf(self.k):
            return 0.0
        return math.sqrt(self.omega / (2.0 * (self.k + 1.0)))

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        los = self.nu * np.exp(1j * rng.uniform(0.0, 2.0 * math.pi, size))
        diffuse = complex_gaussian(rng, size, math.sqrt(2.0) * self.sigma)
        return los + diffuse


# name -> (callable(h, **params), allowed parameter names)
_TRANSFORMS: dict[str, tuple[Callable, frozenset]] = {}


def register_transform(name: str, params=()):
    def deco(fn):
        _TRANSFORMS[name] = (fn, frozenset(params))
        return fn
    return deco


@register_transform("identity")
def _identity(h):
    return h


@register_transform("scale", ("gain", "phase"))
def _scale(h, gain=1.0, phase=0.0):
    return h * (gain * complex(math.cos(phase), math.sin(phase)))


@register_transform("bias", ("bias",))
def _bias(h, bias=0j):
    return h + complex(bias)


@dataclass(frozen=True)
class Transform:
    name: str = "identity"
    params: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        if self.name not in _TRANSFORMS:
            raise ConfigError(f"unknown transform {self.name!r}; registered: {sorted(_TRANSFORMS)}")
        extra = set(self.params) - _TRANSFORMS[self.name][1]
        if extra:
            raise ConfigError(f"transform {self.name!r} does not take {sorted(extra)}")

    def __hash__(self):
        return hash((self.name, tuple(sorted(self.params.items()))))


def apply_transform(transform: Transform | str, h):
    if isinstance(transform, str):
        transform = Transform(transform)
    fn, _ = _TRANSFORMS[transform.name]
    if transform.name == "identity":
        return h
    return fn(h, **transform.params)


@dataclass(frozen=True)
class PiecewiseStaticModel:
    interval_length: float = 0.5
    initial: RiceInitial | complex = dc_field(default_factory=RiceInitial)
    residual_sigma: float = 0.0
    transform: Transform = dc_field(default_factory=Transform)
    seed: int = 0

    def __post_init__(self):
        if not (self.interval_length > 0 and math.isfinite(self.interval_length)):
            raise InvalidParameterError(f"interval_length must be > 0, got {self.interval_length}")
        if not self.residual_sigma >= 0:
            raise InvalidParameterError(f"residual_sigma must be >= 0, got {self.residual_sigma}")
        if not isinstance(self.initial, RiceInitial):
            object.__setattr__(self, "initial", complex(self.initial))

    def draw_initial(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if isinstance(self.initial, RiceInitial):
            return self.initial.draw(rng, size)
        return np.full(size, self.initial, dtype=complex)


def uniform_interval_ids(n: np.ndarray, interval_length: float) -> np.ndarray:
    """Interval 0 covers ``[0, L]``, interval k covers ``(kL, (k+1)L]``."""
    ids = np.ceil(np.asarray(n) / interval_length - POSITION_TOL).astype(np.int64) - 1
    return np.maximum(ids, 0)


def generate_model_trace(
    model: PiecewiseStaticModel,
    total_distance: float,
    step: float,
    interval_ids=None,
    *,
    speed: float | None = None,
    scenario: str = "model",
) -> ChannelTrace:
    """Sample the piecewise-static model on a uniform trajectory.

    `interval_ids` overrides the uniform tiling with an explicit per-sample
    labelling (for example a kinematics log's ``interval_id``).
    """
    traj = linear_trajectory(total_distance, step)
    if interval_ids is None:
        ids = uniform_interval_ids(traj.samples, model.interval_length)
    else:
        ids = np.asarray(interval_ids, dtype=np.int64)
        if ids.size != len(traj):
            raise InvalidParameterError("interval_ids length does not match the trajectory")
    starts = interval_starts(ids)
    # position of each sample's interval in start order
    ordinal = np.cumsum(np.isin(np.arange(ids.size), starts)) - 1

    rng = np.random.default_rng(model.seed)
    h0 = model.draw_initial(rng, len(starts))
    held = apply_transform(model.transform, h0)
    h = held[ordinal]
    if model.residual_sigma > 0:
        h = h + complex_gaussian(rng, h.size, model.residual_sigma)
    repositioned = np.zeros(ids.size, dtype=bool)
    repositioned[starts[1:]] = True
    metadata = {
        "scenario": scenario,
        "seed": int(model.seed),
        "noise_seed": int(model.seed),
        "step": float(step),
        "speed": None if speed is None else float(speed),
        "residual_sigma": float(model.residual_sigma),
        "interval_length": float(model.interval_length),
    }
    return ChannelTrace(traj.samples.copy(), h, "model", ids, repositioned, metadata)


@dataclass(frozen=True)
class ModelFit:
    k_hat: float
    omega_hat: float
    sigma_hat: float
    num_intervals: int
    interval_means: np.ndarray = dc_field(repr=False, compare=False)

    def to_model(self, interval_length: float, seed: int = 0) -> PiecewiseStaticModel:
        return PiecewiseStaticModel(
            interval_length=interval_length,
            initial=RiceInitial(self.k_hat, self.omega_hat),
            residual_sigma=self.sigma_hat,
            seed=seed,
        )


def fit_model(trace: ChannelTrace, interval_length: float | None = None, boundaries=None) -> ModelFit:
    """Estimate ``(K, omega, sigma_N)`` from a segmented trace.

    Segmentation comes from `boundaries` (interval start indices), else a
    uniform tiling of `interval_length`, else the trace's own interval ids.
    ``sigma_N**2`` is the pooled within-interval variance; K and omega are
    moment estimates over the interval means. Raises
    :class:`InsufficientDataError` (carrying ``sigma_hat``) with fewer than
    two intervals.
    """
    from csa_sim.analysis import estimate_rice_k

    if boundaries is not None:
        starts = sorted(int(b) for b in boundaries)
        if not starts or starts[0] != 0:
            starts = [0] + starts
    elif interval_length is not None:
        starts = interval_starts(uniform_interval_ids(trace.n, interval_length))
    else:
        starts = trace.boundaries()
    edges = starts + [len(trace)]
    means = np.empty(len(starts), dtype=complex)
    ss = 0.0
    for i, (a, b) in enumerate(zip(edges[:-1], edges[1:])):
        # shift by the first sample so constant intervals give exactly zero scatter
        dev = trace.h[a:b] - trace.h[a]
        shift = dev.mean()
        means[i] = trace.h[a] + shift
        ss += float(np.sum(np.abs(dev - shift) ** 2))
    dof = len(trace) - len(starts)
    sigma_hat = math.sqrt(ss / dof) if dof > 0 else 0.0
    if len(starts) < 2:
        raise InsufficientDataError(
            f"need at least 2 intervals to estimate K, got {len(starts)}", sigma_hat=sigma_hat
        )
    k_hat, omega_hat = estimate_rice_k(np.abs(means))
    return ModelFit(k_hat, omega_hat, sigma_hat, len(starts), means)
