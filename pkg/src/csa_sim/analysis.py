"""
Metrics for judging how static a channel trace stays.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field as dc_field, replace

import numpy as np

from csa_sim.errors import InsufficientDataError, InvalidInputError, InvalidParameterError
from csa_sim.experiment import ChannelTrace
from csa_sim.field import FieldParams, eval_shifted, synthesize_field

TWO_PI = 2.0 * math.pi


class ZeroMagnitudeWarning(RuntimeWarning):
    """A sample with exactly zero magnitude was encountered."""


def _values(trace_or_h) -> np.ndarray:
    if isinstance(trace_or_h, ChannelTrace):
        return trace_or_h.h
    return np.atleast_1d(np.asarray(trace_or_h, dtype=complex))


def fade_depth(trace_or_h) -> float:
    """Ratio of the strongest to the weakest magnitude, in dB.

    A zero-magnitude sample gives ``inf`` and emits
    :class:`ZeroMagnitudeWarning`.
    """
    mag = np.abs(_values(trace_or_h))
    if mag.size == 0:
        raise InvalidInputError("fade depth of an empty trace")
    lo, hi = float(mag.min()), float(mag.max())
    if lo == 0.0:
        warnings.warn("trace contains a zero-magnitude sample; fade depth is infinite", ZeroMagnitudeWarning)
        return math.inf
    return 20.0 * math.log10(hi / lo)


def wrap_phase(trace_or_h) -> np.ndarray:
    """Phase of each sample mapped into ``[0, 2*pi)``; a zero sample gets phase 0."""
    h = _values(trace_or_h)
    if h.size == 0:
        raise InvalidInputError("phase of an empty trace")
    if np.any(h == 0):
        warnings.warn("phase of a zero sample is undefined; using 0", ZeroMagnitudeWarning)
    phase = np.mod(np.angle(h), TWO_PI)
    # mod of a tiny negative angle rounds to exactly 2*pi
    phase[phase >= TWO_PI] = 0.0
    return phase


def segment_static(trace_or_h, epsilon: float) -> list[int]:
    """Greedy split into static runs; returns the start index of every run.

    A new run starts at the first sample whose complex distance from the
    running mean of the current run exceeds `epsilon`.
    """
    if not epsilon > 0:
        raise InvalidParameterError(f"epsilon must be > 0, got {epsilon}")
    h = _values(trace_or_h)
    if h.size == 0:
        raise InvalidInputError("cannot segment an empty trace")
    starts = [0]
    total = h[0]
    count = 1
    for i in range(1, h.size):
        if abs(h[i] - total / count) > epsilon:
            starts.append(i)
            total = h[i]
            count = 1
        else:
            total += h[i]
            count += 1
    return starts


def estimate_rice_k(magnitudes) -> tuple[float, float]:
    """Moment estimate of the Rice factor and mean power from envelope samples.

    With ``m2 = E[r^2]`` and ``m4 = E[r^4]``, ``gamma = sqrt(max(0,
    2*m2**2 - m4))`` is the specular power and ``K = gamma / (m2 - gamma)``.
    Identical samples (no diffuse scatter) return ``K = inf``. The estimator
    is biased for small sample counts.

    Returns
    -------
    (k_hat, omega_hat)
    """
    r = np.asarray(magnitudes, dtype=float).reshape(-1)
    if r.size < 2:
        raise InsufficientDataError(f"need at least 2 magnitudes, got {r.size}")
    if np.any(r < 0) or not np.all(np.isfinite(r)):
        raise InvalidParameterError("magnitudes must be finite and non-negative")
    p = r * r
    m2 = float(p.mean())
    if np.all(r == r[0]):
        return math.inf, m2
    m4 = float((p * p).mean())
    gamma = math.sqrt(max(0.0, 2.0 * m2 * m2 - m4))
    diffuse = m2 - gamma
    if diffuse <= 0.0:
        return math.inf, m2
    return gamma / diffuse, m2


def spatial_autocorr(
    field_params: FieldParams,
    lags,
    num_seeds: int,
    positions=None,
) -> list[tuple[float, complex]]:
    """Normalised ``E[H(x) H*(x+d)]`` over an ensemble of independent fields.

    Seeds ``field_params.seed .. field_params.seed + num_seeds - 1`` are
    averaged, each over the reference `positions` (default: 64 points
    spread over 50 wavelengths). Normalisation is by ``sqrt(P(x) P(x+d))``
    so the magnitude never exceeds one, and the zero lag is exactly 1.
    """
    if num_seeds < 1:
        raise InvalidParameterError("num_seeds must be >= 1")
    lags = np.asarray(lags, dtype=float).reshape(-1)
    xs = np.linspace(0.0, 50.0, 64) if positions is None else np.asarray(positions, dtype=float)
    cross = np.zeros(lags.size, dtype=complex)
    p_ref = 0.0
    p_lag = np.zeros(lags.size)
    for s in range(num_seeds):
        fm = synthesize_field(_with_seed(field_params, field_params.seed + s))
        shifted = eval_shifted(fm, xs, np.append(lags, 0.0))
        h0, hd = shifted[:, -1], shifted[:, :-1]
        p_ref += float(np.sum(np.abs(h0) ** 2))
        cross += h0 @ np.conj(hd)
        p_lag += np.sum(np.abs(hd) ** 2, axis=0)
    corr = cross / np.sqrt(p_ref * p_lag)
    corr[lags == 0] = 1.0
    return [(float(d), complex(c)) for d, c in zip(lags, corr)]


def _with_seed(params: FieldParams, seed: int) -> FieldParams:
    return replace(params, seed=seed)


def trace_autocorr(trace: ChannelTrace, max_lag: int = 50) -> list[tuple[float, complex]]:
    """Normalised autocorrelation of one trace at lags of whole samples.

    The lag is reported in wavelengths using the trace's nominal step.
    """
    h = trace.h
    step = float(trace.metadata.get("step") or (np.median(np.diff(trace.n)) if len(trace) > 1 else 0.0))
    out = []
    for k in range(min(max_lag, h.size - 1) + 1):
        a, b = h[: h.size - k], h[k:]
        denom = math.sqrt(float(np.sum(np.abs(a) ** 2)) * float(np.sum(np.abs(b) ** 2)))
        c = 1.0 + 0j if k == 0 else (complex(np.sum(a * np.conj(b))) / denom if denom > 0 else 0j)
        out.append((k * step, c))
    return out


@dataclass(frozen=True)
class IntervalStats:
    start_n: float
    end_n: float
    mean: complex
    variance: float
    fade_depth_db: float


def interval_stats(trace: ChannelTrace, starts=None) -> list[IntervalStats]:
    """Per-interval mean, variance ``mean|h - mean|^2`` and fade depth."""
    starts = trace.boundaries() if starts is None else list(starts)
    edges = list(starts) + [len(trace)]
    rows = []
    for a, b in zip(edges[:-1], edges[1:]):
        seg = trace.h[a:b]
        dev = seg - seg[0]
        shift = dev.mean()
        var = float(np.mean(np.abs(dev - shift) ** 2))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ZeroMagnitudeWarning)
            depth = fade_depth(seg)
        rows.append(IntervalStats(float(trace.n[a]), float(trace.n[b - 1]), complex(seg[0] + shift), var, depth))
    return rows


@dataclass(frozen=True)
class ModeSummary:
    mode: str
    fade_depth_db: float
    total_variation: float
    mean_interval_variance: float
    max_interval_fade_db: float
    num_intervals: int


def compare_modes(traces) -> list[ModeSummary]:
    """Side-by-side staticness metrics for traces sharing one trajectory grid.

    `total_variation` is the summed absolute change of ``|h|`` between
    consecutive samples.
    """
    traces = list(traces)
    if not traces:
        raise InvalidInputError("no traces to compare")
    grid = traces[0].n
    for t in traces[1:]:
        if not np.array_equal(t.n, grid):
            raise InvalidInputError(f"trace {t.mode!r} is on a different trajectory grid")
    rows = []
    for t in traces:
        stats = interval_stats(t)
        mag = np.abs(t.h)
        rows.append(
            ModeSummary(
                mode=t.mode,
                fade_depth_db=fade_depth(t),
                total_variation=float(np.sum(np.abs(np.diff(mag)))),
                mean_interval_variance=float(np.mean([s.variance for s in stats])),
                max_interval_fade_db=float(max(s.fade_depth_db for s in stats)),
                num_intervals=t.num_intervals,
            )
        )
    return rows


@dataclass
class AnalysisReport:
    fade_depth_db: float
    intervals: list[IntervalStats]
    k_hat: float | None
    omega_hat: float | None
    sigma_hat: float
    autocorr: list[tuple[float, complex]] = dc_field(default_factory=list)
    comparison: list[ModeSummary] = dc_field(default_factory=list)
    mode: str = ""
    num_samples: int = 0

    @property
    def num_intervals(self) -> int:
        return len(self.intervals)

    def summary(self) -> str:
        k = "n/a" if self.k_hat is None else f"{self.k_hat:.4g}"
        return (
            f"mode={self.mode} samples={self.num_samples} fade_depth={self.fade_depth_db:.2f} dB "
            f"intervals={self.num_intervals} K_hat={k} sigma_hat={self.sigma_hat:.4g}"
        )


def analyze_trace(trace: ChannelTrace, epsilon: float | None = None, max_lag: int = 50) -> AnalysisReport:
    """Full report for one trace.

    Intervals come from the trace's own ids, or from :func:`segment_static`
    when `epsilon` is given.
    """
    from csa_sim.model import fit_model

    starts = trace.boundaries() if epsilon is None else segment_static(trace, epsilon)
    try:
        fit = fit_model(trace, boundaries=starts)
        k_hat, omega_hat, sigma_hat = fit.k_hat, fit.omega_hat, fit.sigma_hat
    except InsufficientDataError as exc:
        k_hat, omega_hat, sigma_hat = None, None, exc.sigma_hat
    return AnalysisReport(
        fade_depth_db=fade_depth(trace),
        intervals=interval_stats(trace, starts),
        k_hat=k_hat,
        omega_hat=omega_hat,
        sigma_hat=sigma_hat,
        autocorr=trace_autocorr(trace, max_lag),
        mode=trace.mode,
        num_samples=len(trace),
    )
