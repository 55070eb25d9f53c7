"""
CSV trace files and flat key-value reports.

A trace file is an optional block of ``#`` comment lines followed by a
header and one row per sample::

    # meta {"noise_seed": 0, "scenario": "default", ...}
    n_lambda,t,re,im,mag_db,phase_rad,mode,interval_id,repositioned

``re`` and ``im`` are authoritative; ``mag_db`` and ``phase_rad`` are
redundant plotting columns. Floats use shortest round-trip formatting.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from csa_sim.analysis import AnalysisReport, ModeSummary, wrap_phase
from csa_sim.errors import ConfigError
from csa_sim.experiment import MODES, ChannelTrace

COLUMNS = ("n_lambda", "t", "re", "im", "mag_db", "phase_rad", "mode", "interval_id", "repositioned")
META_PREFIX = "# meta "


def _fmt(x: float) -> str:
    return repr(float(x))


def trace_to_csv(trace: ChannelTrace) -> str:
    buf = io.StringIO()
    buf.write(META_PREFIX + json.dumps(trace.metadata, sort_keys=True) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    t = trace.t
    mag = np.abs(trace.h)
    with np.errstate(divide="ignore"):
        mag_db = 20.0 * np.log10(mag)
    phase = np.mod(np.angle(trace.h), 2.0 * math.pi)
    phase[phase >= 2.0 * math.pi] = 0.0
    for i in range(len(trace)):
        writer.writerow((
            _fmt(trace.n[i]),
            "" if t is None else _fmt(t[i]),
            _fmt(trace.h[i].real),
            _fmt(trace.h[i].imag),
            _fmt(mag_db[i]),
            _fmt(phase[i]),
            trace.mode,
            int(trace.interval_id[i]),
            int(trace.repositioned[i]),
        ))
    return buf.getvalue()


def write_trace(trace: ChannelTrace, path) -> Path:
    path = Path(path)
    path.write_text(trace_to_csv(trace), encoding="utf-8", newline="")
    return path


def trace_from_csv(text: str, source: str = "<trace>") -> ChannelTrace:
    """Parse a trace file; schema violations raise :class:`ConfigError`."""
    lines = text.splitlines()
    metadata = {}
    start = 0
    while start < len(lines) and lines[start].startswith("#"):
        if lines[start].startswith(META_PREFIX):
            try:
                metadata = json.loads(lines[start][len(META_PREFIX):])
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{source}:{start + 1}: bad metadata line ({exc})") from None
        start += 1
    reader = csv.reader(lines[start:])
    header = next(reader, None)
    if header is None or tuple(h.strip() for h in header) != COLUMNS:
        raise ConfigError(f"{source}:{start + 1}: header must be {','.join(COLUMNS)}")
    n, h, ids, rep = [], [], [], []
    mode = None
    for lineno, row in enumerate(reader, start=start + 2):
        if len(row) != len(COLUMNS):
            raise ConfigError(f"{source}:{lineno}: expected {len(COLUMNS)} columns, got {len(row)}")
        rec = dict(zip(COLUMNS, row))
        try:
            n.append(float(rec["n_lambda"]))
            h.append(complex(float(rec["re"]), float(rec["im"])))
            ids.append(int(rec["interval_id"]))
            rep.append(int(rec["repositioned"]))
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: {exc}") from None
        if rec["mode"] not in MODES:
            raise ConfigError(f"{source}:{lineno}: unknown mode {rec['mode']!r}")
        if mode is None:
            mode = rec["mode"]
        elif rec["mode"] != mode:
            raise ConfigError(f"{source}:{lineno}: mixed modes in one trace")
        if rep[-1] not in (0, 1):
            raise ConfigError(f"{source}:{lineno}: repositioned must be 0 or 1")
    if mode is None:
        raise ConfigError(f"{source}: trace has no samples")
    return ChannelTrace(np.array(n), np.array(h), mode, np.array(ids), np.array(rep, dtype=bool), metadata)


def read_trace(path) -> ChannelTrace:
    path = Path(path)
    return trace_from_csv(path.read_text(encoding="utf-8"), str(path))


def _kv(key, value) -> str:
    if value is None:
        return f"{key} = none"
    if isinstance(value, complex):
        return f"{key}.re = {_fmt(value.real)}\n{key}.im = {_fmt(value.imag)}"
    if isinstance(value, float):
        return f"{key} = {_fmt(value)}"
    return f"{key} = {value}"


def report_lines(report: AnalysisReport, prefix: str = "") -> list[str]:
    p = prefix
    out = [
        _kv(f"{p}mode", report.mode),
        _kv(f"{p}num_samples", report.num_samples),
        _kv(f"{p}fade_depth_db", float(report.fade_depth_db)),
        _kv(f"{p}num_intervals", report.num_intervals),
        _kv(f"{p}k_hat", report.k_hat),
        _kv(f"{p}omega_hat", report.omega_hat),
        _kv(f"{p}sigma_hat", float(report.sigma_hat)),
    ]
    for i, s in enumerate(report.intervals):
        out += [
            _kv(f"{p}interval.{i}.start_n", s.start_n),
            _kv(f"{p}interval.{i}.end_n", s.end_n),
            _kv(f"{p}interval.{i}.mean", s.mean),
            _kv(f"{p}interval.{i}.variance", s.variance),
        ]
    for i, (lag, c) in enumerate(report.autocorr):
        out += [_kv(f"{p}autocorr.{i}.lag", float(lag)), _kv(f"{p}autocorr.{i}.value", c)]
    for row in report.comparison:
        out += comparison_lines([row], f"{p}comparison.")
    return out


def comparison_lines(rows, prefix: str = "comparison.") -> list[str]:
    out = []
    for r in rows:
        for name in ("fade_depth_db", "total_variation", "mean_interval_variance", "max_interval_fade_db"):
            out.append(_kv(f"{prefix}{r.mode}.{name}", float(getattr(r, name))))
        out.append(_kv(f"{prefix}{r.mode}.num_intervals", r.num_intervals))
    return out


def parse_report(text: str) -> dict[str, str]:
    """Read a key-value report back into a flat ``{key: raw value}`` dict."""
    out = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition(" = ")
        if not sep:
            raise ConfigError(f"malformed report line: {line!r}")
        out[key] = value
    return out


COMPARISON_COLUMNS = (
    "mode", "fade_depth_db", "total_variation", "mean_interval_variance", "max_interval_fade_db", "num_intervals",
)


def comparison_to_csv(rows: list[ModeSummary]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COMPARISON_COLUMNS)
    for r in rows:
        writer.writerow((
            r.mode, _fmt(r.fade_depth_db), _fmt(r.total_variation), _fmt(r.mean_interval_variance),
            _fmt(r.max_interval_fade_db), r.num_intervals,
        ))
    return buf.getvalue()
