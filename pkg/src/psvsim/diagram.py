"""Spacetime diagrams (SVG 1.1, plus a coarse ASCII fallback).

Time runs upward, space horizontal; only 1+1-dimensional scenarios can be
drawn.  Output is deterministic byte for byte for identical inputs, so
diagrams are golden-file testable.
"""

from __future__ import annotations

import math

import numpy as np

from .engine import RunRecord, Scenario
from .errors import ConfigurationError
from .geometry import Lcsh, surface_times

WIDTH, HEIGHT, MARGIN = 640, 480, 48
SURFACE_SAMPLES = 201

_SURFACE_COLORS = ("#c0392b", "#2471a3", "#1e8449", "#9a7d0a", "#6c3483", "#566573")


def _fmt(v: float) -> str:
    return f"{v:.2f}"


class _Frame:
    def __init__(self, x_range, t_range):
        self.x0, self.x1 = x_range
        self.t0, self.t1 = t_range

    def px(self, x: float) -> float:
        return MARGIN + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - 2 * MARGIN)

    def py(self, t: float) -> float:
        return MARGIN + (self.t1 - t) / (self.t1 - self.t0) * (HEIGHT - 2 * MARGIN)

    def point(self, x: float, t: float) -> str:
        return f"{_fmt(self.px(x))},{_fmt(self.py(t))}"


def _bounds(scenario: Scenario) -> tuple[tuple[float, float], tuple[float, float]]:
    (x_range,) = scenario.support_region(pad=1.5)
    ts = [e.t for e in scenario.events]
    ts += [p.t for _, line in scenario.worldlines for p in line]
    if math.isfinite(scenario.initial_t0):
        ts.append(scenario.initial_t0)
    if not ts:
        ts = [0.0]
    tspan = max(ts) - min(ts) or 1.0
    return x_range, (min(ts) - 0.6 * tspan - 0.5, max(ts) + 0.4 * tspan + 0.5)


def _surface_path(surface: Lcsh, frame: _Frame) -> str:
    xs = np.linspace(frame.x0, frame.x1, SURFACE_SAMPLES)
    ts = surface_times(surface, xs.reshape(-1, 1))
    ts = np.clip(ts, frame.t0, frame.t1)
    return " ".join(frame.point(x, t) for x, t in zip(xs, ts))


def render_svg(source: RunRecord | Scenario) -> str:
    """Render a scenario (geometry only) or a run record (geometry plus
    the sequence of reduction surfaces)."""
    scenario = source.scenario if isinstance(source, RunRecord) else source
    if scenario.dim != 1:
        raise ConfigurationError(
            f"diagrams are only drawn for 1 spatial dimension, scenario has {scenario.dim}"
        )
    frame = _Frame(*_bounds(scenario))
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect class="background" x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
        f'<rect class="frame" x="{MARGIN}" y="{MARGIN}" width="{WIDTH - 2 * MARGIN}" '
        f'height="{HEIGHT - 2 * MARGIN}" fill="none" stroke="#202020"/>',
        f'<text class="axis-label" x="{WIDTH - MARGIN + 6}" y="{HEIGHT - MARGIN + 14}" '
        f'font-size="12">x</text>',
        f'<text class="axis-label" x="{MARGIN - 18}" y="{MARGIN - 8}" font-size="12">t</text>',
    ]

    if math.isfinite(scenario.initial_t0):
        y = _fmt(frame.py(scenario.initial_t0))
        parts.append(
            f'<line class="initial-surface" x1="{_fmt(frame.px(frame.x0))}" y1="{y}" '
            f'x2="{_fmt(frame.px(frame.x1))}" y2="{y}" stroke="#707070" stroke-dasharray="2,3"/>'
        )
        parts.append(
            f'<text class="surface-label" x="{MARGIN + 4}" y="{_fmt(frame.py(scenario.initial_t0) - 4)}" '
            f'font-size="11" fill="#707070">S0</text>'
        )

    steps = source.steps if isinstance(source, RunRecord) else ()
    for k, step in enumerate(steps):
        color = _SURFACE_COLORS[k % len(_SURFACE_COLORS)]
        path = _surface_path(step.surface_after, frame)
        first = path.split(" ", 1)[0]
        last = path.rsplit(" ", 1)[-1]
        bottom = f"{last.split(',')[0]},{_fmt(frame.py(frame.t0))} {first.split(',')[0]},{_fmt(frame.py(frame.t0))}"
        parts.append(
            f'<polygon class="surface-past" points="{path} {bottom}" fill="{color}" '
            f'fill-opacity="0.06" stroke="none"/>'
        )
        parts.append(
            f'<polyline class="surface" points="{path}" fill="none" stroke="{color}" '
            f'stroke-width="1.5"/>'
        )
        apex = step.surface_after.apexes[-1]
        label_x = _fmt(frame.px(apex.x[0]) + 6)
        parts.append(
            f'<text class="surface-label" x="{label_x}" y="{_fmt(frame.py(apex.t) + 14)}" '
            f'font-size="11" fill="{color}">S{k + 1}-</text>'
        )
        parts.append(
            f'<text class="surface-label" x="{label_x}" y="{_fmt(frame.py(apex.t) - 8)}" '
            f'font-size="11" fill="{color}">S{k + 1}+</text>'
        )

    for label, line in scenario.worldlines:
        pts = " ".join(frame.point(p.x[0], p.t) for p in line)
        parts.append(
            f'<polyline class="worldline" points="{pts}" fill="none" stroke="#404040" '
            f'stroke-dasharray="5,3"/>'
        )
        end = line[-1]
        parts.append(
            f'<text class="worldline-label" x="{_fmt(frame.px(end.x[0]) - 14)}" '
            f'y="{_fmt(frame.py(end.t) + 4)}" font-size="10" fill="#404040">{label}</text>'
        )

    for ev in scenario.interactions:
        x, y = frame.px(ev.at.x[0]), frame.py(ev.at.t)
        parts.append(
            f'<rect class="interaction" x="{_fmt(x - 4)}" y="{_fmt(y - 4)}" width="8" height="8" '
            f'fill="#d68910" stroke="#202020"/>'
        )
        parts.append(
            f'<text class="interaction-label" x="{_fmt(x + 7)}" y="{_fmt(y + 4)}" '
            f'font-size="10">{ev.name}</text>'
        )

    outcome_by_det = {s.detector: s.outcome for s in steps}
    for det in scenario.detectors:
        x, y = frame.px(det.at.x[0]), frame.py(det.at.t)
        parts.append(
            f'<circle class="detector" cx="{_fmt(x)}" cy="{_fmt(y)}" r="5" '
            f'fill="#1a5276" stroke="#202020"/>'
        )
        text = det.label
        if det.label in outcome_by_det:
            text += f": {outcome_by_det[det.label]}"
        parts.append(
            f'<text class="detector-label" x="{_fmt(x + 8)}" y="{_fmt(y - 6)}" '
            f'font-size="11">{text}</text>'
        )

    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_ascii(source: RunRecord | Scenario, columns: int = 71, rows: int = 25) -> str:
    """Coarse character-grid rendering of the same content."""
    scenario = source.scenario if isinstance(source, RunRecord) else source
    if scenario.dim != 1:
        raise ConfigurationError(
            f"diagrams are only drawn for 1 spatial dimension, scenario has {scenario.dim}"
        )
    (x0, x1), (t0, t1) = _bounds(scenario)
    grid = [[" "] * columns for _ in range(rows)]

    def put(x: float, t: float, ch: str):
        col = int(round((x - x0) / (x1 - x0) * (columns - 1)))
        row = int(round((t1 - t) / (t1 - t0) * (rows - 1)))
        if 0 <= row < rows and 0 <= col < columns:
            grid[row][col] = ch

    steps = source.steps if isinstance(source, RunRecord) else ()
    for step in steps:
        xs = np.linspace(x0, x1, columns)
        ts = surface_times(step.surface_after, xs.reshape(-1, 1))
        for x, t in zip(xs, ts):
            if t0 <= t <= t1:
                put(x, t, "~")
    for _, line in scenario.worldlines:
        for a, b in zip(line, line[1:]):
            for f in np.linspace(0.0, 1.0, 40):
                put(a.x[0] + f * (b.x[0] - a.x[0]), a.t + f * (b.t - a.t), ".")
    for ev in scenario.interactions:
        put(ev.at.x[0], ev.at.t, "*")
    for det in scenario.detectors:
        put(det.at.x[0], det.at.t, det.label[0])
    return "\n".join("".join(row).rstrip() for row in grid) + "\n"
