"""Figures for the CLI report path.

SVG output is written by a small dependency-free emitter so its structure is
fixed: one ``<polyline>`` per curve, one ``<rect>`` per bar. PNG output goes
through matplotlib, which is imported lazily and only when asked for.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

SWEEP_TITLE = "Switching Angles with N-R Algorithm"
SPECTRUM_TITLE = "Harmonic spectrum of the output voltage"
WAVEFORM_TITLE = "Output voltage of the H-bridge inverter"

COLORS = ("#1f3fbf", "#c0392b", "#111111", "#27ae60", "#8e44ad", "#d35400", "#16a085", "#7f8c8d")

WIDTH, HEIGHT = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 70, 20, 40, 60


@dataclass
class _Axes:
    xmin: float
    xmax: float
    ymin: float
    ymax: float

    def x(self, v):
        span = (self.xmax - self.xmin) or 1.0
        return LEFT + (v - self.xmin) / span * (WIDTH - LEFT - RIGHT)

    def y(self, v):
        span = (self.ymax - self.ymin) or 1.0
        return HEIGHT - BOTTOM - (v - self.ymin) / span * (HEIGHT - TOP - BOTTOM)


def _ticks(lo, hi, count=6):
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=raw)
    first = math.ceil(lo / step - 1e-9) * step
    out = []
    v = first
    while v <= hi + 1e-9 * step:
        out.append(round(v, 10))
        v += step
    return out


def _frame(ax: _Axes, title, xlabel, ylabel):
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="22" text-anchor="middle" font-size="15">{escape(title)}</text>',
    ]
    x0, x1 = ax.x(ax.xmin), ax.x(ax.xmax)
    y0, y1 = ax.y(ax.ymin), ax.y(ax.ymax)
    for t in _ticks(ax.xmin, ax.xmax):
        xt = ax.x(t)
        parts.append(f'<line x1="{xt:.2f}" y1="{y1:.2f}" x2="{xt:.2f}" y2="{y0:.2f}" stroke="#dddddd"/>')
        parts.append(f'<text x="{xt:.2f}" y="{y0 + 16:.2f}" text-anchor="middle">{t:g}</text>')
    for t in _ticks(ax.ymin, ax.ymax):
        yt = ax.y(t)
        parts.append(f'<line x1="{x0:.2f}" y1="{yt:.2f}" x2="{x1:.2f}" y2="{yt:.2f}" stroke="#dddddd"/>')
        parts.append(f'<text x="{x0 - 6:.2f}" y="{yt + 4:.2f}" text-anchor="end">{t:g}</text>')
    parts += [
        f'<line x1="{x0:.2f}" y1="{y0:.2f}" x2="{x1:.2f}" y2="{y0:.2f}" stroke="black"/>',
        f'<line x1="{x0:.2f}" y1="{y0:.2f}" x2="{x0:.2f}" y2="{y1:.2f}" stroke="black"/>',
        f'<text x="{(x0 + x1) / 2:.1f}" y="{HEIGHT - 18}" text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="18" y="{(y0 + y1) / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 18 {(y0 + y1) / 2:.1f})">{escape(ylabel)}</text>',
    ]
    return parts


def svg_lines(series, title, xlabel, ylabel, ylim=None) -> str:
    """Line chart; ``series`` is a list of ``(label, xs, ys)``. One polyline each."""
    xs_all = [x for _, xs, _ in series for x in xs] or [0.0, 1.0]
    ys_all = [y for _, _, ys in series for y in ys] or [0.0, 1.0]
    ymin, ymax = ylim if ylim else (min(ys_all), max(ys_all))
    ax = _Axes(min(xs_all), max(xs_all), ymin, ymax)
    parts = _frame(ax, title, xlabel, ylabel)
    for i, (label, xs, ys) in enumerate(series):
        color = COLORS[i % len(COLORS)]
        pts = " ".join(f"{ax.x(x):.2f},{ax.y(y):.2f}" for x, y in zip(xs, ys))
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{pts}">'
            f"<title>{escape(label)}</title></polyline>"
        )
        ly = TOP + 14 + 16 * i
        parts.append(f'<text x="{WIDTH - RIGHT - 4}" y="{ly}" text-anchor="end" fill="{color}">{escape(label)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def svg_bars(ranks, values, title, xlabel, ylabel) -> str:
    ax = _Axes(0.0, max(ranks) + 1.0, min(0.0, min(values)), max(max(values), 1e-12))
    parts = _frame(ax, title, xlabel, ylabel)
    w = 0.6 * (ax.x(1) - ax.x(0))
    for n, v in zip(ranks, values):
        top, base = ax.y(max(v, 0.0)), ax.y(min(v, 0.0))
        parts.append(
            f'<rect x="{ax.x(n) - w / 2:.2f}" y="{top:.2f}" width="{w:.2f}" '
            f'height="{base - top:.2f}" fill="{COLORS[0]}"><title>n={n}: {v:.6g}</title></rect>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def sweep_svg(m_values, angle_columns) -> str:
    """Angle trajectories (degrees) against M. ``angle_columns[j]`` holds
    theta_{j+1} per grid point, ``None`` where the solve failed."""
    series = []
    for j, col in enumerate(angle_columns):
        pts = [(m, a) for m, a in zip(m_values, col) if a is not None]
        series.append((f"theta{j + 1}", [m for m, _ in pts], [a for _, a in pts]))
    return svg_lines(series, SWEEP_TITLE, "Modulation index M", "Switching Angles (deg)", ylim=(0.0, 90.0))


def spectrum_svg(ranks, pct) -> str:
    return svg_bars(ranks, pct, SPECTRUM_TITLE, "Harmonic rank n", "Amplitude (% of fundamental)")


def waveform_svg(time, voltage, max_points=4000) -> str:
    stride = max(1, len(time) // max_points)
    t = [1e3 * x for x in time[::stride]]
    v = list(voltage[::stride])
    return svg_lines([("v(t)", t, v)], WAVEFORM_TITLE, "Time (ms)", "Voltage (V)")


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def sweep_png(path, m_values, angle_columns):
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for j, col in enumerate(angle_columns):
        pts = [(m, a) for m, a in zip(m_values, col) if a is not None]
        ax.plot([m for m, _ in pts], [a for _, a in pts], color=COLORS[j % len(COLORS)], lw=2, label=f"$\\theta_{j + 1}$")
    ax.set_ylim(0, 90)
    ax.grid(True)
    ax.set_xlabel("Modulation index M")
    ax.set_ylabel("Switching Angles (°)")
    ax.set_title(SWEEP_TITLE)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def spectrum_png(path, ranks, pct):
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.bar(ranks, pct, width=0.6, color=COLORS[0])
    ax.set_xlabel("Harmonic rank n")
    ax.set_ylabel("Amplitude (% of fundamental)")
    ax.set_title(SPECTRUM_TITLE)
    ax.grid(True, axis="y")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def waveform_png(path, time, voltage):
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.step(1e3 * time, voltage, where="post", color=COLORS[0])
    ax.set_xlabel("Time (ms)")
    ax.set_ylabel("Voltage (V)")
    ax.set_title(WAVEFORM_TITLE)
    ax.grid(True)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
