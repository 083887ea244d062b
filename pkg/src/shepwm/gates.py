"""Gate timing for the four-switch H-bridge.

Switch naming: S1 top-left, S2 bottom-left, S3 top-right, S4 bottom-right,
with the load between the two leg midpoints. With ideal switches the output
is +V when S1 and S4 conduct, -V when S2 and S3 conduct, and 0 otherwise.

Zero output is produced by the top pair (S1+S3) in the positive half period
and by the bottom pair (S2+S4) in the negative half. Every commanded state
change at nominal time ``t`` becomes a dead-time window
``[t - dead_time/2, t + dead_time/2)``. Inside the window only the switches
that are on both before and after stay on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .harmonics import SwitchingAngleSet, as_angle_set, fundamental_amplitude
from .waveform import TWO_PI, Waveform, level_at

DEFAULT_DEAD_TIME = 1e-6
DEFAULT_TICK_FREQUENCY = 16e6


class DeadTimeError(ValueError):
    pass


class BridgeState(NamedTuple):
    s1: bool
    s2: bool
    s3: bool
    s4: bool

    @property
    def level(self) -> int:
        """Ideal-bridge output in units of V."""
        if self.s1 and self.s4:
            return 1
        if self.s2 and self.s3:
            return -1
        return 0

    @property
    def shoot_through(self) -> bool:
        return (self.s1 and self.s2) or (self.s3 and self.s4)

    @property
    def mask(self) -> int:
        """Bit 0 = S1 ... bit 3 = S4."""
        return self.s1 | self.s2 << 1 | self.s3 << 2 | self.s4 << 3

    def __and__(self, other):
        return BridgeState(*(a and b for a, b in zip(self, other)))


POSITIVE = BridgeState(True, False, False, True)
NEGATIVE = BridgeState(False, True, True, False)
TOP_FREEWHEEL = BridgeState(True, False, True, False)
BOTTOM_FREEWHEEL = BridgeState(False, True, False, True)


@dataclass(frozen=True)
class GateSchedule:
    """Time-ordered ``(time, state)`` events over one period.

    Each state holds until the next event; the last one wraps around to
    ``period``. The first event is always at ``t = 0``.
    """

    events: tuple[tuple[float, BridgeState], ...]
    period: float
    dead_time: float
    angles: SwitchingAngleSet

    @property
    def times(self) -> np.ndarray:
        return np.array([t for t, _ in self.events])

    @property
    def states(self) -> list[BridgeState]:
        return [s for _, s in self.events]

    def durations(self) -> list[float]:
        times = [t for t, _ in self.events] + [self.period]
        return [b - a for a, b in zip(times, times[1:])]

    def state_at(self, t):
        """Index into ``events`` of the state active at time(s) ``t``."""
        tt = np.mod(np.asarray(t, dtype=float), self.period)
        return np.searchsorted(self.times, tt, side="right") - 1

    def level_at_time(self, t):
        levels = np.array([s.level for s in self.states], dtype=float)
        return levels[self.state_at(t)]

    def time_at_level(self, level: int) -> float:
        return math.fsum(d for d, s in zip(self.durations(), self.states) if s.level == level)


def _commanded_segments(angles: SwitchingAngleSet):
    """Circular list of ``(start_phase, state)`` with equal neighbours merged."""
    th = angles.angles
    half = 0.5 * math.pi
    cuts = {0.0, half, math.pi, 1.5 * math.pi}
    for a in th:
        cuts.update((a, math.pi - a, math.pi + a, TWO_PI - a))
    cuts = sorted(cuts)
    bounds = cuts + [TWO_PI]
    segments = []
    for start, end in zip(bounds, bounds[1:]):
        mid = 0.5 * (start + end)
        level = level_at(angles, 1.0, mid)
        if level > 0:
            state = POSITIVE
        elif level < 0:
            state = NEGATIVE
        else:
            state = TOP_FREEWHEEL if mid < math.pi else BOTTOM_FREEWHEEL
        if segments and segments[-1][1] == state:
            continue
        segments.append((start, state))
    return segments


def build_schedule(
    angles,
    frequency: float = 50.0,
    dead_time: float = DEFAULT_DEAD_TIME,
) -> GateSchedule:
    """Gate events reproducing the three-level waveform of ``angles``.

    Raises DeadTimeError if ``dead_time`` does not fit strictly inside the
    narrowest commanded interval.
    """
    angles = as_angle_set(angles)
    if not frequency > 0:
        raise ValueError("frequency must be > 0")
    if not dead_time >= 0:
        raise ValueError("dead_time must be >= 0")
    period = 1.0 / frequency
    segments = _commanded_segments(angles)
    # the first segment always starts at 0; its change from the wrapped last
    # state is a real commutation
    change_times = [phase / TWO_PI * period for phase, _ in segments]
    n = len(segments)
    for i in range(n):
        start = change_times[i]
        end = change_times[i + 1] if i + 1 < n else period
        if dead_time > 0 and not end - start > dead_time:
            raise DeadTimeError(
                f"dead time {dead_time:g} s does not fit the interval "
                f"[{start:.9f}, {end:.9f}] s "
                f"({start / period * 360:.4f} to {end / period * 360:.4f} deg)"
            )

    if dead_time == 0:
        events = [(t, s) for t, (_, s) in zip(change_times, segments)]
    else:
        half = 0.5 * dead_time
        events = []
        for i, (t, (_, state)) in enumerate(zip(change_times, segments)):
            prev_state = segments[i - 1][1]
            off_t = t - half if i else period - half
            events.append((off_t, prev_state & state))
            events.append((t + half, state))
        # the window around t = 0 straddles the origin
        events.append((0.0, events[0][1]))
        events.sort(key=lambda e: e[0])
    return GateSchedule(tuple(events), period, dead_time, angles)


def export_csv(schedule: GateSchedule) -> bytes:
    """``time_s,s1,s2,s3,s4`` with one row per event, LF line endings."""
    lines = ["time_s,s1,s2,s3,s4"]
    for t, s in schedule.events:
        lines.append(f"{t:.9f},{s.s1:d},{s.s2:d},{s.s3:d},{s.s4:d}")
    return ("\n".join(lines) + "\n").encode("utf-8")


@dataclass(frozen=True)
class TimerTable:
    """Per-state durations in timer ticks plus the switch mask for each state."""

    ticks: tuple[int, ...]
    masks: tuple[int, ...]
    tick_frequency: float
    period_ticks: int

    def to_schedule(self, template: GateSchedule) -> GateSchedule:
        """De-quantized schedule with the same states as ``template``."""
        starts = np.concatenate([[0], np.cumsum(self.ticks[:-1])])
        events = tuple(
            (int(k) / self.tick_frequency, s) for k, s in zip(starts, template.states)
        )
        return GateSchedule(events, template.period, template.dead_time, template.angles)


def quantize(schedule: GateSchedule, tick_frequency: float = DEFAULT_TICK_FREQUENCY) -> TimerTable:
    """Round every event time to the nearest tick.

    Rounding absolute times (not durations) keeps the period exact.
    """
    if not tick_frequency > 0:
        raise ValueError("tick_frequency must be > 0")
    if schedule.dead_time > 0 and tick_frequency * schedule.dead_time < 2:
        raise DeadTimeError(
            f"tick {1 / tick_frequency:g} s too coarse for dead time {schedule.dead_time:g} s "
            "(need at least 2 ticks)"
        )
    period_ticks = int(math.floor(schedule.period * tick_frequency + 0.5))
    starts = [int(math.floor(t * tick_frequency + 0.5)) for t, _ in schedule.events]
    bounds = starts + [period_ticks]
    ticks = tuple(b - a for a, b in zip(bounds, bounds[1:]))
    for i, d in enumerate(ticks):
        if d < 1:
            t = schedule.events[i][0]
            raise DeadTimeError(f"state at t={t:.9f} s vanishes at {tick_frequency:g} Hz tick rate")
    masks = tuple(s.mask for s in schedule.states)
    return TimerTable(ticks, masks, float(tick_frequency), period_ticks)


def export_timer_table(
    schedule: GateSchedule,
    tick_frequency: float = DEFAULT_TICK_FREQUENCY,
    guard: str = "SHEPWM_GATE_TABLE_H",
) -> bytes:
    """C header with ``ticks[]`` (state durations) and ``mask[]`` arrays."""
    table = quantize(schedule, tick_frequency)
    degs = ",".join(f"{d:.6f}" for d in schedule.angles.degrees)
    m = fundamental_amplitude(schedule.angles, 1.0)
    f = 1.0 / schedule.period
    lines = [
        f"/* shepwm gate table: angles_deg={degs} M={m:.6f} f={f:g}Hz "
        f"dead_time={schedule.dead_time:g}s tick={tick_frequency:g}Hz */",
        f"#ifndef {guard}",
        f"#define {guard}",
        "",
        "#include <stdint.h>",
        "",
        f"#define SHEPWM_N_STATES {len(table.ticks)}u",
        f"#define SHEPWM_PERIOD_TICKS {table.period_ticks}u",
        "",
        "/* mask bits: bit0=S1 bit1=S2 bit2=S3 bit3=S4 */",
        "static const uint32_t ticks[SHEPWM_N_STATES] = {",
        *_c_rows(table.ticks),
        "};",
        "static const uint8_t mask[SHEPWM_N_STATES] = {",
        *_c_rows(table.masks, fmt="0x{:X}"),
        "};",
        "",
        f"#endif /* {guard} */",
    ]
    return ("\n".join(lines) + "\n").encode("ascii")


def _c_rows(values, fmt="{}", per_line=8):
    items = [fmt.format(v) for v in values]
    return [
        "    " + ", ".join(items[i : i + per_line]) + ("," if i + per_line < len(items) else "")
        for i in range(0, len(items), per_line)
    ]


def replay(schedule: GateSchedule, samples_per_period: int, V: float = 1.0) -> Waveform:
    """Sample the ideal-bridge output of ``schedule`` on a uniform grid."""
    N = samples_per_period
    time = np.arange(N) * (schedule.period / N)
    voltage = V * schedule.level_at_time(time)
    return Waveform(time=time, voltage=voltage, V=V, period=schedule.period)
