"""Independent reference computations used as test oracles.

Nothing here imports the package; each routine recomputes its quantity
from first principles.
"""

import math

import mpmath
import numpy as np


def bn_mp(angles_rad, V, n, dps=40):
    """b_n of the three-level waveform in extended precision."""
    with mpmath.workdps(dps):
        s = mpmath.fsum(
            (1 if i % 2 == 0 else -1) * mpmath.cos(n * mpmath.mpf(a)) for i, a in enumerate(angles_rad)
        )
        return float(4 * mpmath.mpf(V) / (n * mpmath.pi) * s)


def bn_by_pulse_integration(angles_rad, V, n):
    """b_n = (2/T) int U sin(n w t) dt evaluated pulse by pulse, closed form.

    Pulses in the first half period are (theta_i, theta_{i+1}) for odd i with
    theta_{p+1} = pi/2, plus their mirror images about pi/2; the second half
    is the negation, which doubles the integral for odd n.
    """
    edges = list(angles_rad) + [math.pi / 2]
    total = 0.0
    for i in range(0, len(angles_rad), 2):
        a, b = edges[i], edges[i + 1]
        for lo, hi in ((a, b), (math.pi - b, math.pi - a)):
            total += (math.cos(n * lo) - math.cos(n * hi)) / n
    half = V * total
    second = half if n % 2 else -half
    return (half + second) / math.pi


def brute_force_p2(M, resolution_deg=0.01, ranks=(1, 3)):
    """Grid search over 0 < theta_1 < theta_2 < 90 deg minimising ||F - T||_2."""
    grid = np.arange(1, int(round(90 / resolution_deg))) * resolution_deg
    rad = np.radians(grid)
    c1 = np.cos(ranks[0] * rad)
    c3 = np.cos(ranks[1] * rad)
    target = M * math.pi / 4
    best = (math.inf, None, None)
    chunk = 500
    for start in range(0, len(grid), chunk):
        i = slice(start, start + chunk)
        r1 = c1[i, None] - c1[None, :] - target
        r2 = c3[i, None] - c3[None, :]
        cost = r1 * r1 + r2 * r2
        rows = np.arange(start, min(start + chunk, len(grid)))
        cost[rows[:, None] >= np.arange(len(grid))[None, :]] = np.inf
        k = int(np.argmin(cost))
        a, b = divmod(k, len(grid))
        if cost.flat[k] < best[0]:
            best = (float(cost.flat[k]), grid[start + a], grid[b])
    return best[1], best[2], best[0]


def p2_feasible_bruteforce(M, resolution_deg=0.01):
    """True if some ordered pair on the grid nearly satisfies the p=2 system."""
    _, _, cost = brute_force_p2(M, resolution_deg)
    return cost < 1e-6


def cramer2(a, b):
    det = a[0][0] * a[1][1] - a[0][1] * a[1][0]
    return ((b[0] * a[1][1] - a[0][1] * b[1]) / det, (a[0][0] * b[1] - a[1][0] * b[0]) / det)


def level_by_pulses(angles_rad, V, phase):
    """Independent three-level waveform: +V inside the positive pulses of the
    first half, -V inside their shifted copies, 0 elsewhere (open intervals)."""
    phase = phase % (2 * math.pi)
    edges = list(angles_rad) + [math.pi / 2]
    sign = 1.0
    if phase >= math.pi:
        phase -= math.pi
        sign = -1.0
    for i in range(0, len(angles_rad), 2):
        a, b = edges[i], edges[i + 1]
        if a < phase < b or math.pi - b < phase < math.pi - a or (b == math.pi / 2 and phase == b):
            return sign * V
    return 0.0


def count_transitions(angles_rad, samples=200_000):
    """Level changes around one period of the independent level function,
    on a grid offset so no sample sits on an edge."""
    ph = (np.arange(samples) + 0.37) * (2 * math.pi / samples)
    lv = np.array([level_by_pulses(angles_rad, 1.0, x) for x in ph])
    return int(np.count_nonzero(lv != np.roll(lv, 1)))


def square_wave_thd(n_max):
    """THD of b_n = 4V/(n pi), odd n: b_n / b_1 = 1/n."""
    return math.sqrt(sum(1.0 / n**2 for n in range(3, n_max + 1, 2)))
