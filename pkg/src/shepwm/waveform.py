"""Time-domain three-level SHE waveform and its numerical spectrum.

On the first quarter period the output is 0 on ``(0, theta_1)``, +V on
``(theta_1, theta_2)``, 0 on ``(theta_2, theta_3)`` and so on, alternating up
to ``pi/2``. The second quarter mirrors the first about ``pi/2`` and the
second half period is the negated first half. Integrating
``sin(n theta)`` over these pulses gives exactly
``b_n = 4V/(n pi) * sum_i (-1)^(i+1) cos(n theta_i)`` for odd ``n``, and zero
for even ``n``; that is why this family is used.

Levels are right-continuous in the phase folded onto the first quarter,
which keeps every sample exactly odd and half-wave antisymmetric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .harmonics import HarmonicSpectrum, as_angle_set

TWO_PI = 2.0 * math.pi

DEFAULT_FREQUENCY = 50.0
DEFAULT_SAMPLES = 2**16
ORACLE_SAMPLES = 2**20


class AliasingError(ValueError):
    pass


@dataclass(frozen=True)
class WaveformSpec:
    angles: object
    V: float = 1.0
    fundamental_frequency: float = DEFAULT_FREQUENCY
    samples_per_period: int = DEFAULT_SAMPLES

    def __post_init__(self):
        object.__setattr__(self, "angles", as_angle_set(self.angles))
        n = self.samples_per_period
        if int(n) != n or n < 64 or n % 4:
            raise ValueError(f"samples_per_period must be a multiple of 4 and >= 64, got {n!r}")
        if not self.fundamental_frequency > 0:
            raise ValueError("fundamental_frequency must be > 0")
        if not self.V > 0:
            raise ValueError("V must be > 0")

    @property
    def period(self) -> float:
        return 1.0 / self.fundamental_frequency


@dataclass(frozen=True, eq=False)
class Waveform:
    time: np.ndarray
    voltage: np.ndarray
    V: float
    period: float

    @property
    def samples_per_period(self) -> int:
        return len(self.voltage)

    def rms(self) -> float:
        return float(np.sqrt(np.mean(self.voltage**2)))


def _quarter_level(angles, q):
    # number of switching angles <= q; odd count means the pulse is on
    idx = np.searchsorted(np.asarray(angles.angles), q, side="right")
    return (idx % 2).astype(float)


def level_at(angles, V, theta):
    """Output level (-V, 0 or +V) at phase ``theta`` (radians, any real).

    Accepts scalars or arrays.
    """
    angles = as_angle_set(angles)
    th = np.mod(np.asarray(theta, dtype=float), TWO_PI)
    negative = th >= math.pi
    th = np.where(negative, th - math.pi, th)
    q = np.where(th > 0.5 * math.pi, math.pi - th, th)
    level = V * _quarter_level(angles, q) * np.where(negative, -1.0, 1.0)
    if np.ndim(level) == 0:
        return float(level)
    return level


def synthesize(spec: WaveformSpec) -> Waveform:
    """Sample ``k`` sits at ``t_k = k T / N`` and carries ``level_at(2 pi k / N)``."""
    N = spec.samples_per_period
    k = np.arange(N)
    # fold on the integer grid so symmetry is exact per sample
    negative = k >= N // 2
    kk = np.where(negative, k - N // 2, k)
    kk = np.where(kk > N // 4, N // 2 - kk, kk)
    q = kk * (TWO_PI / N)
    voltage = spec.V * _quarter_level(spec.angles, q) * np.where(negative, -1.0, 1.0)
    time = k * (spec.period / N)
    return Waveform(time=time, voltage=voltage, V=spec.V, period=spec.period)


def numeric_spectrum(waveform: Waveform, n_max: int) -> HarmonicSpectrum:
    """Fourier coefficients of a one-period sampled waveform.

    Each sample stands for the cell of width ``T/N`` centred on it, so
    ``b_n = (2/N) sum_k v_k sin(2 pi n k / N)`` (midpoint rule on the
    periodic grid), evaluated through the FFT. ``a_0`` and ``a_n`` are
    returned as diagnostics in ``HarmonicSpectrum.a0`` / ``.cosine``.
    """
    N = waveform.samples_per_period
    if int(n_max) != n_max or n_max < 1:
        raise ValueError(f"n_max must be a positive integer, got {n_max!r}")
    if n_max >= N / 4:
        raise AliasingError(f"n_max={n_max} too high for {N} samples per period (need n_max < N/4)")
    X = np.fft.rfft(waveform.voltage)
    n = np.arange(1, int(n_max) + 1)
    b = -2.0 / N * X[n].imag
    a = 2.0 / N * X[n].real
    return HarmonicSpectrum(
        entries=dict(zip(n.tolist(), b.tolist())),
        a0=float(X[0].real / N),
        cosine=dict(zip(n.tolist(), a.tolist())),
    )


def nonzero_fraction(angles) -> float:
    """Fraction of the period spent at a nonzero level, from the angles alone."""
    angles = as_angle_set(angles)
    edges = list(angles.angles) + [0.5 * math.pi]
    on = math.fsum(edges[i + 1] - edges[i] for i in range(0, len(angles), 2))
    return on / (0.5 * math.pi)
