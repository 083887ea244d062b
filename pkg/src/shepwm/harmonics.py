"""Domain types and analytic Fourier/THD math for quarter-wave symmetric
three-level PWM waveforms.

All angles are in radians. Degrees only show up at the CLI and in files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

HALF_PI = 0.5 * math.pi

#: Default truncation rank for THD and spectra.
DEFAULT_N_MAX = 49


@dataclass(frozen=True)
class SwitchingAngleSet:
    """Ordered quarter-wave switching angles, radians.

    Must satisfy ``0 < theta_1 < ... < theta_p < pi/2``.
    """

    angles: tuple[float, ...]

    def __post_init__(self):
        angles = tuple(float(a) for a in self.angles)
        object.__setattr__(self, "angles", angles)
        if not angles:
            raise ValueError("need at least one switching angle")
        if not all(math.isfinite(a) for a in angles):
            raise ValueError(f"non-finite switching angle in {angles}")
        if not is_valid_ordering(angles):
            raise ValueError(
                "switching angles must satisfy 0 < theta_1 < ... < theta_p < pi/2, "
                f"got {[round(math.degrees(a), 6) for a in angles]} deg"
            )

    @classmethod
    def from_degrees(cls, degrees: Iterable[float]) -> "SwitchingAngleSet":
        return cls(tuple(math.radians(d) for d in degrees))

    @property
    def degrees(self) -> tuple[float, ...]:
        return tuple(math.degrees(a) for a in self.angles)

    @property
    def p(self) -> int:
        return len(self.angles)

    def __len__(self):
        return len(self.angles)

    def __iter__(self):
        return iter(self.angles)

    def __getitem__(self, i):
        return self.angles[i]


def is_valid_ordering(theta: Sequence[float]) -> bool:
    """True if ``0 < theta_1 < ... < theta_p < pi/2`` holds strictly."""
    if len(theta) == 0 or not theta[0] > 0.0 or not theta[-1] < HALF_PI:
        return False
    return all(a < b for a, b in zip(theta, theta[1:]))


def as_angle_set(angles) -> SwitchingAngleSet:
    if isinstance(angles, SwitchingAngleSet):
        return angles
    return SwitchingAngleSet(tuple(angles))


def default_eliminated(p: int) -> tuple[int, ...]:
    """The first ``p - 1`` odd ranks above the fundamental: 3, 5, ..., 2p-1."""
    return tuple(range(3, 2 * p, 2))


@dataclass(frozen=True)
class SheProblem:
    """One SHE system: ``p`` angles, modulation index ``M = b_1 / V`` and the
    ``p - 1`` odd ranks to null. ``eliminated=None`` picks 3, 5, ..., 2p-1."""

    p: int
    M: float
    eliminated: tuple[int, ...] | None = None
    V: float = 1.0

    def __post_init__(self):
        if int(self.p) != self.p or self.p < 1:
            raise ValueError(f"angle count p must be a positive integer, got {self.p!r}")
        object.__setattr__(self, "p", int(self.p))
        if self.eliminated is None:
            eliminated = default_eliminated(self.p)
        else:
            eliminated = tuple(int(n) for n in self.eliminated)
        object.__setattr__(self, "eliminated", eliminated)
        if len(eliminated) != self.p - 1:
            raise ValueError(
                f"p={self.p} needs exactly {self.p - 1} eliminated ranks, got {list(eliminated)}"
            )
        if len(set(eliminated)) != len(eliminated):
            raise ValueError(f"eliminated ranks must be distinct, got {list(eliminated)}")
        for n in eliminated:
            if n < 3 or n % 2 == 0:
                raise ValueError(f"eliminated ranks must be odd and >= 3, got {n}")
        if not (math.isfinite(self.M) and self.M >= 0.0):
            raise ValueError(f"modulation index must be >= 0, got {self.M!r}")
        if not (math.isfinite(self.V) and self.V > 0.0):
            raise ValueError(f"DC amplitude V must be > 0, got {self.V!r}")

    @property
    def ranks(self) -> tuple[int, ...]:
        """Row ranks of the system: the fundamental followed by the eliminated set."""
        return (1,) + self.eliminated


@dataclass(frozen=True)
class HarmonicSpectrum:
    """Sine amplitudes ``b_n`` keyed by rank.

    ``a0`` and ``cosine`` are only populated by numerical spectra, where
    they serve as odd-symmetry diagnostics; analytically they are zero.
    """

    entries: Mapping[int, float]
    a0: float = 0.0
    cosine: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        entries = {int(n): float(b) for n, b in self.entries.items()}
        if 1 not in entries:
            raise ValueError("spectrum needs a fundamental entry at n = 1")
        if any(n < 1 for n in entries):
            raise ValueError("harmonic ranks must be positive")
        object.__setattr__(self, "entries", dict(sorted(entries.items())))

    @property
    def fundamental(self) -> float:
        return self.entries[1]

    @property
    def ranks(self) -> list[int]:
        return list(self.entries)

    def __getitem__(self, n: int) -> float:
        return self.entries[n]

    def get(self, n: int, default: float = 0.0) -> float:
        return self.entries.get(n, default)


def _check_rank(n) -> int:
    if int(n) != n or n < 1 or n % 2 == 0:
        raise ValueError(f"harmonic rank must be a positive odd integer, got {n!r}")
    return int(n)


def alternating_cos_sum(theta: Sequence[float], n: int) -> float:
    """``sum_i (-1)**(i+1) cos(n theta_i)`` with the first term positive,
    accumulated with exact (fsum) summation."""
    return math.fsum(
        math.cos(n * t) if i % 2 == 0 else -math.cos(n * t) for i, t in enumerate(theta)
    )


def evaluate_bn(angles, V: float, n: int) -> float:
    """Sine coefficient of odd rank ``n``: ``4V/(n pi) * sum_i (-1)^(i+1) cos(n theta_i)``."""
    n = _check_rank(n)
    angles = as_angle_set(angles)
    return 4.0 * V / (n * math.pi) * alternating_cos_sum(angles.angles, n)


def fundamental_amplitude(angles, V: float = 1.0) -> float:
    return evaluate_bn(angles, V, 1)


def analytic_spectrum(angles, V: float = 1.0, n_max: int = DEFAULT_N_MAX) -> HarmonicSpectrum:
    """Spectrum for every rank ``1..n_max``; even ranks are exactly zero."""
    if int(n_max) != n_max or n_max < 1:
        raise ValueError(f"n_max must be a positive integer, got {n_max!r}")
    angles = as_angle_set(angles)
    entries = {}
    for n in range(1, int(n_max) + 1):
        entries[n] = evaluate_bn(angles, V, n) if n % 2 else 0.0
    return HarmonicSpectrum(entries)


def thd(spectrum: HarmonicSpectrum, n_max: int = DEFAULT_N_MAX) -> float:
    """Voltage THD ``sqrt(sum_{h=2..n_max} (b_h / b_1)^2)``.

    Ranks missing from ``spectrum`` count as zero. For a resistive load the
    current THD is the same number.
    """
    if int(n_max) != n_max or n_max < 2:
        raise ValueError(f"n_max must be an integer >= 2, got {n_max!r}")
    b1 = spectrum.fundamental
    if b1 == 0.0:
        raise ZeroDivisionError("THD undefined for a zero fundamental (M = 0?)")
    return math.sqrt(
        math.fsum((b / b1) ** 2 for n, b in spectrum.entries.items() if 2 <= n <= n_max)
    )
