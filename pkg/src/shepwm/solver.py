"""Newton-Raphson solution of the selective harmonic elimination system.

Row ``i`` of the system is ``sum_j (-1)^(j+1) cos(n_i theta_j) = T_i`` with
``n_1 = 1`` and ``T = (M pi / 4, 0, ..., 0)``. Each Newton step solves
``J dtheta = T - F`` by Gaussian elimination; the iteration stops once
``max |dtheta| < tolerance`` after the update has been applied.

Several solution branches can exist. Newton returns whichever one it
reaches from the starting guess, so no uniqueness is claimed.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

from .harmonics import (
    SheProblem,
    SwitchingAngleSet,
    alternating_cos_sum,
    is_valid_ordering,
)

log = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-15
DEFAULT_MAX_ITERATIONS = 100
PIVOT_THRESHOLD = 1e-12

# Preset starting point for three angles (degrees).
_P3_PRESET_DEG = (35.0, 55.0, 80.0)


class SingularJacobianError(ArithmeticError):
    """Raised when elimination meets a pivot below ``PIVOT_THRESHOLD``."""

    def __init__(self, message, theta=None):
        super().__init__(message)
        self.theta = None if theta is None else tuple(theta)


@dataclass(frozen=True)
class SolverConfig:
    tolerance: float = DEFAULT_TOLERANCE
    max_iterations: int = DEFAULT_MAX_ITERATIONS
    initial_guess: SwitchingAngleSet | None = None

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError(f"tolerance must be > 0, got {self.tolerance!r}")
        if int(self.max_iterations) != self.max_iterations or self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations!r}")


@dataclass(frozen=True)
class SolveResult:
    """Outcome of one Newton solve.

    ``theta`` is the raw final iterate. It only forms a valid
    :class:`SwitchingAngleSet` when ``ordering_valid`` holds, see ``angles``.
    """

    theta: tuple[float, ...]
    iterations: int
    final_step_norm: float
    residual_norm: float
    converged: bool
    ordering_valid: bool
    step_norms: tuple[float, ...] = field(default=(), repr=False)

    @property
    def ok(self) -> bool:
        return self.converged and self.ordering_valid

    @property
    def angles(self) -> SwitchingAngleSet:
        return SwitchingAngleSet(self.theta)

    @property
    def degrees(self) -> tuple[float, ...]:
        return tuple(math.degrees(t) for t in self.theta)


@dataclass(frozen=True)
class SweepResult:
    grid: list[tuple[float, SolveResult | None]]
    strategy: str = "paper"

    @property
    def m_values(self) -> list[float]:
        return [m for m, _ in self.grid]

    def converged_fraction(self) -> float:
        good = sum(1 for _, r in self.grid if r is not None and r.ok)
        return good / len(self.grid)


def _check_dim(theta, problem):
    if len(theta) != problem.p:
        raise ValueError(f"expected {problem.p} angles, got {len(theta)}")


def target_vector(problem: SheProblem) -> tuple[float, ...]:
    return (problem.M * math.pi / 4.0,) + (0.0,) * (problem.p - 1)


def residual(theta: Sequence[float], problem: SheProblem) -> tuple[float, ...]:
    """Left-hand side F(theta); ordering of ``theta`` is not enforced."""
    _check_dim(theta, problem)
    return tuple(alternating_cos_sum(theta, n) for n in problem.ranks)


def jacobian(theta: Sequence[float], problem: SheProblem) -> list[list[float]]:
    """dF_i/dtheta_j = (-1)^j n_i sin(n_i theta_j), j counted from 1:
    columns run -sin, +sin, -sin, ..."""
    _check_dim(theta, problem)
    return [
        [(n * math.sin(n * t) if j % 2 else -n * math.sin(n * t)) for j, t in enumerate(theta)]
        for n in problem.ranks
    ]


def solve_linear(a: Sequence[Sequence[float]], b: Sequence[float]) -> list[float]:
    """Solve ``a x = b`` by Gaussian elimination with partial pivoting.

    Raises SingularJacobianError when the best available pivot is below
    ``PIVOT_THRESHOLD`` in magnitude.
    """
    n = len(b)
    m = [list(map(float, row)) + [float(bi)] for row, bi in zip(a, b)]
    if len(m) != n or any(len(row) != n + 1 for row in m):
        raise ValueError("matrix must be square and match the right-hand side")
    for k in range(n):
        piv = max(range(k, n), key=lambda r: abs(m[r][k]))
        if not abs(m[piv][k]) >= PIVOT_THRESHOLD:
            raise SingularJacobianError(
                f"pivot {m[piv][k]:.3e} in column {k} below {PIVOT_THRESHOLD:g}"
            )
        if piv != k:
            m[k], m[piv] = m[piv], m[k]
        row_k = m[k]
        for r in range(k + 1, n):
            lam = m[r][k] / row_k[k]
            if lam != 0.0:
                row_r = m[r]
                for c in range(k, n + 1):
                    row_r[c] -= lam * row_k[c]
    x = [0.0] * n
    for k in range(n - 1, -1, -1):
        acc = m[k][n] - math.fsum(m[k][c] * x[c] for c in range(k + 1, n))
        x[k] = acc / m[k][k]
    return x


def newton_step(theta: Sequence[float], problem: SheProblem) -> list[float]:
    """One Newton correction ``dtheta`` solving ``J dtheta = T - F``."""
    F = residual(theta, problem)
    T = target_vector(problem)
    rhs = [t - f for t, f in zip(T, F)]
    try:
        return solve_linear(jacobian(theta, problem), rhs)
    except SingularJacobianError as exc:
        raise SingularJacobianError(str(exc), theta) from None


def default_initial_guess(p: int) -> tuple[float, ...]:
    """Preset (35, 55, 80) deg for p = 3, otherwise i * 90/(p+1) deg."""
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    if p == 3:
        return tuple(math.radians(d) for d in _P3_PRESET_DEG)
    return tuple(math.radians(i * 90.0 / (p + 1)) for i in range(1, p + 1))


def _residual_norm(theta, problem):
    return max(abs(t - f) for t, f in zip(target_vector(problem), residual(theta, problem)))


def newton_solve(
    problem: SheProblem,
    config: SolverConfig | None = None,
    guess: Sequence[float] | None = None,
) -> SolveResult:
    """Iterate ``theta <- theta + dtheta`` until the step max-norm drops
    below ``config.tolerance`` or ``config.max_iterations`` is reached.

    Iterates are neither clamped nor projected; the ordering constraint is
    checked once on the final iterate. ``guess`` overrides
    ``config.initial_guess``, which overrides :func:`default_initial_guess`.
    """
    config = config or SolverConfig()
    if guess is None:
        guess = config.initial_guess
    if guess is None:
        theta = list(default_initial_guess(problem.p))
    else:
        theta = [float(t) for t in guess]
    _check_dim(theta, problem)

    steps = []
    converged = False
    step_norm = math.inf
    for _ in range(config.max_iterations):
        d = newton_step(theta, problem)
        theta = [t + dt for t, dt in zip(theta, d)]
        step_norm = max(abs(dt) for dt in d)
        steps.append(step_norm)
        if not math.isfinite(step_norm):
            break
        if step_norm < config.tolerance:
            converged = True
            break
    if not converged:
        log.debug("no convergence for %s after %d steps (last step %.3e)", problem, len(steps), step_norm)
    return SolveResult(
        theta=tuple(theta),
        iterations=len(steps),
        final_step_norm=step_norm,
        residual_norm=_residual_norm(theta, problem),
        converged=converged,
        ordering_valid=is_valid_ordering(theta),
        step_norms=tuple(steps),
    )


def sweep_grid(m_max: float, step: float) -> list[float]:
    """Uniform grid 0, step, 2 step, ... <= m_max (rounded to 12 decimals)."""
    if not step > 0:
        raise ValueError(f"step must be > 0, got {step!r}")
    if not m_max >= 0:
        raise ValueError(f"m_max must be >= 0, got {m_max!r}")
    count = int(math.floor(m_max / step + 1e-9)) + 1
    return [round(k * step, 12) for k in range(count)]


def sweep(
    p: int,
    m_max: float,
    step: float,
    eliminated: Sequence[int] | None = None,
    config: SolverConfig | None = None,
    strategy: str = "paper",
    V: float = 1.0,
) -> SweepResult:
    """Solve on the grid ``M = 0, step, ..., m_max``.

    ``paper`` restarts every point from the configured (or default) guess.
    ``warm`` starts from the previous valid solution. Failed points are kept
    in the result: a singular Jacobian is recorded as ``None``.
    """
    if strategy not in ("paper", "warm"):
        raise ValueError(f"unknown sweep strategy {strategy!r}")
    config = config or SolverConfig()
    eliminated = None if eliminated is None else tuple(eliminated)
    grid = []
    previous = None
    for m in sweep_grid(m_max, step):
        problem = SheProblem(p, m, eliminated, V)
        guess = previous if strategy == "warm" else None
        try:
            result = newton_solve(problem, config, guess=guess)
        except SingularJacobianError as exc:
            log.debug("M=%g: %s", m, exc)
            result = None
        if result is not None and result.ok:
            previous = result.theta
        grid.append((m, result))
    return SweepResult(grid, strategy)
