"""Selective harmonic elimination PWM for a single-phase H-bridge: Newton-Raphson
switching-angle solver, harmonic/THD analysis and gate-schedule export."""

__version__ = "0.1.0"

from .harmonics import (  # noqa: E402
    HarmonicSpectrum,
    SheProblem,
    SwitchingAngleSet,
    analytic_spectrum,
    evaluate_bn,
    fundamental_amplitude,
    thd,
)
from .solver import (  # noqa: E402
    SingularJacobianError,
    SolveResult,
    SolverConfig,
    SweepResult,
    default_initial_guess,
    jacobian,
    newton_solve,
    newton_step,
    residual,
    sweep,
    target_vector,
)
from .waveform import Waveform, WaveformSpec, level_at, numeric_spectrum, synthesize  # noqa: E402
from .gates import BridgeState, GateSchedule, build_schedule, export_csv, export_timer_table  # noqa: E402
