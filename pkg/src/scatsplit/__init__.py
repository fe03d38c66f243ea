"""scatsplit: splitting 1D scattering states into transmission and reflection
sub-processes, with the characteristic times each sub-process defines.

Units: hbar = m = 1 throughout; a wavenumber k carries energy E = k^2/2.
"""

from .errors import (
    BranchAmbiguityError,
    ConfigError,
    ConvergenceError,
    DomainError,
    GridRefinementError,
    ScatsplitError,
    ToleranceError,
    UndefinedTimeError,
    WindowError,
)
from .potentials import (
    BarrierSpec,
    make_rectangular,
    make_symmetric,
    potential_at,
    shifted,
)
from .stationary import (
    ScatteringSolution,
    SegmentWave,
    evaluate_full,
    evaluate_full_deriv,
    probability_current,
    solve_family,
    solve_stationary,
)
from .decomposition import (
    Decomposition,
    MaskedSubstates,
    candidates,
    decompose,
    evaluate_ref,
    evaluate_tr,
    masked_substates,
    select_odd_branch,
)
from .wavepacket import (
    KGridSpec,
    PacketSnapshot,
    SpectralPacket,
    check_kgrid,
    default_kgrid,
    event_window,
    make_gaussian_packet,
    norms_and_overlap,
    quiet_times,
    snapshot,
    snapshot_residuals,
    spectral_transmitted_norm,
    synthesize,
)
from .times import (
    PhaseTimes,
    TimeReport,
    build_time_report,
    dwell_tables,
    dwell_time_ref,
    dwell_time_tr,
    hartman_scan,
    larmor_time_routeA,
    larmor_time_routeB,
    phase_time,
    routeB_variants,
)
from .larmor import (
    ClockResult,
    SpinScatteringRun,
    clock_times,
    default_omega,
    make_spin_run,
    spin_resolved_amplitudes,
)
from .oracle import (
    CrankNicolson,
    GridSpec,
    crank_nicolson_evolve,
    numerov_solve,
)

__version__ = "0.1.0"

__all__ = [
    "BarrierSpec",
    "BranchAmbiguityError",
    "ClockResult",
    "ConfigError",
    "ConvergenceError",
    "CrankNicolson",
    "Decomposition",
    "DomainError",
    "GridRefinementError",
    "GridSpec",
    "KGridSpec",
    "MaskedSubstates",
    "PacketSnapshot",
    "PhaseTimes",
    "ScatsplitError",
    "ScatteringSolution",
    "SegmentWave",
    "SpectralPacket",
    "SpinScatteringRun",
    "TimeReport",
    "ToleranceError",
    "UndefinedTimeError",
    "WindowError",
    "build_time_report",
    "candidates",
    "check_kgrid",
    "clock_times",
    "crank_nicolson_evolve",
    "decompose",
    "default_kgrid",
    "default_omega",
    "dwell_tables",
    "dwell_time_ref",
    "dwell_time_tr",
    "evaluate_full",
    "evaluate_full_deriv",
    "evaluate_ref",
    "evaluate_tr",
    "event_window",
    "hartman_scan",
    "larmor_time_routeA",
    "larmor_time_routeB",
    "make_gaussian_packet",
    "make_rectangular",
    "make_spin_run",
    "make_symmetric",
    "masked_substates",
    "norms_and_overlap",
    "numerov_solve",
    "phase_time",
    "potential_at",
    "probability_current",
    "quiet_times",
    "routeB_variants",
    "select_odd_branch",
    "shifted",
    "snapshot",
    "snapshot_residuals",
    "solve_family",
    "solve_stationary",
    "spectral_transmitted_norm",
    "spin_resolved_amplitudes",
    "synthesize",
]
