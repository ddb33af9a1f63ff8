"""Time-dependent Schroedinger propagation and scattering matrices.

The integrator is an adaptive embedded Runge-Kutta 5(4) pair (see
``_rk``) run either directly in the diabatic frame or, by default, in
the interaction frame where the time-quadratic diagonal phases are
removed analytically.  Amplitude moduli are identical in both frames;
only phases differ, and only moduli enter transition probabilities.

The scattering matrix is assembled column by column: column n' holds
the final amplitudes for the propagation that started in basis state
n'.  Columns are independent initial-value problems and may be run on
worker threads (the kernel releases the GIL).  The reported S is the
raw propagator of the configured frame; in the interaction frame the
two differ from the diabatic S only by diagonal phase factors at the
window ends, which drop out of P.
"""

from __future__ import annotations

import dataclasses
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _rk
from .errors import NormDrift, NotConverged, StepUnderflow, UnitarityViolation
from .model import MlzModel, find_crossings

#: Allowed deviation of an initial state from unit norm.
UNIT_NORM_TOL = 1e-12
#: Norm drift at which a propagation is aborted as failed.
NORM_DRIFT_LIMIT = 1e-5
#: S-matrix unitarity deviation at which assembly fails.
UNITARITY_LIMIT = 1e-5
#: Window growth factor used by :func:`converged_probabilities`.
WINDOW_GROWTH = 1.25
#: Truncation estimate above which :func:`converged_probabilities` fails.
CONVERGENCE_LIMIT = 1e-2

FRAMES = ("diabatic", "interaction")


@dataclass(frozen=True)
class StateVector:
    """Diabatic-basis amplitudes at a given time."""

    amplitudes: np.ndarray
    time: float

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128).copy()
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class IntegratorConfig:
    """Adaptive step control settings and the integration window.

    ``max_step`` caps the step size inside the crossing cluster
    (|t| below ten times the latest crossing time); outside, the
    controller is free to grow the step.
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_step: float = 0.1
    frame: str = "interaction"
    t_start: float = -1000.0
    t_end: float = 1000.0

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_step <= 0:
            raise ValueError("max_step must be positive")
        if not self.t_start < self.t_end:
            raise ValueError(f"need t_start < t_end, got [{self.t_start}, {self.t_end}]")
        if self.frame not in FRAMES:
            raise ValueError(f"frame must be one of {FRAMES}, got {self.frame!r}")


@dataclass(frozen=True)
class IntegratorStats:
    """Bookkeeping from one or more adaptive integrations."""

    accepted: int
    rejected: int
    error_estimate: float
    max_norm_drift: float


@dataclass(frozen=True)
class ScatteringResult:
    """Scattering matrix S and transition probabilities P.

    ``p_matrix[i, f]`` is the probability to end in state ``f`` having
    started in state ``i`` (rows are initial states): |S[f, i]|^2.
    """

    s_matrix: np.ndarray
    p_matrix: np.ndarray
    t_start: float
    t_end: float
    integrator_stats: IntegratorStats

    def __post_init__(self):
        for name in ("s_matrix", "p_matrix"):
            arr = np.asarray(getattr(self, name))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def unitarity_deviation(self) -> float:
        s = self.s_matrix
        return float(np.abs(s.conj().T @ s - np.eye(s.shape[0])).max())


def _pair_arrays(model: MlzModel) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Upper-triangle nonzero couplings as flat index/value arrays."""
    rows, cols, gvals = [], [], []
    for a in range(model.n_states):
        for b in range(a + 1, model.n_states):
            g = model.couplings[a, b]
            if g != 0:
                rows.append(a)
                cols.append(b)
                gvals.append(g)
    return (
        np.asarray(rows, dtype=np.int64),
        np.asarray(cols, dtype=np.int64),
        np.asarray(gvals, dtype=np.complex128),
    )


def _cluster_radius(model: MlzModel) -> float:
    times = [abs(ev.time) for ev in find_crossings(model)]
    return 10.0 * max(times) if times else 0.0


def _evolve(model: MlzModel, y0: np.ndarray, config: IntegratorConfig,
            t_start: float, t_end: float) -> tuple[np.ndarray, IntegratorStats]:
    """Run the kernel and translate its status codes into exceptions."""
    rows, cols, gvals = _pair_arrays(model)
    y, status, accepted, rejected, err_accum, drift = _rk.evolve(
        np.ascontiguousarray(y0, dtype=np.complex128),
        float(t_start),
        float(t_end),
        model.slopes,
        model.offsets,
        rows,
        cols,
        gvals,
        0 if config.frame == "diabatic" else 1,
        config.abs_tol,
        config.rel_tol,
        config.max_step,
        _cluster_radius(model),
        NORM_DRIFT_LIMIT,
    )
    if status == _rk.STATUS_UNDERFLOW:
        raise StepUnderflow(
            f"step fell below 1e-12 of the window [{t_start}, {t_end}]; "
            f"check tolerances"
        )
    if status == _rk.STATUS_NORM_DRIFT:
        raise NormDrift(
            f"state norm drifted by {drift:.3e} (limit {NORM_DRIFT_LIMIT:.0e})"
        )
    stats = IntegratorStats(
        accepted=int(accepted),
        rejected=int(rejected),
        error_estimate=float(err_accum),
        max_norm_drift=float(drift),
    )
    return y, stats


def _diagonal_phases(model: MlzModel, t: float) -> np.ndarray:
    """Accumulated phase of the uncoupled diagonal evolution at time t."""
    return 0.5 * model.slopes * t * t + model.offsets * t


def propagate(model: MlzModel, initial: StateVector,
              config: IntegratorConfig) -> StateVector:
    """Solve i dpsi/dt = H(t) psi from config.t_start to config.t_end.

    ``initial`` holds diabatic amplitudes at ``config.t_start`` and must
    be normalized.  The returned state is again in the diabatic
    representation regardless of the integration frame.
    """
    psi0 = np.asarray(initial.amplitudes, dtype=np.complex128)
    if psi0.shape != (model.n_states,):
        raise ValueError(
            f"initial state must have {model.n_states} amplitudes, got {psi0.shape}"
        )
    if abs(np.linalg.norm(psi0) - 1.0) > UNIT_NORM_TOL:
        raise ValueError(f"initial state norm {np.linalg.norm(psi0)} is not 1")
    if config.frame == "interaction":
        y0 = psi0 * np.exp(1j * _diagonal_phases(model, config.t_start))
    else:
        y0 = psi0.copy()
    y, _ = _evolve(model, y0.reshape(-1, 1), config, config.t_start, config.t_end)
    psi = y[:, 0]
    if config.frame == "interaction":
        psi = psi * np.exp(-1j * _diagonal_phases(model, config.t_end))
    return StateVector(amplitudes=psi, time=config.t_end)


def _column(model, config, n, t_start, t_end):
    y0 = np.zeros((model.n_states, 1), dtype=np.complex128)
    y0[n, 0] = 1.0
    return _evolve(model, y0, config, t_start, t_end)


def scattering_matrix(model: MlzModel, config: IntegratorConfig,
                      jobs: int | None = None) -> ScatteringResult:
    """Propagate every basis state over the window and assemble S and P.

    Each column is an independent propagation; with ``jobs`` > 1 they
    run on that many worker threads.  Raises
    :class:`UnitarityViolation` if S deviates from unitarity beyond
    1e-5 (at default tolerances the deviation is orders of magnitude
    smaller).
    """
    n = model.n_states
    if jobs is not None and jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(
                pool.map(
                    lambda c: _column(model, config, c, config.t_start, config.t_end),
                    range(n),
                )
            )
    else:
        results = [_column(model, config, c, config.t_start, config.t_end)
                   for c in range(n)]
    s = np.empty((n, n), dtype=np.complex128)
    for c, (y, _) in enumerate(results):
        s[:, c] = y[:, 0]
    stats = IntegratorStats(
        accepted=sum(r[1].accepted for r in results),
        rejected=sum(r[1].rejected for r in results),
        error_estimate=max(r[1].error_estimate for r in results),
        max_norm_drift=max(r[1].max_norm_drift for r in results),
    )
    result = ScatteringResult(
        s_matrix=s,
        p_matrix=(np.abs(s) ** 2).T,
        t_start=config.t_start,
        t_end=config.t_end,
        integrator_stats=stats,
    )
    dev = result.unitarity_deviation()
    if dev > UNITARITY_LIMIT:
        raise UnitarityViolation(
            f"S deviates from unitarity by {dev:.3e} (limit {UNITARITY_LIMIT:.0e})"
        )
    return result


@dataclass(frozen=True)
class ConvergedProbabilities:
    """P at the largest of three nested windows plus a truncation estimate.

    ``truncation_estimate`` is the largest entrywise change between
    successive windows; it bounds how much the finite window still moves
    the probabilities.
    """

    p_matrix: np.ndarray
    truncation_estimate: float
    windows: tuple[float, float, float]
    scattering: ScatteringResult


def converged_probabilities(model: MlzModel, base_window: float,
                            config: IntegratorConfig,
                            jobs: int | None = None) -> ConvergedProbabilities:
    """Compute P on windows [-T, T] for T = base, 1.25 base, 1.5625 base.

    ``base_window`` must exceed ten times the latest crossing time so
    all transitions lie well inside every window.  Raises
    :class:`NotConverged` if the estimate exceeds 1e-2.
    """
    radius = _cluster_radius(model)
    if not base_window > radius:
        raise ValueError(
            f"base_window {base_window} must exceed 10x the largest crossing "
            f"time ({radius / 10.0 if radius else 0.0})"
        )
    windows = (base_window, base_window * WINDOW_GROWTH,
               base_window * WINDOW_GROWTH ** 2)
    matrices = []
    last = None
    for t_win in windows:
        run_config = dataclasses.replace(config, t_start=-t_win, t_end=t_win)
        last = scattering_matrix(model, run_config, jobs=jobs)
        matrices.append(last.p_matrix)
    estimate = max(
        float(np.abs(matrices[1] - matrices[0]).max()),
        float(np.abs(matrices[2] - matrices[1]).max()),
    )
    if estimate > CONVERGENCE_LIMIT:
        raise NotConverged(
            f"truncation estimate {estimate:.3e} exceeds {CONVERGENCE_LIMIT:.0e}; "
            f"enlarge base_window"
        )
    return ConvergedProbabilities(
        p_matrix=matrices[-1],
        truncation_estimate=estimate,
        windows=windows,
        scattering=last,
    )
