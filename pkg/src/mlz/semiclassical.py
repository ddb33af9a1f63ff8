"""Semiclassical path sums over chronologically ordered level crossings.

In the independent-crossing picture a trajectory follows one diabatic
level at a time and may change level only at a pairwise crossing with a
nonzero coupling.  Walking the crossings in time order automatically
enforces the causal (right/upward) rule.  Each decision contributes to
the amplitude:

* stay: sqrt(p) where p = exp(-2 pi |g|^2 / |slope gap|), no phase;
* switch m -> n: sqrt(1 - p) times the phase factor i * A[n, m]/|A[n, m]|.

The switch factor comes from reducing a single crossing to the
two-state problem with coupling |g| e^{i phi} in the source-state row:
rephasing the destination amplitude maps it onto the real-positive
problem, whose switch factor is the bare ``i``, leaving i e^{-i phi} on
the source->destination amplitude; written with the destination-row,
source-column entry A[n, m] this is i e^{+i arg A[n, m]}.  For real
couplings it reduces to +/- i for positive/negative coupling.  Note the
conjugate convention (i e^{-i arg A[n, m]}) conjugates every path
amplitude and therefore every amplitude sum, so the two conventions are
indistinguishable at the probability level; the choice made here was
additionally validated against numeric propagation of complex-coupling
models in the semiclassical regime (see the test suite).

Every path also accumulates the dynamic phase, the time integral of the
diabatic energy along the trajectory, taken between shared endpoints
one time unit before the first and after the last crossing (any common
choice cancels from interference).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PathExplosion, SimultaneousSharedCrossing
from .model import CrossingEvent, MlzModel, find_crossings

#: Default cap on the number of enumerated paths per initial level.
MAX_PATHS = 2 ** 20

#: Shared dynamic-phase window extends this far beyond the extreme crossings.
WINDOW_PAD = 1.0

#: Crossing times closer than this (relative) count as simultaneous.
TIME_TOL = 1e-12


@dataclass(frozen=True)
class SemiclassicalPath:
    """One stay/switch history from an initial to a final level.

    ``decisions`` lists (crossing, action) pairs for every crossing the
    trajectory met on its current level with a nonzero coupling; action
    is ``"stay"`` or ``"switch"``.  The complex amplitude of the path is
    ``magnitude * lz_phase * exp(1j * dynamic_phase)``.
    """

    initial_level: int
    final_level: int
    decisions: tuple[tuple[CrossingEvent, str], ...]
    magnitude: float
    lz_phase: complex
    dynamic_phase: float


@dataclass(frozen=True)
class SemiclassicalResult:
    """Path-sum transition matrix plus the contributing amplitudes.

    ``p_matrix[i, f]`` = |sum of path amplitudes i -> f|^2; the
    ``amplitudes`` dict maps (initial, final) to the list of paths and
    their coherent sum.
    """

    p_matrix: np.ndarray
    amplitudes: dict[tuple[int, int], tuple[list[SemiclassicalPath], complex]]


def path_amplitude(path: SemiclassicalPath, model: MlzModel) -> complex:
    """Complex amplitude of one path (model is unused beyond its role as
    the path's source; kept for interface symmetry)."""
    del model
    return path.magnitude * path.lz_phase * complex(
        math.cos(path.dynamic_phase), math.sin(path.dynamic_phase)
    )


def _check_simultaneous(crossings: list[CrossingEvent]) -> None:
    """Reject coupled crossings that share a level at the same time."""
    active = [ev for ev in crossings if ev.coupling != 0]
    for i, ev_a in enumerate(active):
        for ev_b in active[i + 1:]:
            if abs(ev_a.time - ev_b.time) > TIME_TOL * max(
                1.0, abs(ev_a.time), abs(ev_b.time)
            ):
                continue
            shared = {ev_a.level_a, ev_a.level_b} & {ev_b.level_a, ev_b.level_b}
            if shared:
                raise SimultaneousSharedCrossing(
                    f"crossings ({ev_a.level_a},{ev_a.level_b}) and "
                    f"({ev_b.level_a},{ev_b.level_b}) both involve level "
                    f"{shared.pop()} at t={ev_a.time}"
                )


def _segment_phase(model: MlzModel, level: int, t_a: float, t_b: float) -> float:
    """Integral of the diabatic energy of ``level`` from t_a to t_b."""
    return (
        0.5 * model.slopes[level] * (t_b * t_b - t_a * t_a)
        + model.offsets[level] * (t_b - t_a)
    )


def enumerate_paths(model: MlzModel, initial_level: int,
                    max_paths: int = MAX_PATHS) -> list[SemiclassicalPath]:
    """All semiclassically allowed trajectories starting on ``initial_level``.

    Depth-first traversal of the chronologically sorted crossing list;
    at every coupled crossing involving the current level the walk
    branches into stay and switch.  Crossings with zero coupling or not
    involving the current level leave the amplitude untouched.

    Raises
    ------
    SimultaneousSharedCrossing
        If two coupled crossings share a level at equal times (the
        factorization into successive two-state events is undefined).
    PathExplosion
        If more than ``max_paths`` paths would be produced.
    """
    if not 0 <= initial_level < model.n_states:
        raise ValueError(f"initial_level {initial_level} out of range")
    crossings = find_crossings(model)
    _check_simultaneous(crossings)
    if crossings:
        t_minus = crossings[0].time - WINDOW_PAD
        t_plus = crossings[-1].time + WINDOW_PAD
    else:
        t_minus = t_plus = 0.0

    paths: list[SemiclassicalPath] = []

    def walk(idx, level, decisions, magnitude, lz_phase, dyn_phase, seg_start):
        if len(paths) >= max_paths:
            raise PathExplosion(f"more than {max_paths} paths; raise max_paths")
        if idx == len(crossings):
            dyn_phase += _segment_phase(model, level, seg_start, t_plus)
            paths.append(
                SemiclassicalPath(
                    initial_level=initial_level,
                    final_level=level,
                    decisions=tuple(decisions),
                    magnitude=magnitude,
                    lz_phase=lz_phase,
                    dynamic_phase=dyn_phase,
                )
            )
            return
        ev = crossings[idx]
        involved = level in (ev.level_a, ev.level_b)
        if not involved or ev.coupling == 0:
            walk(idx + 1, level, decisions, magnitude, lz_phase, dyn_phase, seg_start)
            return
        other = ev.level_b if level == ev.level_a else ev.level_a
        # stay branch
        decisions.append((ev, "stay"))
        walk(idx + 1, level, decisions, magnitude * math.sqrt(ev.p_stay),
             lz_phase, dyn_phase, seg_start)
        decisions.pop()
        # switch branch: i * (destination-row, source-column coupling phase)
        g_dest_src = complex(model.couplings[other, level])
        factor = 1j * (g_dest_src / abs(g_dest_src))
        decisions.append((ev, "switch"))
        walk(
            idx + 1,
            other,
            decisions,
            magnitude * math.sqrt(1.0 - ev.p_stay),
            lz_phase * factor,
            dyn_phase + _segment_phase(model, level, seg_start, ev.time),
            ev.time,
        )
        decisions.pop()

    walk(0, initial_level, [], 1.0, 1.0 + 0.0j, 0.0, t_minus)
    return paths


def semiclassical_matrix(model: MlzModel,
                         max_paths: int = MAX_PATHS) -> SemiclassicalResult:
    """Coherent path sum for every (initial, final) pair.

    The result's rows always sum to one (up to rounding): the path sum
    is the expansion of a product of two-state unitaries, so the
    underlying semiclassical S-matrix is unitary by construction.
    """
    n = model.n_states
    p = np.zeros((n, n))
    amplitudes: dict[tuple[int, int], tuple[list[SemiclassicalPath], complex]] = {}
    for initial in range(n):
        groups: dict[int, list[SemiclassicalPath]] = {}
        for path in enumerate_paths(model, initial, max_paths=max_paths):
            groups.setdefault(path.final_level, []).append(path)
        for final, group in groups.items():
            total = sum(path_amplitude(path, model) for path in group)
            amplitudes[(initial, final)] = (group, total)
            p[initial, final] = abs(total) ** 2
    return SemiclassicalResult(p_matrix=p, amplitudes=amplitudes)
