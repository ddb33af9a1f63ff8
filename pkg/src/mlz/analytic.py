"""Closed-form results: the two-state formula, the six-state presets, and
the exact transition matrix of the interference preset.

The two presets describe two bands of three parallel levels each (band
slopes ``beta`` and 0) crossing one another.  Levels are ordered so
that 1-3 form the sloped band (offsets eps1, 0, -eps2) and 4-6 the flat
band (same offsets).  Cross-band couplings g1, g2, g3 appear at the six
coupled intersections; intra-band couplings vanish, as do the couplings
of the three pairs that cross exactly at t = 0.

In the interference preset half of the couplings enter with a minus
sign.  That sign pattern makes every pair of interfering trajectories
pick up opposite switch phases, the transition matrix takes a closed
product form, and (the central claim this package verifies) that form
remains exact for arbitrary parameter values.  The mini-gap preset uses
all-positive couplings: single-path probabilities are unchanged but the
interference pattern moves to other transitions and exactness is lost
at small level separations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonpositiveSlopeGap
from .model import MlzModel, validate_model


@dataclass(frozen=True)
class PresetParams:
    """Parameters of the six-state presets.

    ``eps1``/``eps2`` must be strictly positive: at zero separation the
    presets develop simultaneous shared crossings that the semiclassical
    engine rejects.  The closed-form matrix itself does not depend on
    them at all.
    """

    eps1: float = 0.25
    eps2: float = 0.35
    g1: float = 0.3
    g2: float = 0.3
    g3: float = 0.3
    beta: float = 1.0

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if self.eps1 <= 0 or self.eps2 <= 0:
            raise ValueError(
                f"eps1 and eps2 must be positive, got {self.eps1}, {self.eps2}"
            )

    def scaled(self, eps_scale: float = 1.0, g_scale: float = 1.0) -> "PresetParams":
        """Uniformly scale the separations and/or the couplings."""
        return PresetParams(
            eps1=self.eps1 * eps_scale,
            eps2=self.eps2 * eps_scale,
            g1=self.g1 * g_scale,
            g2=self.g2 * g_scale,
            g3=self.g3 * g_scale,
            beta=self.beta,
        )


def lz_probability(g: complex, slope_gap: float) -> float:
    """Two-state staying probability exp(-2 pi |g|^2 / slope_gap)."""
    if slope_gap <= 0:
        raise NonpositiveSlopeGap(f"slope_gap must be positive, got {slope_gap}")
    return math.exp(-2.0 * math.pi * abs(g) ** 2 / slope_gap)


def _band_model(params: PresetParams, sign: float) -> MlzModel:
    slopes = [params.beta] * 3 + [0.0] * 3
    offsets = [params.eps1, 0.0, -params.eps2] * 2
    c = np.zeros((6, 6), dtype=np.complex128)
    c[0, 4] = sign * params.g1
    c[0, 5] = sign * params.g2
    c[1, 3] = params.g1
    c[1, 5] = sign * params.g3
    c[2, 3] = params.g2
    c[2, 4] = params.g3
    c = c + c.conj().T
    return validate_model(
        MlzModel(n_states=6, slopes=slopes, offsets=offsets, couplings=c)
    )


def interference_model(params: PresetParams) -> MlzModel:
    """Six-state preset with the alternating coupling signs (exact matrix)."""
    return _band_model(params, -1.0)


def minigap_model(params: PresetParams) -> MlzModel:
    """Six-state preset with all-positive couplings (avoided mini-gaps)."""
    return _band_model(params, +1.0)


def exact_matrix(params: PresetParams) -> np.ndarray:
    """Closed-form transition matrix of the interference preset.

    Rows are initial states, columns final states; entries are products
    of the per-crossing staying probabilities p_j = exp(-2 pi g_j^2 /
    beta) and q_j = 1 - p_j.  Independent of eps1 and eps2.
    """
    p1 = lz_probability(params.g1, params.beta)
    p2 = lz_probability(params.g2, params.beta)
    p3 = lz_probability(params.g3, params.beta)
    q1, q2, q3 = 1.0 - p1, 1.0 - p2, 1.0 - p3
    return np.array(
        [
            [p2 * p1, q2 * q3 * p1, q1 * q3, 0.0, p2 * q1 * p3, q2 * p3],
            [0.0, p3 * p1, p3 * q1 * q2, p3 * q1 * p2, 0.0, q3],
            [0.0, 0.0, p3 * p2, p3 * q2, q3, 0.0],
            [0.0, q1, p1 * q2, p1 * p2, 0.0, 0.0],
            [q1, 0.0, p1 * q3 * p2, p1 * q3 * q2, p1 * p3, 0.0],
            [q2 * p1, p2 * q3 * p1, 0.0, q1 * q3, q2 * q1 * p3, p2 * p3],
        ]
    )
