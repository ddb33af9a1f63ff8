"""Linear-sweep multistate model: data type, validation, crossings, spectra.

A model is the Hamiltonian H(t) = A + B t in the diabatic basis: B is
diagonal (``slopes``), the diagonal of A holds the energy offsets, and
the off-diagonal part of A is the Hermitian coupling matrix.  Diabatic
level ``n`` is the straight line ``slopes[n] * t + offsets[n]``; levels
with equal slopes must not be coupled (in the diabatic basis such a
coupling can always be rotated away).

State indices are 0-based throughout the API; the CLI renders them
1-based for display.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .eigen import jacobi_eigh
from .errors import (
    DegenerateSlopeCoupling,
    DuplicateLevel,
    HermiticityViolation,
    ModelFormatError,
)

#: Absolute tolerance for validation checks (inputs are user-specified
#: exact constants, so this is deliberately tight).
VALIDATION_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class MlzModel:
    """An N-state linear-sweep Hamiltonian in the diabatic basis.

    Immutable after construction; safe to share across workers.  Call
    :func:`validate_model` once after building an instance by hand.
    """

    n_states: int
    slopes: np.ndarray
    offsets: np.ndarray
    couplings: np.ndarray
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        slopes = np.asarray(self.slopes, dtype=np.float64).copy()
        offsets = np.asarray(self.offsets, dtype=np.float64).copy()
        couplings = np.asarray(self.couplings, dtype=np.complex128).copy()
        for arr in (slopes, offsets, couplings):
            arr.setflags(write=False)
        object.__setattr__(self, "slopes", slopes)
        object.__setattr__(self, "offsets", offsets)
        object.__setattr__(self, "couplings", couplings)
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(str(s) for s in self.labels))


@dataclass(frozen=True)
class CrossingEvent:
    """A pairwise intersection of two diabatic levels.

    ``p_stay`` is the two-state Landau-Zener probability of remaining on
    the incoming level, exp(-2 pi |coupling|^2 / slope_gap).
    """

    time: float
    level_a: int
    level_b: int
    coupling: complex
    slope_gap: float
    p_stay: float


@dataclass(frozen=True)
class SpectrumSample:
    """Adiabatic energies (sorted eigenvalues of H(t)) at one time."""

    time: float
    eigenvalues: np.ndarray
    min_gap: float


def validate_model(model: MlzModel) -> MlzModel:
    """Check all model invariants and return the model unchanged.

    Raises
    ------
    ValueError
        On structural problems (n_states < 2, mismatched array sizes).
    HermiticityViolation
        Coupling matrix not Hermitian, or nonzero diagonal, beyond 1e-12.
    DegenerateSlopeCoupling
        Equal-slope pair with a nonzero mutual coupling.
    DuplicateLevel
        Two levels with identical slope and offset.
    """
    n = model.n_states
    if n < 2:
        raise ValueError(f"n_states must be >= 2, got {n}")
    if model.slopes.shape != (n,) or model.offsets.shape != (n,):
        raise ValueError(
            f"slopes/offsets must have length {n}, got "
            f"{model.slopes.shape} and {model.offsets.shape}"
        )
    if model.couplings.shape != (n, n):
        raise ValueError(f"couplings must be {n}x{n}, got {model.couplings.shape}")
    if model.labels is not None and len(model.labels) != n:
        raise ValueError(f"labels must have length {n}, got {len(model.labels)}")

    herm_dev = np.abs(model.couplings - model.couplings.conj().T).max()
    if herm_dev > VALIDATION_TOL:
        raise HermiticityViolation(
            f"coupling matrix deviates from Hermiticity by {herm_dev:.3e}"
        )
    diag_dev = np.abs(np.diag(model.couplings)).max()
    if diag_dev > VALIDATION_TOL:
        raise HermiticityViolation(
            f"coupling diagonal must be zero (offsets hold the diagonal of A), "
            f"largest entry {diag_dev:.3e}"
        )
    for a in range(n):
        for b in range(a + 1, n):
            if abs(model.slopes[a] - model.slopes[b]) <= VALIDATION_TOL:
                if abs(model.couplings[a, b]) > VALIDATION_TOL:
                    raise DegenerateSlopeCoupling(
                        f"levels {a} and {b} have equal slopes but coupling "
                        f"{model.couplings[a, b]}"
                    )
                if abs(model.offsets[a] - model.offsets[b]) <= VALIDATION_TOL:
                    raise DuplicateLevel(
                        f"levels {a} and {b} are the same diabatic line"
                    )
    return model


def hamiltonian_at(model: MlzModel, t: float) -> np.ndarray:
    """Hamiltonian matrix H(t): couplings plus the diabatic diagonal."""
    h = model.couplings.copy()
    h[np.diag_indices(model.n_states)] = model.slopes * t + model.offsets
    return h


def find_crossings(model: MlzModel) -> list[CrossingEvent]:
    """All pairwise diabatic-level intersections, chronologically sorted.

    One event per unordered pair with distinct slopes, including pairs
    whose coupling is zero (those never cause transitions but mark exact
    level crossings).  Ties in time are ordered by (level_a, level_b).
    """
    events = []
    for a in range(model.n_states):
        for b in range(a + 1, model.n_states):
            dslope = model.slopes[a] - model.slopes[b]
            if abs(dslope) <= VALIDATION_TOL:
                continue
            t_star = (model.offsets[b] - model.offsets[a]) / dslope
            g = complex(model.couplings[a, b])
            gap = abs(dslope)
            events.append(
                CrossingEvent(
                    time=float(t_star),
                    level_a=a,
                    level_b=b,
                    coupling=g,
                    slope_gap=gap,
                    p_stay=math.exp(-2.0 * math.pi * abs(g) ** 2 / gap),
                )
            )
    events.sort(key=lambda ev: (ev.time, ev.level_a, ev.level_b))
    return events


def adiabatic_spectrum(model: MlzModel, t_min: float, t_max: float,
                       samples: int) -> list[SpectrumSample]:
    """Sorted eigenvalues of H(t) on an equally spaced time grid."""
    if not t_min < t_max:
        raise ValueError(f"need t_min < t_max, got {t_min} >= {t_max}")
    if samples < 2:
        raise ValueError(f"need samples >= 2, got {samples}")
    out = []
    for t in np.linspace(t_min, t_max, samples):
        w, _ = jacobi_eigh(hamiltonian_at(model, float(t)))
        w.setflags(write=False)
        out.append(
            SpectrumSample(
                time=float(t),
                eigenvalues=w,
                min_gap=float(np.diff(w).min()),
            )
        )
    return out


# --- model file format ----------------------------------------------------
#
# JSON object with keys:
#   n_states   int
#   slopes     array of n_states floats
#   offsets    array of n_states floats
#   couplings  array of {"row": r, "col": c, "re": x, "im": y} entries for
#              the strict upper triangle, 1-based, row < col; the lower
#              triangle is implied by Hermiticity
#   labels     optional array of n_states strings
# Unknown keys are rejected.

_TOP_KEYS = {"n_states", "slopes", "offsets", "couplings", "labels"}
_ENTRY_KEYS = {"row", "col", "re", "im"}


def model_from_dict(data: dict) -> MlzModel:
    """Build and validate a model from the JSON object structure."""
    if not isinstance(data, dict):
        raise ModelFormatError(f"model document must be an object, got {type(data).__name__}")
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise ModelFormatError(f"unknown keys in model file: {sorted(unknown)}")
    for key in ("n_states", "slopes", "offsets", "couplings"):
        if key not in data:
            raise ModelFormatError(f"missing required key {key!r}")
    n = data["n_states"]
    if not isinstance(n, int) or isinstance(n, bool):
        raise ModelFormatError(f"n_states must be an integer, got {n!r}")
    couplings = np.zeros((n, n), dtype=np.complex128)
    seen = set()
    for entry in data["couplings"]:
        if not isinstance(entry, dict) or set(entry) != _ENTRY_KEYS:
            raise ModelFormatError(
                f"coupling entries need exactly keys row/col/re/im, got {entry!r}"
            )
        row, col = entry["row"], entry["col"]
        if not (isinstance(row, int) and isinstance(col, int)):
            raise ModelFormatError(f"row/col must be integers, got {entry!r}")
        if not (1 <= row < col <= n):
            raise ModelFormatError(
                f"coupling entry must satisfy 1 <= row < col <= {n} "
                f"(1-based upper triangle), got row={row} col={col}"
            )
        if (row, col) in seen:
            raise ModelFormatError(f"duplicate coupling entry row={row} col={col}")
        seen.add((row, col))
        couplings[row - 1, col - 1] = complex(entry["re"], entry["im"])
        couplings[col - 1, row - 1] = complex(entry["re"], -entry["im"])
    try:
        model = MlzModel(
            n_states=n,
            slopes=np.asarray(data["slopes"], dtype=np.float64),
            offsets=np.asarray(data["offsets"], dtype=np.float64),
            couplings=couplings,
            labels=tuple(data["labels"]) if data.get("labels") is not None else None,
        )
    except (TypeError, ValueError) as exc:
        raise ModelFormatError(f"malformed model arrays: {exc}") from exc
    return validate_model(model)


def model_to_dict(model: MlzModel) -> dict:
    """Inverse of :func:`model_from_dict` (upper triangle only)."""
    entries = []
    for a in range(model.n_states):
        for b in range(a + 1, model.n_states):
            g = model.couplings[a, b]
            if g != 0:
                entries.append({"row": a + 1, "col": b + 1, "re": g.real, "im": g.imag})
    data = {
        "n_states": model.n_states,
        "slopes": [float(x) for x in model.slopes],
        "offsets": [float(x) for x in model.offsets],
        "couplings": entries,
    }
    if model.labels is not None:
        data["labels"] = list(model.labels)
    return data


def load_model(path: str | Path) -> MlzModel:
    """Load and validate a model from a JSON file."""
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"{path}: invalid JSON: {exc}") from exc
    return model_from_dict(data)


def save_model(model: MlzModel, path: str | Path) -> None:
    """Write the model to a JSON file in the documented schema."""
    Path(path).write_text(json.dumps(model_to_dict(model), indent=2) + "\n",
                          encoding="utf-8")
