"""Hermitian eigensolver based on cyclic Jacobi rotations.

Works on complex Hermitian matrices.  A pivot ``a[p, q] = r e^{i phi}``
is annihilated by the unitary plane rotation

    J[p, p] = c        J[p, q] = s e^{i phi}
    J[q, p] = -s e^{-i phi}   J[q, q] = c

which reduces to the classical real rotation after factoring out the
pivot phase.  Cyclic-by-rows sweeps converge quadratically; for the
matrix sizes used here (N <= ~20) this is simple and robust.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import EigensolverNoConvergence

#: Off-diagonal Frobenius norm at which iteration stops.  Scaled by the
#: input norm so large-magnitude matrices (H(t) at |t| ~ 1e3) do not
#: stall at the rounding floor.
OFF_NORM_TOL = 1e-12

MAX_SWEEPS = 60


def _off_norm(a: np.ndarray) -> float:
    """Frobenius norm of the off-diagonal part.

    Summed entry by entry; subtracting the diagonal from the total norm
    would cancel catastrophically once the off-diagonal part is small.
    """
    mask = ~np.eye(a.shape[0], dtype=bool)
    return float(np.linalg.norm(a[mask]))


def jacobi_eigh(matrix: np.ndarray, tol: float = OFF_NORM_TOL,
                max_sweeps: int = MAX_SWEEPS) -> tuple[np.ndarray, np.ndarray]:
    """Diagonalize a Hermitian matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    matrix:
        Hermitian matrix (complex or real).  Not modified.
    tol:
        Convergence threshold on the off-diagonal norm, scaled by
        ``max(1, ||matrix||_F)``.
    max_sweeps:
        Sweep cap; exceeding it raises :class:`EigensolverNoConvergence`.

    Returns
    -------
    (eigenvalues, eigenvectors):
        Eigenvalues sorted ascending; eigenvector ``k`` is column
        ``eigenvectors[:, k]``.
    """
    a = np.array(matrix, dtype=np.complex128)
    n, m = a.shape
    if n != m:
        raise ValueError(f"matrix must be square, got shape {a.shape}")
    threshold = tol * max(1.0, float(np.linalg.norm(a)))
    # pivots too small to matter for the target norm are skipped
    pivot_floor = threshold / max(1, n * n)
    v = np.eye(n, dtype=np.complex128)

    for _ in range(max_sweeps):
        if _off_norm(a) <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r <= pivot_floor:
                    continue
                phase = apq / r
                app = a[p, p].real
                aqq = a[q, q].real
                tau = (aqq - app) / (2.0 * r)
                sgn = 1.0 if tau >= 0.0 else -1.0
                t = sgn / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                # columns p, q of a (rows follow by Hermiticity)
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * np.conj(phase) * col_q
                a[:, q] = s * phase * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * phase * row_q
                a[q, :] = s * np.conj(phase) * row_p + c * row_q
                a[p, p] = c * c * app + s * s * aqq - 2.0 * s * c * r
                a[q, q] = s * s * app + c * c * aqq + 2.0 * s * c * r
                a[p, q] = 0.0
                a[q, p] = 0.0
                col_p = v[:, p].copy()
                col_q = v[:, q].copy()
                v[:, p] = c * col_p - s * np.conj(phase) * col_q
                v[:, q] = s * phase * col_p + c * col_q
    else:
        raise EigensolverNoConvergence(
            f"off-diagonal norm {_off_norm(a):.3e} above threshold "
            f"{threshold:.3e} after {max_sweeps} sweeps"
        )

    w = np.real(np.diag(a))
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]
