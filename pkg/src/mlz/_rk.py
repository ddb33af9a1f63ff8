"""Numba kernel: adaptive Dormand-Prince 5(4) stepper for i dy/dt = H(t) y.

The Schroedinger right-hand side is evaluated in one of two frames:

* diabatic (``frame=0``): dy/dt = -i (diag(slopes t + offsets) + A) y
* interaction (``frame=1``): the diagonal is removed by the substitution
  c_n = exp(i (slopes_n t^2/2 + offsets_n t)) psi_n, leaving only coupling
  terms that carry the oscillatory phase difference of the two levels.

States are (n, m) complex matrices so one call can propagate a single
column (m=1) or several independent initial vectors on a shared step
sequence.  Error control is a scaled RMS norm over all entries with a
PI controller; FSAL saves one stage per accepted step.

Compiled with ``nogil`` so independent propagations can run on threads.
"""

import math

import numba as nb
import numpy as np

STATUS_OK = 0
STATUS_UNDERFLOW = 1
STATUS_NORM_DRIFT = 2

# Butcher tableau, Dormand-Prince 5(4)
_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = (
    9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656,
)
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
# fifth-order weights minus the embedded fourth-order weights
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40,
)

_SAFETY = 0.9
_MAX_GROW = 10.0
_MIN_SHRINK = 0.2
# PI step control on the order-5 local error: h *= S err^-0.7/5 errprev^0.4/5
_PI_ALPHA = 0.14
_PI_BETA = 0.08


@nb.njit(cache=True, nogil=True)
def _rhs(t, y, dy, slopes, offsets, rows, cols, gvals, frame):
    n, m = y.shape
    if frame == 0:
        for i in range(n):
            d = slopes[i] * t + offsets[i]
            for j in range(m):
                dy[i, j] = -1j * d * y[i, j]
    else:
        for i in range(n):
            for j in range(m):
                dy[i, j] = 0.0 + 0.0j
    for k in range(rows.size):
        a = rows[k]
        b = cols[k]
        g = gvals[k]
        if frame == 1:
            ph = 0.5 * (slopes[a] - slopes[b]) * t * t + (offsets[a] - offsets[b]) * t
            g = g * complex(math.cos(ph), math.sin(ph))
        gc = g.conjugate()
        for j in range(m):
            dy[a, j] -= 1j * g * y[b, j]
            dy[b, j] -= 1j * gc * y[a, j]


@nb.njit(cache=True, nogil=True)
def evolve(y0, t_start, t_end, slopes, offsets, rows, cols, gvals, frame,
           abs_tol, rel_tol, max_step, cluster_radius, drift_limit):
    """Integrate from t_start to t_end; returns (y, status, accepted,
    rejected, error_accum, max_drift).

    ``max_step`` caps the step while |t| <= cluster_radius (the region
    where crossings happen); outside, the controller is free.
    ``error_accum`` is the sum of accepted scaled local errors times the
    tolerance scale: a pessimistic a-posteriori global error proxy.
    """
    n, m = y0.shape
    y = y0.copy()
    k1 = np.empty((n, m), np.complex128)
    k2 = np.empty((n, m), np.complex128)
    k3 = np.empty((n, m), np.complex128)
    k4 = np.empty((n, m), np.complex128)
    k5 = np.empty((n, m), np.complex128)
    k6 = np.empty((n, m), np.complex128)
    k7 = np.empty((n, m), np.complex128)
    ytmp = np.empty((n, m), np.complex128)
    y5 = np.empty((n, m), np.complex128)

    norm0 = np.empty(m)
    for j in range(m):
        s = 0.0
        for i in range(n):
            s += abs(y[i, j]) ** 2
        norm0[j] = math.sqrt(s)

    span = t_end - t_start
    h_floor = 1e-12 * span
    t = t_start
    h = min(1e-3, span)
    _rhs(t, y, k1, slopes, offsets, rows, cols, gvals, frame)
    accepted = 0
    rejected = 0
    err_prev = 1e-4
    err_accum = 0.0
    max_drift = 0.0
    status = STATUS_OK
    done = False
    while not done:
        if abs(t) <= cluster_radius and max_step > 0.0 and h > max_step:
            h = max_step
        last = False
        if h >= t_end - t:
            h = t_end - t
            last = True
        if h < h_floor:
            status = STATUS_UNDERFLOW
            break

        for i in range(n):
            for j in range(m):
                ytmp[i, j] = y[i, j] + h * _A21 * k1[i, j]
        _rhs(t + _C2 * h, ytmp, k2, slopes, offsets, rows, cols, gvals, frame)
        for i in range(n):
            for j in range(m):
                ytmp[i, j] = y[i, j] + h * (_A31 * k1[i, j] + _A32 * k2[i, j])
        _rhs(t + _C3 * h, ytmp, k3, slopes, offsets, rows, cols, gvals, frame)
        for i in range(n):
            for j in range(m):
                ytmp[i, j] = y[i, j] + h * (
                    _A41 * k1[i, j] + _A42 * k2[i, j] + _A43 * k3[i, j]
                )
        _rhs(t + _C4 * h, ytmp, k4, slopes, offsets, rows, cols, gvals, frame)
        for i in range(n):
            for j in range(m):
                ytmp[i, j] = y[i, j] + h * (
                    _A51 * k1[i, j] + _A52 * k2[i, j] + _A53 * k3[i, j]
                    + _A54 * k4[i, j]
                )
        _rhs(t + _C5 * h, ytmp, k5, slopes, offsets, rows, cols, gvals, frame)
        for i in range(n):
            for j in range(m):
                ytmp[i, j] = y[i, j] + h * (
                    _A61 * k1[i, j] + _A62 * k2[i, j] + _A63 * k3[i, j]
                    + _A64 * k4[i, j] + _A65 * k5[i, j]
                )
        _rhs(t + h, ytmp, k6, slopes, offsets, rows, cols, gvals, frame)
        for i in range(n):
            for j in range(m):
                y5[i, j] = y[i, j] + h * (
                    _B1 * k1[i, j] + _B3 * k3[i, j] + _B4 * k4[i, j]
                    + _B5 * k5[i, j] + _B6 * k6[i, j]
                )
        _rhs(t + h, y5, k7, slopes, offsets, rows, cols, gvals, frame)

        errsum = 0.0
        for i in range(n):
            for j in range(m):
                e = h * (
                    _E1 * k1[i, j] + _E3 * k3[i, j] + _E4 * k4[i, j]
                    + _E5 * k5[i, j] + _E6 * k6[i, j] + _E7 * k7[i, j]
                )
                ay = abs(y[i, j])
                ay5 = abs(y5[i, j])
                sc = abs_tol + rel_tol * max(ay, ay5)
                errsum += (abs(e) / sc) ** 2
        err = math.sqrt(errsum / (n * m))

        if err <= 1.0:
            t = t_end if last else t + h
            for i in range(n):
                for j in range(m):
                    y[i, j] = y5[i, j]
                    k1[i, j] = k7[i, j]
            accepted += 1
            err_accum += err * (abs_tol + rel_tol)
            for j in range(m):
                s = 0.0
                for i in range(n):
                    s += abs(y[i, j]) ** 2
                d = abs(math.sqrt(s) - norm0[j])
                if d > max_drift:
                    max_drift = d
            if max_drift > drift_limit:
                status = STATUS_NORM_DRIFT
                break
            if last:
                done = True
            if err < 1e-10:
                fac = _MAX_GROW
            else:
                fac = _SAFETY * err ** (-_PI_ALPHA) * err_prev ** _PI_BETA
                if fac > _MAX_GROW:
                    fac = _MAX_GROW
                elif fac < _MIN_SHRINK:
                    fac = _MIN_SHRINK
            err_prev = max(err, 1e-4)
            h *= fac
        else:
            rejected += 1
            fac = _SAFETY * err ** -0.2
            if fac < _MIN_SHRINK:
                fac = _MIN_SHRINK
            elif fac > 1.0:
                fac = 1.0
            h *= fac
    return y, status, accepted, rejected, err_accum, max_drift
