# Compiled kernels for the Augustin-Csiszar minimization.
# Semantics mirror _fallback.py; keep the two in sync.

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, exp, isfinite, log, pow

cnp.import_array()

cdef double _MIN_STEP = 1e-18


cdef double _objective(double[::1] p, double[:, ::1] W, double[:, ::1] R,
                       double s, double coef) noexcept nogil:
    cdef Py_ssize_t nx = p.shape[0]
    cdef Py_ssize_t ny = W.shape[1]
    cdef Py_ssize_t x, y
    cdef double S, total = 0.0
    for x in range(nx):
        S = 0.0
        for y in range(ny):
            if W[x, y] > 0.0:
                S += W[x, y] * pow(R[y, x], s)
        if not isfinite(S) or S <= 0.0:
            return INFINITY
        total += p[x] * log(S)
    return coef * total


def ac_objective(p, W, R, double s, double coef):
    """coef * sum_x p(x) log sum_y W(x,y) R(y,x)^s; +inf when infeasible."""
    cdef double[::1] pv = np.ascontiguousarray(p, dtype=np.float64)
    cdef double[:, ::1] Wv = np.ascontiguousarray(W, dtype=np.float64)
    cdef double[:, ::1] Rv = np.ascontiguousarray(R, dtype=np.float64)
    return _objective(pv, Wv, Rv, s, coef)


def ac_eg_minimize(p, W, R0, double s, double coef, double step0, double tol,
                   int max_iters, double floor):
    """Exponentiated-gradient descent on the per-output simplices.

    Backtracks (halves the step) on non-decrease; stops when the objective
    improvement drops to tol or no decrease is possible. Returns
    (value, R, iterations, converged).
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=1] p_arr = np.ascontiguousarray(p, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] W_arr = np.ascontiguousarray(W, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] R_arr = np.array(R0, dtype=np.float64, order="C")
    cdef Py_ssize_t ny = R_arr.shape[0]
    cdef Py_ssize_t nx = R_arr.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] G_arr = np.empty((ny, nx))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] Rc_arr = np.empty((ny, nx))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] S_arr = np.empty(nx)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] z_arr = np.empty(nx)

    cdef double[::1] pv = p_arr
    cdef double[:, ::1] Wv = W_arr
    cdef double[:, ::1] R = R_arr
    cdef double[:, ::1] G = G_arr
    cdef double[:, ::1] Rc = Rc_arr
    cdef double[::1] S = S_arr
    cdef double[::1] z = z_arr

    cdef Py_ssize_t x, y
    cdef double total, val, zmax, e, J, Jc, delta
    cdef double step = step0
    cdef int iters = 0
    cdef bint converged = False
    cdef bint accepted
    cdef int it

    # clip to the floor and renormalize each row
    for y in range(ny):
        total = 0.0
        for x in range(nx):
            val = R[y, x]
            if val < floor:
                val = floor
            R[y, x] = val
            total += val
        for x in range(nx):
            R[y, x] /= total

    J = _objective(pv, Wv, R, s, coef)

    for it in range(max_iters):
        iters += 1
        for x in range(nx):
            total = 0.0
            for y in range(ny):
                if Wv[x, y] > 0.0:
                    total += Wv[x, y] * pow(R[y, x], s)
            S[x] = total
        for y in range(ny):
            for x in range(nx):
                G[y, x] = -pv[x] * Wv[x, y] * pow(R[y, x], s - 1.0) / S[x]

        accepted = False
        while step >= _MIN_STEP:
            for y in range(ny):
                zmax = -INFINITY
                for x in range(nx):
                    val = log(R[y, x]) - step * G[y, x]
                    z[x] = val
                    if val > zmax:
                        zmax = val
                total = 0.0
                for x in range(nx):
                    e = exp(z[x] - zmax)
                    Rc[y, x] = e
                    total += e
                for x in range(nx):
                    Rc[y, x] /= total
                total = 0.0
                for x in range(nx):
                    val = Rc[y, x]
                    if val < floor:
                        val = floor
                    Rc[y, x] = val
                    total += val
                for x in range(nx):
                    Rc[y, x] /= total
            Jc = _objective(pv, Wv, Rc, s, coef)
            if Jc < J:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            converged = True
            break
        delta = J - Jc
        R_arr[:, :] = Rc_arr
        J = Jc
        if delta <= tol:
            converged = True
            break

    return J, R_arr, iters, converged


def ac_grid_scan(p, W, double s, double coef, ugrid, vgrid):
    """Exhaustive scan of the 2x2 objective over r(0|y0)=u, r(0|y1)=v.

    Returns (best value, index into ugrid, index into vgrid); infeasible
    grid points (zero or non-finite inner sums) are skipped.
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=1] p_arr = np.ascontiguousarray(p, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] W_arr = np.ascontiguousarray(W, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] u_arr = np.ascontiguousarray(ugrid, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] v_arr = np.ascontiguousarray(vgrid, dtype=np.float64)
    cdef Py_ssize_t nu = u_arr.shape[0]
    cdef Py_ssize_t nv = v_arr.shape[0]

    cdef cnp.ndarray[cnp.float64_t, ndim=1] t00 = np.zeros(nu)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] t10 = np.zeros(nu)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] t01 = np.zeros(nv)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] t11 = np.zeros(nv)

    cdef double[::1] u = u_arr
    cdef double[::1] v = v_arr
    cdef double[::1] a00 = t00
    cdef double[::1] a10 = t10
    cdef double[::1] a01 = t01
    cdef double[::1] a11 = t11
    cdef double w00 = W_arr[0, 0], w01 = W_arr[0, 1]
    cdef double w10 = W_arr[1, 0], w11 = W_arr[1, 1]
    cdef double p0 = p_arr[0], p1 = p_arr[1]

    cdef Py_ssize_t i, j
    for i in range(nu):
        if w00 > 0.0:
            a00[i] = w00 * pow(u[i], s)
        if w10 > 0.0:
            a10[i] = w10 * pow(1.0 - u[i], s)
    for j in range(nv):
        if w01 > 0.0:
            a01[j] = w01 * pow(v[j], s)
        if w11 > 0.0:
            a11[j] = w11 * pow(1.0 - v[j], s)

    cdef double best = INFINITY
    cdef Py_ssize_t bi = 0, bj = 0
    cdef double S0, S1, Jij
    with nogil:
        for i in range(nu):
            for j in range(nv):
                S0 = a00[i] + a01[j]
                S1 = a10[i] + a11[j]
                if S0 <= 0.0 or S1 <= 0.0 or not isfinite(S0) or not isfinite(S1):
                    continue
                Jij = coef * (p0 * log(S0) + p1 * log(S1))
                if Jij < best:
                    best = Jij
                    bi = i
                    bj = j
    return best, bi, bj
