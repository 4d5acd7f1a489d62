# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops.

Signatures mirror :mod:`udtune._pykernels` one to one; the selection between
the two happens in :mod:`udtune.kernels`.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport cos, fabs, isfinite

cnp.import_array()

cdef double HALF_PI_LIMIT = 1.5707963267948966 - 1e-6


def glp_column(long n, long h):
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.empty(n, dtype=np.int64)
    cdef long i, u = h
    out[0] = u
    for i in range(1, n):
        if u + h <= n:
            u = u + h
        else:
            u = u + h - n
        out[i] = u
    return out


def cd2_squared(double[:, ::1] x):
    cdef Py_ssize_t n = x.shape[0], s = x.shape[1]
    cdef Py_ssize_t i, l, j
    cdef double a, b, p, d, sum1 = 0.0, sum2 = 0.0, lead = 1.0, scale = 2.0
    with nogil:
        for j in range(s):
            lead *= 13.0 / 12.0
            scale *= 0.5
        for i in range(n):
            p = 1.0
            for j in range(s):
                d = x[i, j] - 0.5
                p *= 2.0 + fabs(d) - d * d
            sum1 += p
        for i in range(n):
            for l in range(n):
                p = 1.0
                for j in range(s):
                    a = fabs(x[i, j] - 0.5)
                    b = fabs(x[l, j] - 0.5)
                    p *= 1.0 + 0.5 * a + 0.5 * b - 0.5 * fabs(x[i, j] - x[l, j])
                sum2 += p
    return lead - scale / n * sum1 + sum2 / (<double>n * n)


def cd2_scan(double[::1] prod1, double[:, ::1] prod2, double[:, ::1] cand, long s_new):
    cdef Py_ssize_t n = prod1.shape[0], m = cand.shape[0]
    cdef Py_ssize_t c, i, l, j
    cdef double lead = 1.0, scale = 2.0, sum1, sum2, d, a, row
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double[::1] dev = np.empty(n, dtype=np.float64)
    for j in range(s_new):
        lead *= 13.0 / 12.0
        scale *= 0.5
    with nogil:
        for c in range(m):
            sum1 = 0.0
            for i in range(n):
                d = cand[c, i] - 0.5
                dev[i] = fabs(d)
                sum1 += prod1[i] * (2.0 + dev[i] - d * d)
            sum2 = 0.0
            for i in range(n):
                row = 0.0
                for l in range(n):
                    a = 1.0 + 0.5 * dev[i] + 0.5 * dev[l] - 0.5 * fabs(cand[c, i] - cand[c, l])
                    row += prod2[i, l] * a
                sum2 += row
            out[c] = lead - scale / n * sum1 + sum2 / (<double>n * n)
    return out_arr


def cd2_absorb(double[::1] prod1, double[:, ::1] prod2, double[::1] col):
    cdef Py_ssize_t n = prod1.shape[0], i, l
    cdef double d, di, dl
    with nogil:
        for i in range(n):
            d = col[i] - 0.5
            prod1[i] *= 2.0 + fabs(d) - d * d
        for i in range(n):
            di = fabs(col[i] - 0.5)
            for l in range(n):
                dl = fabs(col[l] - 0.5)
                prod2[i, l] *= 1.0 + 0.5 * di + 0.5 * dl - 0.5 * fabs(col[i] - col[l])


cdef inline void _heli_rhs(const double* p, double u1, double u2, bint inertia,
                           const double* x, double* out) noexcept nogil:
    # p = Kf, La, Je, Jp, g, m, Lh
    cdef double a = p[0] * p[1] * cos(x[2]) * u1 - p[5] * p[4] * p[1] * cos(x[0])
    cdef double b = p[0] * p[6] * u2
    if inertia:
        a = a / p[2]
        b = b / p[3]
    out[0] = x[1]
    out[1] = a
    out[2] = x[3]
    out[3] = b


def helicopter_run(double[::1] params, double[::1] gains, double[::1] refs,
                   double[::1] x0, double dt, long nsteps, double bound, bint inertia):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] states_arr = np.zeros((nsteps + 1, 4))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] controls_arr = np.zeros((nsteps + 1, 2))
    cdef double[:, ::1] states = states_arr
    cdef double[:, ::1] controls = controls_arr
    cdef double x[4]
    cdef double xs[4]
    cdef double k1[4]
    cdef double k2[4]
    cdef double k3[4]
    cdef double k4[4]
    cdef double p[7]
    cdef double e_ele, e_pit, ep_ele = 0.0, ep_pit = 0.0, int_ele = 0.0, int_pit = 0.0
    cdef double u1, u2
    cdef long k, i, n_valid = 0, clamps = 0
    cdef bint diverged = False
    for i in range(7):
        p[i] = params[i]
    for i in range(4):
        x[i] = x0[i]
    with nogil:
        for k in range(nsteps + 1):
            e_ele = refs[0] - x[0]
            e_pit = refs[1] - x[2]
            if k == 0:
                ep_ele = e_ele
                ep_pit = e_pit
            else:
                int_ele += dt * (e_ele + ep_ele) / 2.0
                int_pit += dt * (e_pit + ep_pit) / 2.0
            u1 = gains[0] * e_ele + gains[1] * (e_ele - ep_ele) / dt + gains[2] * int_ele
            u2 = gains[3] * e_pit + gains[4] * (e_pit - ep_pit) / dt + gains[5] * int_pit
            ep_ele = e_ele
            ep_pit = e_pit
            for i in range(4):
                states[k, i] = x[i]
            controls[k, 0] = u1
            controls[k, 1] = u2
            n_valid = k + 1
            if k == nsteps:
                break
            _heli_rhs(p, u1, u2, inertia, x, k1)
            for i in range(4):
                xs[i] = x[i] + dt / 2.0 * k1[i]
            _heli_rhs(p, u1, u2, inertia, xs, k2)
            for i in range(4):
                xs[i] = x[i] + dt / 2.0 * k2[i]
            _heli_rhs(p, u1, u2, inertia, xs, k3)
            for i in range(4):
                xs[i] = x[i] + dt * k3[i]
            _heli_rhs(p, u1, u2, inertia, xs, k4)
            for i in range(4):
                x[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
            if x[2] > HALF_PI_LIMIT:
                x[2] = HALF_PI_LIMIT
                x[3] = 0.0
                clamps += 1
            elif x[2] < -HALF_PI_LIMIT:
                x[2] = -HALF_PI_LIMIT
                x[3] = 0.0
                clamps += 1
            for i in range(4):
                if not isfinite(x[i]) or fabs(x[i]) > bound:
                    diverged = True
            if diverged:
                break
    return states_arr[:n_valid], controls_arr[:n_valid], bool(diverged), clamps


from libc.math cimport sin, asin, atan, sqrt

cdef double OMEGA = 3.141592653589793 / 25.0


cdef inline int _bs_channel(double k_pos, double k_vel, double p, double v, double r, double dr,
                            double ddr, double f, double g, double* out) noexcept nogil:
    cdef double z_pos = p - r
    cdef double v_d = -k_pos * z_pos + dr
    cdef double z_vel = v - v_d
    cdef double dv_d = -k_pos * (v - dr) + ddr
    if fabs(g) < 1e-6:
        return 1
    out[0] = (-k_vel * z_vel - f + dv_d - z_pos) / g
    return 0


cdef inline void _quad_rhs(const double* q, bint corrected, const double* U,
                           const double* x, double* out) noexcept nogil:
    # q = m, l, Ix, Iy, Iz, g
    cdef double f_phi = x[3] * x[5] * (q[3] - q[4]) / q[2]
    cdef double f_theta = x[1] * x[5] * (q[4] - q[2]) / q[3]
    cdef double f_psi = x[3] * x[1] * (q[2] - q[3]) / q[4]
    cdef double g_phi = q[1] / q[2], g_theta, g_psi
    if corrected:
        g_theta = q[1] / q[3]
        g_psi = 1.0 / q[4]
    else:
        g_theta = q[1] / q[2]
        g_psi = q[1] / q[2]
    cdef double cphi = cos(x[0]), sphi = sin(x[0])
    cdef double cth = cos(x[2]), sth = sin(x[2])
    cdef double cpsi = cos(x[4]), spsi = sin(x[4])
    cdef double tilt = cth * cphi if corrected else cpsi * cphi
    out[0] = x[1]
    out[1] = f_phi + g_phi * U[1]
    out[2] = x[3]
    out[3] = f_theta + g_theta * U[2]
    out[4] = x[5]
    out[5] = f_psi + g_psi * U[3]
    out[6] = x[7]
    out[7] = U[0] * (cpsi * sth * cphi + spsi * sphi) / q[0]
    out[8] = x[9]
    out[9] = U[0] * (spsi * sth * cphi - cpsi * sphi) / q[0]
    out[10] = x[11]
    out[11] = U[0] * tilt / q[0] - q[5]


def quadrotor_run(double[::1] params, double[::1] gains, double[::1] x0, double dt, long nsteps,
                  double bound, bint corrected, double tau):
    """Returns ``(states, controls, refs, diverged, failed_control)``."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] states_arr = np.zeros((nsteps + 1, 12))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] controls_arr = np.zeros((nsteps + 1, 4))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] refs_arr = np.zeros((nsteps + 1, 3))
    cdef double[:, ::1] states = states_arr
    cdef double[:, ::1] controls = controls_arr
    cdef double[:, ::1] refs = refs_arr
    cdef double q[6]
    cdef double k[12]
    cdef double x[12]
    cdef double xs[12]
    cdef double k1[12]
    cdef double k2[12]
    cdef double k3[12]
    cdef double k4[12]
    cdef double U[4]
    # rate filters: phi_d, d(phi_d), theta_d, d(theta_d)
    cdef double f_prev[4]
    cdef double f_rate[4]
    cdef double vals[4]
    cdef bint f_init = False
    cdef double alpha = dt / (tau + dt)
    cdef double t, s_, c_, px, py, pz, vx, vy, vz, ax, ay, az
    cdef double Ux, Uy, Uz, U1, arg, phi_d, theta_d, inv_m
    cdef double f_phi, f_theta, f_psi, g_phi, g_theta, g_psi
    cdef long step, i, j, n_valid = 0
    cdef bint diverged = False, failed = False
    for i in range(6):
        q[i] = params[i]
    for i in range(12):
        k[i] = gains[i]
        x[i] = x0[i]
    inv_m = 1.0 / q[0]
    g_phi = q[1] / q[2]
    if corrected:
        g_theta = q[1] / q[3]
        g_psi = 1.0 / q[4]
    else:
        g_theta = q[1] / q[2]
        g_psi = q[1] / q[2]
    with nogil:
        for step in range(nsteps + 1):
            t = step * dt
            s_ = sin(OMEGA * t)
            c_ = cos(OMEGA * t)
            px = 0.5 * s_
            py = 0.5 * c_
            pz = t / 6.0
            vx = 0.5 * OMEGA * c_
            vy = -0.5 * OMEGA * s_
            vz = 1.0 / 6.0
            ax = -0.5 * (OMEGA * OMEGA) * s_
            ay = -0.5 * (OMEGA * OMEGA) * c_
            az = 0.0
            if (_bs_channel(k[6], k[7], x[6], x[7], px, vx, ax, 0.0, inv_m, &Ux)
                    or _bs_channel(k[8], k[9], x[8], x[9], py, vy, ay, 0.0, inv_m, &Uy)
                    or _bs_channel(k[10], k[11], x[10], x[11], pz, vz, az, -q[5], inv_m, &Uz)):
                failed = True
                break
            U1 = sqrt(Ux * Ux + Uy * Uy + Uz * Uz)
            if U1 == 0.0:
                failed = True
                break
            arg = (Ux * sin(0.0) - Uy * cos(0.0)) / U1
            if fabs(arg) > 1.0 + 1e-9:
                failed = True
                break
            if arg > 1.0:
                arg = 1.0
            elif arg < -1.0:
                arg = -1.0
            if Uz == 0.0:
                failed = True
                break
            phi_d = asin(arg)
            theta_d = atan((Ux * cos(0.0) + Uy * sin(0.0)) / Uz)
            vals[0] = phi_d
            vals[2] = theta_d
            for j in range(0, 4, 2):
                if f_init:
                    f_rate[j] += alpha * ((vals[j] - f_prev[j]) / dt - f_rate[j])
                else:
                    f_rate[j] = 0.0
                f_prev[j] = vals[j]
                vals[j + 1] = f_rate[j]
                if f_init:
                    f_rate[j + 1] += alpha * ((vals[j + 1] - f_prev[j + 1]) / dt - f_rate[j + 1])
                else:
                    f_rate[j + 1] = 0.0
                f_prev[j + 1] = vals[j + 1]
            f_init = True
            f_phi = x[3] * x[5] * (q[3] - q[4]) / q[2]
            f_theta = x[1] * x[5] * (q[4] - q[2]) / q[3]
            f_psi = x[3] * x[1] * (q[2] - q[3]) / q[4]
            U[0] = U1
            if (_bs_channel(k[0], k[1], x[0], x[1], phi_d, vals[1], f_rate[1], f_phi, g_phi, &U[1])
                    or _bs_channel(k[2], k[3], x[2], x[3], theta_d, vals[3], f_rate[3], f_theta, g_theta, &U[2])
                    or _bs_channel(k[4], k[5], x[4], x[5], 0.0, 0.0, 0.0, f_psi, g_psi, &U[3])):
                failed = True
                break
            for i in range(12):
                states[step, i] = x[i]
            for i in range(4):
                controls[step, i] = U[i]
            refs[step, 0] = px
            refs[step, 1] = py
            refs[step, 2] = pz
            n_valid = step + 1
            if step == nsteps:
                break
            _quad_rhs(q, corrected, U, x, k1)
            for i in range(12):
                xs[i] = x[i] + dt / 2.0 * k1[i]
            _quad_rhs(q, corrected, U, xs, k2)
            for i in range(12):
                xs[i] = x[i] + dt / 2.0 * k2[i]
            _quad_rhs(q, corrected, U, xs, k3)
            for i in range(12):
                xs[i] = x[i] + dt * k3[i]
            _quad_rhs(q, corrected, U, xs, k4)
            for i in range(12):
                x[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
            for i in range(12):
                if not isfinite(x[i]) or fabs(x[i]) > bound:
                    diverged = True
            if diverged:
                break
    return (states_arr[:n_valid], controls_arr[:n_valid], refs_arr[:n_valid],
            bool(diverged or failed), bool(failed))
