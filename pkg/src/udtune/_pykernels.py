"""Pure-Python/NumPy fallback for the compiled kernels in ``_ckernels.pyx``.

Each function keeps the exact signature and return layout of its compiled
twin so :mod:`udtune.kernels` can swap them freely.
"""
import math

import numpy as np

HALF_PI_LIMIT = math.pi / 2 - 1e-6


def glp_column(n, h):
    # Running sum of the recursion, wrapped back into 1..n in one vector pass.
    u = np.cumsum(np.full(n, h, dtype=np.int64))
    return (u - 1) % n + 1


def cd2_squared(x):
    x = np.ascontiguousarray(x, dtype=np.float64)
    n, s = x.shape
    dev = np.abs(x - 0.5)
    sum1 = float(np.sum(np.prod(2.0 + dev - (x - 0.5) ** 2, axis=1)))
    prod = np.ones((n, n))
    for j in range(s):
        col = x[:, j]
        prod *= (1.0 + 0.5 * dev[:, j, None] + 0.5 * dev[None, :, j]
                 - 0.5 * np.abs(col[:, None] - col[None, :]))
    sum2 = float(prod.sum())
    return (13.0 / 12.0) ** s - 2.0 ** (1 - s) / n * sum1 + sum2 / (n * n)


def _pair_term(col):
    dev = np.abs(col - 0.5)
    return 1.0 + 0.5 * dev[:, None] + 0.5 * dev[None, :] - 0.5 * np.abs(col[:, None] - col[None, :])


def cd2_scan(prod1, prod2, cand, s_new):
    n = prod1.shape[0]
    lead = (13.0 / 12.0) ** s_new
    scale = 2.0 ** (1 - s_new)
    out = np.empty(cand.shape[0])
    for c, col in enumerate(cand):
        d = col - 0.5
        sum1 = float(np.dot(prod1, 2.0 + np.abs(d) - d * d))
        sum2 = float(np.sum(prod2 * _pair_term(col)))
        out[c] = lead - scale / n * sum1 + sum2 / (n * n)
    return out


def cd2_absorb(prod1, prod2, col):
    d = col - 0.5
    prod1 *= 2.0 + np.abs(d) - d * d
    prod2 *= _pair_term(col)


def _heli_rhs(p, u1, u2, inertia, x):
    kf, la, je, jp, g, m, lh = p
    a = kf * la * math.cos(x[2]) * u1 - m * g * la * math.cos(x[0])
    b = kf * lh * u2
    if inertia:
        a = a / je
        b = b / jp
    return (x[1], a, x[3], b)


def helicopter_run(params, gains, refs, x0, dt, nsteps, bound, inertia):
    p = [float(v) for v in params]
    kpe, kde, kie, kpp, kdp, kip = (float(v) for v in gains)
    r_ele, r_pit = float(refs[0]), float(refs[1])
    states = np.zeros((nsteps + 1, 4))
    controls = np.zeros((nsteps + 1, 2))
    x = [float(v) for v in x0]
    ep_ele = ep_pit = int_ele = int_pit = 0.0
    n_valid = 0
    clamps = 0
    diverged = False
    half = dt / 2.0
    for k in range(nsteps + 1):
        e_ele = r_ele - x[0]
        e_pit = r_pit - x[2]
        if k == 0:
            ep_ele, ep_pit = e_ele, e_pit
        else:
            int_ele += dt * (e_ele + ep_ele) / 2.0
            int_pit += dt * (e_pit + ep_pit) / 2.0
        u1 = kpe * e_ele + kde * (e_ele - ep_ele) / dt + kie * int_ele
        u2 = kpp * e_pit + kdp * (e_pit - ep_pit) / dt + kip * int_pit
        ep_ele, ep_pit = e_ele, e_pit
        states[k] = x
        controls[k, 0] = u1
        controls[k, 1] = u2
        n_valid = k + 1
        if k == nsteps:
            break
        k1 = _heli_rhs(p, u1, u2, inertia, x)
        k2 = _heli_rhs(p, u1, u2, inertia, [x[i] + half * k1[i] for i in range(4)])
        k3 = _heli_rhs(p, u1, u2, inertia, [x[i] + half * k2[i] for i in range(4)])
        k4 = _heli_rhs(p, u1, u2, inertia, [x[i] + dt * k3[i] for i in range(4)])
        x = [x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) for i in range(4)]
        if x[2] > HALF_PI_LIMIT:
            x[2], x[3] = HALF_PI_LIMIT, 0.0
            clamps += 1
        elif x[2] < -HALF_PI_LIMIT:
            x[2], x[3] = -HALF_PI_LIMIT, 0.0
            clamps += 1
        if any(not math.isfinite(v) or abs(v) > bound for v in x):
            diverged = True
            break
    return states[:n_valid], controls[:n_valid], diverged, clamps
