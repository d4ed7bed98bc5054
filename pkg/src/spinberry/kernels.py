"""Hot numeric kernels, each with a numba loop version and a numpy version.

The public names (``quadrature_forms``, ``plane_wave_sum``,
``propagate_midpoint``) bind to the numba versions when numba is active and
to the numpy versions otherwise; see :mod:`spinberry._backend`. Both
versions sum in a fixed order, so a given backend is bitwise reproducible
for a given input. The two backends agree to rounding, not bitwise.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from ._backend import BACKEND, HAS_NUMBA, njit

# ---------------------------------------------------------------- forms


def _forms_numpy(weights, basis, ops):
    # out[k, i, j] = sum_n weights[n] * basis[n, i]^dag ops[k] basis[n, j]
    applied = np.einsum("kab,njb->knja", ops, basis)
    weighted = basis.conj() * weights[:, None, None]
    return np.einsum("nia,knja->kij", weighted, applied)


def _forms_loops(weights, basis, ops):
    n_nodes = basis.shape[0]
    n_ops = ops.shape[0]
    out = np.zeros((n_ops, 2, 2), dtype=np.complex128)
    tmp = np.zeros(4, dtype=np.complex128)
    for k in range(n_ops):
        for j in range(2):
            for i in range(2):
                acc = 0j
                c = 0j
                for n in range(n_nodes):
                    for a in range(4):
                        s = 0j
                        for b in range(4):
                            s += ops[k, a, b] * basis[n, j, b]
                        tmp[a] = s
                    term = 0j
                    for a in range(4):
                        term += basis[n, i, a].conjugate() * tmp[a]
                    term *= weights[n]
                    # Neumaier compensated summation
                    t = acc + term
                    if abs(acc.real) >= abs(term.real):
                        cr = (acc.real - t.real) + term.real
                    else:
                        cr = (term.real - t.real) + acc.real
                    if abs(acc.imag) >= abs(term.imag):
                        ci = (acc.imag - t.imag) + term.imag
                    else:
                        ci = (term.imag - t.imag) + acc.imag
                    c += complex(cr, ci)
                    acc = t
                out[k, i, j] = acc + c
    return out


# ---------------------------------------------------------- plane waves


def _plane_wave_numpy(points, t, nodes, energy, amp, basis, chunk=256):
    n_nodes = nodes.shape[0]
    flat = (amp[:, None] * basis.reshape(n_nodes, -1)).astype(np.complex128)
    out = np.empty((points.shape[0], flat.shape[1]), dtype=np.complex128)
    for start in range(0, points.shape[0], chunk):
        pts = points[start : start + chunk]
        phase = np.exp(-1j * (energy[None, :] * t - pts @ nodes.T))
        out[start : start + chunk] = phase @ flat
    return out.reshape((points.shape[0],) + basis.shape[1:])


def _plane_wave_loops(points, t, nodes, energy, amp, basis):
    n_pts = points.shape[0]
    n_nodes = nodes.shape[0]
    n_b = basis.shape[1]
    n_c = basis.shape[2]
    out = np.zeros((n_pts, n_b, n_c), dtype=np.complex128)
    for q in range(n_pts):
        x = points[q, 0]
        y = points[q, 1]
        z = points[q, 2]
        acc = np.zeros((n_b, n_c), dtype=np.complex128)
        for n in range(n_nodes):
            arg = x * nodes[n, 0] + y * nodes[n, 1] + z * nodes[n, 2] - energy[n] * t
            ph = complex(math.cos(arg), math.sin(arg)) * amp[n]
            for i in range(n_b):
                for a in range(n_c):
                    acc[i, a] += ph * basis[n, i, a]
        out[q] = acc
    return out


# ------------------------------------------------------------ evolution


def _propagate_numpy(bvecs, dt, psi0):
    norm = np.linalg.norm(bvecs, axis=1)
    ang = norm * dt
    safe = np.where(norm > 0, norm, 1.0)
    ux, uy, uz = (bvecs / safe[:, None]).T
    c = np.cos(ang)
    s = np.sin(ang)
    # U = c I - i s (u . sigma)
    u00 = (c - 1j * s * uz).tolist()
    u01 = (-1j * s * (ux - 1j * uy)).tolist()
    u10 = (-1j * s * (ux + 1j * uy)).tolist()
    u11 = (c + 1j * s * uz).tolist()
    bx, by, bz = bvecs.T.tolist()
    a, b = complex(psi0[0]), complex(psi0[1])
    energies = []
    increments = []
    drift = 0.0
    for k in range(len(u00)):
        cross = a.conjugate() * b
        energies.append(2.0 * (bx[k] * cross.real + by[k] * cross.imag) + bz[k] * (abs(a) ** 2 - abs(b) ** 2))
        na = u00[k] * a + u01[k] * b
        nb = u10[k] * a + u11[k] * b
        increments.append(cmath.phase(a.conjugate() * na + b.conjugate() * nb))
        a, b = na, nb
        d = abs(abs(a) ** 2 + abs(b) ** 2 - 1.0)
        if d > drift:
            drift = d
    return np.array([a, b]), np.array(energies), np.array(increments), drift


def _propagate_loops(bvecs, dt, psi0):
    steps = bvecs.shape[0]
    energies = np.empty(steps)
    increments = np.empty(steps)
    a = psi0[0]
    b = psi0[1]
    drift = 0.0
    for k in range(steps):
        bx = bvecs[k, 0]
        by = bvecs[k, 1]
        bz = bvecs[k, 2]
        nrm = math.sqrt(bx * bx + by * by + bz * bz)
        c = math.cos(nrm * dt)
        s = math.sin(nrm * dt)
        if nrm > 0.0:
            ux = bx / nrm
            uy = by / nrm
            uz = bz / nrm
        else:
            ux = 0.0
            uy = 0.0
            uz = 0.0
        cross = a.conjugate() * b
        energies[k] = 2.0 * (bx * cross.real + by * cross.imag) + bz * (abs(a) ** 2 - abs(b) ** 2)
        na = complex(c, -s * uz) * a + (-1j * s) * complex(ux, -uy) * b
        nb = (-1j * s) * complex(ux, uy) * a + complex(c, s * uz) * b
        ov = a.conjugate() * na + b.conjugate() * nb
        increments[k] = math.atan2(ov.imag, ov.real)
        a = na
        b = nb
        d = abs(abs(a) ** 2 + abs(b) ** 2 - 1.0)
        if d > drift:
            drift = d
    out = np.empty(2, dtype=np.complex128)
    out[0] = a
    out[1] = b
    return out, energies, increments, drift


# ------------------------------------------------------------- dispatch

IMPLEMENTATIONS = {
    "quadrature_forms": {"numpy": _forms_numpy},
    "plane_wave_sum": {"numpy": _plane_wave_numpy},
    "propagate_midpoint": {"numpy": _propagate_numpy},
}

if HAS_NUMBA:
    IMPLEMENTATIONS["quadrature_forms"]["numba"] = njit(_forms_loops)
    IMPLEMENTATIONS["plane_wave_sum"]["numba"] = njit(_plane_wave_loops)
    IMPLEMENTATIONS["propagate_midpoint"]["numba"] = njit(_propagate_loops)


def _pick(name):
    return IMPLEMENTATIONS[name][BACKEND]


def quadrature_forms(weights, basis, ops):
    """Weighted sesquilinear forms  sum_n w_n basis[n,i]^dag ops[k] basis[n,j].

    weights (N,), basis (N, 2, 4), ops (K, 4, 4) -> (K, 2, 2).
    """
    return _pick("quadrature_forms")(
        np.ascontiguousarray(weights, dtype=np.float64),
        np.ascontiguousarray(basis, dtype=np.complex128),
        np.ascontiguousarray(ops, dtype=np.complex128),
    )


def plane_wave_sum(points, t, nodes, energy, amp, basis):
    """sum_n amp_n exp(-i (E_n t - p_n . r)) basis[n]  for each point r.

    points (M, 3), nodes (N, 3), energy (N,), amp (N,), basis (N, B, C) -> (M, B, C).
    """
    return _pick("plane_wave_sum")(
        np.ascontiguousarray(points, dtype=np.float64),
        float(t),
        np.ascontiguousarray(nodes, dtype=np.float64),
        np.ascontiguousarray(energy, dtype=np.float64),
        np.ascontiguousarray(amp, dtype=np.float64),
        np.ascontiguousarray(basis, dtype=np.complex128),
    )


def propagate_midpoint(bvecs, dt, psi0):
    """Apply exp(-i dt b_k . sigma) for each row b_k, in order.

    Returns (final spinor, per-step energies <psi_k|b_k.sigma|psi_k>,
    per-step phase increments arg<psi_k|psi_{k+1}>, max norm drift).
    """
    return _pick("propagate_midpoint")(
        np.ascontiguousarray(bvecs, dtype=np.float64),
        float(dt),
        np.ascontiguousarray(psi0, dtype=np.complex128),
    )
