"""Compiled pairwise kernels.

Each kernel loops over pairs in (i < j) lexicographic order so results are
bit-reproducible. Instead of raising, a kernel reports the first pair whose
denominator falls below the threshold through ``bad`` (``-1`` when clean);
the Python wrappers in ``dynamics`` turn that into an exception.
"""

import math

import numpy as np
from numba import njit

_INV_2PI = 1.0 / (2.0 * math.pi)
_INV_4PI = 1.0 / (4.0 * math.pi)


@njit(cache=True)
def grad_sphere(gamma, x, sigma, threshold):
    n = gamma.shape[0]
    out = np.zeros((n, 3))
    bad = np.array([-1, -1])
    s2 = 2.0 * sigma * sigma
    for i in range(n):
        for j in range(i + 1, n):
            d0 = x[i, 0] - x[j, 0]
            d1 = x[i, 1] - x[j, 1]
            d2 = x[i, 2] - x[j, 2]
            arg = s2 + d0 * d0 + d1 * d1 + d2 * d2
            if arg <= threshold:
                bad[0] = i
                bad[1] = j
                return out, bad
            w = gamma[i] * gamma[j] * _INV_2PI / arg
            out[i, 0] -= w * d0
            out[i, 1] -= w * d1
            out[i, 2] -= w * d2
            out[j, 0] += w * d0
            out[j, 1] += w * d1
            out[j, 2] += w * d2
    return out, bad


@njit(cache=True)
def vector_field(gamma, x, sigma, threshold):
    n = gamma.shape[0]
    out = np.zeros((n, 3))
    bad = np.array([-1, -1])
    base = 1.0 + sigma * sigma
    for i in range(n):
        for j in range(i + 1, n):
            denom = base - (x[i, 0] * x[j, 0] + x[i, 1] * x[j, 1] + x[i, 2] * x[j, 2])
            if denom < threshold:
                bad[0] = i
                bad[1] = j
                return out, bad
            # c = x_j x x_i; the (j, i) term is -c
            c0 = x[j, 1] * x[i, 2] - x[j, 2] * x[i, 1]
            c1 = x[j, 2] * x[i, 0] - x[j, 0] * x[i, 2]
            c2 = x[j, 0] * x[i, 1] - x[j, 1] * x[i, 0]
            wi = gamma[j] * _INV_4PI / denom
            wj = gamma[i] * _INV_4PI / denom
            out[i, 0] += wi * c0
            out[i, 1] += wi * c1
            out[i, 2] += wi * c2
            out[j, 0] -= wj * c0
            out[j, 1] -= wj * c1
            out[j, 2] -= wj * c2
    return out, bad


@njit(cache=True)
def grad_lifted(gamma, phi, sigma, threshold):
    n = gamma.shape[0]
    out = np.zeros((n, 2), dtype=np.complex128)
    bad = np.array([-1, -1])
    s2 = 2.0 * sigma * sigma
    for i in range(n):
        zi = phi[i, 0]
        ui = phi[i, 1]
        ni = zi.real * zi.real + zi.imag * zi.imag + ui.real * ui.real + ui.imag * ui.imag
        for j in range(i + 1, n):
            zj = phi[j, 0]
            uj = phi[j, 1]
            nj = zj.real * zj.real + zj.imag * zj.imag + uj.real * uj.real + uj.imag * uj.imag
            s = zi.conjugate() * zj + ui.conjugate() * uj  # <phi_i, phi_j>
            tot = ni + nj
            chord2 = tot * tot - 4.0 * (s.real * s.real + s.imag * s.imag)
            if chord2 < 0.0:
                chord2 = 0.0
            arg = s2 + chord2
            if arg <= threshold:
                bad[0] = i
                bad[1] = j
                return out, bad
            w = gamma[i] * gamma[j] * _INV_4PI / arg
            r = 2.0 * w * tot
            q = 4.0 * w
            sc = s.conjugate()
            out[i, 0] -= r * zi - q * sc * zj
            out[i, 1] -= r * ui - q * sc * uj
            out[j, 0] -= r * zj - q * s * zi
            out[j, 1] -= r * uj - q * s * ui
    return out, bad


@njit(cache=True)
def energy_sphere(gamma, x, sigma, threshold):
    n = gamma.shape[0]
    bad = np.array([-1, -1])
    s2 = 2.0 * sigma * sigma
    total = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            d0 = x[i, 0] - x[j, 0]
            d1 = x[i, 1] - x[j, 1]
            d2 = x[i, 2] - x[j, 2]
            arg = s2 + d0 * d0 + d1 * d1 + d2 * d2
            if arg <= threshold:
                bad[0] = i
                bad[1] = j
                return 0.0, bad
            total += gamma[i] * gamma[j] * math.log(arg)
    return -total * _INV_4PI, bad


@njit(cache=True)
def rotate(xi, x):
    """Rodrigues rotation of each row of ``x`` by the rotation vector in ``xi``."""
    n = x.shape[0]
    out = np.empty((n, 3))
    for k in range(n):
        a0, a1, a2 = xi[k, 0], xi[k, 1], xi[k, 2]
        t2 = a0 * a0 + a1 * a1 + a2 * a2
        t = math.sqrt(t2)
        if t < 1e-8:
            s1 = 1.0
            s2 = 0.5
        else:
            s1 = math.sin(t) / t
            h = math.sin(0.5 * t) / t
            s2 = 2.0 * h * h  # (1 - cos t)/t^2 without cancellation
        v0, v1, v2 = x[k, 0], x[k, 1], x[k, 2]
        c0 = a1 * v2 - a2 * v1
        c1 = a2 * v0 - a0 * v2
        c2 = a0 * v1 - a1 * v0
        d0 = a1 * c2 - a2 * c1
        d1 = a2 * c0 - a0 * c2
        d2 = a0 * c1 - a1 * c0
        out[k, 0] = v0 + s1 * c0 + s2 * d0
        out[k, 1] = v1 + s1 * c1 + s2 * d1
        out[k, 2] = v2 + s1 * c2 + s2 * d2
    return out


@njit(cache=True)
def planar_rhs(gamma, z, threshold):
    n = gamma.shape[0]
    out = np.zeros(n, dtype=np.complex128)
    bad = np.array([-1, -1])
    for i in range(n):
        for j in range(i + 1, n):
            d = z[i] - z[j]
            r2 = d.real * d.real + d.imag * d.imag
            if r2 <= threshold:
                bad[0] = i
                bad[1] = j
                return out, bad
            # i / (2 pi conj(d)) = i d / (2 pi |d|^2)
            k = 1j * d * _INV_2PI / r2
            out[i] += gamma[j] * k
            out[j] -= gamma[i] * k
    return out, bad


@njit(cache=True)
def planar_energy(gamma, z, threshold):
    n = gamma.shape[0]
    bad = np.array([-1, -1])
    total = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            d = z[i] - z[j]
            r2 = d.real * d.real + d.imag * d.imag
            if r2 <= threshold:
                bad[0] = i
                bad[1] = j
                return 0.0, bad
            total += gamma[i] * gamma[j] * math.log(r2)
    return -total * _INV_4PI, bad
