"""Complex pairs, Pauli matrices and the SU(2) action on the three-sphere.

Array conventions used throughout the package:

* a complex pair ``phi = (z, u)`` is an array of shape ``(..., 2)`` with
  complex dtype;
* an algebra vector ``a`` is a real array of shape ``(..., 3)`` standing for
  the anti-Hermitian traceless matrix ``A = sum_k a_k (i sigma_k)``;
* points of the two-sphere are real arrays of shape ``(..., 3)``.

All functions broadcast over leading axes.
"""

import numpy as np

from .errors import DomainError

__all__ = [
    "SIGMA",
    "IDENTITY",
    "hopf_project",
    "hopf_lift",
    "cayley",
    "cayley_apply",
    "algebra_matrix",
    "algebra_apply",
    "pauli_apply",
    "pauli_sandwich",
    "hermitian_inner",
]

SIGMA = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
SIGMA.setflags(write=False)

IDENTITY = np.eye(2, dtype=complex)
IDENTITY.setflags(write=False)

# below this the section z = sqrt((1 + x3)/2) loses accuracy
_SECTION_SWITCH = -0.5


def hopf_project(phi):
    """Map complex pairs to R^3 with the Hopf map.

    Returns ``(2 Re(z* u), 2 Im(z* u), |z|^2 - |u|^2)``. Unit pairs land on
    the unit sphere; other pairs are mapped by the same quadratic formula.

    Raises
    ------
    DomainError
        If any pair is identically zero.
    """
    phi = np.asarray(phi, dtype=complex)
    z = phi[..., 0]
    u = phi[..., 1]
    zz = z.real * z.real + z.imag * z.imag
    uu = u.real * u.real + u.imag * u.imag
    if np.any(zz + uu == 0.0):
        raise DomainError("hopf_project is undefined for the zero pair")
    w = np.conj(z) * u
    return np.stack([2.0 * w.real, 2.0 * w.imag, zz - uu], axis=-1)


def hopf_lift(x):
    """Return a unit pair ``phi`` with ``hopf_project(phi) == x``.

    Uses the section with real ``z`` on the northern part of the sphere and
    the section with real ``u`` when ``x3 < -1/2``.
    """
    x = np.asarray(x, dtype=float)
    norm = np.linalg.norm(x, axis=-1)
    if np.any(np.abs(norm - 1.0) > 1e-10):
        raise DomainError("hopf_lift expects unit vectors")
    x1, x2, x3 = x[..., 0], x[..., 1], x[..., 2]
    south = x3 < _SECTION_SWITCH
    w = x1 + 1j * x2

    # evaluate both sections with guarded denominators, then select
    zn = np.sqrt(np.clip((1.0 + x3) / 2.0, 0.0, None))
    us = np.sqrt(np.clip((1.0 - x3) / 2.0, 0.0, None))
    zn_safe = np.where(south, 1.0, zn)
    us_safe = np.where(south, us, 1.0)
    north_pair = np.stack([zn + 0j, w / (2.0 * zn_safe)], axis=-1)
    south_pair = np.stack([np.conj(w) / (2.0 * us_safe), us + 0j], axis=-1)
    return np.where(south[..., None], south_pair, north_pair)


def algebra_matrix(a):
    """Return the 2x2 matrix ``sum_k a_k (i sigma_k)``."""
    a = np.asarray(a, dtype=float)
    a1, a2, a3 = a[..., 0], a[..., 1], a[..., 2]
    out = np.empty(a.shape[:-1] + (2, 2), dtype=complex)
    out[..., 0, 0] = 1j * a3
    out[..., 0, 1] = a2 + 1j * a1
    out[..., 1, 0] = -a2 + 1j * a1
    out[..., 1, 1] = -1j * a3
    return out


def pauli_apply(a, phi):
    """Return ``(a . sigma) phi`` using the closed-form Pauli products."""
    a = np.asarray(a)
    phi = np.asarray(phi)
    z = phi[..., 0]
    u = phi[..., 1]
    a1, a2, a3 = a[..., 0], a[..., 1], a[..., 2]
    w = a1 - 1j * a2
    return np.stack([a3 * z + w * u, np.conj(w) * z - a3 * u], axis=-1)


def algebra_apply(a, phi):
    """Return ``A phi`` with ``A = i a . sigma``; the result is tangent to S^3 at phi."""
    return 1j * pauli_apply(a, phi)


def cayley(a):
    """Cayley transform of the algebra element ``a``, as a 2x2 SU(2) matrix.

    Closed form ``((1 - |a|^2) I + 2 A) / (1 + |a|^2)``; equal to
    ``(I + A)(I - A)^{-1}``.
    """
    a = np.asarray(a, dtype=float)
    n2 = np.sum(a * a, axis=-1)[..., None, None]
    return ((1.0 - n2) * IDENTITY + 2.0 * algebra_matrix(a)) / (1.0 + n2)


def cayley_apply(a, phi):
    """Return ``cayley(a) @ phi`` without forming the matrix."""
    a = np.asarray(a, dtype=float)
    n2 = np.sum(a * a, axis=-1)[..., None]
    return ((1.0 - n2) * phi + 2.0 * algebra_apply(a, phi)) / (1.0 + n2)


def pauli_sandwich(phi, psi):
    """Return the three numbers ``phi^dagger sigma_k psi`` stacked on the last axis.

    ``hopf_project(phi)`` is the real part of ``pauli_sandwich(phi, phi)``.
    """
    phi = np.asarray(phi)
    psi = np.asarray(psi)
    zc = np.conj(phi[..., 0])
    uc = np.conj(phi[..., 1])
    pz = psi[..., 0]
    pu = psi[..., 1]
    return np.stack(
        [zc * pu + uc * pz, 1j * (uc * pz - zc * pu), zc * pz - uc * pu], axis=-1
    )


def hermitian_inner(phi, psi):
    """Hermitian inner product ``phi^dagger psi = z1* z2 + u1* u2``."""
    phi = np.asarray(phi)
    psi = np.asarray(psi)
    return np.sum(np.conj(phi) * psi, axis=-1)
