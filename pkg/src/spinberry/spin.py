"""Maps between spin vectors and Pauli spinors.

Spin vectors are real arrays with trailing dimension 3, spinors complex
arrays with trailing dimension 2; every function broadcasts over leading
axes. The spherical half-angle form

    w = (cos(theta/2) exp(-i phi/2), sin(theta/2) exp(+i phi/2))

is the canonical parametrization. Its phase jumps by -1 across the
half-plane phi = pi (s_y = 0, s_x < 0) and is undefined on the s_z axis.
"""

from __future__ import annotations

import numpy as np

from .errors import PoleSingularity, ZeroSpinor, ZeroSpinVector
from .linalg import SIGMA

# s_perp / |s| below this is treated as lying on the gauge string.
POLE_GUARD = 1e-6


def _as_spin(s):
    s = np.asarray(s, dtype=float)
    if s.shape[-1] != 3:
        raise ValueError(f"spin vectors need a trailing axis of length 3, got shape {s.shape}")
    return s


def norms(s):
    """Return (|s|, s_perp) for spin vector(s) ``s``."""
    s = _as_spin(s)
    return np.linalg.norm(s, axis=-1), np.hypot(s[..., 0], s[..., 1])


def check_nonzero(s):
    s = _as_spin(s)
    mag = np.linalg.norm(s, axis=-1)
    if np.any(mag == 0) or not np.all(np.isfinite(mag)):
        raise ZeroSpinVector("zero spin vector")
    return s


def check_off_pole(s, guard: float = POLE_GUARD):
    """Raise PoleSingularity if any point has s_perp < guard * |s|."""
    s = check_nonzero(s)
    mag, perp = norms(s)
    if np.any(perp < guard * mag):
        raise PoleSingularity(
            f"spin vector within s_perp/|s| < {guard:g} of the s_z axis; the gauge is singular there"
        )
    return s


def angles_from_spin(s):
    """Polar angle theta in [0, pi] and azimuth phi in (-pi, pi]."""
    s = check_nonzero(s)
    mag, perp = norms(s)
    theta = np.arctan2(perp, s[..., 2])
    phi = np.arctan2(s[..., 1], s[..., 0])
    phi = np.where(phi <= -np.pi, np.pi, phi)
    return theta, phi


def spin_from_angles(theta, phi):
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    st = np.sin(theta)
    return np.stack([np.cos(phi) * st, np.sin(phi) * st, np.cos(theta)], axis=-1)


def spinor_from_angles(theta, phi):
    """Unit spinor whose spin vector points along (theta, phi)."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    half = 0.5j * phi
    return np.stack([np.cos(theta / 2) * np.exp(-half), np.sin(theta / 2) * np.exp(half)], axis=-1)


def canonical_spinor(s):
    """The default spin map: spherical half-angle spinor of the direction of ``s``."""
    theta, phi = angles_from_spin(s)
    return spinor_from_angles(theta, phi)


def spinor_from_cartesian(s):
    """Half-angle spinor written directly in Cartesian components.

    Built for s_y >= 0 and complex-conjugated for s_y < 0, which is the same
    function as :func:`canonical_spinor` away from the s_z axis.
    """
    s = check_off_pole(s)
    mag, perp = norms(s)
    cz_p = np.sqrt(np.clip(1 + s[..., 2] / mag, 0, 2))
    cz_m = np.sqrt(np.clip(1 - s[..., 2] / mag, 0, 2))
    cx_p = np.sqrt(np.clip(1 + s[..., 0] / perp, 0, 2))
    cx_m = np.sqrt(np.clip(1 - s[..., 0] / perp, 0, 2))
    w = 0.5 * np.stack([cz_p * (cx_p - 1j * cx_m), cz_m * (cx_p + 1j * cx_m)], axis=-1)
    return np.where((s[..., 1] < 0)[..., None], w.conj(), w)


def cartesian_spinor_uncorrected(s):
    """Cartesian spinor with the factors exactly as originally typeset.

    The second component carries sqrt(1 - s_x/s) and sqrt(1 + s_z/s_perp)
    where the half-angle form requires sqrt(1 - s_z/s) and sqrt(1 + s_x/s_perp),
    and no overall 1/2 is applied. Kept only so the mismatch can be measured
    with :func:`cartesian_discrepancy`; do not use it as a spin map.
    """
    s = check_off_pole(s)
    mag, perp = norms(s)
    sx, sz = s[..., 0], s[..., 2]
    with np.errstate(invalid="ignore"):
        first = np.sqrt(1 + sz / mag + 0j) * (np.sqrt(1 + sx / perp + 0j) - 1j * np.sqrt(1 - sx / perp + 0j))
        second = np.sqrt(1 - sx / mag + 0j) * (np.sqrt(1 + sz / perp + 0j) + 1j * np.sqrt(1 - sx / perp + 0j))
    w = np.stack([first, second], axis=-1)
    return np.where((s[..., 1] < 0)[..., None], w.conj(), w)


def cartesian_discrepancy(s):
    """Angle (radians) between s and the spin vector of the uncorrected Cartesian spinor."""
    s = check_off_pole(s)
    back = spin_vector_from_spinor(cartesian_spinor_uncorrected(s))
    unit = s / np.linalg.norm(s, axis=-1, keepdims=True)
    cosang = np.clip(np.sum(unit * back, axis=-1), -1.0, 1.0)
    return np.arccos(cosang)


def spin_vector_from_spinor(w):
    """Unit vector (w^dag sigma w) / (w^dag w)."""
    w = np.asarray(w, dtype=complex)
    if w.shape[-1] != 2:
        raise ValueError(f"spinors need a trailing axis of length 2, got shape {w.shape}")
    nrm = np.sum(np.abs(w) ** 2, axis=-1)
    if np.any(nrm == 0):
        raise ZeroSpinor("zero spinor")
    vec = np.einsum("...i,kij,...j->...k", w.conj(), SIGMA, w).real
    return vec / nrm[..., None]
