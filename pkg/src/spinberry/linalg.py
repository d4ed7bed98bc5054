"""Pauli and Dirac matrices in the Weyl (chiral) representation.

Metric signature is (+, -, -, -). All returned matrices are read-only
``complex128`` arrays; copy them before mutating.
"""

from __future__ import annotations

import numpy as np

_AXES = {"x": 0, "y": 1, "z": 2, 1: 0, 2: 1, 3: 2}


def _frozen(a):
    a = np.array(a, dtype=np.complex128)
    a.setflags(write=False)
    return a


I2 = _frozen(np.eye(2))
I4 = _frozen(np.eye(4))
ZERO2 = np.zeros((2, 2), dtype=np.complex128)

SIGMA = _frozen(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ]
)

METRIC = np.diag([1.0, -1.0, -1.0, -1.0])
METRIC.setflags(write=False)


def pauli(axis) -> np.ndarray:
    """Pauli matrix for ``axis`` in {"x", "y", "z"} (or 1, 2, 3)."""
    try:
        return SIGMA[_AXES[axis]]
    except KeyError:
        raise ValueError(f"unknown Pauli axis {axis!r}") from None


def _blocks(a, b, c, d):
    return np.block([[a, b], [c, d]])


GAMMA = _frozen(
    [_blocks(ZERO2, I2, I2, ZERO2)]
    + [_blocks(ZERO2, -SIGMA[k], SIGMA[k], ZERO2) for k in range(3)]
)
# gamma_mu = g_{mu nu} gamma^nu
GAMMA_LOWER = _frozen([METRIC[mu, mu] * GAMMA[mu] for mu in range(4)])


def gamma(mu: int) -> np.ndarray:
    """Contravariant Dirac matrix gamma^mu, mu in 0..3."""
    if mu not in (0, 1, 2, 3):
        raise ValueError(f"gamma index must be 0..3, got {mu!r}")
    return GAMMA[mu]


def gamma_lower(mu: int) -> np.ndarray:
    if mu not in (0, 1, 2, 3):
        raise ValueError(f"gamma index must be 0..3, got {mu!r}")
    return GAMMA_LOWER[mu]


def sigma_munu(mu: int, nu: int) -> np.ndarray:
    """Relativistic spin tensor (i/2)(gamma_mu gamma_nu - gamma_nu gamma_mu)."""
    gm, gn = gamma_lower(mu), gamma_lower(nu)
    return _frozen(0.5j * (gm @ gn - gn @ gm))


# spatial spin operators (sigma_23, sigma_31, sigma_12)
SPIN_OPERATORS = _frozen([sigma_munu(2, 3), sigma_munu(3, 1), sigma_munu(1, 2)])

ALPHA = _frozen([GAMMA[0] @ GAMMA[k] for k in (1, 2, 3)])
BETA = GAMMA[0]


def anticommutator(a, b):
    return a @ b + b @ a


def commutator(a, b):
    return a @ b - b @ a


def slash(p0, p):
    """gamma^mu p_mu for covariant components p_mu = (p0, -p).

    ``p`` may carry leading batch dimensions: shape (..., 3) -> (..., 4, 4).
    """
    p = np.asarray(p, dtype=float)
    p0 = np.asarray(p0, dtype=float)
    out = p0[..., None, None] * GAMMA[0]
    out = out - np.einsum("...k,kij->...ij", p, GAMMA[1:])
    return out


def dirac_hamiltonian(p, m: float) -> np.ndarray:
    """Momentum-space Dirac Hamiltonian alpha.p + beta m, batched over p."""
    p = np.asarray(p, dtype=float)
    return np.einsum("...k,kij->...ij", p, ALPHA) + m * BETA


def pauli_dot(v) -> np.ndarray:
    """sigma . v for real or complex 3-vectors, batched over leading axes."""
    v = np.asarray(v)
    return np.einsum("...k,kij->...ij", v, SIGMA)


def hermitian_exp2(b, dt: float) -> np.ndarray:
    """exp(-i dt b.sigma) for real 3-vectors ``b`` (closed form, batched)."""
    b = np.asarray(b, dtype=float)
    norm = np.linalg.norm(b, axis=-1)
    angle = norm * dt
    with np.errstate(invalid="ignore", divide="ignore"):
        unit = np.where(norm[..., None] > 0, b / np.where(norm > 0, norm, 1.0)[..., None], 0.0)
    c = np.cos(angle)[..., None, None]
    s = np.sin(angle)[..., None, None]
    return c * I2 - 1j * s * pauli_dot(unit)
