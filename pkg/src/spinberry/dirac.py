"""Free-electron Dirac wave packets with a spin-carrying Pauli spinor.

A family state is

    Psi(r, t) = int d^3p (2pi)^(-3/2) E_p^-1 f(p) exp(-i(E_p t - p.r)) u(p; w),
    u(p; w)   = (gamma^mu p_mu + m) (w_+, w_-, 0, 0),   p_0 = E_p,

i.e. upper block m w and lower block (E_p - sigma.p) w. Because u is linear
in w, every momentum-space bilinear of two family states reduces to
w1^dag K w2 with a 2x2 matrix K integrated once per (mass, profile,
quadrature); :func:`momentum_overlap` can also evaluate the integral node by
node (``route="direct"``) to cross-check that reduction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from . import kernels
from .errors import DegenerateDenominator, ZeroSpinVector
from .linalg import GAMMA, I4, SPIN_OPERATORS, slash
from .quadrature import MomentumGrid, QuadratureSpec, RadialProfile
from .spin import canonical_spinor

_FOURIER_NORM = (2.0 * np.pi) ** -1.5


def energy(p, m: float):
    """E_p = sqrt(m^2 + |p|^2), batched over the trailing momentum axis."""
    if not m > 0:
        raise ValueError("mass must be positive")
    p = np.asarray(p, dtype=float)
    return np.sqrt(m * m + np.sum(p * p, axis=-1))


def u_spinor(p, a, m: float):
    """Positive-energy eigenspinor (gamma^mu p_mu + m) a with p_0 = +E_p."""
    p = np.asarray(p, dtype=float)
    return np.einsum("...ij,...j->...i", slash(energy(p, m), p) + m * I4, np.asarray(a, dtype=complex))


def v_spinor(p, a_tilde, m: float):
    """Negative-energy eigenspinor (gamma^mu p_mu + m) a with p_0 = -E_p."""
    p = np.asarray(p, dtype=float)
    return np.einsum("...ij,...j->...i", slash(-energy(p, m), p) + m * I4, np.asarray(a_tilde, dtype=complex))


def basis_bispinors(p, m: float):
    """u(p; e_j) for the two spinor basis vectors, shape (..., 2, 4)."""
    p = np.asarray(p, dtype=float)
    op = slash(energy(p, m), p) + m * I4
    # columns 0 and 1 of (slash + m) are u for w = (1, 0) and (0, 1)
    return np.swapaxes(op[..., :, :2], -1, -2)


@dataclass(frozen=True)
class DiracFamily:
    """Spin-parametrized family of electron wave packets.

    ``spinor_map`` takes spin vectors (..., 3) to Pauli spinors (..., 2);
    ``quadrature`` is the default momentum rule used by every integral.
    """

    mass: float = 1.0
    profile: RadialProfile = field(default_factory=RadialProfile)
    spinor_map: Callable = canonical_spinor
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError("mass must be positive")

    def spinor(self, s):
        s = np.asarray(s, dtype=float)
        if np.any(np.linalg.norm(s, axis=-1) == 0):
            raise ZeroSpinVector("zero spin vector")
        return self.spinor_map(s)

    def with_quadrature(self, q: QuadratureSpec) -> "DiracFamily":
        return DiracFamily(self.mass, self.profile, self.spinor_map, q)

    def grid(self, q: QuadratureSpec | None = None) -> MomentumGrid:
        return _grid(self.profile, self.mass, q or self.quadrature)

    def forms(self, q: QuadratureSpec | None = None) -> dict:
        """2x2 matrices K with  int d^3r Psi1^dag A Psi2 = w1^dag K w2  for the stored operators."""
        return _forms(self.mass, self.profile, q or self.quadrature)

    def gram(self, q: QuadratureSpec | None = None) -> np.ndarray:
        return self.forms(q)["overlap"]


@lru_cache(maxsize=32)
def _grid(profile: RadialProfile, mass: float, q: QuadratureSpec) -> MomentumGrid:
    profile.check_tail(mass)
    return MomentumGrid.build(q, profile.cutoff)


@lru_cache(maxsize=32)
def _forms(mass: float, profile: RadialProfile, q: QuadratureSpec) -> dict:
    grid = _grid(profile, mass, q)
    e = grid.energy(mass)
    # Plancherel: int d^3r Psi^dag A Psi = int d^3p E^-2 f^2 u^dag A u
    wts = grid.weights * profile(grid.radii) ** 2 / (e * e)
    basis = basis_bispinors(grid.nodes, mass)
    g0 = GAMMA[0]
    ops = np.stack([I4, g0] + [g0 @ sk for sk in SPIN_OPERATORS] + list(SPIN_OPERATORS))
    k = kernels.quadrature_forms(wts, basis, ops)
    out = {
        "overlap": k[0],
        "scalar": k[1],
        "spin_bar": k[2:5],
        "spin_dagger": k[5:8],
    }
    for v in out.values():
        v.setflags(write=False)
    return out


def family_bispinor(fam: DiracFamily, s, p):
    """u(p; w(s)): momentum-space bispinor of the family member labelled by s."""
    w = fam.spinor(s)
    return np.einsum("...j,...ja->...a", w, basis_bispinors(p, fam.mass))


def _bilinear(w1, k, w2):
    return np.einsum("...i,ij,...j->...", np.conj(w1), k, w2)


def momentum_overlap(fam: DiracFamily, s1, s2, q: QuadratureSpec | None = None, route: str = "gram"):
    """<Psi(s1)|Psi(s2)> = int d^3p E^-2 f^2 u^dag(p; w1) u(p; w2).

    ``route="gram"`` contracts the spinors with the precomputed 2x2 kernel;
    ``route="direct"`` sums the full bispinor products node by node.
    """
    w1, w2 = fam.spinor(s1), fam.spinor(s2)
    if route == "gram":
        return _bilinear(w1, fam.gram(q), w2)
    if route != "direct":
        raise ValueError(f"unknown overlap route {route!r}")
    grid = fam.grid(q)
    e = grid.energy(fam.mass)
    wts = grid.weights * fam.profile(grid.radii) ** 2 / (e * e)
    basis = basis_bispinors(grid.nodes, fam.mass)
    w1 = np.atleast_2d(w1)
    w2 = np.atleast_2d(w2)
    u1 = np.einsum("mj,nja->mna", w1, basis)
    u2 = np.einsum("mj,nja->mna", w2, basis)
    val = np.sum(np.sum(u1.conj() * u2, axis=-1) * wts, axis=-1)
    return val if np.ndim(s1) > 1 or np.ndim(s2) > 1 else val[0]


def normalized_overlap(fam: DiracFamily, s1, s2, q: QuadratureSpec | None = None):
    """Overlap of the two family states after each is scaled to unit norm."""
    k = fam.gram(q)
    w1, w2 = fam.spinor(s1), fam.spinor(s2)
    n1 = _bilinear(w1, k, w1).real
    n2 = _bilinear(w2, k, w2).real
    return _bilinear(w1, k, w2) / np.sqrt(n1 * n2)


def evaluate_wavefunction(fam: DiracFamily, s, r, t: float, q: QuadratureSpec | None = None):
    """Psi(r, t) for one spin label ``s`` at point(s) ``r`` (..., 3) -> (..., 4)."""
    w = fam.spinor(s)
    grid = fam.grid(q)
    e = grid.energy(fam.mass)
    amp = _FOURIER_NORM * grid.weights * fam.profile(grid.radii) / e
    r = np.asarray(r, dtype=float)
    pts = r.reshape(-1, 3)
    basis = basis_bispinors(grid.nodes, fam.mass)
    vals = kernels.plane_wave_sum(pts, t, grid.nodes, e, amp, basis)
    psi = np.einsum("j,mja->ma", w, vals)
    return psi.reshape(r.shape[:-1] + (4,))


def spin_expectation(fam: DiracFamily, s, q: QuadratureSpec | None = None, density: str = "bar"):
    """Expectation of (sigma_23, sigma_31, sigma_12).

    ``density="bar"`` divides int Psibar s Psi by int Psibar Psi (Psibar =
    Psi^dag gamma^0); ``density="dagger"`` uses Psi^dag in both integrals,
    which does not give a unit vector for a relativistic packet.
    """
    forms = fam.forms(q)
    w = fam.spinor(s)
    if density == "bar":
        num_k, den_k = forms["spin_bar"], forms["scalar"]
    elif density == "dagger":
        num_k, den_k = forms["spin_dagger"], forms["overlap"]
    else:
        raise ValueError(f"unknown density {density!r}")
    den = _bilinear(w, den_k, w).real
    scale = _bilinear(w, forms["overlap"], w).real
    if np.any(den <= 1e-12 * scale):
        raise DegenerateDenominator("int Psibar Psi d^3r is not positive for this profile")
    num = np.stack([_bilinear(w, num_k[i], w).real for i in range(3)], axis=-1)
    return num / np.asarray(den)[..., None]
