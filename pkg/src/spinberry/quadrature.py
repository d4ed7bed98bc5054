"""Momentum-space product quadrature for spherically symmetric amplitudes."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import QuadratureDivergence

PROFILE_SHAPES = ("gaussian", "exponential")

# Relative size of p^2 f(p)^2 at the cutoff, compared with its peak, above which
# the truncated radial integral is considered unreliable.
TAIL_TOLERANCE = 1e-12


@dataclass(frozen=True)
class RadialProfile:
    """Spherically symmetric momentum amplitude f(p).

    ``gaussian``: exp(-p^2 / (2 width^2)); ``exponential``: exp(-p / width).
    The radial integral is truncated at ``p_max`` (default ``8 * width``).
    """

    shape: str = "gaussian"
    width: float = 1.0
    p_max: float | None = None

    def __post_init__(self):
        if self.shape not in PROFILE_SHAPES:
            raise ValueError(f"unknown profile shape {self.shape!r}; expected one of {PROFILE_SHAPES}")
        if not self.width > 0:
            raise ValueError("profile width must be positive")
        if self.p_max is not None and not self.p_max > 0:
            raise ValueError("p_max must be positive")

    @property
    def cutoff(self) -> float:
        return 8.0 * self.width if self.p_max is None else float(self.p_max)

    def __call__(self, p):
        x = np.asarray(p, dtype=float) / self.width
        if self.shape == "gaussian":
            return np.exp(-0.5 * x * x)
        return np.exp(-x)

    def check_tail(self, mass: float) -> None:
        """Raise QuadratureDivergence if the integrand is not negligible at the cutoff."""
        p = np.linspace(0.0, self.cutoff, 2001)
        e2 = mass * mass + p * p
        dens = p * p * (mass * mass + 2 * e2) * self(p) ** 2 / e2
        peak = dens.max()
        if not np.isfinite(peak) or peak <= 0:
            raise QuadratureDivergence("profile has no finite, nonzero weight")
        if dens[-1] > TAIL_TOLERANCE * peak:
            raise QuadratureDivergence(
                f"profile integrand at p_max={self.cutoff:g} is {dens[-1] / peak:.2e} of its peak; "
                "raise p_max or use a faster-decaying profile"
            )


@dataclass(frozen=True)
class QuadratureSpec:
    """Gauss-Legendre in p and cos(theta_p), periodic trapezoid in phi_p."""

    n_r: int = 64
    n_theta: int = 32
    n_phi: int = 32

    def __post_init__(self):
        for name in ("n_r", "n_theta", "n_phi"):
            n = getattr(self, name)
            if int(n) != n or n < 2:
                raise ValueError(f"{name} must be an integer >= 2, got {n!r}")

    def scaled(self, factor: float) -> "QuadratureSpec":
        return QuadratureSpec(
            max(2, int(round(self.n_r * factor))),
            max(2, int(round(self.n_theta * factor))),
            max(2, int(round(self.n_phi * factor))),
        )


@dataclass(frozen=True)
class MomentumGrid:
    """Nodes and weights for integrals of the form  int d^3p g(p)  on a ball."""

    spec: QuadratureSpec
    p_max: float
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    radii: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, spec: QuadratureSpec, p_max: float) -> "MomentumGrid":
        x, wx = leggauss(spec.n_r)
        r = 0.5 * p_max * (x + 1.0)
        wr = 0.5 * p_max * wx * r * r
        mu, wmu = leggauss(spec.n_theta)
        phi = 2.0 * np.pi * np.arange(spec.n_phi) / spec.n_phi
        wphi = np.full(spec.n_phi, 2.0 * np.pi / spec.n_phi)

        R, MU, PHI = np.meshgrid(r, mu, phi, indexing="ij")
        ST = np.sqrt(1.0 - MU * MU)
        nodes = np.stack([R * ST * np.cos(PHI), R * ST * np.sin(PHI), R * MU], axis=-1).reshape(-1, 3)
        weights = (wr[:, None, None] * wmu[None, :, None] * wphi[None, None, :]).reshape(-1)
        radii = np.broadcast_to(r[:, None, None], R.shape).reshape(-1).copy()
        for a in (nodes, weights, radii):
            a.setflags(write=False)
        return cls(spec, float(p_max), nodes, weights, radii)

    def __len__(self):
        return self.weights.size

    def energy(self, mass: float) -> np.ndarray:
        return np.sqrt(mass * mass + self.radii * self.radii)
