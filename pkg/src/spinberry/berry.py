"""Berry connection, curvature and phase for spin-parametrized families.

Connection sources
    ``fd``              central differences of normalized family overlaps
    ``spinor_analytic`` exact derivative of the half-angle spinor, chain rule to s
    ``paper``           closed form {-s_y s_z, s_x s_z, 0} / (s_perp^2 |s|)

and the matching curvature sources (``fd`` uses small plaquette loops).
The first two describe the same gauge and differ only by discretization;
the closed form is exactly twice their value. Phases are measured in
radians; contours with the default orientation (counter-clockwise about the
outward normal) give gamma ~ -Omega/2 from the gauge-invariant routes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dirac import DiracFamily, normalized_overlap
from .errors import MeshInconsistent, SparseContour, StepTooLarge
from .geometry import ParameterContour, SurfaceCapMesh, solid_angle, sphere_rings
from .spin import angles_from_spin, check_nonzero, check_off_pole, norms

SOURCES = ("fd", "spinor_analytic", "paper")
DEFAULT_STEP = 1e-4
# loop phases scale as h^2, so the plaquette side is kept larger than the connection step
CURVATURE_STEP = 1e-3
MAX_TRUNCATION = 0.01
MIN_OVERLAP = 0.99


@dataclass(frozen=True)
class ConnectionSample:
    """Connection vector(s) V at base point(s) s.

    ``value`` is the best estimate (Richardson-extrapolated for ``fd``),
    ``raw`` the plain second-order central difference at step ``step``.
    """

    point: np.ndarray
    value: np.ndarray
    imag_residue: np.ndarray
    step: np.ndarray | float | None = None
    raw: np.ndarray | None = None
    truncation_error: np.ndarray | None = None


def azimuthal_component(v, s):
    """V . ds/dphi, the connection pulled back to the azimuth angle."""
    s = np.asarray(s, dtype=float)
    tangent = np.stack([-s[..., 1], s[..., 0], np.zeros_like(s[..., 0])], axis=-1)
    return np.sum(np.asarray(v) * tangent, axis=-1)


# ------------------------------------------------------------ connection


def _continued_overlap(fam, s, t):
    # Half-angle spinors flip sign across phi = pi; undo that so differences
    # stay inside one smooth branch.
    ov = normalized_overlap(fam, s, t)
    return np.where(ov.real < 0, -ov, ov)


def _central_connection(fam, s, h):
    out = np.empty(s.shape, dtype=complex)
    for k in range(3):
        e = np.zeros(3)
        e[k] = 1.0
        plus = _continued_overlap(fam, s, s + h[..., None] * e)
        minus = _continued_overlap(fam, s, s - h[..., None] * e)
        # V_k = i <Psi|d_k Psi>
        out[..., k] = 1j * (plus - minus) / (2.0 * h)
    return out


def connection_fd(fam: DiracFamily, s, h=None, richardson: bool = True, max_truncation: float = MAX_TRUNCATION):
    """Berry connection i<Psi|grad Psi> from finite differences of family overlaps."""
    s = check_off_pole(s)
    mag, perp = norms(s)
    h = DEFAULT_STEP * mag if h is None else np.broadcast_to(np.asarray(h, dtype=float), mag.shape)
    if np.any(perp <= 2 * h):
        raise StepTooLarge("finite-difference stencil would cross the s_z axis; reduce h")
    coarse = _central_connection(fam, s, h)
    if not richardson:
        return ConnectionSample(s, coarse.real, np.abs(coarse.imag), h, coarse.real, None)
    fine = _central_connection(fam, s, 0.5 * h)
    best = (4.0 * fine - coarse) / 3.0
    trunc = np.linalg.norm(coarse.real - fine.real, axis=-1) * 4.0 / 3.0
    scale = np.maximum(np.linalg.norm(best.real, axis=-1), 1e-6 / mag)
    if np.any(trunc > max_truncation * scale):
        raise StepTooLarge(f"Richardson truncation estimate {np.max(trunc / scale):.2e} exceeds {max_truncation:g}")
    return ConnectionSample(s, best.real, np.abs(best.imag), h, coarse.real, trunc)


def _angle_gradients(s):
    mag, perp = norms(s)
    sx, sy, sz = s[..., 0], s[..., 1], s[..., 2]
    grad_theta = np.stack([sx * sz, sy * sz, -perp * perp], axis=-1) / (mag * mag * perp)[..., None]
    grad_phi = np.stack([-sy, sx, np.zeros_like(sx)], axis=-1) / (perp * perp)[..., None]
    return grad_theta, grad_phi


def _half_angle_derivatives(theta, phi):
    ct, st = np.cos(theta / 2), np.sin(theta / 2)
    em, ep = np.exp(-0.5j * phi), np.exp(0.5j * phi)
    w = np.stack([ct * em, st * ep], axis=-1)
    d_theta = np.stack([-0.5 * st * em, 0.5 * ct * ep], axis=-1)
    d_phi = np.stack([-0.5j * ct * em, 0.5j * st * ep], axis=-1)
    d_theta_phi = np.stack([0.25j * st * em, 0.25j * ct * ep], axis=-1)
    return w, d_theta, d_phi, d_theta_phi


def _inner(a, b):
    return np.sum(np.conj(a) * b, axis=-1)


def connection_spinor_analytic(s) -> ConnectionSample:
    """i w^dag grad w of the half-angle spinor, differentiated exactly."""
    s = check_off_pole(s)
    theta, phi = angles_from_spin(s)
    w, d_t, d_p, _ = _half_angle_derivatives(theta, phi)
    nrm = _inner(w, w).real
    a_theta = 1j * _inner(w, d_t) / nrm
    a_phi = 1j * _inner(w, d_p) / nrm
    g_t, g_p = _angle_gradients(s)
    v = a_theta[..., None] * g_t + a_phi[..., None] * g_p
    return ConnectionSample(s, v.real, np.abs(v.imag))


def paper_connection(s) -> ConnectionSample:
    """{-s_y s_z, s_x s_z, 0} / (s_perp^2 |s|)."""
    s = check_off_pole(s)
    mag, perp = norms(s)
    v = np.stack([-s[..., 1] * s[..., 2], s[..., 0] * s[..., 2], np.zeros_like(mag)], axis=-1)
    v = v / (perp * perp * mag)[..., None]
    return ConnectionSample(s, v, np.zeros(mag.shape))


def connection(source: str, s, fam: DiracFamily | None = None, **kw) -> ConnectionSample:
    if source == "fd":
        if fam is None:
            raise ValueError("the fd connection needs a DiracFamily")
        return connection_fd(fam, s, **kw)
    if source == "spinor_analytic":
        return connection_spinor_analytic(s)
    if source == "paper":
        return paper_connection(s)
    raise ValueError(f"unknown connection source {source!r}; expected one of {SOURCES}")


# ------------------------------------------------------------- curvature


def paper_curvature(s):
    """-s / |s|^3 (monopole of unit strength)."""
    s = check_nonzero(s)
    mag = np.linalg.norm(s, axis=-1)
    return -s / (mag**3)[..., None]


def spinor_curvature_analytic(s):
    """Curl of :func:`connection_spinor_analytic`, from exact mixed derivatives of w."""
    s = check_off_pole(s)
    theta, phi = angles_from_spin(s)
    w, d_t, d_p, d_tp = _half_angle_derivatives(theta, phi)
    # F_theta_phi = d_theta A_phi - d_phi A_theta with A = i w^dag dw (|w| = 1)
    f = 1j * (_inner(d_t, d_p) + _inner(w, d_tp)) - 1j * (_inner(d_p, d_t) + _inner(w, d_tp))
    g_t, g_p = _angle_gradients(s)
    return f.real[..., None] * np.cross(g_t, g_p)


def _loop_phase(fam, corners):
    """-arg prod <c_i|c_{i+1}> over a closed list of corner arrays."""
    prod = np.ones(corners[0].shape[:-1], dtype=complex)
    for a, b in zip(corners, corners[1:] + corners[:1]):
        prod = prod * normalized_overlap(fam, a, b)
    return -np.angle(prod)


def _plaquette_curvature(fam, s, h):
    out = np.empty(s.shape)
    half = 0.5 * h[..., None]
    for k in range(3):
        a, b = (k + 1) % 3, (k + 2) % 3
        ea, eb = np.zeros(3), np.zeros(3)
        ea[a], eb[b] = 1.0, 1.0
        corners = [
            s + half * (-ea - eb),
            s + half * (ea - eb),
            s + half * (ea + eb),
            s + half * (-ea + eb),
        ]
        out[..., k] = _loop_phase(fam, corners) / (h * h)
    return out


def curvature_fd(fam: DiracFamily, s, h=None, richardson: bool = True, max_truncation: float = MAX_TRUNCATION):
    """Curl of the family connection from gauge-invariant loop phases of small squares."""
    s = check_off_pole(s)
    mag, perp = norms(s)
    if h is None:
        h = np.minimum(CURVATURE_STEP * mag, 0.25 * perp)
    else:
        h = np.broadcast_to(np.asarray(h, dtype=float), mag.shape)
    if np.any(perp <= 2 * h):
        raise StepTooLarge("plaquette would cross the s_z axis; reduce h")
    coarse = _plaquette_curvature(fam, s, h)
    if not richardson:
        return coarse
    fine = _plaquette_curvature(fam, s, 0.5 * h)
    best = (4.0 * fine - coarse) / 3.0
    trunc = np.linalg.norm(coarse - fine, axis=-1) * 4.0 / 3.0
    if np.any(trunc > max_truncation * np.linalg.norm(best, axis=-1)):
        raise StepTooLarge("Richardson truncation estimate for the curvature exceeds the limit")
    return best


def spinor_curvature(source: str, s, fam: DiracFamily | None = None, **kw):
    """Curvature from the named source (same names as :data:`SOURCES`)."""
    if source == "fd":
        if fam is None:
            raise ValueError("the fd curvature needs a DiracFamily")
        return curvature_fd(fam, s, **kw)
    if source == "spinor_analytic":
        return spinor_curvature_analytic(s)
    if source == "paper":
        return paper_curvature(s)
    raise ValueError(f"unknown curvature source {source!r}; expected one of {SOURCES}")


# ---------------------------------------------------------------- phases


def phase_line_integral(fam, contour: ParameterContour, source: str = "fd", rule: str = "trapezoid", **kw) -> float:
    """Line integral of V . ds along the closed polyline.

    ``trapezoid`` averages the endpoint values on each chord (O(N^-2));
    ``simpson`` adds the chord midpoint (O(N^-4)).
    """
    pts = contour.closed
    vals = connection(source, pts[:-1], fam, **kw).value
    vals = np.vstack([vals, vals[:1]])
    chords = np.diff(pts, axis=0)
    if rule == "trapezoid":
        terms = 0.5 * np.sum((vals[:-1] + vals[1:]) * chords, axis=1)
    elif rule == "simpson":
        mids = connection(source, 0.5 * (pts[:-1] + pts[1:]), fam, **kw).value
        terms = np.sum((vals[:-1] + 4.0 * mids + vals[1:]) * chords, axis=1) / 6.0
    else:
        raise ValueError(f"unknown rule {rule!r}")
    return float(np.sum(terms))


def boundary_line_integral(fam, mesh: SurfaceCapMesh, source: str = "fd", rule: str = "trapezoid", **kw) -> float:
    """Sum of :func:`phase_line_integral` over every boundary contour of ``mesh``."""
    if not mesh.boundaries:
        raise MeshInconsistent("mesh has no declared boundary")
    return float(sum(phase_line_integral(fam, c, source, rule, **kw) for c in mesh.boundaries))


def discrete_overlaps(fam: DiracFamily, contour: ParameterContour, gauge=None):
    """Normalized overlaps <Psi_k|Psi_k+1> around the loop (closing on the first state).

    ``gauge`` optionally multiplies state k by exp(i gauge[k]).
    """
    pts = contour.points
    ov = normalized_overlap(fam, pts, np.roll(pts, -1, axis=0))
    if gauge is not None:
        g = np.asarray(gauge, dtype=float)
        ov = ov * np.exp(1j * (np.roll(g, -1) - g))
    return ov


def phase_discrete(fam: DiracFamily, contour: ParameterContour, gauge=None, min_overlap: float = MIN_OVERLAP) -> float:
    """Gauge-invariant loop phase -arg prod <Psi_k|Psi_k+1>, in (-pi, pi]."""
    ov = discrete_overlaps(fam, contour, gauge)
    worst = np.min(np.abs(ov))
    if worst <= min_overlap:
        raise SparseContour(f"successive overlap modulus {worst:.4f} <= {min_overlap}; refine the contour")
    phase = -np.angle(np.prod(ov))
    return float(np.pi if phase <= -np.pi else phase)


def phase_stokes(fam, mesh: SurfaceCapMesh, source: str = "fd", **kw) -> float:
    """Flux of the curvature through ``mesh`` (edge-midpoint rule on each flat triangle)."""
    mesh.validate()
    if not mesh.triangles.size:
        return 0.0
    area = mesh.area_vectors
    if not np.any(np.linalg.norm(area, axis=1) > 0):
        return 0.0
    mids = mesh.edge_midpoints()
    curv = spinor_curvature(source, mids.reshape(-1, 3), fam, **kw).reshape(mids.shape)
    return float(np.sum(np.einsum("tqi,ti->t", curv, area)) / 3.0)


def sphere_plaquette_phases(fam: DiracFamily, n_theta: int = 64, n_phi: int = 128, radius: float = 1.0):
    """Loop phases of every face of a latitude-longitude tiling of the sphere.

    Faces are the quads between neighbouring rings plus the two polar
    polygons, all oriented counter-clockwise seen from outside. Returns
    ``(quad_phases (n_theta-2, n_phi), north_phase, south_phase)``.
    """
    rings = sphere_rings(n_theta, n_phi, radius)
    a = rings[:-1]
    b = np.roll(rings[:-1], -1, axis=1)
    c = rings[1:]
    d = np.roll(rings[1:], -1, axis=1)
    # outward CCW: (theta, phi) -> (theta+, phi) -> (theta+, phi+) -> (theta, phi+)
    quads = _loop_phase(fam, [a, c, d, b])
    north = float(_loop_phase(fam, [rings[0][k] for k in range(n_phi)]))
    south = float(_loop_phase(fam, [rings[-1][k] for k in range(n_phi)][::-1]))
    return quads, north, south


def sphere_plaquette_flux(fam: DiracFamily, n_theta: int = 64, n_phi: int = 128, radius: float = 1.0) -> float:
    """Total curvature flux through the sphere as a sum of face loop phases (2 pi x Chern number)."""
    quads, north, south = sphere_plaquette_phases(fam, n_theta, n_phi, radius)
    return float(np.sum(quads) + north + south)


def sphere_flux(source: str, fam: DiracFamily | None = None, n_theta: int = 48, n_phi: int = 96, radius: float = 1.0, **kw) -> float:
    """Outward flux of a curvature source through a sphere (Gauss-Legendre in cos theta)."""
    mu, wmu = np.polynomial.legendre.leggauss(n_theta)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    st = np.sqrt(1.0 - mu * mu)
    pts = radius * np.stack(
        [st[:, None] * np.cos(phi)[None, :], st[:, None] * np.sin(phi)[None, :], np.broadcast_to(mu[:, None], (n_theta, n_phi))],
        axis=-1,
    )
    curv = spinor_curvature(source, pts.reshape(-1, 3), fam, **kw).reshape(pts.shape)
    normal_flux = np.sum(curv * pts, axis=-1) * radius  # F . rhat * R^2
    return float(np.sum(normal_flux * wmu[:, None]) * 2.0 * np.pi / n_phi)


# ---------------------------------------------------------------- report


def _wrap(x):
    return float((x + np.pi) % (2.0 * np.pi) - np.pi)


@dataclass
class PhaseReport:
    """All phase routes for one contour, plus their solid-angle ratios and residuals."""

    solid_angle: float
    gamma_discrete: float | None
    gamma_line: dict = field(default_factory=dict)
    gamma_stokes: dict = field(default_factory=dict)
    gamma_boundary: dict = field(default_factory=dict)
    errors: dict = field(default_factory=dict)

    def routes(self) -> dict:
        out = {}
        if self.gamma_discrete is not None:
            out["discrete"] = self.gamma_discrete
        for name, table in (("line", self.gamma_line), ("stokes", self.gamma_stokes), ("boundary", self.gamma_boundary)):
            for src, val in table.items():
                if val is not None:
                    out[f"{name}:{src}"] = val
        return out

    def ratios(self) -> dict:
        om = self.solid_angle
        out = {}
        for name, val in self.routes().items():
            out[name] = {
                "gamma_over_omega": val / om if om else None,
                "gamma_over_minus_half_omega": val / (-0.5 * om) if om else None,
            }
        return out

    def residuals(self) -> dict:
        """Pairwise differences between routes, raw and reduced to (-pi, pi]."""
        r = self.routes()
        names = sorted(r)
        out = {}
        for i, a in enumerate(names):
            for b in names[i + 1 :]:
                diff = r[a] - r[b]
                out[f"{a}-{b}"] = {"raw": diff, "mod_2pi": _wrap(diff)}
        return out

    def as_dict(self) -> dict:
        return {
            "solid_angle": self.solid_angle,
            "gamma_discrete": self.gamma_discrete,
            "gamma_line": dict(self.gamma_line),
            "gamma_stokes": dict(self.gamma_stokes),
            "gamma_boundary": dict(self.gamma_boundary),
            "ratios": self.ratios(),
            "residuals": self.residuals(),
            "unavailable": dict(self.errors),
        }


def phase_report(fam: DiracFamily, contour: ParameterContour, mesh: SurfaceCapMesh | None = None, sources=SOURCES) -> PhaseReport:
    """Run every route that applies; routes that raise are recorded in ``errors``."""
    from .errors import SpinBerryError

    errors = {}
    try:
        omega = solid_angle(contour)
    except SpinBerryError as exc:
        errors["solid_angle"] = str(exc)
        omega = solid_angle(contour, check=False)
    try:
        disc = phase_discrete(fam, contour)
    except SpinBerryError as exc:
        errors["discrete"] = str(exc)
        disc = None
    rep = PhaseReport(omega, disc, errors=errors)
    for src in sources:
        try:
            rep.gamma_line[src] = phase_line_integral(fam, contour, src)
        except SpinBerryError as exc:
            rep.gamma_line[src] = None
            errors[f"line:{src}"] = str(exc)
        if mesh is None:
            continue
        try:
            rep.gamma_stokes[src] = phase_stokes(fam, mesh, src)
        except SpinBerryError as exc:
            rep.gamma_stokes[src] = None
            errors[f"stokes:{src}"] = str(exc)
        if len(mesh.boundaries) > 1:
            try:
                rep.gamma_boundary[src] = boundary_line_integral(fam, mesh, src)
            except SpinBerryError as exc:
                rep.gamma_boundary[src] = None
                errors[f"boundary:{src}"] = str(exc)
    return rep
