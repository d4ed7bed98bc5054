"""Closed contours and triangulated surfaces in spin space, and solid angles.

Orientation convention: a contour is traversed in the stored order and
closes from the last point back to the first. Its solid angle is the
signed area (on the unit sphere) of the region to the left of the walker
seen from outside, taking the region that does not contain the south
pole; counter-clockwise about +z is positive.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import MeshInconsistent, SelfIntersection
from .spin import POLE_GUARD, check_off_pole

RADIUS_RTOL = 1e-10
# pairwise arc-intersection test is O(N^2); skipped for larger contours
SELF_INTERSECTION_MAX_POINTS = 600


@dataclass(frozen=True)
class ParameterContour:
    """Closed oriented polyline of spin vectors on a sphere |s| = const."""

    points: np.ndarray
    check_poles: bool = True

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3 or pts.shape[0] < 3:
            raise ValueError("a contour needs at least 3 points of shape (N, 3)")
        if np.allclose(pts[0], pts[-1], rtol=0, atol=1e-14 * np.abs(pts).max()):
            pts = pts[:-1]
        mag = np.linalg.norm(pts, axis=1)
        if np.any(mag == 0):
            raise ValueError("contour points must be nonzero")
        if np.ptp(mag) > RADIUS_RTOL * mag.mean():
            raise ValueError("all contour points must have the same |s| (relative 1e-10)")
        step = np.linalg.norm(np.roll(pts, -1, axis=0) - pts, axis=1)
        if np.any(step == 0):
            raise ValueError("consecutive contour points must be distinct")
        if self.check_poles:
            check_off_pole(pts, POLE_GUARD)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return self.points.shape[0]

    @property
    def radius(self) -> float:
        return float(np.linalg.norm(self.points, axis=1).mean())

    @property
    def closed(self) -> np.ndarray:
        """Points with the first one repeated at the end."""
        return np.vstack([self.points, self.points[:1]])

    def reversed(self) -> "ParameterContour":
        return ParameterContour(self.points[::-1].copy(), self.check_poles)

    @classmethod
    def circle(cls, theta: float, n: int = 2000, radius: float = 1.0, clockwise: bool = False, phi0: float = 0.0):
        """Circle of constant polar angle, counter-clockwise about +z by default."""
        k = np.arange(n)
        phi = phi0 + (-1 if clockwise else 1) * 2.0 * np.pi * k / n
        st = np.sin(theta)
        pts = radius * np.stack([st * np.cos(phi), st * np.sin(phi), np.full(n, np.cos(theta))], axis=1)
        return cls(pts)

    @classmethod
    def polygon(cls, vertices, points_per_edge: int = 1, check_poles: bool = False):
        """Geodesic polygon; each great-circle edge is split into ``points_per_edge`` pieces."""
        v = np.asarray(vertices, dtype=float)
        r = np.linalg.norm(v, axis=1)
        radius = r.mean()
        u = v / r[:, None]
        pts = []
        for a, b in zip(u, np.roll(u, -1, axis=0)):
            for t in np.arange(points_per_edge) / points_per_edge:
                pts.append(_slerp(a, b, t))
        return cls(radius * np.array(pts), check_poles=check_poles)

    @classmethod
    def from_file(cls, path, check_poles: bool = True):
        """Whitespace- or comma-separated text file with one ``s_x s_y s_z`` row per point."""
        with open(path) as fh:
            text = fh.read().replace(",", " ")
        rows = [line.split() for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#")]
        return cls(np.array(rows, dtype=float), check_poles=check_poles)


def _slerp(a, b, t):
    omega = np.arccos(np.clip(np.dot(a, b), -1.0, 1.0))
    if omega < 1e-15:
        return a.copy()
    return (np.sin((1 - t) * omega) * a + np.sin(t * omega) * b) / np.sin(omega)


def triangle_solid_angle(a, b, c):
    """Signed solid angle of the geodesic triangle (a, b, c), batched.

    Van Oosterom-Strackee formula on unit vectors; positive when a -> b -> c
    is counter-clockwise seen from outside.
    """
    a = a / np.linalg.norm(a, axis=-1, keepdims=True)
    b = b / np.linalg.norm(b, axis=-1, keepdims=True)
    c = c / np.linalg.norm(c, axis=-1, keepdims=True)
    num = np.einsum("...i,...i->...", a, np.cross(b, c))
    den = 1.0 + np.einsum("...i,...i->...", a, b) + np.einsum("...i,...i->...", b, c) + np.einsum("...i,...i->...", c, a)
    return 2.0 * np.arctan2(num, den)


def solid_angle(contour: ParameterContour, check: bool = True) -> float:
    """Oriented solid angle enclosed by the geodesic polygon through the contour points."""
    if check:
        check_self_intersection(contour)
    pts = contour.points
    north = np.broadcast_to(np.array([0.0, 0.0, 1.0]), pts.shape)
    return float(np.sum(triangle_solid_angle(north, pts, np.roll(pts, -1, axis=0))))


def check_self_intersection(contour: ParameterContour) -> None:
    """Best-effort detection of crossing edges; raises SelfIntersection."""
    u = contour.points / contour.radius
    keys = np.round(u, 12)
    if len(np.unique(keys, axis=0)) != len(keys):
        raise SelfIntersection("contour visits the same point twice")
    n = len(u)
    if n > SELF_INTERSECTION_MAX_POINTS:
        return
    a, b = u, np.roll(u, -1, axis=0)
    nrm = np.cross(a, b)
    i, j = np.triu_indices(n, k=2)
    keep = ~((i == 0) & (j == n - 1))
    i, j = i[keep], j[keep]
    cand = np.cross(nrm[i], nrm[j])
    size = np.linalg.norm(cand, axis=1)
    ok = size > 1e-14
    i, j, cand = i[ok], j[ok], cand[ok] / size[ok, None]
    for sign in (1.0, -1.0):
        x = sign * cand
        on_i = _on_arc(x, a[i], b[i], nrm[i])
        on_j = _on_arc(x, a[j], b[j], nrm[j])
        if np.any(on_i & on_j):
            raise SelfIntersection("contour edges cross")


def _on_arc(x, a, b, nrm):
    tol = -1e-13
    return (np.einsum("ij,ij->i", np.cross(a, x), nrm) >= tol) & (np.einsum("ij,ij->i", np.cross(x, b), nrm) >= tol)


@dataclass(frozen=True)
class SurfaceCapMesh:
    """Oriented triangle mesh whose boundary is one or more closed contours.

    Triangles (i, j, k) are counter-clockwise seen from the side the area
    vectors point to; each boundary contour runs with the mesh on its left.
    The first boundary is the outer contour, the rest are holes.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    boundaries: tuple = field(default_factory=tuple)
    boundary_indices: tuple = field(default_factory=tuple, repr=False)

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        t = np.asarray(self.triangles, dtype=np.int64)
        if t.ndim != 2 or t.shape[1] != 3 or (t.size and (t.min() < 0 or t.max() >= len(v))):
            raise MeshInconsistent("triangles must index existing vertices")
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "triangles", t)
        self.validate()

    def validate(self) -> None:
        t = self.triangles
        if not t.size:
            return
        directed = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        as_set = {}
        for e in map(tuple, directed):
            if e in as_set:
                raise MeshInconsistent(f"edge {e} used twice in the same direction (flipped triangle)")
            as_set[e] = True
        boundary = {e for e in as_set if (e[1], e[0]) not in as_set}
        expected = set()
        for idx in self.boundary_indices:
            idx = list(idx)
            expected.update(zip(idx, idx[1:] + idx[:1]))
        if self.boundary_indices and boundary != expected:
            raise MeshInconsistent("mesh boundary does not match the declared boundary contours")

    @property
    def area_vectors(self) -> np.ndarray:
        a, b, c = (self.vertices[self.triangles[:, k]] for k in range(3))
        return 0.5 * np.cross(b - a, c - a)

    def edge_midpoints(self) -> np.ndarray:
        """(T, 3, 3): the three edge midpoints of every triangle."""
        a, b, c = (self.vertices[self.triangles[:, k]] for k in range(3))
        return np.stack([0.5 * (a + b), 0.5 * (b + c), 0.5 * (c + a)], axis=1)

    @classmethod
    def polar_cap(
        cls,
        theta: float,
        n_phi: int = 2000,
        n_rings: int = 40,
        radius: float = 1.0,
        hole: float = 1e-3,
        clockwise: bool = False,
    ) -> "SurfaceCapMesh":
        """Cap 0 < polar angle <= theta with a small disc of angular radius ``hole`` removed.

        The outer boundary is :meth:`ParameterContour.circle` (theta, n_phi);
        the inner one circles the north pole the opposite way, so the
        boundary of the mesh includes the loop around the s_z axis where
        half-angle gauges are singular.
        """
        if not 0 < hole < theta <= np.pi - hole:
            raise ValueError("need 0 < hole < theta <= pi - hole")
        thetas = np.linspace(hole, theta, n_rings + 1)
        k = np.arange(n_phi)
        phi = 2.0 * np.pi * k / n_phi
        st, ct = np.sin(thetas)[:, None], np.cos(thetas)[:, None]
        verts = radius * np.stack(
            [st * np.cos(phi)[None, :], st * np.sin(phi)[None, :], np.broadcast_to(ct, (len(thetas), n_phi))], axis=-1
        ).reshape(-1, 3)
        idx = np.arange(len(thetas) * n_phi).reshape(len(thetas), n_phi)
        a = idx[:-1, :]
        b = np.roll(idx[:-1, :], -1, axis=1)
        c = idx[1:, :]
        d = np.roll(idx[1:, :], -1, axis=1)
        # seen from outside, phi increases counter-clockwise and theta increases outward
        tri = np.concatenate([np.stack([a, c, d], -1).reshape(-1, 3), np.stack([a, d, b], -1).reshape(-1, 3)])
        outer = list(idx[-1])
        inner = list(idx[0][::-1])
        if clockwise:
            tri = tri[:, ::-1]
            outer, inner = outer[::-1], inner[::-1]
        bounds = (
            ParameterContour(verts[outer], check_poles=False),
            ParameterContour(verts[inner], check_poles=False),
        )
        return cls(verts, tri, bounds, (tuple(outer), tuple(inner)))

    @classmethod
    def fan(cls, contour: ParameterContour, n_rings: int = 20) -> "SurfaceCapMesh":
        """Fan of geodesic strips from the normalized centroid to the contour.

        Valid for contours that are star-shaped about their centroid direction.
        """
        pts = contour.points
        r = contour.radius
        u = pts / np.linalg.norm(pts, axis=1, keepdims=True)
        centre = u.mean(axis=0)
        if np.linalg.norm(centre) < 1e-8:
            raise MeshInconsistent("contour centroid is at the origin; no fan mesh")
        centre /= np.linalg.norm(centre)
        n = len(u)
        rings = [np.array([centre])]
        for j in range(1, n_rings + 1):
            t = j / n_rings
            rings.append(np.array([_slerp(centre, p, t) for p in u]))
        verts = r * np.vstack(rings)
        idx = [np.array([0])] + [1 + (j - 1) * n + np.arange(n) for j in range(1, n_rings + 1)]
        tris = []
        first = idx[1]
        tris.extend(zip([0] * n, first, np.roll(first, -1)))
        for j in range(1, n_rings):
            lo, hi = idx[j], idx[j + 1]
            lo_n, hi_n = np.roll(lo, -1), np.roll(hi, -1)
            tris.extend(zip(lo, hi, hi_n))
            tris.extend(zip(lo, hi_n, lo_n))
        outer = tuple(int(i) for i in idx[-1])
        return cls(verts, np.array(tris), (ParameterContour(verts[list(outer)], check_poles=False),), (outer,))


def sphere_rings(n_theta: int, n_phi: int, radius: float = 1.0):
    """Latitude rings at polar angles j*pi/n_theta, j = 1 .. n_theta - 1.

    Returns an array of shape (n_theta - 1, n_phi, 3).
    """
    thetas = np.pi * np.arange(1, n_theta) / n_theta
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    st, ct = np.sin(thetas)[:, None], np.cos(thetas)[:, None]
    return radius * np.stack(
        [st * np.cos(phi)[None, :], st * np.sin(phi)[None, :], np.broadcast_to(ct, (len(thetas), n_phi))], axis=-1
    )
