"""Command implementations: build objects from a validated config and collect report records.

Every number placed in a record is computed here or in the modules it
calls, so the command-line layer only formats.
"""

from __future__ import annotations

import math

import numpy as np

from . import adiabatic, berry
from .config import config_hash, scaled_count
from .dirac import DiracFamily, spin_expectation
from .errors import SpinBerryError
from .geometry import ParameterContour, SurfaceCapMesh
from .quadrature import QuadratureSpec, RadialProfile
from .report import Report, ReportRecord, checked, vector_records
from .spin import canonical_spinor, spin_vector_from_spinor

SPIN_EXPECTATION_TOL = 1e-8


def build_family(cfg: dict) -> DiracFamily:
    prof = cfg["profile"]
    q = cfg["quadrature"]
    spec = QuadratureSpec(q["n_r"], q["n_theta"], q["n_phi"]).scaled(cfg["resolution_scale"])
    return DiracFamily(cfg["mass"], RadialProfile(prof["shape"], prof["width"], prof["p_max"]), canonical_spinor, spec)


def quadrature_label(fam: DiracFamily) -> str:
    q = fam.quadrature
    return f"n_r={q.n_r},n_theta={q.n_theta},n_phi={q.n_phi}"


def build_contour(cfg: dict) -> ParameterContour:
    con = cfg["contour"]
    if con["shape"] == "circle":
        n = scaled_count(con.get("n", 2000), cfg)
        return ParameterContour.circle(con["theta"], n, con.get("radius", 1.0), con.get("clockwise", False))
    if con["shape"] == "polygon":
        per_edge = scaled_count(con.get("points_per_edge", 1), cfg, minimum=1)
        return ParameterContour.polygon(con["vertices"], per_edge)
    return ParameterContour.from_file(con["path"])


def build_mesh(cfg: dict, contour: ParameterContour) -> SurfaceCapMesh:
    con, mesh = cfg["contour"], cfg["mesh"]
    rings = scaled_count(mesh["n_rings"], cfg, minimum=1)
    if con["shape"] == "circle":
        return SurfaceCapMesh.polar_cap(
            con["theta"], len(contour), rings, con.get("radius", 1.0), mesh["hole"], con.get("clockwise", False)
        )
    return SurfaceCapMesh.fan(contour, rings)


def _points(cfg):
    return np.asarray(cfg["points"], dtype=float)


def run_spin_expectation(cfg: dict) -> Report:
    fam = build_family(cfg)
    res = quadrature_label(fam)
    records = []
    for i, s in enumerate(_points(cfg)):
        w = fam.spinor(s)
        quad = spin_expectation(fam, s)
        closed = spin_vector_from_spinor(w)
        dagger = spin_expectation(fam, s, density="dagger")
        err = float(np.linalg.norm(quad - closed) / np.linalg.norm(closed))
        records += vector_records(f"point[{i}].s", s, "input")
        records += vector_records(f"point[{i}].spin_expectation", quad, "quadrature:psibar", res)
        records += vector_records(f"point[{i}].closed_form", closed, "w_dagger_sigma_w")
        records.append(checked(f"point[{i}].relative_error", err, SPIN_EXPECTATION_TOL, err < SPIN_EXPECTATION_TOL, "quadrature:psibar", res))
        records += vector_records(f"point[{i}].spin_expectation_dagger", dagger, "quadrature:psidagger", res)
        records.append(ReportRecord(f"point[{i}].dagger_length", float(np.linalg.norm(dagger)), "quadrature:psidagger", res))
    return Report("spin-expectation", config_hash(cfg), records)


def run_connection(cfg: dict) -> Report:
    fam = build_family(cfg)
    res = quadrature_label(fam)
    records = []
    for i, s in enumerate(_points(cfg)):
        h = cfg["fd_step"]
        fd = berry.connection_fd(fam, s, h=h)
        analytic = berry.connection_spinor_analytic(s)
        paper = berry.paper_connection(s)
        records += vector_records(f"point[{i}].s", s, "input")
        records += vector_records(f"point[{i}].connection", fd.value, "fd:richardson", f"h={h!r};{res}")
        records.append(ReportRecord(f"point[{i}].truncation_estimate", float(fd.truncation_error), "fd:richardson", f"h={h!r}"))
        records.append(ReportRecord(f"point[{i}].imag_residue", float(np.max(fd.imag_residue)), "fd:richardson", f"h={h!r}"))
        records += vector_records(f"point[{i}].connection_spinor_analytic", analytic.value, "spinor_analytic")
        records += vector_records(f"point[{i}].connection_paper", paper.value, "paper")
        records.append(ReportRecord(f"point[{i}].fd_minus_analytic", float(np.linalg.norm(fd.value - analytic.value)), "fd-spinor_analytic"))
        pnorm = float(np.linalg.norm(paper.value))
        ratio = float(np.linalg.norm(fd.value)) / pnorm if pnorm > 0 else None
        records.append(ReportRecord(f"point[{i}].magnitude_ratio_to_paper", ratio, "fd/paper"))
        records.append(ReportRecord(f"point[{i}].azimuthal_component", float(berry.azimuthal_component(fd.value, s)), "fd:richardson"))
    return Report("connection", config_hash(cfg), records)


def run_curvature(cfg: dict) -> Report:
    fam = build_family(cfg)
    records = []
    for i, s in enumerate(_points(cfg)):
        fd = berry.curvature_fd(fam, s)
        analytic = berry.spinor_curvature_analytic(s)
        paper = berry.paper_curvature(s)
        records += vector_records(f"point[{i}].s", s, "input")
        records += vector_records(f"point[{i}].curvature", fd, "fd:plaquette")
        records += vector_records(f"point[{i}].curvature_spinor_analytic", analytic, "spinor_analytic")
        records += vector_records(f"point[{i}].curvature_paper", paper, "paper")
        records.append(ReportRecord(f"point[{i}].magnitude_ratio_to_paper", float(np.linalg.norm(fd) / np.linalg.norm(paper)), "fd/paper"))
    nt, npf = scaled_count(cfg["sphere"]["n_theta"], cfg), scaled_count(cfg["sphere"]["n_phi"], cfg)
    grid = f"n_theta={nt},n_phi={npf}"
    flux = berry.sphere_plaquette_flux(fam, nt, npf)
    records.append(ReportRecord("sphere.plaquette_flux", flux, "plaquette_sum", grid))
    records.append(ReportRecord("sphere.chern_number", flux / (2.0 * math.pi), "plaquette_sum", grid))
    for src in berry.SOURCES:
        records.append(ReportRecord(f"sphere.flux.{src}", berry.sphere_flux(src, fam, nt, npf), f"gauss_legendre:{src}", grid))
    return Report("curvature", config_hash(cfg), records)


def _nested_records(prefix, data, route=""):
    out = []
    for key in sorted(data):
        val = data[key]
        if isinstance(val, dict):
            out += _nested_records(f"{prefix}.{key}", val, route)
        else:
            out.append(ReportRecord(f"{prefix}.{key}", val if not isinstance(val, str) else None, route, note=val if isinstance(val, str) else ""))
    return out


def run_phase(cfg: dict) -> Report:
    fam = build_family(cfg)
    contour = build_contour(cfg)
    try:
        mesh = build_mesh(cfg, contour)
    except (SpinBerryError, ValueError) as exc:
        mesh, mesh_error = None, str(exc)
    else:
        mesh_error = ""
    rep = berry.phase_report(fam, contour, mesh)
    res = f"N={len(contour)}"
    records = [
        ReportRecord("solid_angle", rep.solid_angle, "geodesic_polygon", res),
        ReportRecord("gamma_discrete", rep.gamma_discrete, "discrete_overlaps", res),
    ]
    for table, name in ((rep.gamma_line, "gamma_line"), (rep.gamma_stokes, "gamma_stokes"), (rep.gamma_boundary, "gamma_boundary")):
        for src in berry.SOURCES:
            if src in table:
                records.append(ReportRecord(f"{name}.{src}", table[src], src, res))
    data = rep.as_dict()
    records += _nested_records("ratio", data["ratios"])
    records += _nested_records("residual", data["residuals"])
    for key in sorted(data["unavailable"]):
        records.append(ReportRecord(f"unavailable.{key}", None, note=data["unavailable"][key]))
    if mesh_error:
        records.append(ReportRecord("unavailable.mesh", None, note=mesh_error))
    return Report("phase", config_hash(cfg), records)


def run_adiabatic(cfg: dict) -> Report:
    ad = cfg["adiabatic"]
    steps = scaled_count(ad["steps"], cfg, minimum=100)
    res = f"steps={steps}"
    records = []
    if ad["field"] == "constant":
        for T in ad["durations"]:
            path = adiabatic.FieldPath.constant(ad["direction"], ad["splitting"], T)
            out = adiabatic.evolve(path, steps=steps)
            tag = f"T={T!r}"
            records += [
                ReportRecord(f"{tag}.T", float(T)),
                ReportRecord(f"{tag}.geometric_phase", out.geometric_phase, "eigenvalue_split", res),
                ReportRecord(f"{tag}.target", 0.0, "constant_field"),
                ReportRecord(f"{tag}.error", out.geometric_phase, "eigenvalue_split", res),
                ReportRecord(f"{tag}.fidelity", out.fidelity, "projector", res, note="; ".join(out.warnings)),
            ]
        return Report("adiabatic", config_hash(cfg), records)
    contour = build_contour(cfg)
    sweep = adiabatic.geometric_phase_sweep(contour, ad["splitting"], ad["durations"], steps)
    for row in sweep.rows:
        tag = f"T={row['T']!r}"
        note = "; ".join(row["warnings"])
        records += [
            ReportRecord(f"{tag}.T", row["T"]),
            ReportRecord(f"{tag}.splitting_times_T", row["splitting_times_T"]),
            ReportRecord(f"{tag}.geometric_phase", row["geometric_phase"], "eigenvalue_split", res),
            ReportRecord(f"{tag}.target", row["target"], "minus_half_solid_angle"),
            ReportRecord(f"{tag}.error", row["error"], "eigenvalue_split", res),
            ReportRecord(f"{tag}.fidelity", row["fidelity"], "projector", res),
            ReportRecord(f"{tag}.reliable", row["reliable"], note=note),
        ]
    records.append(ReportRecord("fitted_exponent", sweep.exponent, "loglog_fit:reliable_rows"))
    return Report("adiabatic", config_hash(cfg), records)
