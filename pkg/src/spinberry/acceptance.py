"""Acceptance suite: ten criteria, each a list of checked report records.

Criteria 1-9 are independent computations; criterion 10 reruns them and
compares the serialized reports byte for byte.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import adiabatic, berry
from .config import config_hash, scaled_count
from .dirac import momentum_overlap, spin_expectation
from .geometry import ParameterContour, SurfaceCapMesh, solid_angle
from .report import Report, ReportRecord, checked
from .runs import build_family, quadrature_label
from .spin import norms, spin_vector_from_spinor

TITLES = {
    1: "spin-expectation reduction",
    2: "overlap factorization",
    3: "connection cross-validation",
    4: "connection direction and magnitude ratio",
    5: "curvature direction and sphere flux",
    6: "Stokes consistency",
    7: "solid angle",
    8: "discrete geometric phase",
    9: "adiabatic realization",
    10: "determinism",
}
BUDGETS = {1: 10.0, 2: 30.0, 3: 120.0, 5: 120.0, 9: 180.0}


@dataclass
class CriterionResult:
    number: int
    title: str
    records: list
    seconds: float

    @property
    def passed(self) -> bool:
        return all(r.verdict != "FAIL" for r in self.records)

    def headline(self) -> str:
        bits = [f"{r.name}={r.value!r}" for r in self.records if r.verdict]
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number:>2} {self.title}: " + ", ".join(bits)


def _wrap(x):
    return float((x + math.pi) % (2.0 * math.pi) - math.pi)


def _random_spins(rng, n, min_perp=0.1, min_abs_cos=0.0, radius=(0.5, 2.0)):
    out = []
    while len(out) < n:
        d = rng.normal(size=3)
        d /= np.linalg.norm(d)
        s = d * rng.uniform(*radius)
        mag, perp = norms(s)
        if perp > min_perp and abs(s[2]) > min_abs_cos * mag:
            out.append(s)
    return np.array(out)


def _rng(cfg, number):
    return np.random.default_rng([cfg["seed"], number])


def criterion_1(cfg):
    fam = build_family(cfg)
    s = _random_spins(_rng(cfg, 1), cfg["acceptance"]["spin_directions"], min_perp=0.0)
    quad = spin_expectation(fam, s)
    closed = spin_vector_from_spinor(fam.spinor(s))
    err = float(np.max(np.linalg.norm(quad - closed, axis=1) / np.linalg.norm(closed, axis=1)))
    return [checked("max_relative_error", err, 1e-8, err < 1e-8, "quadrature:psibar", quadrature_label(fam))]


def criterion_2(cfg):
    fam = build_family(cfg)
    rng = _rng(cfg, 2)
    n = cfg["acceptance"]["overlap_pairs"]
    s1 = _random_spins(rng, n, min_perp=0.0)
    s2 = _random_spins(rng, n, min_perp=0.0)
    ov = momentum_overlap(fam, s1, s2, route="direct")
    ov = np.diagonal(ov) if np.ndim(ov) == 2 else ov
    pauli = np.einsum("ni,ni->n", np.conj(fam.spinor(s1)), fam.spinor(s2))
    ratio = ov / pauli
    spread = float(np.max(np.abs(ratio - ratio.mean())) / abs(ratio.mean()))
    return [
        checked("max_relative_spread", spread, 1e-8, spread < 1e-8, "direct_node_sum", quadrature_label(fam)),
        ReportRecord("ratio_mean.real", float(ratio.mean().real), "direct_node_sum"),
        ReportRecord("ratio_mean.imag", float(ratio.mean().imag), "direct_node_sum"),
    ]


def criterion_3(cfg):
    fam = build_family(cfg)
    s = _random_spins(_rng(cfg, 3), cfg["acceptance"]["random_points"])
    h = cfg["fd_step"]
    fd = berry.connection_fd(fam, s, h=h)
    exact = berry.connection_spinor_analytic(s).value
    diff = float(np.max(np.linalg.norm(fd.value - exact, axis=1)))
    raw = float(np.max(np.linalg.norm(fd.raw - exact, axis=1)))
    trunc = float(np.max(fd.truncation_error))
    res = f"h={h!r}"
    return [
        checked("max_richardson_difference", diff, 1e-6, diff < 1e-6, "fd:richardson", res),
        checked("max_truncation_estimate", trunc, 1e-6, trunc < 1e-6, "fd:richardson", res),
        ReportRecord("max_central_difference", raw, "fd:central", res),
        ReportRecord("max_imag_residue", float(np.max(fd.imag_residue)), "fd:richardson", res),
    ]


def criterion_4(cfg):
    fam = build_family(cfg)
    s = _random_spins(_rng(cfg, 4), cfg["acceptance"]["random_points"], min_abs_cos=0.1)
    v = berry.connection_fd(fam, s, h=cfg["fd_step"]).value
    p = berry.paper_connection(s).value
    sin = np.linalg.norm(np.cross(v, p), axis=1) / (np.linalg.norm(v, axis=1) * np.linalg.norm(p, axis=1))
    big = np.abs(p) > 1e-3 * np.linalg.norm(p, axis=1, keepdims=True)
    ratios = v[big] / p[big]
    spread = float(np.std(ratios) / abs(np.mean(ratios)))
    worst = float(np.max(sin))
    return [
        checked("max_sin_angle", worst, 1e-8, worst < 1e-8, "fd:richardson"),
        checked("ratio_std_over_mean", spread, 1e-6, spread < 1e-6, "fd:richardson/paper"),
        ReportRecord("magnitude_ratio", float(np.mean(ratios)), "fd:richardson/paper", note="spinor oracle gives 1/2"),
    ]


def criterion_5(cfg):
    fam = build_family(cfg)
    s = _random_spins(_rng(cfg, 5), cfg["acceptance"]["curvature_points"])
    f = berry.curvature_fd(fam, s)
    cross = np.linalg.norm(np.cross(f, -s), axis=1) / (np.linalg.norm(f, axis=1) * np.linalg.norm(s, axis=1))
    aligned = bool(np.all(np.einsum("ni,ni->n", f, -s) > 0))
    worst = float(np.max(cross))
    nt, npf = scaled_count(cfg["sphere"]["n_theta"], cfg), scaled_count(cfg["sphere"]["n_phi"], cfg)
    grid = f"n_theta={nt},n_phi={npf}"
    flux = berry.sphere_plaquette_flux(fam, nt, npf)
    paper = berry.sphere_flux("paper", None, nt, npf)
    return [
        checked("max_sin_angle_to_minus_s", worst, 1e-6, worst < 1e-6 and aligned, "fd:plaquette"),
        checked("plaquette_flux_error", abs(flux + 2 * math.pi), 1e-4, abs(flux + 2 * math.pi) < 1e-4, "plaquette_sum", grid),
        ReportRecord("plaquette_flux", flux, "plaquette_sum", grid),
        checked("paper_flux_error", abs(paper + 4 * math.pi), 1e-10, abs(paper + 4 * math.pi) < 1e-10, "gauss_legendre:paper", grid),
        ReportRecord("paper_flux", paper, "gauss_legendre:paper", grid),
    ]


def criterion_6(cfg):
    fam = build_family(cfg)
    n_phi = scaled_count(2000, cfg)
    rings = scaled_count(cfg["mesh"]["n_rings"], cfg, minimum=1)
    res = f"n_phi={n_phi},n_rings={rings}"
    out = []
    for theta in cfg["acceptance"]["cap_thetas"]:
        mesh = SurfaceCapMesh.polar_cap(theta, n_phi, rings, hole=cfg["mesh"]["hole"])
        for src in berry.SOURCES:
            line = berry.boundary_line_integral(fam, mesh, src)
            surf = berry.phase_stokes(fam, mesh, src)
            d = abs(line - surf)
            out.append(checked(f"theta={theta!r}.{src}.line_minus_surface", d, 1e-4, d < 1e-4, src, res))
    return out


def criterion_7(cfg):
    n = scaled_count(cfg["acceptance"]["circle_points"], cfg)
    out = []
    for theta in (math.pi / 6, math.pi / 3, math.pi / 2, 2 * math.pi / 3):
        om = solid_angle(ParameterContour.circle(theta, n))
        err = abs(om - 2 * math.pi * (1 - math.cos(theta)))
        out.append(checked(f"circle.theta={theta!r}.error", err, 1e-8, err < 1e-8, "geodesic_polygon", f"N={n}"))
    octant = solid_angle(ParameterContour.polygon(np.eye(3)))
    err = abs(octant - math.pi / 2)
    out.append(checked("octant.error", err, 1e-10, err < 1e-10, "geodesic_polygon", "N=3"))
    return out


def criterion_8(cfg):
    fam = build_family(cfg)
    n = scaled_count(cfg["acceptance"]["discrete_points"], cfg)
    contour = ParameterContour.circle(math.pi / 3, n)
    gamma = berry.phase_discrete(fam, contour)
    gauge = _rng(cfg, 8).uniform(0, 2 * math.pi, n)
    gauged = berry.phase_discrete(fam, contour, gauge=gauge)
    rev = berry.phase_discrete(fam, contour.reversed())
    err = abs(gamma + math.pi / 2)
    dg = abs(_wrap(gauged - gamma))
    dr = abs(_wrap(rev + gamma))
    res = f"N={n}"
    return [
        checked("phase_error", err, 1e-4, err < 1e-4, "discrete_overlaps", res),
        ReportRecord("phase", gamma, "discrete_overlaps", res),
        checked("gauge_change", dg, 1e-12, dg < 1e-12, "discrete_overlaps", res),
        checked("reversal_sum", dr, 1e-12, dr < 1e-12, "discrete_overlaps", res),
    ]


def criterion_9(cfg):
    acc = cfg["acceptance"]
    steps = scaled_count(acc["adiabatic_steps"], cfg, minimum=100)
    contour = ParameterContour.circle(math.pi / 3, scaled_count(acc["discrete_points"], cfg))
    sweep = adiabatic.geometric_phase_sweep(contour, 1.0, [50.0, 100.0, 200.0, 500.0], steps)
    last = sweep.rows[-1]
    errs = [abs(r["error"]) for r in sweep.rows]
    expo = sweep.exponent
    expo_ok = expo is not None and abs(expo + 1.0) <= 0.2
    res = f"steps={steps}"

    theta = math.pi / 3
    rsteps = scaled_count(acc["rotating_steps"], cfg, minimum=100)
    path = adiabatic.FieldPath.cone(theta, 1.0, 1.0)
    psi0 = adiabatic.lower_eigenstate(path(0.0))
    numeric = adiabatic.evolve(path, psi0, steps=rsteps).final_state
    exact = adiabatic.rotating_field_exact(theta, 1.0, 2 * math.pi, 1.0, psi0)
    dev = float(np.linalg.norm(numeric - exact))
    fam = build_family(cfg)
    return [
        checked("geometric_phase_error_T500", abs(last["error"]), 2e-2, abs(last["error"]) < 2e-2, "eigenvalue_split", res),
        ReportRecord("geometric_phase_T500", last["geometric_phase"], "eigenvalue_split", res),
        checked("fitted_exponent", expo, 0.2, expo_ok, "loglog_fit:reliable_rows", res),
        checked("errors_decrease", all(b < a for a, b in zip(errs, errs[1:])), None, all(b < a for a, b in zip(errs, errs[1:]))),
        checked("rotating_exact_deviation", dev, 1e-8, dev < 1e-8, "midpoint_exponential", f"steps={rsteps}"),
        ReportRecord("discrete_phase_same_contour", berry.phase_discrete(fam, contour), "discrete_overlaps"),
    ]


CRITERIA = {k: globals()[f"criterion_{k}"] for k in range(1, 10)}


def run_criterion(cfg: dict, number: int) -> CriterionResult:
    start = time.perf_counter()
    records = CRITERIA[number](cfg)
    seconds = time.perf_counter() - start
    if number in BUDGETS:
        ok = seconds < BUDGETS[number]
        records.append(checked("runtime_within_budget", ok, BUDGETS[number], ok, note="seconds"))
    return CriterionResult(number, TITLES[number], records, seconds)


def _prefixed(results):
    return [
        ReportRecord(f"c{r.number}.{rec.name}", rec.value, rec.route, rec.resolution, rec.tolerance, rec.verdict, rec.note)
        for r in results
        for rec in r.records
    ]


def _summary(results):
    return {str(r.number): {"title": r.title, "status": "PASS" if r.passed else "FAIL"} for r in results}


def run_criteria(cfg: dict, numbers=range(1, 10)) -> Report:
    results = [run_criterion(cfg, k) for k in numbers]
    rep = Report("verify-all", config_hash(cfg), _prefixed(results), _summary(results))
    rep.results = results
    return rep


def run_all(cfg: dict, progress=None) -> Report:
    """Criteria 1-9, then criterion 10 (a second full pass compared byte for byte)."""
    results = []
    for k in range(1, 10):
        results.append(run_criterion(cfg, k))
        if progress:
            progress(results[-1])
    first = Report("verify-all", config_hash(cfg), _prefixed(results), _summary(results)).to_json()
    start = time.perf_counter()
    second = run_criteria(cfg).to_json()
    same = first == second
    c10 = CriterionResult(10, TITLES[10], [checked("bit_identical", same, None, same, "json_bytes")], time.perf_counter() - start)
    results.append(c10)
    if progress:
        progress(c10)
    rep = Report("verify-all", config_hash(cfg), _prefixed(results), _summary(results))
    rep.results = results
    return rep
