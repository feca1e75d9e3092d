"""Inverse solver for the red photon number, parameter grids and feasibility analysis."""

from __future__ import annotations

import io
import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import optimize

from . import units as U
from .config import FeasibilitySpec
from .detection import detect
from .potentials import TrapConfiguration
from .trapology import (
    DEFAULT_WINDOW,
    ExponentialTrapModel,
    NoTrapError,
    ShallowTrapWarning,
    TrapReport,
    characterize,
    find_trap,
    sensitivity,
)

NR_BRACKET = (1e3, 1e7)
NR_LIMITS = (1.0, 1e10)
FORCE_TOL = U.uK(1e-3) / 1e-9  # 1e-3 uK/nm
FD_STEP = 1e-11


def _slope(cfg: TrapConfiguration, r: float) -> float:
    return float((cfg.radial(r + FD_STEP) - cfg.radial(r - FD_STEP)) / (2 * FD_STEP))


def solve_red_photons(cfg: TrapConfiguration, n_b: float, r_target: float, bracket=NR_BRACKET) -> float:
    """Red photon number that puts a potential minimum at ``r_target``.

    The radial slope at fixed r grows monotonically with N_r, so the root is
    bracketed by geometric expansion and found with Brent's method.
    """
    if not n_b > 0:
        raise ValueError("N_b must be positive")
    base = cfg.with_photons(blue=n_b)

    def slope(n_r):
        return _slope(base.with_photons(red=n_r), r_target)

    lo, hi = bracket
    while slope(lo) > 0:
        lo /= 10
        if lo < NR_LIMITS[0]:
            raise NoTrapError(f"blue light cannot balance the surface attraction at {r_target * 1e9:.1f} nm")
    while slope(hi) < 0:
        hi *= 10
        if hi > NR_LIMITS[1]:
            raise NoTrapError("no red photon number balances the blue force")
    n_r = optimize.brentq(slope, lo, hi, xtol=1e-9, rtol=1e-13, maxiter=200)
    if abs(slope(n_r)) > FORCE_TOL:
        raise NoTrapError("force balance not reached within tolerance")
    solved = base.with_photons(red=n_r)
    f = solved.radial
    h = 0.5e-9
    curv = (f(r_target + h) - 2 * f(r_target) + f(r_target - h)) / (h * h)
    if not curv > 0:
        raise NoTrapError(f"force balance at {r_target * 1e9:.1f} nm is a maximum, not a trap")
    return float(n_r)


@dataclass(frozen=True)
class Cell:
    n_b: float
    r_target: float
    n_r: float = math.nan
    exists: bool = False
    r_min: float = math.nan
    depth: float = 0.0
    s: float = math.nan
    m: float = math.nan
    p_heat: float = math.nan
    p_tunnel: float = math.nan
    omegas: tuple[float, float, float] = (math.nan, math.nan, math.nan)
    ok_s: bool = False
    ok_heat: bool = False
    ok_tunnel: bool = False
    reason: str = ""

    @property
    def feasible(self) -> bool:
        return self.exists and self.ok_s and self.ok_heat and self.ok_tunnel

    def margins(self, spec: FeasibilitySpec) -> tuple[float, float, float]:
        """Normalized distances to the three thresholds (positive inside)."""
        if not self.exists:
            return (-math.inf,) * 3
        ms = (self.s - spec.s_min) / spec.s_min if spec.s_min > 0 else math.inf
        mh = (spec.heating_max - self.p_heat) / spec.heating_max if spec.heating_max > 0 else -math.inf
        mt = (spec.tunnel_max - self.p_tunnel) / spec.tunnel_max if spec.tunnel_max > 0 else -math.inf
        return ms, mh, mt

    def judged(self, spec: FeasibilitySpec) -> "Cell":
        if not self.exists:
            return self
        return Cell(
            **{
                **asdict(self),
                "ok_s": self.s >= spec.s_min,
                "ok_heat": self.p_heat <= spec.heating_max,
                "ok_tunnel": self.p_tunnel <= spec.tunnel_max,
            }
        )


def evaluate_trap(cfg: TrapConfiguration, n_b: float, n_r: float, tau: float, spec: FeasibilitySpec, window=DEFAULT_WINDOW, r_target=math.nan):
    """Characterize a trap at given photon numbers; returns the cell and the full reports."""
    solved = cfg.with_photons(n_b, n_r)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ShallowTrapWarning)  # kept in report.notes
        report = characterize(solved, tau=tau, window=window)
    if not report.exists:
        return Cell(n_b, r_target, n_r, reason="no trap"), report, None
    det = detect(solved, report.r_min, report.frequencies, tau)
    cell = Cell(
        n_b=n_b,
        r_target=r_target,
        n_r=n_r,
        exists=True,
        r_min=report.r_min,
        depth=report.depth,
        s=det.s,
        m=det.m_scattered,
        p_heat=det.p_heating,
        p_tunnel=report.tunneling_probability,
        omegas=report.frequencies,
    )
    return cell.judged(spec), report, det


def evaluate_point(cfg: TrapConfiguration, n_b: float, r_target: float, tau: float, spec: FeasibilitySpec, window=DEFAULT_WINDOW) -> Cell:
    try:
        n_r = solve_red_photons(cfg, n_b, r_target)
    except NoTrapError as exc:
        return Cell(n_b, r_target, reason=str(exc))
    return evaluate_trap(cfg, n_b, n_r, tau, spec, window, r_target)[0]


# --- N_r scans -----------------------------------------------------------------


@dataclass(frozen=True)
class DepthCurve:
    n_b: float
    n_r: tuple[float, ...]
    reports: tuple[TrapReport, ...]

    @property
    def window(self) -> tuple[float, float] | None:
        """Smallest and largest scanned N_r that trap."""
        inside = [n for n, r in zip(self.n_r, self.reports) if r.exists]
        return (min(inside), max(inside)) if inside else None

    def peak(self) -> tuple[float, TrapReport] | None:
        best = None
        for n, r in zip(self.n_r, self.reports):
            if r.exists and (best is None or r.depth > best[1].depth):
                best = (n, r)
        return best


def depth_vs_nr(cfg: TrapConfiguration, n_b: float, n_r_values, window=DEFAULT_WINDOW) -> DepthCurve:
    base = cfg.with_photons(blue=n_b)
    reports = tuple(find_trap(base.with_photons(red=float(n)).radial, window, mass=cfg.species.mass) for n in n_r_values)
    return DepthCurve(n_b, tuple(float(n) for n in n_r_values), reports)


def refine_peak(cfg: TrapConfiguration, curve: DepthCurve, window=DEFAULT_WINDOW) -> tuple[float, TrapReport]:
    """Locate the depth maximum between the scan samples around the coarse peak."""
    n_best, _ = curve.peak()
    i = curve.n_r.index(n_best)
    lo = curve.n_r[max(i - 1, 0)]
    hi = curve.n_r[min(i + 1, len(curve.n_r) - 1)]
    base = cfg.with_photons(blue=curve.n_b)

    def neg_depth(n):
        rep = find_trap(base.with_photons(red=n).radial, window, mass=cfg.species.mass)
        return -rep.depth if rep.exists else 0.0

    res = optimize.minimize_scalar(neg_depth, bounds=(lo, hi), method="bounded", options={"xatol": 1e-6 * hi})
    n = float(res.x)
    return n, find_trap(base.with_photons(red=n).radial, window, mass=cfg.species.mass)


# --- grids ---------------------------------------------------------------------


@dataclass(frozen=True)
class SweepGrid:
    nb_axis: tuple[float, ...]
    r_axis: tuple[float, ...]
    cells: tuple[Cell, ...]  # row-major: N_b outer, r inner
    tau: float
    spec: FeasibilitySpec
    config_hash: str = ""

    def cell(self, i: int, j: int) -> Cell:
        return self.cells[i * len(self.r_axis) + j]

    def array(self, attr: str) -> np.ndarray:
        return np.array([getattr(c, attr) for c in self.cells], dtype=float).reshape(len(self.nb_axis), len(self.r_axis))


def _evaluate_chunk(args):
    cfg, points, tau, spec, window = args
    return [evaluate_point(cfg, nb, r, tau, spec, window) for nb, r in points]


def grid_sweep(cfg: TrapConfiguration, nb_axis, r_axis, tau: float, spec: FeasibilitySpec, window=DEFAULT_WINDOW, workers: int = 1, config_hash: str = "") -> SweepGrid:
    """Evaluate every (N_b, r_min) cell. Parallel runs give the same cells in the same order."""
    nb_axis = tuple(float(x) for x in nb_axis)
    r_axis = tuple(float(x) for x in r_axis)
    points = [(nb, r) for nb in nb_axis for r in r_axis]
    if workers <= 1:
        cells = _evaluate_chunk((cfg, points, tau, spec, window))
    else:
        size = max(1, math.ceil(len(points) / (4 * workers)))
        chunks = [(cfg, points[k : k + size], tau, spec, window) for k in range(0, len(points), size)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            cells = [c for part in pool.map(_evaluate_chunk, chunks) for c in part]
    return SweepGrid(nb_axis, r_axis, tuple(cells), tau, spec, config_hash)


@dataclass(frozen=True)
class Region:
    mask: np.ndarray
    recommended: Cell | None
    min_margin: float = -math.inf

    @property
    def empty(self) -> bool:
        return not bool(self.mask.any())


def feasible_region(grid: SweepGrid, spec: FeasibilitySpec | None = None) -> Region:
    """Cells meeting all thresholds, and the one farthest from every threshold."""
    spec = spec or grid.spec
    judged = [c.judged(spec) for c in grid.cells]
    mask = np.array([c.feasible for c in judged]).reshape(len(grid.nb_axis), len(grid.r_axis))
    best, key = None, None
    for c in judged:
        if not c.feasible:
            continue
        k = (min(c.margins(spec)), c.depth)
        if key is None or k > key:
            best, key = c, k
    return Region(mask, best, key[0] if key else -math.inf)


@dataclass(frozen=True)
class Perturbation:
    label: str
    n_b: float
    n_r: float
    cell: Cell
    displacement: float


@dataclass(frozen=True)
class ToleranceResult:
    passed: bool
    nominal: Cell
    perturbations: tuple[Perturbation, ...]
    predicted_shift: float
    diagnostics: tuple[str, ...] = field(default=())

    @property
    def max_displacement(self) -> float:
        return max((abs(p.displacement) for p in self.perturbations), default=0.0)


def tolerance_analysis(cfg: TrapConfiguration, n_b: float, r_target: float, tau: float, spec: FeasibilitySpec, tolerance: float | None = None, window=DEFAULT_WINDOW) -> ToleranceResult:
    """Vary N_b and N_r independently by +-tolerance and re-check every criterion."""
    tol = spec.tolerance if tolerance is None else tolerance
    n_r = solve_red_photons(cfg, n_b, r_target)
    nominal = evaluate_trap(cfg, n_b, n_r, tau, spec, window, r_target)[0]
    perts, notes = [], []
    variants = [("N_b+", n_b * (1 + tol), n_r), ("N_b-", n_b * (1 - tol), n_r), ("N_r+", n_b, n_r * (1 + tol)), ("N_r-", n_b, n_r * (1 - tol))]
    for label, nb, nr in variants:
        cell = evaluate_trap(cfg, nb, nr, tau, spec, window, r_target)[0]
        shift = cell.r_min - nominal.r_min if cell.exists else math.nan
        perts.append(Perturbation(label, nb, nr, cell, shift))
        if not cell.feasible:
            what = "trap destroyed" if not cell.exists else ", ".join(
                name for name, ok in (("S", cell.ok_s), ("heating", cell.ok_heat), ("tunneling", cell.ok_tunnel)) if not ok
            )
            notes.append(f"{label}: {what}")
    model = ExponentialTrapModel.from_configuration(cfg.with_photons(n_b, n_r))
    predicted = sensitivity(model, tol)
    passed = nominal.feasible and all(p.cell.feasible for p in perts)
    return ToleranceResult(passed, nominal, tuple(perts), predicted, tuple(notes))


# --- output --------------------------------------------------------------------

CSV_COLUMNS = ("N_b", "r_target_nm", "N_r", "r_min_nm", "depth_mK", "S", "M", "P_heat", "P_tunnel", "feasible")


def fmt(x) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    x = float(x)
    if math.isnan(x):
        return "nan"
    return format(x, ".9g")


def cell_row(c: Cell) -> tuple:
    return (c.n_b, U.to_nm(c.r_target), c.n_r, U.to_nm(c.r_min), U.to_mK(c.depth), c.s, c.m, c.p_heat, c.p_tunnel, c.feasible)


def grid_csv(grid: SweepGrid) -> str:
    buf = io.StringIO()
    buf.write(f"# config_hash={grid.config_hash}\n")
    buf.write(",".join(CSV_COLUMNS) + "\n")
    for c in grid.cells:
        buf.write(",".join(fmt(v) for v in cell_row(c)) + "\n")
    return buf.getvalue()


def _json_num(x):
    x = float(x)
    return None if math.isnan(x) or math.isinf(x) else float(fmt(x))


def grid_json(grid: SweepGrid) -> str:
    doc = {
        "config_hash": grid.config_hash,
        "axes": {"N_b": list(grid.nb_axis), "r_target_nm": [_json_num(U.to_nm(r)) for r in grid.r_axis]},
        "tau_us": _json_num(grid.tau * 1e6),
        "thresholds": asdict(grid.spec),
        "columns": list(CSV_COLUMNS),
        "cells": [[v if isinstance(v, bool) else _json_num(v) for v in cell_row(c)] for c in grid.cells],
    }
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"
