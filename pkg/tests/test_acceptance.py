"""Acceptance criteria 1-11, each checked at its stated tolerance."""

import math
import time

import numpy as np

from conftest import record
from disktrap import backscatter as B
from disktrap import config as C
from disktrap import detection as D
from disktrap import potentials as P
from disktrap import sweep as S
from disktrap import trapology as T
from disktrap import units as U
from disktrap.cli import main
from disktrap.fields import GapModel, coupling, mode_decay_rates

import oracles as O


def within(x, target, rel):
    return abs(x / target - 1) <= rel


def test_criterion_01_flux_estimate():
    t0 = time.perf_counter()
    sc = C.load_scenario("sec2b")
    req = sc.document["flux_requirement"]
    fld = sc.trap.blue
    kappa, kappa_t = mode_decay_rates(fld.profile.mode, sc.geometry)
    g = float(coupling(fld.profile, req["r_nm"] * 1e-9))
    flux = D.required_flux(req["s_target"], req["tau_us"] * 1e-6, kappa_t, kappa, fld.detuning, g)
    n = D.cavity_photons(flux, kappa_t, kappa)
    dt = time.perf_counter() - t0
    ok = within(flux, 0.12e14, 0.35) and within(n, 2.4e5, 0.35) and dt < 1
    q = GapModel(fld.profile.mode, sc.geometry).quality_factor(sc.geometry.gap)
    assert record(1, ok, f"|A_in|^2 = {flux:.3g}/s (0.12e14 +-35%), N = {n:.3g} (2.4e5 +-35%), Q = {q:.3g}, {dt:.2f} s")


def test_criterion_02_nr_family():
    t0 = time.perf_counter()
    sc = C.load_scenario("fig4")
    sw = sc.section("sweep")
    nr = np.linspace(sw["nr_scan"][0], sw["nr_scan"][1], int(sw["nr_scan"][2]))
    bounded, best = True, None
    for nb in sw["nb_family"]:
        curve = S.depth_vs_nr(sc.trap, nb, nr)
        win = curve.window
        # (a) trapping only inside the scan, with no-trap samples on both sides
        bounded &= win is not None and nr[0] < win[0] and win[1] < nr[-1]
        n_peak, rep = S.refine_peak(sc.trap, curve)
        if best is None or rep.depth > best[1].depth:
            best = (n_peak, rep, nb)
    dt = time.perf_counter() - t0
    n_peak, rep, nb = best
    depth, center = U.to_mK(rep.depth), U.to_nm(rep.r_min)
    ok_b = within(depth, 7.0, 0.30)
    ok_c = abs(center - 120) <= 15
    ok = bounded and ok_b and ok_c and dt < 30
    assert record(
        2,
        ok,
        f"(a) bounded={bounded}; (b) peak {depth:.2f} mK (7 +-30%) {'ok' if ok_b else 'FAIL'}; "
        f"(c) center {center:.1f} nm (120 +-15) {'ok' if ok_c else 'FAIL'} at N_b={nb:.3g}, N_r={n_peak:.3g}; {dt:.1f} s",
    )


def _optimized_point(preset, n_b, r, expect):
    sc = C.load_scenario(preset)
    n_r = S.solve_red_photons(sc.trap, n_b, r)
    cfg = sc.trap.with_photons(n_b, n_r)
    rep = T.characterize(cfg, tau=sc.tau)
    det = D.detect(cfg, rep.r_min, rep.frequencies, sc.tau)
    got = {
        "N_r": n_r,
        "S": det.s,
        "depth_mK": U.to_mK(rep.depth),
        "f_x": U.to_MHz(rep.omega_x),
        "f_y": U.to_MHz(rep.omega_y),
        "f_z": U.to_MHz(rep.omega_z),
        "E0_uK": U.to_uK(rep.ground_state_energy),
        "heat_pct": 100 * det.p_heating,
    }
    fails, parts = [], []
    for key, (target, tol, kind) in expect.items():
        good = abs(got[key] - target) <= tol if kind == "abs" else within(got[key], target, tol)
        parts.append(f"{key}={got[key]:.3g}")
        if not good:
            fails.append(key)
    return fails, ", ".join(parts)


def test_criterion_03_d15_point():
    expect = {
        "N_r": (2.5e5, 0.25, "rel"),
        "S": (8, 0.25, "rel"),
        "depth_mK": (2.6, 0.30, "rel"),
        "f_x": (1.5, 0.30, "rel"),
        "f_y": (4.0, 0.30, "rel"),
        "f_z": (0.14, 0.30, "rel"),
        "E0_uK": (160, 0.30, "rel"),
        "heat_pct": (4.0, 2.0, "abs"),
    }
    fails, text = _optimized_point("d15_optimum", 6e5, 115e-9, expect)
    assert record(3, not fails, text + (f"; out of tolerance: {fails}" if fails else ""))


def test_criterion_04_d30_point():
    expect = {
        "N_r": (3.6e5, 0.25, "rel"),
        "S": (7, 0.25, "rel"),
        "depth_mK": (1.6, 0.30, "rel"),
        "f_x": (0.92, 0.30, "rel"),
        "f_y": (4.2, 0.30, "rel"),
        "f_z": (0.11, 0.30, "rel"),
        "heat_pct": (5.7, 2.0, "abs"),
    }
    fails, text = _optimized_point("d30_optimum", 2.4e5, 120e-9, expect)
    assert record(4, not fails, text + (f"; out of tolerance: {fails}" if fails else ""))


def test_criterion_05_magnetic():
    sc = C.load_scenario(None)
    mt = P.magnetic_trap(sc.species, 0.1, 3e-6)
    f = U.to_kHz(mt.omega)
    de = U.energy_to_MHz(mt.splitting())
    fm = U.force_to_uK_per_nm(mt.max_force)
    ok = within(f, 35, 0.05) and within(de, 50, 0.10) and within(fm, 1.5, 0.10)
    assert record(5, ok, f"omega = 2pi x {f:.2f} kHz, splitting {de:.2f} MHz, F_max {fm:.3f} uK/nm")


def test_criterion_06_backscatter():
    model = B.BackscatterModel.from_ratios(1.0, 0.99)
    ratio = B.intensity_ratio(model)
    req = B.stability_requirement(1.0, 0.02)
    rng = np.random.default_rng(6)
    worst = 0.0
    for eps, frac, kappa in zip(rng.uniform(0, 50, 1000), rng.uniform(0, 1, 1000), rng.uniform(1e6, 1e10, 1000)):
        m = B.BackscatterModel.from_ratios(eps, frac, kappa=kappa)
        a, b = B.amplitude_ratio(m), B.amplitude_ratio_from_ratios(eps, frac)
        worst = max(worst, abs(a - b) / max(abs(b), 1e-300))
    ok = abs(ratio - 1e-4) <= 1e-12 and abs(req - 0.99) <= 1e-12 and worst <= 1e-12
    assert record(6, ok, f"I-/I+ = {ratio:.15g}, requirement = {req:.15g}, worst closed-form mismatch {worst:.2g}")


def test_criterion_07_oracle_equivalence():
    rng = np.random.default_rng(7)
    window = (1e-9, 8e-6)
    worst = {"r_min": 0.0, "depth": 0.0, "omega": 0.0}
    n = 0
    while n < 120:
        alpha_r = rng.uniform(2e6, 1e7)
        d_alpha = rng.uniform(2e6, 2e7)
        r_t = rng.uniform(60e-9, 400e-9)
        v_r = 10 ** rng.uniform(-29, -26)
        model = T.ExponentialTrapModel(v_r * alpha_r / (alpha_r + d_alpha) * math.exp(d_alpha * r_t), -v_r, alpha_r + d_alpha, alpha_r)
        at = T.analytic_trap(model, O.M_RB87, r_inner=window[0])
        rep = T.find_trap(model, window=window, step=2e-9, mass=O.M_RB87)
        worst["r_min"] = max(worst["r_min"], abs(rep.r_min / at.r_min - 1))
        worst["depth"] = max(worst["depth"], abs(rep.depth / at.depth - 1))
        worst["omega"] = max(worst["omega"], abs(rep.omega_x / at.omega - 1))
        n += 1
    # sensitivity vs finite difference
    base = T.ExponentialTrapModel(1e-26, -3e-27, 1.4e7, 1.0e7)
    shifted = T.ExponentialTrapModel(1e-26, -3e-27 * 1.02, 1.4e7, 1.0e7)
    fd = T.analytic_trap(base, O.M_RB87).r_min - T.analytic_trap(shifted, O.M_RB87).r_min
    sens = T.sensitivity(base, 0.02)
    sens_err = abs(fd / sens - 1)
    ok = max(worst.values()) <= 1e-6 and sens_err <= 0.05
    text = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    assert record(7, ok, f"{n} models, worst relative error: {text}; sensitivity vs FD {100 * sens_err:.2f}%")


def test_criterion_08_surface():
    sc = C.load_scenario(None)
    sp, n = sc.species, sc.geometry.refractive_index
    r = np.geomspace(20e-9, 2e-6, 50)
    s3 = np.polyfit(np.log(r), np.log(-P.vdw_potential(r, sp, n)), 1)[0]
    s4 = np.polyfit(np.log(r), np.log(-P.casimir_polder_potential(r, sp, n)), 1)[0]
    xc = P.crossover_distance(sp, n)
    left = float(P.atom_surface_force(xc * (1 - 1e-12), sp, n))
    right = float(P.atom_surface_force(xc * (1 + 1e-12), sp, n))
    cont = abs(left / right - 1)
    ok = abs(s3 + 3) <= 1e-9 and abs(s4 + 4) <= 1e-9 and abs(xc - 130e-9) <= 15e-9 and cont <= 1e-9
    assert record(8, ok, f"slopes {s3:.12f}, {s4:.12f}; crossover {U.to_nm(xc):.1f} nm; force jump {cont:.1e}")


def test_criterion_09_heating():
    p0_zero = D.survival_per_emission(0.0)
    p0_one = D.survival_per_emission(1.0)
    direct = O.p0_direction_average(1.0)
    worst = 0.0
    for m in (1, 2, 5, 10, 30, 100, 300):
        for x in np.geomspace(1e-3, 2, 200):
            exact = -math.expm1(m * math.log(D.survival_per_emission(x)))
            if 0 < exact < 0.1:
                worst = max(worst, abs(m * x * x / 3 / exact - 1))
    ok = p0_zero == 1 and abs(p0_one - direct) <= 1e-4 and worst <= 0.10
    assert record(9, ok, f"P0(0) = {p0_zero}, P0(1) = {p0_one:.10f} vs {direct:.10f}, linearized worst {100 * worst:.1f}%")


def _csv_rows(path):
    lines = path.read_text().splitlines()
    header = lines[1].split(",")
    return [dict(zip(header, ln.split(","))) for ln in lines[2:]]


def test_criterion_10_fig10(tmp_path):
    t0 = time.perf_counter()
    code = main(["sweep", "--config", "fig10", "--out", str(tmp_path)])
    dt = time.perf_counter() - t0
    rows = _csv_rows(tmp_path / "sweep.csv")
    hits = [r for r in rows if r["M"] != "nan" and float(r["M"]) < 1 and float(r["S"]) >= 5]
    ok = code == 0 and len(hits) > 0 and dt < 60
    assert record(10, ok, f"{len(hits)} of {len(rows)} cells with M < 1 and S >= 5; {dt:.1f} s")


def test_criterion_11_determinism(tmp_path):
    args = ["sweep", "--set", "sweep.nb=[1e5, 1e6, 8]", "--set", "sweep.r_nm=[80, 200, 8]"]
    outs = []
    for k, workers in enumerate((1, 1, 2, 3)):
        out = tmp_path / f"run{k}"
        assert main([*args, "--out", str(out), "--workers", str(workers)]) == 0
        outs.append((out / "sweep.csv").read_bytes())
    ok = all(o == outs[0] for o in outs)
    assert record(11, ok, f"{len(outs)} runs (workers 1, 1, 2, 3) byte-identical: {ok}")
