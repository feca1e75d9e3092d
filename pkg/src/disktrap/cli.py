"""Command-line front end.

    disktrap potential|trap|detect|sweep|feasible|backscatter
        [--config PATH|PRESET] [--set key=value ...] [--out DIR] [--format csv|json]

Exit status: 0 on success, 2 when the result is empty or infeasible, 1 on errors.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import backscatter as B
from . import detection as D
from . import potentials as P
from . import sweep as S
from . import units as U
from .config import Scenario, load_document, build_scenario, resolve_path
from .core import ConfigError
from .fields import GapModel, coupling, mode_decay_rates
from .trapology import NoTrapError, characterize

EXIT_OK, EXIT_ERROR, EXIT_EMPTY = 0, 1, 2


@dataclass
class RunManifest:
    config_path: str | None
    config_hash: str
    subcommand: str
    overrides: list[str]
    output_dir: str
    outputs: list[str] = field(default_factory=list)
    timestamp: str = ""


class Run:
    """Collects outputs for one invocation and writes them next to a manifest."""

    def __init__(self, scenario: Scenario, args):
        self.scenario = scenario
        self.out = Path(args.out)
        self.format = args.format
        self.manifest = RunManifest(
            config_path=None if args.config is None else str(resolve_path(args.config)),
            config_hash=scenario.hash,
            subcommand=args.command,
            overrides=list(args.set or []),
            output_dir=str(self.out),
        )

    def write(self, name: str, text: str):
        self.out.mkdir(parents=True, exist_ok=True)
        (self.out / name).write_text(text)
        self.manifest.outputs.append(name)

    def write_json(self, name: str, doc: dict):
        doc = {"config_hash": self.scenario.hash, **doc}
        self.write(name, json.dumps(_clean(doc), indent=1, sort_keys=True) + "\n")

    def finish(self):
        self.manifest.timestamp = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
        self.out.mkdir(parents=True, exist_ok=True)
        (self.out / "manifest.json").write_text(json.dumps(asdict(self.manifest), indent=1, sort_keys=True) + "\n")


def _clean(x):
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (bool, str)) or x is None:
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    x = float(x)
    return None if not math.isfinite(x) else float(S.fmt(x))


def _axis(spec, scale=1.0):
    lo, hi, n = spec
    return tuple(float(v) * scale for v in np.linspace(lo, hi, int(n)))


def table_csv(header: str, columns, rows) -> str:
    lines = [f"# config_hash={header}", ",".join(columns)]
    lines += [",".join(S.fmt(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def gnuplot_script(data: str, x: str, ys, xlabel: str, ylabel: str) -> str:
    cols = ", \\\n     ".join(f"'{data}' using '{x}':'{y}' with lines title '{y}'" for y in ys)
    return (
        "set datafile separator ','\n"
        "set key autotitle columnhead\n"
        f"set xlabel '{xlabel}'\nset ylabel '{ylabel}'\n"
        f"plot {cols}\n"
    )


def _window(sc: Scenario):
    lo, hi = sc.section("sweep").get("window_nm", (10, 1000))
    return (lo * 1e-9, hi * 1e-9)


def operating_trap(sc: Scenario):
    """Trap configuration at the configured operating point (N_r solved) or as given."""
    point = sc.document.get("operating_point")
    cfg = sc.trap
    if point:
        n_b = float(point["n_b"])
        n_r = S.solve_red_photons(cfg, n_b, float(point["r_nm"]) * 1e-9)
        cfg = cfg.with_photons(n_b, n_r)
    return cfg


def _report_doc(cfg, rep):
    return {
        "exists": rep.exists,
        "N_b": cfg.photons[0],
        "N_r": cfg.photons[1],
        "r_min_nm": U.to_nm(rep.r_min),
        "depth_mK": U.to_mK(rep.depth),
        "inner_barrier_mK": U.to_mK(rep.inner_barrier),
        "outer_barrier_mK": U.to_mK(rep.outer_barrier),
        "barrier_position_nm": U.to_nm(rep.barrier_position),
        "frequencies_MHz": [U.to_MHz(w) for w in rep.frequencies],
        "ground_state_energy_uK": U.to_uK(rep.ground_state_energy),
        "ground_state_sizes_nm": [U.to_nm(s) for s in rep.sizes],
        "tunneling_probability": rep.tunneling_probability,
        "above_barrier": rep.above_barrier,
        "notes": list(rep.notes),
    }


# --- subcommands -------------------------------------------------------------


def discrepancy_report(sc: Scenario) -> dict:
    """Force figures quoted for comparison with values computed here."""
    n = sc.geometry.refractive_index
    sp = sc.species
    doc = {
        "surface_force_50nm_uK_per_nm": {"computed": U.force_to_uK_per_nm(float(P.vdw_force(50e-9, sp, n))), "quoted": 3.0},
        "surface_force_100nm_uK_per_nm": {"computed": U.force_to_uK_per_nm(float(P.vdw_force(100e-9, sp, n))), "quoted": 1.0},
    }
    if sc.trap.blue is not None and sc.trap.blue.profile.photons > 0:
        fld = sc.trap.blue
        force = P.light_force(lambda r: fld.potential(r), 100e-9)
        doc["blue_light_force_100nm_uK_per_nm"] = {"computed": U.force_to_uK_per_nm(float(force)), "quoted": 70.0, "N_b": fld.profile.photons}
    return doc


def cmd_potential(sc: Scenario, run: Run) -> int:
    r = np.array(_axis(sc.section("potential").get("r_nm", (20, 400, 381)), 1e-9))
    t = sc.trap.terms(r)
    sp, n = sc.species, sc.geometry.refractive_index
    cols = {
        "r_nm": U.to_nm(r),
        "blue_uK": U.to_uK(t["blue"]),
        "red_uK": U.to_uK(t["red"]),
        "surface_uK": U.to_uK(t["surface"]),
        "magnetic_uK": U.to_uK(t["magnetic"]),
        "optical_uK": U.to_uK(t["blue"] + t["red"]),
        "total_uK": U.to_uK(t["total"]),
        "F_vdw_uK_per_nm": U.force_to_uK_per_nm(P.vdw_force(r, sp, n)),
        "F_cp_uK_per_nm": U.force_to_uK_per_nm(P.cp_force(r, sp, n)),
        "F_surface_uK_per_nm": U.force_to_uK_per_nm(P.atom_surface_force(r, sp, n)),
    }
    names = list(cols)
    rows = list(zip(*[np.broadcast_to(cols[k], r.shape) for k in names]))
    if run.format == "json":
        run.write_json("potential.json", {"columns": names, "rows": rows})
    else:
        run.write("potential.csv", table_csv(sc.hash, names, rows))
    run.write("potential.gp", gnuplot_script("potential.csv", "r_nm", ["blue_uK", "red_uK", "surface_uK", "total_uK"], "r (nm)", "V (uK)"))
    run.write("forces.gp", gnuplot_script("potential.csv", "r_nm", ["F_vdw_uK_per_nm", "F_cp_uK_per_nm"], "r (nm)", "F (uK/nm)"))
    xc = P.crossover_distance(sp, n)
    disc = discrepancy_report(sc)
    run.write_json("discrepancy.json", disc)
    print(f"force crossover (van der Waals = Casimir-Polder): {U.to_nm(xc):.1f} nm")
    print(f"c4 coefficients (parallel, perpendicular): {P.c4_coefficients(n)[0]:.4f}, {P.c4_coefficients(n)[1]:.4f}")
    for key, val in disc.items():
        print(f"{key}: computed {val['computed']:.3g}, quoted {val['quoted']:g}")
    return EXIT_OK


def cmd_trap(sc: Scenario, run: Run) -> int:
    cfg = operating_trap(sc)
    rep = characterize(cfg, tau=sc.tau, window=_window(sc))
    doc = _report_doc(cfg, rep)
    run.write_json("trap.json", doc)
    if not rep.exists:
        print("no trap for this configuration")
        return EXIT_EMPTY
    wx, wy, wz = (U.to_MHz(w) for w in rep.frequencies)
    print(f"N_b = {cfg.photons[0]:.4g}, N_r = {cfg.photons[1]:.4g}")
    print(f"trap center r_min = {doc['r_min_nm']:.2f} nm, depth = {doc['depth_mK']:.3f} mK")
    print(f"  inner barrier {doc['inner_barrier_mK']:.3f} mK at {doc['barrier_position_nm']:.1f} nm, outer barrier {doc['outer_barrier_mK']:.3f} mK")
    print(f"frequencies 2pi x ({wx:.3f}, {wy:.3f}, {wz:.3f}) MHz")
    print(f"ground state energy {doc['ground_state_energy_uK']:.1f} uK, sizes ({', '.join(f'{s:.1f}' for s in doc['ground_state_sizes_nm'])}) nm")
    print(f"tunneling probability in {sc.tau * 1e6:g} us: {rep.tunneling_probability:.3g}")
    return EXIT_OK


def cmd_detect(sc: Scenario, run: Run) -> int:
    out = {}
    req = sc.document.get("flux_requirement")
    if req:
        fld = getattr(sc.trap, req.get("probe", "blue"))
        kappa, kappa_t = mode_decay_rates(fld.profile.mode, sc.geometry)
        g = float(coupling(fld.profile, float(req["r_nm"]) * 1e-9))
        flux = D.required_flux(float(req["s_target"]), float(req["tau_us"]) * 1e-6, kappa_t, kappa, fld.detuning, g)
        n_cav = D.cavity_photons(flux, kappa_t, kappa)
        q = GapModel(fld.profile.mode, sc.geometry).quality_factor(sc.geometry.gap)
        out["flux_requirement"] = {"A_in_sq_per_s": flux, "power_uW": flux * U.h * fld.profile.mode.omega / (2 * math.pi) * 1e6, "N_cavity": n_cav, "Q": q, "kappa_T_over_kappa": kappa_t / kappa}
        print(f"required input flux |A_in|^2 = {flux:.3g} photons/s ({out['flux_requirement']['power_uW']:.2f} uW), cavity photons N = {n_cav:.3g} (Q = {q:.3g})")
    cfg = operating_trap(sc)
    rep = characterize(cfg, tau=sc.tau, window=_window(sc))
    out["trap"] = _report_doc(cfg, rep)
    status = EXIT_OK
    if rep.exists:
        det = D.detect(cfg, rep.r_min, rep.frequencies, sc.tau, probe=sc.section("detection").get("probe", "blue"))
        out["detection"] = {
            "S": det.s,
            "tau_us": det.tau * 1e6,
            "A_in_sq_per_s": det.a_in_sq,
            "N_cavity": det.n_cavity,
            "M": det.m_scattered,
            "M_per_field": list(det.m_per_field),
            "P_heating": det.p_heating,
            "P_heating_linear": det.p_heating_linear,
            "recoil_heating_uK": U.to_uK(det.recoil_heating),
            "issues": list(det.issues),
        }
        print(f"S = {det.s:.3g} (tau = {sc.tau * 1e6:g} us), M = {det.m_scattered:.3g}, heating probability = {100 * det.p_heating:.2f}%")
        print(f"recoil heating M E_r = {U.to_uK(det.recoil_heating):.2f} uK vs depth {U.to_mK(rep.depth) * 1e3:.0f} uK")
        for issue in det.issues:
            print(f"warning: {issue}")
        if cfg.magnetic is not None:
            mt = cfg.magnetic
            fld = cfg.blue
            ram = D.raman_assessment(fld.profile.photons, float(coupling(fld.profile, rep.r_min)), fld.detuning, mt.offset, sc.species)
            out["magnetic"] = {
                "omega_kHz": U.to_kHz(mt.omega),
                "splitting_MHz": U.energy_to_MHz(mt.splitting()),
                "max_force_uK_per_nm": U.force_to_uK_per_nm(mt.max_force),
                "raman": {"omega_eff_MHz": U.to_MHz(ram.omega_eff), "delta_MHz": U.to_MHz(ram.delta), "transfer_fraction": ram.transfer_fraction, "t_flip_ns": ram.t_flip * 1e9, "unsafe": ram.unsafe},
            }
            print(f"magnetic trap: 2pi x {U.to_kHz(mt.omega):.1f} kHz, splitting {U.energy_to_MHz(mt.splitting()):.1f} MHz, max force {U.force_to_uK_per_nm(mt.max_force):.2f} uK/nm")
            print(f"Raman: Omega_eff = 2pi x {U.to_MHz(ram.omega_eff):.3g} MHz, transfer {ram.transfer_fraction:.3g}" + (" -> magnetic trapping unsafe" if ram.unsafe else ""))
    else:
        print("no trap for this configuration")
        status = EXIT_EMPTY
    run.write_json("detect.json", out)
    return status


def _grid(sc: Scenario, workers: int | None = None) -> S.SweepGrid:
    sw = sc.section("sweep")
    return S.grid_sweep(
        sc.trap,
        _axis(sw["nb"]),
        _axis(sw["r_nm"], 1e-9),
        sc.tau,
        sc.feasibility,
        window=_window(sc),
        workers=int(workers if workers is not None else sw.get("workers", 1)),
        config_hash=sc.hash,
    )


def _emit_grid(run: Run, grid: S.SweepGrid, stem: str):
    if run.format == "json":
        run.write(f"{stem}.json", S.grid_json(grid))
    else:
        run.write(f"{stem}.csv", S.grid_csv(grid))
        run.write(
            f"{stem}.gp",
            "set datafile separator ','\nset view map\nset xlabel 'r_min (nm)'\nset ylabel 'N_b'\n"
            f"splot '{stem}.csv' using 2:1:5 every ::1 with image title 'depth (mK)'\n",
        )


def cmd_sweep(sc: Scenario, run: Run, workers=None) -> int:
    sw = sc.section("sweep")
    if sw.get("mode", "grid") == "nr_scan":
        return _nr_scan(sc, run)
    grid = _grid(sc, workers)
    _emit_grid(run, grid, "sweep")
    n_trap = sum(c.exists for c in grid.cells)
    print(f"{len(grid.cells)} cells, {n_trap} with a trap")
    return EXIT_OK if n_trap else EXIT_EMPTY


def _nr_scan(sc: Scenario, run: Run) -> int:
    sw = sc.section("sweep")
    rows, peaks = [], []
    for n_b in sw.get("nb_family", [sc.trap.photons[0]]):
        curve = S.depth_vs_nr(sc.trap, float(n_b), _axis(sw["nr_scan"]), _window(sc))
        for n_r, rep in zip(curve.n_r, curve.reports):
            rows.append((n_b, n_r, rep.exists, U.to_nm(rep.r_min), U.to_mK(rep.depth), U.to_mK(rep.inner_barrier), U.to_mK(rep.outer_barrier)))
        if curve.peak() is None:
            print(f"N_b = {n_b:.3g}: no trap in scanned range")
            continue
        n_pk, rep = S.refine_peak(sc.trap, curve, _window(sc))
        lo, hi = curve.window
        peaks.append({"N_b": n_b, "window_N_r": [lo, hi], "peak_N_r": n_pk, "peak_depth_mK": U.to_mK(rep.depth), "peak_r_min_nm": U.to_nm(rep.r_min)})
        print(f"N_b = {n_b:.3g}: trapping for N_r in [{lo:.4g}, {hi:.4g}], peak depth {U.to_mK(rep.depth):.2f} mK at r_min = {U.to_nm(rep.r_min):.1f} nm (N_r = {n_pk:.4g})")
    cols = ["N_b", "N_r", "exists", "r_min_nm", "depth_mK", "inner_barrier_mK", "outer_barrier_mK"]
    if run.format == "json":
        run.write_json("nr_scan.json", {"columns": cols, "rows": rows, "peaks": peaks})
    else:
        run.write("nr_scan.csv", table_csv(sc.hash, cols, rows))
        run.write_json("nr_scan_peaks.json", {"peaks": peaks})
    return EXIT_OK if peaks else EXIT_EMPTY


def cmd_feasible(sc: Scenario, run: Run, workers=None) -> int:
    grid = _grid(sc, workers)
    _emit_grid(run, grid, "feasible_grid")
    region = S.feasible_region(grid)
    doc = {"thresholds": asdict(sc.feasibility), "n_feasible": int(region.mask.sum()), "n_cells": len(grid.cells)}
    print(f"{doc['n_feasible']} of {doc['n_cells']} cells feasible (S >= {sc.feasibility.s_min:g}, heating <= {sc.feasibility.heating_max:g}, tunneling <= {sc.feasibility.tunnel_max:g})")
    if region.empty:
        run.write_json("feasible.json", doc)
        print("feasible region is empty")
        return EXIT_EMPTY
    best = region.recommended
    doc["recommended"] = dict(zip(S.CSV_COLUMNS, S.cell_row(best)))
    doc["recommended"]["min_margin"] = region.min_margin
    print(f"recommended point: N_b = {best.n_b:.4g}, r = {U.to_nm(best.r_target):.1f} nm, S = {best.s:.2f}, depth = {U.to_mK(best.depth):.2f} mK")
    point = sc.document.get("operating_point")
    n_b, r = (float(point["n_b"]), float(point["r_nm"]) * 1e-9) if point else (best.n_b, best.r_target)
    try:
        tol = S.tolerance_analysis(sc.trap, n_b, r, sc.tau, sc.feasibility, window=_window(sc))
    except NoTrapError as exc:
        doc["tolerance"] = {"passed": False, "diagnostics": [str(exc)]}
    else:
        doc["tolerance"] = {
            "N_b": n_b,
            "r_nm": U.to_nm(r),
            "tolerance": sc.feasibility.tolerance,
            "passed": tol.passed,
            "max_displacement_nm": U.to_nm(tol.max_displacement),
            "predicted_shift_nm": U.to_nm(tol.predicted_shift),
            "perturbations": [
                {"label": p.label, "N_b": p.n_b, "N_r": p.n_r, "displacement_nm": U.to_nm(p.displacement), "feasible": p.cell.feasible, "S": p.cell.s, "P_heat": p.cell.p_heat, "P_tunnel": p.cell.p_tunnel}
                for p in tol.perturbations
            ],
            "diagnostics": list(tol.diagnostics),
        }
        verdict = "pass" if tol.passed else "fail"
        print(f"+-{100 * sc.feasibility.tolerance:g}% intensity tolerance at (N_b = {n_b:.3g}, r = {U.to_nm(r):.0f} nm): {verdict}; max trap shift {U.to_nm(tol.max_displacement):.1f} nm")
        for d in tol.diagnostics:
            print(f"  {d}")
    run.write_json("feasible.json", doc)
    return EXIT_OK


def cmd_backscatter(sc: Scenario, run: Run) -> int:
    bs = sc.section("backscatter")
    ratio = float(bs.get("eps_over_kappa_int", 1.0))
    budget = float(bs.get("budget", 0.02))
    frac = bs.get("coupling_fraction")
    if frac is None:
        kappa, kappa_t = mode_decay_rates(sc.trap.blue.profile.mode, sc.geometry)
        frac = kappa_t / kappa
    frac = float(frac)
    amp = B.amplitude_ratio_from_ratios(ratio, frac)
    doc = {"eps_over_kappa_int": ratio, "budget": budget, "coupling_fraction": frac, "amplitude_ratio": amp, "intensity_ratio": amp * amp, "depth_fluctuation": B.depth_fluctuation(amp)}
    print(f"kappa_T/kappa = {frac:.4g}: I-/I+ = {amp * amp:.3g}, depth fluctuation +-{100 * B.depth_fluctuation(amp):.3g}%")
    try:
        req = B.stability_requirement(ratio, budget)
    except B.InfeasibleRequirement as exc:
        doc["required_coupling_fraction"] = None
        run.write_json("backscatter.json", doc)
        print(f"infeasible: {exc}")
        return EXIT_EMPTY
    doc["required_coupling_fraction"] = req
    doc["meets_budget"] = frac >= req
    run.write_json("backscatter.json", doc)
    print(f"budget +-{100 * budget:g}% requires kappa_T/kappa >= {req:.6g}")
    return EXIT_OK


COMMANDS = {
    "potential": cmd_potential,
    "trap": cmd_trap,
    "detect": cmd_detect,
    "sweep": cmd_sweep,
    "feasible": cmd_feasible,
    "backscatter": cmd_backscatter,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="disktrap", description="Evanescent-wave atom traps near microdisk resonators.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", help="JSON config or preset name (merged onto the shipped default)")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config value by dotted path")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--workers", type=int, default=None, help="worker processes for sweeps")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        sc = build_scenario(load_document(args.config, args.set))
        run = Run(sc, args)
        fn = COMMANDS[args.command]
        code = fn(sc, run, args.workers) if args.command in ("sweep", "feasible") else fn(sc, run)
        run.finish()
        return code
    except (ConfigError, NoTrapError, ValueError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
