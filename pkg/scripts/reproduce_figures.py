"""Run every shipped figure preset through the CLI and collect the outputs.

    python scripts/reproduce_figures.py [--out figures] [--only fig3 fig4] [--workers N]

Each preset lands in its own directory together with a manifest and the
gnuplot scripts written by the CLI.
"""

import argparse
import sys
import time
from pathlib import Path

from disktrap.cli import main as cli

# preset -> subcommands producing its data
FIGURES = {
    "fig2": ["potential"],
    "fig3": ["potential", "trap"],
    "fig4": ["sweep"],
    "fig5": ["sweep"],
    "fig6": ["sweep"],
    "fig7": ["feasible"],
    "fig8": ["feasible"],
    "fig9": ["feasible", "detect"],
    "fig10": ["sweep"],
}


def run(out: Path, only, workers) -> int:
    worst = 0
    for name, commands in FIGURES.items():
        if only and name not in only:
            continue
        for cmd in commands:
            argv = [cmd, "--config", name, "--out", str(out / name / cmd)]
            if workers and cmd in ("sweep", "feasible"):
                argv += ["--workers", str(workers)]
            t0 = time.perf_counter()
            code = cli(argv)
            print(f"[{name} {cmd}] exit {code} in {time.perf_counter() - t0:.1f} s", flush=True)
            worst = max(worst, 0 if code == 2 else code)
    return worst


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="figures")
    ap.add_argument("--only", nargs="*", default=None)
    ap.add_argument("--workers", type=int, default=None)
    args = ap.parse_args()
    sys.exit(run(Path(args.out), args.only, args.workers))
