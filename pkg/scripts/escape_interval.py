"""Interpolating a merely continuous target (a cube-root kink, far rougher
than the kernel's native space) on nested equispaced interval designs.

The sup and L2 errors keep falling while the native norm of the fit blows
up: convergence happens outside the native space.

    python scripts/escape_interval.py --outdir out/escape
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from kinterp.cli import ExperimentConfig, DesignSpec, KernelSpec, run
from kinterp.diagnostics import read_report_csv


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--outdir", default="out/escape")
    ap.add_argument("--num-levels", type=int, default=7)
    args = ap.parse_args()
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    levels = [16]
    for _ in range(args.num_levels - 1):
        levels.append(2 * levels[-1] + 1)

    cfg = ExperimentConfig(
        experiment="convergence",
        kernel=KernelSpec(family="matern32", gamma=1.0, dim=1),
        lower=(0.0,), upper=(1.0,),
        design=DesignSpec(scheme="equispaced_nested", levels=tuple(levels)),
        grid_points_per_axis=4097,
        target_name="abs_power",
        target_params={"center": 0.5, "power": 1.0 / 3.0},
        output_prefix=str(outdir / "escape"),
        svg=True,
    )
    code, written = run(cfg)
    print(f"exit {code}, wrote {written}")
    rows, meta = read_report_csv(outdir / "escape.csv")
    print(f"{'n':>6} {'h':>10} {'Lambda':>8} {'norm':>10} {'sup':>10} {'L2':>10}")
    for r in rows:
        print(f"{int(r['n']):6d} {r['h']:10.5f} {r['lebesgue_constant']:8.3f} "
              f"{r['native_norm']:10.3f} {r['sup_error']:10.2e} {r['l2_error']:10.2e}")
    print(f"fitted slopes: sup {meta['convergence.sup_slope']}, "
          f"l2 {meta['convergence.l2_slope']}")
    return code


if __name__ == "__main__":
    sys.exit(main())
