"""Lebesgue constant traces on the unit square: bounded Matern vs growing
Gaussian, both at shape parameter 10 over one shared greedy design.

Writes per-kernel CSVs plus a combined two-series SVG.

    python scripts/lebesgue_square.py --outdir out/square [--levels 25 50 100 200 400]
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from kinterp.cli import ExperimentConfig, DesignSpec, KernelSpec, run
from kinterp.diagnostics import read_report_csv
from kinterp.svg import AxesSpec, Series, emit_svg


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--outdir", default="out/square")
    ap.add_argument("--levels", type=int, nargs="+", default=[25, 50, 100, 200, 400])
    ap.add_argument("--grid", type=int, default=513)
    args = ap.parse_args()
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    traces = []
    for family in ("matern32", "gaussian"):
        cfg = ExperimentConfig(
            experiment="lebesgue_trace",
            kernel=KernelSpec(family=family, gamma=10.0, dim=2),
            lower=(0.0, 0.0), upper=(1.0, 1.0),
            design=DesignSpec(scheme="greedy_low_discrepancy",
                              levels=tuple(args.levels), candidates=10000),
            grid_points_per_axis=args.grid,
            target_name=None, target_params={},
            output_prefix=str(outdir / family),
        )
        code, written = run(cfg)
        print(f"{family}: exit {code}, wrote {written}")
        rows, _ = read_report_csv(outdir / f"{family}.csv")
        good = [r for r in rows if r["jitter_flag"] != "failed"]
        traces.append(Series(family, tuple(r["n"] for r in good),
                             tuple(r["lebesgue_constant"] for r in good)))
        for r in rows:
            print(f"  n={int(r['n']):4d}  h={r['h']:.4f}  rho={r['rho']:.2f}  "
                  f"Lambda={r['lebesgue_constant']:.4f}  jitter={r['jitter_flag']}")

    combined = outdir / "lebesgue_square.svg"
    emit_svg(traces, AxesSpec(xlabel="n", ylabel="Lebesgue constant",
                              yscale="log", title="unit square, gamma = 10"),
             combined)
    print(f"combined chart: {combined}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
