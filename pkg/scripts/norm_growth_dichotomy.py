"""Native-norm growth as a membership probe: interpolate two targets along
the same nested designs and watch the norm sequence.

A kernel translate (inside the native space) keeps a flat norm trace; the
kink |x - 1/2| under a twice-smoother kernel diverges. The boundedness of
the trace is exactly what separates the two.

    python scripts/norm_growth_dichotomy.py --outdir out/dichotomy
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from kinterp.cli import ExperimentConfig, DesignSpec, KernelSpec, run
from kinterp.diagnostics import read_report_csv


def run_case(outdir, name, target_name, target_params):
    levels = [16]
    for _ in range(5):
        levels.append(2 * levels[-1] + 1)
    cfg = ExperimentConfig(
        experiment="norm_growth",
        kernel=KernelSpec(family="matern52", gamma=1.0, dim=1),
        lower=(0.0,), upper=(1.0,),
        design=DesignSpec(scheme="equispaced_nested", levels=tuple(levels)),
        grid_points_per_axis=4097,
        target_name=target_name, target_params=target_params,
        output_prefix=str(outdir / name), svg=True, xscale="log", yscale="log",
    )
    code, written = run(cfg)
    rows, meta = read_report_csv(outdir / f"{name}.csv")
    print(f"{name}: {meta['norm_growth.classification']} "
          f"(log-log slope {float(meta['norm_growth.slope']):.3f})")
    for r in rows:
        print(f"  n={int(r['n']):5d}  norm={r['native_norm']:12.4f}")
    return code


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--outdir", default="out/dichotomy")
    args = ap.parse_args()
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    a = run_case(outdir, "translate", "kernel_translate", {"center": 0.25})
    b = run_case(outdir, "kink", "abs_power", {"center": 0.5, "power": 1.0})
    return max(a, b)


if __name__ == "__main__":
    sys.exit(main())
