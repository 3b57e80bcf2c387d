"""Config-driven experiment runner.

Subcommands:

    kinterp run <config>        run an experiment, emit CSV (and SVG)
    kinterp validate <config>   parse and check a config, print the result
    kinterp plot <csv> <spec>   chart columns of an emitted CSV

Configs are flat key = value files with sections (see README). Outputs are
deterministic for a fixed config: rerunning emits byte-identical CSVs. The
environment variable KINTERP_THREADS pins the BLAS thread count before any
numerical module loads (exported as OMP/OpenBLAS/MKL thread settings), which
is why the numerical imports in this module live inside functions.

Exit codes: 0 success, 1 config error, 2 every level failed numerically.
"""

from __future__ import annotations

import argparse
import configparser
import os
import sys
from dataclasses import dataclass
from pathlib import Path

EXPERIMENTS = ("lebesgue_trace", "convergence", "norm_growth", "decay", "interp_once")
KERNEL_NAMES = ("matern12", "matern32", "matern52", "gaussian", "w21")
DESIGN_SCHEMES = ("greedy_low_discrepancy", "greedy_uniform_random",
                  "equispaced_nested", "equispaced_levels")

_TARGET_FREE = ("lebesgue_trace", "decay")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class KernelSpec:
    family: str
    gamma: float = 1.0
    dim: int = 1


@dataclass(frozen=True)
class DesignSpec:
    scheme: str
    levels: tuple[int, ...]
    seed: int = 0
    candidates: int = 10000


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    kernel: KernelSpec
    lower: tuple[float, ...]
    upper: tuple[float, ...]
    design: DesignSpec
    grid_points_per_axis: int
    target_name: str | None
    target_params: dict
    output_prefix: str
    svg: bool = False
    xscale: str = "linear"
    yscale: str = "linear"


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in text.replace(",", " ").split())


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(tok) for tok in text.replace(",", " ").split())


def _parse_centers(text: str) -> list:
    if ";" in text:
        return [_floats(part) for part in text.split(";") if part.strip()]
    return [(v,) for v in _floats(text)]


_KNOWN_KEYS = {
    "experiment": {"kind"},
    "kernel": {"family", "gamma", "dim"},
    "domain": {"lower", "upper"},
    "design": {"scheme", "seed", "candidates", "levels"},
    "grid": {"points_per_axis"},
    "target": {"name", "value", "center", "power", "centers", "weights",
               "width", "freq", "amplitude"},
    "output": {"prefix", "svg", "xscale", "yscale"},
}


def parse_config(path) -> ExperimentConfig:
    """Parse and validate an experiment config file.

    Raises ConfigError with the offending section/field (or the parser's
    line diagnostics for syntax errors).
    """
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        read = cp.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"config syntax error: {exc}") from exc
    if not read:
        raise ConfigError(f"config file not found: {path}")

    for section in cp.sections():
        if section not in _KNOWN_KEYS:
            raise ConfigError(f"unknown config section [{section}]")
        for key in cp[section]:
            if key not in _KNOWN_KEYS[section]:
                raise ConfigError(f"unknown field {section}.{key}")

    def need(section, key):
        if not cp.has_option(section, key):
            raise ConfigError(f"missing required field {section}.{key}")
        return cp.get(section, key)

    def opt(section, key, fallback=None):
        return cp.get(section, key, fallback=fallback)

    kind = need("experiment", "kind")
    if kind not in EXPERIMENTS:
        raise ConfigError(
            f"experiment.kind must be one of {EXPERIMENTS}, got {kind!r}")

    family = need("kernel", "family")
    if family not in KERNEL_NAMES:
        raise ConfigError(f"kernel.family must be one of {KERNEL_NAMES}, got {family!r}")
    try:
        gamma = float(opt("kernel", "gamma", "1.0"))
        dim = int(opt("kernel", "dim", "1"))
    except ValueError as exc:
        raise ConfigError(f"kernel.gamma / kernel.dim: {exc}") from exc

    try:
        lower = _floats(need("domain", "lower"))
        upper = _floats(need("domain", "upper"))
    except ValueError as exc:
        raise ConfigError(f"domain.lower / domain.upper: {exc}") from exc
    if len(lower) != len(upper):
        raise ConfigError("domain.lower and domain.upper must have equal length")
    if len(lower) != dim:
        raise ConfigError(f"domain has dimension {len(lower)}, kernel.dim is {dim}")
    if any(a >= b for a, b in zip(lower, upper)):
        raise ConfigError("domain.lower must be strictly below domain.upper")
    if family == "w21" and dim != 1:
        raise ConfigError("kernel.family w21 requires kernel.dim = 1")

    scheme = need("design", "scheme")
    if scheme not in DESIGN_SCHEMES:
        raise ConfigError(f"design.scheme must be one of {DESIGN_SCHEMES}, got {scheme!r}")
    try:
        levels = _ints(need("design", "levels"))
        seed = int(opt("design", "seed", "0"))
        candidates = int(opt("design", "candidates", "10000"))
    except ValueError as exc:
        raise ConfigError(f"design.levels / design.seed / design.candidates: {exc}") from exc
    if not levels:
        raise ConfigError("design.levels must not be empty")
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise ConfigError("design.levels must be strictly increasing")
    if scheme.startswith("greedy") and candidates < max(levels):
        raise ConfigError("design.candidates must cover the largest level")
    if scheme.startswith("equispaced") and dim != 1:
        raise ConfigError(f"design.scheme {scheme} is 1-d only")
    if scheme == "equispaced_nested":
        for a, b in zip(levels, levels[1:]):
            if b != 2 * a + 1:
                raise ConfigError(
                    "design.levels for equispaced_nested must follow n -> 2n+1, "
                    f"got {a} -> {b}")
    if kind == "norm_growth" and scheme == "equispaced_levels":
        raise ConfigError("norm_growth needs a nested design scheme")
    if kind == "decay" and dim != 1:
        raise ConfigError("decay experiments are 1-d (kernel.dim must be 1)")

    try:
        grid_ppa = int(opt("grid", "points_per_axis", "0") or 0)
    except ValueError as exc:
        raise ConfigError(f"grid.points_per_axis: {exc}") from exc
    if grid_ppa == 0:
        grid_ppa = 4097 if dim == 1 else 513
    if grid_ppa < 33:
        raise ConfigError("grid.points_per_axis must be at least 33")

    target_name = opt("target", "name")
    if kind not in _TARGET_FREE and target_name is None:
        raise ConfigError(f"experiment {kind} requires target.name")
    target_params: dict = {}
    if cp.has_section("target"):
        for key in cp["target"]:
            if key == "name":
                continue
            raw = cp.get("target", key)
            if key == "centers":
                target_params[key] = _parse_centers(raw)
            elif key == "weights":
                target_params[key] = list(_floats(raw))
            else:
                try:
                    target_params[key] = float(raw)
                except ValueError as exc:
                    raise ConfigError(f"target.{key}: {exc}") from exc

    prefix = need("output", "prefix")
    svg = opt("output", "svg", "false").strip().lower() in ("1", "true", "yes")
    xscale = opt("output", "xscale", "linear")
    yscale = opt("output", "yscale", "linear")
    if xscale not in ("linear", "log") or yscale not in ("linear", "log"):
        raise ConfigError("output.xscale / output.yscale must be 'linear' or 'log'")

    return ExperimentConfig(
        experiment=kind,
        kernel=KernelSpec(family=family, gamma=gamma, dim=dim),
        lower=lower, upper=upper,
        design=DesignSpec(scheme=scheme, levels=levels, seed=seed, candidates=candidates),
        grid_points_per_axis=grid_ppa,
        target_name=target_name, target_params=target_params,
        output_prefix=prefix, svg=svg, xscale=xscale, yscale=yscale,
    )


def config_metadata(cfg: ExperimentConfig) -> dict:
    """Flatten a config into the CSV metadata mapping; parse_metadata_config
    inverts this, so an emitted CSV fully determines a rerun."""
    md = {
        "experiment.kind": cfg.experiment,
        "kernel.family": cfg.kernel.family,
        "kernel.gamma": repr(cfg.kernel.gamma),
        "kernel.dim": cfg.kernel.dim,
        "domain.lower": ", ".join(repr(v) for v in cfg.lower),
        "domain.upper": ", ".join(repr(v) for v in cfg.upper),
        "design.scheme": cfg.design.scheme,
        "design.seed": cfg.design.seed,
        "design.candidates": cfg.design.candidates,
        "design.levels": ", ".join(str(n) for n in cfg.design.levels),
        "grid.points_per_axis": cfg.grid_points_per_axis,
        "output.prefix": cfg.output_prefix,
        "output.svg": str(cfg.svg).lower(),
        "output.xscale": cfg.xscale,
        "output.yscale": cfg.yscale,
    }
    if cfg.target_name is not None:
        md["target.name"] = cfg.target_name
        for key, val in sorted(cfg.target_params.items()):
            if key == "centers":
                md["target.centers"] = "; ".join(
                    " ".join(repr(c) for c in pt) for pt in val)
            elif key == "weights":
                md["target.weights"] = ", ".join(repr(w) for w in val)
            else:
                md[f"target.{key}"] = repr(val)
    return md


def parse_metadata_config(meta: dict) -> ExperimentConfig:
    """Rebuild an ExperimentConfig from CSV metadata (rerun round-trip)."""
    cp = configparser.ConfigParser()
    for key, value in meta.items():
        section, _, name = key.partition(".")
        if section not in _KNOWN_KEYS or name not in _KNOWN_KEYS[section]:
            continue
        if not cp.has_section(section):
            cp.add_section(section)
        cp.set(section, name, str(value))
    import tempfile

    with tempfile.NamedTemporaryFile("w", suffix=".cfg", delete=False) as fh:
        cp.write(fh)
        tmp = fh.name
    try:
        return parse_config(tmp)
    finally:
        os.unlink(tmp)


def _build_domain(cfg: ExperimentConfig):
    from .geometry import Box

    return Box(lower=cfg.lower, upper=cfg.upper)


def _build_kernel(cfg: ExperimentConfig):
    from . import kernels

    fam = cfg.kernel.family
    if fam == "gaussian":
        return kernels.gaussian(gamma=cfg.kernel.gamma, dim=cfg.kernel.dim)
    if fam == "w21":
        return kernels.interval_sobolev(cfg.lower[0], cfg.upper[0])
    nu = {"matern12": 0.5, "matern32": 1.5, "matern52": 2.5}[fam]
    return kernels.matern(nu=nu, gamma=cfg.kernel.gamma, dim=cfg.kernel.dim)


def _build_design(cfg: ExperimentConfig, domain):
    """Returns (design, per_level_pointsets). For `equispaced_levels` the
    levels are independent equispaced sets rather than nested prefixes."""
    import numpy as np

    from . import geometry

    scheme = cfg.design.scheme
    levels = cfg.design.levels
    if scheme == "equispaced_nested":
        n0 = levels[0]
        design = geometry.nested_equispaced_design(
            domain.lower[0], domain.upper[0], n0, len(levels))
        return design, [design.level_points(i) for i in range(len(design))]
    if scheme == "equispaced_levels":
        sets = [geometry.equispaced_interval(domain.lower[0], domain.upper[0], n)
                for n in levels]
        return None, sets
    pool_scheme = "low_discrepancy" if scheme == "greedy_low_discrepancy" else "uniform_random"
    cands = geometry.generate_candidates(domain, cfg.design.candidates, pool_scheme,
                                         seed=cfg.design.seed)
    center = 0.5 * (np.asarray(domain.lower) + np.asarray(domain.upper))
    seed_index = int(np.argmin(np.sum((cands.points - center) ** 2, axis=1)))
    design = geometry.geometric_greedy(cands, max(levels), seed_index, levels)
    return design, [design.level_points(i) for i in range(len(design))]


def _build_target(cfg: ExperimentConfig, kernel, domain):
    if cfg.target_name is None:
        return None
    from .targets import make_target

    return make_target(cfg.target_name, cfg.target_params, kernel, domain)


def run(cfg: ExperimentConfig) -> tuple[int, list[str]]:
    """Execute one experiment; returns (exit_code, written file paths)."""
    import numpy as np

    from . import diagnostics as dg
    from .interpolation import FactorizationError, fit, interpolant_to_csv, native_norm
    from .kernels import assemble_gram
    from .interpolation import factorize
    from .svg import AxesSpec, Series, emit_svg

    domain = _build_domain(cfg)
    kernel = _build_kernel(cfg)
    target = _build_target(cfg, kernel, domain)
    design, level_sets = _build_design(cfg, domain)
    grid = dg.EvalGrid.tensor(domain, cfg.grid_points_per_axis)
    meta = config_metadata(cfg)
    out_prefix = Path(cfg.output_prefix)
    out_prefix.parent.mkdir(parents=True, exist_ok=True)
    csv_path = str(out_prefix) + ".csv"
    written = []

    if cfg.experiment == "interp_once":
        X = level_sets[0]
        s = fit(kernel, X, target(X.points))
        interpolant_to_csv(s, csv_path)
        written.append(csv_path)
        return 0, written

    if cfg.experiment == "decay":
        rows = []
        for X in level_sets:
            h = dg.fill_distance_interval(X, domain.lower[0], domain.upper[0])
            i = (len(X) - 1) // 2
            try:
                f = dg.decay_profile(kernel, X, i, grid, h)
                rows.append((len(X), i, f.nu_hat, f.c_hat, f.r_squared, f.c_env,
                             f.n_points, f.floor))
            except (FactorizationError, dg.DecayFitError):
                rows.append((len(X), i, float("nan"), float("nan"), float("nan"),
                             float("nan"), 0, float("nan")))
        import csv as _csv

        with open(csv_path, "w", newline="") as fh:
            for key, value in meta.items():
                fh.write(f"# {key} = {value}\n")
            w = _csv.writer(fh)
            w.writerow(["n", "node_index", "nu_hat", "c_hat", "r_squared",
                        "c_env", "n_points", "floor"])
            for rec in rows:
                w.writerow([rec[0], rec[1]] + [repr(float(v)) for v in rec[2:6]]
                           + [rec[6], repr(float(rec[7]))])
        written.append(csv_path)
        good = [r for r in rows if np.isfinite(r[2])]
        if cfg.svg and good:
            svg_path = str(out_prefix) + ".svg"
            emit_svg([Series("decay rate", tuple(r[0] for r in good),
                             tuple(r[2] for r in good))],
                     AxesSpec(xlabel="n", ylabel="fitted decay rate",
                              xscale=cfg.xscale, yscale=cfg.yscale,
                              title="Lagrange decay rate per level"), svg_path)
            written.append(svg_path)
        return (2 if not good else 0), written

    if cfg.experiment == "norm_growth":
        from .diagnostics import DiagnosticsReport, classify_norm_growth

        fill_probe = (None if domain.dim == 1
                      else dg.EvalGrid.tensor(domain, dg.DEFAULT_FILL_PROBE))
        rows, norms, ns = [], [], []
        for X in level_sets:
            h, q, rho = dg._level_geometry(X, fill_probe)
            row = {"n": len(X), "h": h, "q": q, "rho": rho,
                   "lebesgue_constant": float("nan"), "native_norm": float("nan"),
                   "sup_error": float("nan"), "l2_error": float("nan"),
                   "jitter_flag": "failed",
                   "sampling_condition": dg.sampling_condition(
                       h, kernel.sobolev_order_tau, domain.lower[0], domain.upper[0])
                   if domain.dim == 1 and np.isfinite(kernel.sobolev_order_tau) else "n/a"}
            try:
                gram = assemble_gram(kernel, X)
                fact = factorize(gram)
                s = fit(kernel, X, target(X.points), factorization=fact, gram=gram)
                row["jitter_flag"] = dg._jitter_flag(fact.jitter_step)
                row["native_norm"] = native_norm(s)
                ns.append(len(X))
                norms.append(row["native_norm"])
            except FactorizationError:
                pass
            rows.append(row)
        label, slope = classify_norm_growth(ns, norms)
        meta["norm_growth.classification"] = label
        meta["norm_growth.slope"] = repr(slope)
        report = DiagnosticsReport(rows=tuple(rows), metadata=meta)
        report.to_csv(csv_path)
        written.append(csv_path)
        if cfg.svg and norms:
            svg_path = str(out_prefix) + ".svg"
            emit_svg([Series("native norm", tuple(ns), tuple(norms))],
                     AxesSpec(xlabel="n", ylabel="native norm",
                              xscale=cfg.xscale, yscale=cfg.yscale,
                              title=f"norm growth: {label}"), svg_path)
            written.append(svg_path)
        return (2 if not norms else 0), written

    if cfg.experiment == "lebesgue_trace":
        fill_probe = (None if domain.dim == 1
                      else dg.EvalGrid.tensor(domain, dg.DEFAULT_FILL_PROBE))
        rows = []
        for X in level_sets:
            h, q, rho = dg._level_geometry(X, fill_probe)
            row = {"n": len(X), "h": h, "q": q, "rho": rho,
                   "lebesgue_constant": float("nan"), "native_norm": float("nan"),
                   "sup_error": float("nan"), "l2_error": float("nan"),
                   "jitter_flag": "failed",
                   "sampling_condition": dg.sampling_condition(
                       h, kernel.sobolev_order_tau, domain.lower[0], domain.upper[0])
                   if domain.dim == 1 and np.isfinite(kernel.sobolev_order_tau) else "n/a"}
            try:
                gram = assemble_gram(kernel, X)
                fact = factorize(gram)
                row["jitter_flag"] = dg._jitter_flag(fact.jitter_step)
                C = fact.solve(np.eye(len(X)))
                row["lebesgue_constant"] = dg.lebesgue_max_from_coefficients(
                    kernel, X, C, grid)
            except FactorizationError:
                pass
            rows.append(row)
        report = dg.DiagnosticsReport(rows=tuple(rows), metadata=meta)
        report.to_csv(csv_path)
        written.append(csv_path)
        good = [r for r in rows if r["jitter_flag"] != "failed"]
        if cfg.svg and good:
            svg_path = str(out_prefix) + ".svg"
            emit_svg([Series("Lebesgue constant",
                             tuple(r["n"] for r in good),
                             tuple(r["lebesgue_constant"] for r in good))],
                     AxesSpec(xlabel="n", ylabel="Lebesgue constant",
                              xscale=cfg.xscale, yscale=cfg.yscale,
                              title="Lebesgue constant per level"), svg_path)
            written.append(svg_path)
        return (2 if not good else 0), written

    # convergence
    report, slopes = _convergence_report(kernel, target, design, level_sets, grid, meta)
    report.to_csv(csv_path)
    written.append(csv_path)
    good = [r for r in report.rows if r["jitter_flag"] != "failed"]
    if cfg.svg and good:
        from .svg import AxesSpec, Series, emit_svg

        svg_path = str(out_prefix) + ".svg"
        emit_svg(
            [Series("sup error", tuple(r["h"] for r in good),
                    tuple(r["sup_error"] for r in good)),
             Series("L2 error", tuple(r["h"] for r in good),
                    tuple(r["l2_error"] for r in good))],
            AxesSpec(xlabel="fill distance h", ylabel="error",
                     xscale="log", yscale="log", title="convergence"), svg_path)
        written.append(svg_path)
    return (2 if not good else 0), written


def _convergence_report(kernel, target, design, level_sets, grid, meta):
    from . import diagnostics as dg

    if design is not None:
        report, slopes = dg.convergence_table(target, kernel, design, grid)
    else:
        # independent levels: run the table machinery one level at a time
        import numpy as np

        from .geometry import NestedDesign

        all_rows = []
        for X in level_sets:
            rep, _ = dg.convergence_table(target, kernel,
                                          NestedDesign(master=X, levels=(len(X),)), grid)
            all_rows.extend(rep.rows)
        half = all_rows[len(all_rows) // 2:]
        hs = np.array([r["h"] for r in half])
        slopes = {
            "sup_slope": dg._loglog_slope(hs, np.array([r["sup_error"] for r in half])),
            "l2_slope": dg._loglog_slope(hs, np.array([r["l2_error"] for r in half])),
        }
        report = dg.DiagnosticsReport(rows=tuple(all_rows), metadata={})
    meta = dict(meta)
    meta["convergence.sup_slope"] = _slope_str(slopes["sup_slope"])
    meta["convergence.l2_slope"] = _slope_str(slopes["l2_slope"])
    return dg.DiagnosticsReport(rows=report.rows, metadata=meta), slopes


def _slope_str(v: float) -> str:
    import math

    return "n/a" if not math.isfinite(v) else repr(v)


def plot(csv_path: str, spec: str) -> tuple[int, list[str]]:
    """Chart columns of an emitted CSV.

    `spec` is a comma-separated key=value string with keys x, y (one or more
    column names separated by '+'), xscale, yscale, out. Rows whose plotted
    values are nan are dropped.
    """
    import math

    from .diagnostics import read_report_csv
    from .svg import AxesSpec, Series, SvgError, emit_svg

    opts = {}
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise ConfigError(f"plot spec entry {part!r} is not key=value")
        key, _, value = part.partition("=")
        opts[key.strip()] = value.strip()
    for key in opts:
        if key not in ("x", "y", "xscale", "yscale", "out", "title"):
            raise ConfigError(f"unknown plot spec key {key!r}")
    if "x" not in opts or "y" not in opts or "out" not in opts:
        raise ConfigError("plot spec needs x=, y=, and out=")

    rows, _ = read_report_csv(csv_path)
    if not rows:
        raise ConfigError(f"no data rows in {csv_path}")
    xcol = opts["x"]
    series = []
    for ycol in opts["y"].split("+"):
        xs, ys = [], []
        for row in rows:
            if xcol not in row or ycol not in row:
                raise ConfigError(f"column {xcol!r} or {ycol!r} not in {csv_path}")
            xv, yv = row[xcol], row[ycol]
            if isinstance(xv, str) or isinstance(yv, str):
                raise ConfigError(f"column {xcol!r} or {ycol!r} is not numeric")
            if math.isfinite(xv) and math.isfinite(yv):
                xs.append(xv)
                ys.append(yv)
        series.append(Series(ycol, tuple(xs), tuple(ys)))
    axes = AxesSpec(xlabel=xcol, ylabel=opts["y"],
                    xscale=opts.get("xscale", "linear"),
                    yscale=opts.get("yscale", "linear"),
                    title=opts.get("title", ""))
    try:
        emit_svg(series, axes, opts["out"])
    except SvgError as exc:
        raise ConfigError(str(exc)) from exc
    return 0, [opts["out"]]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="kinterp",
                                     description="kernel interpolation experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run an experiment config")
    p_run.add_argument("config")
    p_val = sub.add_parser("validate", help="check an experiment config")
    p_val.add_argument("config")
    p_plot = sub.add_parser("plot", help="chart columns of an emitted CSV")
    p_plot.add_argument("csv")
    p_plot.add_argument("spec")
    args = parser.parse_args(argv)

    try:
        if args.command == "validate":
            cfg = parse_config(args.config)
            for key, value in config_metadata(cfg).items():
                print(f"{key} = {value}")
            return 0
        if args.command == "run":
            cfg = parse_config(args.config)
            code, written = run(cfg)
            for path in written:
                print(f"wrote {path}")
            if code == 2:
                print("error: every level failed numerically", file=sys.stderr)
            return code
        code, written = plot(args.csv, args.spec)
        for path in written:
            print(f"wrote {path}")
        return code
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1


def main_entry() -> None:
    """Console entry point: applies KINTERP_THREADS before the numerical
    stack loads, then dispatches."""
    threads = os.environ.get("KINTERP_THREADS")
    if threads:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS",
                    "NUMEXPR_NUM_THREADS"):
            os.environ.setdefault(var, threads)
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
