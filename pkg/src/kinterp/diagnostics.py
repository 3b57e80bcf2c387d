"""Measurable quantities: Lebesgue functions and constants, error norms,
native-norm growth along nested designs, Lagrange decay fits, and per-level
convergence tables.

Supremum norms are discretized as maxima over a fixed tensor evaluation
grid (a lower bound of the true sup, converging under grid refinement);
L2 norms use tensorized composite-trapezoid quadrature. Grid scans run in
fixed-size chunks with deterministic reductions, so reports are reproducible
run to run.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    Box,
    NestedDesign,
    PointSet,
    fill_distance_grid,
    fill_distance_interval,
    mesh_ratio,
    sampling_condition,
    separation_distance,
)
from .interpolation import (
    EVAL_CHUNK,
    FactorizationError,
    Interpolant,
    evaluate,
    factorize,
    fit,
    lagrange_coefficients,
    native_norm,
)
from .kernels import Kernel, assemble_gram, kernel_matrix

BOUNDED_LIKE = "bounded-like"
DIVERGING_LIKE = "diverging-like"
INCONCLUSIVE = "inconclusive"

# Default evaluation grid densities (points per axis).
DEFAULT_GRID_1D = 4097
DEFAULT_GRID_2D = 513
# Default probe density per axis for fill distances in dimension >= 2.
DEFAULT_FILL_PROBE = 1001


class DiagnosticsError(RuntimeError):
    pass


class DecayFitError(DiagnosticsError):
    pass


@dataclass(frozen=True)
class EvalGrid:
    """Tensor evaluation grid with composite-trapezoid quadrature weights.

    Points are ordered lexicographically; the weights sum to the box volume.
    """

    points: np.ndarray
    quad_weights: np.ndarray
    spacing: tuple[float, ...]
    domain: Box

    @classmethod
    def tensor(cls, domain: Box, points_per_axis: int) -> "EvalGrid":
        if points_per_axis < 2:
            raise DiagnosticsError("need at least 2 grid points per axis")
        axes, weights, spacing = [], [], []
        for a, b in zip(domain.lower, domain.upper):
            ax = np.linspace(a, b, points_per_axis)
            h = (b - a) / (points_per_axis - 1)
            w = np.full(points_per_axis, h)
            w[0] = w[-1] = 0.5 * h
            axes.append(ax)
            weights.append(w)
            spacing.append(h)
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.reshape(-1) for m in mesh], axis=-1)
        wmesh = np.meshgrid(*weights, indexing="ij")
        qw = np.ones(pts.shape[0])
        for wm in wmesh:
            qw = qw * wm.reshape(-1)
        return cls(points=pts, quad_weights=qw, spacing=tuple(spacing), domain=domain)

    def __len__(self) -> int:
        return self.points.shape[0]


def default_grid(domain: Box) -> EvalGrid:
    per_axis = DEFAULT_GRID_1D if domain.dim == 1 else DEFAULT_GRID_2D
    return EvalGrid.tensor(domain, per_axis)


def lebesgue_max_from_coefficients(kernel: Kernel, X: PointSet, C: np.ndarray,
                                   grid: EvalGrid) -> float:
    """Chunked grid scan of max_x sum_i |l_i(x)| given the cardinal
    coefficient matrix."""
    lmax = 0.0
    for start in range(0, len(grid), EVAL_CHUNK):
        block = grid.points[start:start + EVAL_CHUNK]
        cross = kernel_matrix(kernel, block, X.points)
        lmax = max(lmax, float(np.abs(cross @ C).sum(axis=1).max()))
    return lmax


def lebesgue_function(kernel: Kernel, X: PointSet, grid: EvalGrid) -> np.ndarray:
    """Pointwise sum of the absolute cardinal functions over the grid.

    All cardinal functions come from one multi-right-hand-side solve of the
    Gram system; a factorization failure propagates with the level size in
    the message.
    """
    try:
        C, _ = lagrange_coefficients(kernel, X)
    except FactorizationError as exc:
        raise FactorizationError(f"Lebesgue function at n={len(X)}: {exc}") from exc
    out = np.empty(len(grid))
    for start in range(0, len(grid), EVAL_CHUNK):
        block = grid.points[start:start + EVAL_CHUNK]
        cross = kernel_matrix(kernel, block, X.points)
        out[start:start + EVAL_CHUNK] = np.abs(cross @ C).sum(axis=1)
    return out


def lebesgue_constant(kernel: Kernel, X: PointSet, grid: EvalGrid) -> float:
    """Max of the Lebesgue function over the grid: a lower bound of the true
    constant that converges under grid refinement."""
    return float(np.max(lebesgue_function(kernel, X, grid)))


def sup_error(target, s: Interpolant, grid: EvalGrid) -> float:
    return float(np.max(np.abs(target(grid.points) - evaluate(s, grid.points))))


def l2_error(target, s: Interpolant, grid: EvalGrid) -> float:
    """Trapezoid-quadrature L2 error; the quadrature error is O(spacing^2)
    for twice-differentiable integrands and unquantified for rougher ones."""
    d = target(grid.points) - evaluate(s, grid.points)
    return float(np.sqrt(np.sum(grid.quad_weights * d * d)))


def _loglog_slope(xs: np.ndarray, ys: np.ndarray) -> float:
    mask = (xs > 0) & (ys > 0)
    if mask.sum() < 2:
        return float("nan")
    A = np.vstack([np.log(xs[mask]), np.ones(int(mask.sum()))]).T
    coef, *_ = np.linalg.lstsq(A, np.log(ys[mask]), rcond=None)
    return float(coef[0])


@dataclass(frozen=True)
class NormGrowthResult:
    levels: tuple[int, ...]
    norms: tuple[float, ...]
    classification: str
    slope: float
    truncated_at: int | None = None  # level count at the first failed solve
    note: str = ""


def classify_norm_growth(levels, norms) -> tuple[str, float]:
    """Advisory boundedness heuristic for a norm sequence.

    "bounded-like" when the last-quartile norms vary by < 10% and the
    log-log slope of norm vs n is < 0.05; "diverging-like" when that slope
    exceeds 0.15; otherwise "inconclusive".
    """
    ns = np.asarray(levels, float)
    vs = np.asarray(norms, float)
    if len(vs) == 0:
        return INCONCLUSIVE, float("nan")
    if np.max(vs) <= 1e-14:
        return BOUNDED_LIKE, 0.0
    half = len(vs) // 2
    slope = _loglog_slope(ns[half:], vs[half:])
    q = max(2, -(-len(vs) // 4))
    tail = vs[-q:]
    variation = (tail.max() - tail.min()) / tail.min() if tail.min() > 0 else np.inf
    if variation < 0.10 and slope < 0.05:
        return BOUNDED_LIKE, slope
    if slope > 0.15:
        return DIVERGING_LIKE, slope
    return INCONCLUSIVE, slope


def norm_growth_sequence(target, kernel: Kernel, design: NestedDesign) -> NormGrowthResult:
    """Native norms of the fits along the nested levels, plus the advisory
    boundedness label. A failed level truncates the sequence and is noted."""
    levels, norms = [], []
    truncated, note = None, ""
    for i in range(len(design)):
        X = design.level_points(i)
        try:
            s = fit(kernel, X, target(X.points))
        except FactorizationError as exc:
            truncated, note = design.levels[i], str(exc)
            break
        levels.append(design.levels[i])
        norms.append(native_norm(s))
    label, slope = classify_norm_growth(levels, norms)
    return NormGrowthResult(levels=tuple(levels), norms=tuple(norms),
                            classification=label, slope=slope,
                            truncated_at=truncated, note=note)


@dataclass(frozen=True)
class DecayFit:
    nu_hat: float  # decay rate per unit of |x - x_i| / h
    c_hat: float  # exp(intercept) of the least-squares line
    r_squared: float
    c_env: float  # max over the grid of |l(x)| * exp(+nu_hat |x - x_i| / h)
    n_points: int
    floor: float  # |l| values below this were excluded from the fit


def decay_profile(kernel: Kernel, X: PointSet, i: int, grid: EvalGrid,
                  h: float) -> DecayFit:
    """Least-squares exponential decay fit of the i-th cardinal function.

    Fits log|l_i(x)| against t = |x - x_i| / h over grid points outside the
    node's own cell (t >= 1) whose |l_i| exceeds the evaluation noise floor
    max(1e-12, 10 eps kmax ||alpha||_1); values below that floor are
    cancellation noise, not decay. 1-d Matern kernels only (integer native
    order). Fewer than 8 usable points raises.
    """
    from .kernels import MATERN

    if kernel.family != MATERN or kernel.dim != 1 or X.domain.dim != 1:
        raise DiagnosticsError("decay_profile needs a 1-d Matern kernel")
    if h <= 0:
        raise DiagnosticsError("decay_profile needs h > 0")
    li = fit(kernel, X, np.eye(len(X))[i])
    lv = evaluate(li, grid.points)
    floor = max(1e-12, 10.0 * np.finfo(float).eps * kernel.diagonal_value()
                * float(np.sum(np.abs(li.coefficients))))
    t = np.abs(grid.points[:, 0] - X.points[i, 0]) / h
    mask = (t >= 1.0) & (np.abs(lv) > floor)
    if int(mask.sum()) < 8:
        raise DecayFitError(
            f"only {int(mask.sum())} usable points for the decay fit at node {i}"
        )
    A = np.vstack([t[mask], np.ones(int(mask.sum()))]).T
    y = np.log(np.abs(lv[mask]))
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    pred = A @ coef
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0
    nu_hat = -float(coef[0])
    c_env = float(np.max(np.abs(lv) * np.exp(np.minimum(nu_hat * t, 700.0))))
    return DecayFit(nu_hat=nu_hat, c_hat=float(np.exp(coef[1])), r_squared=r2,
                    c_env=c_env, n_points=int(mask.sum()), floor=floor)


REPORT_COLUMNS = ("n", "h", "q", "rho", "lebesgue_constant", "native_norm",
                  "sup_error", "l2_error", "jitter_flag", "sampling_condition")


@dataclass(frozen=True)
class DiagnosticsReport:
    """Per-level rows of the measured quantities plus run metadata.

    Rows are dicts keyed by REPORT_COLUMNS; numeric gaps hold nan and the
    two flag columns are strings. Metadata round-trips through the CSV as
    leading '#'-prefixed lines.
    """

    rows: tuple[dict, ...]
    metadata: dict = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        return np.array([row[name] for row in self.rows], dtype=float)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            for key, value in self.metadata.items():
                fh.write(f"# {key} = {value}\n")
            w = csv.writer(fh)
            w.writerow(REPORT_COLUMNS)
            for row in self.rows:
                out = []
                for col in REPORT_COLUMNS:
                    v = row[col]
                    if col == "n":
                        out.append(str(int(v)))
                    elif isinstance(v, str):
                        out.append(v)
                    else:
                        out.append(repr(float(v)))
                w.writerow(out)


def read_report_csv(path) -> tuple[list[dict], dict]:
    """Counterpart of DiagnosticsReport.to_csv: (rows, metadata)."""
    meta, rows = {}, []
    with open(path, newline="") as fh:
        lines = fh.read().splitlines()
    body = []
    for line in lines:
        if line.startswith("#"):
            key, _, value = line[1:].partition("=")
            meta[key.strip()] = value.strip()
        else:
            body.append(line)
    rdr = csv.reader(body)
    header = next(rdr)
    for rec in rdr:
        row = {}
        for col, val in zip(header, rec):
            if col in ("jitter_flag", "sampling_condition"):
                row[col] = val
            else:
                row[col] = float(val)
        rows.append(row)
    return rows, meta


def _jitter_flag(jitter_step: float) -> str:
    return "none" if jitter_step == 0.0 else f"{jitter_step:.0e}"


def _level_geometry(X: PointSet, fill_probe: EvalGrid | None) -> tuple[float, float, float]:
    dom = X.domain
    if dom.dim == 1:
        h = fill_distance_interval(X, dom.lower[0], dom.upper[0])
    else:
        probe = fill_probe if fill_probe is not None else EvalGrid.tensor(dom, DEFAULT_FILL_PROBE)
        h = fill_distance_grid(X, probe)
    q = separation_distance(X) if len(X) >= 2 else float("nan")
    rho = mesh_ratio(X, h) if len(X) >= 2 else float("nan")
    return h, q, rho


def convergence_table(target, kernel: Kernel, design: NestedDesign, grid: EvalGrid,
                      fill_probe: EvalGrid | None = None,
                      with_lebesgue: bool = True) -> tuple[DiagnosticsReport, dict]:
    """Full per-level report plus fitted log-log error slopes vs h.

    Each level records its geometry (h exact on intervals, probe-grid
    otherwise), the Lebesgue constant, the native norm of the fit, and the
    discretized errors. Failed levels are annotated and skipped; slopes are
    fitted over the last half of the successful levels and reported as nan
    when undefined (for example for an exactly reproduced target).
    """
    rows = []
    tau = kernel.sobolev_order_tau
    if fill_probe is None and design.master.domain.dim >= 2:
        fill_probe = EvalGrid.tensor(design.master.domain, DEFAULT_FILL_PROBE)
    for i in range(len(design)):
        X = design.level_points(i)
        h, q, rho = _level_geometry(X, fill_probe)
        dom = X.domain
        cond = (sampling_condition(h, tau, dom.lower[0], dom.upper[0])
                if dom.dim == 1 and np.isfinite(tau) else "n/a")
        row = {"n": len(X), "h": h, "q": q, "rho": rho,
               "lebesgue_constant": float("nan"), "native_norm": float("nan"),
               "sup_error": float("nan"), "l2_error": float("nan"),
               "jitter_flag": "failed", "sampling_condition": cond}
        try:
            gram = assemble_gram(kernel, X)
            fact = factorize(gram)
            s = fit(kernel, X, target(X.points), factorization=fact, gram=gram)
            row["jitter_flag"] = _jitter_flag(fact.jitter_step)
            row["native_norm"] = native_norm(s)
            row["sup_error"] = sup_error(target, s, grid)
            row["l2_error"] = l2_error(target, s, grid)
            if with_lebesgue:
                C = fact.solve(np.eye(len(X)))
                row["lebesgue_constant"] = lebesgue_max_from_coefficients(
                    kernel, X, C, grid)
        except FactorizationError:
            pass
        rows.append(row)

    ok = [r for r in rows if r["jitter_flag"] != "failed"]
    half = ok[len(ok) // 2:]
    hs = np.array([r["h"] for r in half])
    slopes = {
        "sup_slope": _loglog_slope(hs, np.array([r["sup_error"] for r in half])),
        "l2_slope": _loglog_slope(hs, np.array([r["l2_error"] for r in half])),
    }
    report = DiagnosticsReport(rows=tuple(rows), metadata={})
    return report, slopes
