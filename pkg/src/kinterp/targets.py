"""Named built-in target functions for the experiments.

Targets are supplied by name plus parameters instead of user code, which
keeps experiment configs declarative and reruns deterministic. A target is
a callable mapping an (m, N) array of points to an (m,) array of values and
carries its name/parameters for report metadata.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .geometry import Box
from .kernels import Kernel, kernel_matrix


class TargetError(ValueError):
    pass


@dataclass(frozen=True)
class Target:
    name: str
    params: dict = field(compare=False)
    fn: Callable[[np.ndarray], np.ndarray] = field(compare=False, repr=False)

    def __call__(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return self.fn(pts)


def _centers_array(params, dim: int, key: str = "centers") -> np.ndarray:
    c = np.atleast_2d(np.asarray(params[key], dtype=float))
    if c.shape[1] != dim:
        raise TargetError(f"{key} must be points of dimension {dim}")
    return c


def make_target(name: str, params: dict | None, kernel: Kernel, domain: Box) -> Target:
    """Build a named target. Unknown names raise with the offending field."""
    p = dict(params or {})
    dim = domain.dim

    if name == "constant":
        v = float(p.get("value", 1.0))
        fn = lambda x: np.full(x.shape[0], v)
    elif name == "abs_power":
        center = np.asarray(p.get("center", [0.5] * dim), dtype=float).reshape(dim)
        power = float(p.get("power", 1.0))
        def fn(x, c=center, q=power):
            d = np.sqrt(np.sum((x - c) ** 2, axis=1))
            return d ** q
    elif name == "kernel_translate":
        center = np.asarray(p.get("center", [0.5] * dim), dtype=float).reshape(1, dim)
        fn = lambda x, c=center: kernel_matrix(kernel, x, c)[:, 0]
    elif name == "translate_combo":
        centers = _centers_array(p, dim)
        weights = np.asarray(p.get("weights", np.ones(len(centers))), dtype=float)
        if weights.shape != (len(centers),):
            raise TargetError("weights must match the number of centers")
        fn = lambda x, c=centers, w=weights: kernel_matrix(kernel, x, c) @ w
    elif name == "smooth_step":
        center = float(p.get("center", 0.5))
        width = float(p.get("width", 0.1))
        if width <= 0:
            raise TargetError("smooth_step width must be positive")
        fn = lambda x, c=center, w=width: 0.5 * (1.0 + np.tanh((x[:, 0] - c) / w))
    elif name == "trig":
        freq = float(p.get("freq", 1.0))
        amp = float(p.get("amplitude", 1.0))
        fn = lambda x, f=freq, a=amp: a * np.sin(2.0 * np.pi * f * x).sum(axis=1)
    else:
        raise TargetError(f"unknown target name {name!r}")
    return Target(name=name, params=p, fn=fn)


TARGET_NAMES = ("constant", "abs_power", "kernel_translate", "translate_combo",
                "smooth_step", "trig")
