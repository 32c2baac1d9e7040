"""Parameter-domain discretizations."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Literal

import numpy as np


@dataclass(frozen=True)
class GridSpec:
    """Rectangle ``bounds = (x_min, x_max, y_min, y_max)`` or annulus
    ``bounds = (r_min, r_max, theta_min, theta_max)``.

    For annuli ``nx`` counts radii and ``ny`` angles; a full turn is sampled
    without repeating the seam and the mesh wraps around it.
    ``exclusions`` are extra predicates z -> bool marking nodes as excluded.
    """

    kind: Literal["rectangle", "annulus"] = "rectangle"
    bounds: tuple[float, float, float, float] = (-1.0, 1.0, -1.0, 1.0)
    nx: int = 32
    ny: int = 32
    exclusions: tuple[Callable[[complex], bool], ...] = field(default=(), compare=False)

    def __post_init__(self):
        if self.kind not in ("rectangle", "annulus"):
            raise ValueError(f"unknown grid kind {self.kind!r}")
        if self.nx < 2 or self.ny < 2:
            raise ValueError("grids need at least 2 nodes per direction")
        a, b, c, d = self.bounds
        if not (a <= b and c <= d):
            raise ValueError(f"unordered bounds {self.bounds}")
        if self.kind == "annulus" and a < 0:
            raise ValueError("annulus radii must be non-negative")

    @property
    def wraps(self) -> bool:
        if self.kind != "annulus":
            return False
        return math.isclose(self.bounds[3] - self.bounds[2], 2 * math.pi, rel_tol=1e-12)

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        a, b, c, d = self.bounds
        xs = np.linspace(a, b, self.nx)
        ys = np.linspace(c, d, self.ny, endpoint=not self.wraps)
        return xs, ys

    def nodes(self) -> np.ndarray:
        """Complex parameter values, shape (nx, ny)."""
        xs, ys = self.axes()
        if self.kind == "rectangle":
            return xs[:, None] + 1j * ys[None, :]
        return xs[:, None] * np.exp(1j * ys[None, :])

    def scaled(self, factor: float) -> "GridSpec":
        """The image of the domain under z -> factor * z (factor > 0)."""
        a, b, c, d = self.bounds
        if self.kind == "rectangle":
            bounds = (a * factor, b * factor, c * factor, d * factor)
        else:
            bounds = (a * factor, b * factor, c, d)
        return replace(self, bounds=bounds)
