"""Homogeneous Poisson process on the ball."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import BallWindow, sample_sphere


@dataclass(frozen=True, eq=False)
class PointCloud:
    points: np.ndarray  # (n, 3)
    intensity: float
    window: BallWindow = field(default_factory=BallWindow.unit_volume)

    def __len__(self):
        return len(self.points)


def poisson_count(mean: float, rng: np.random.Generator) -> int:
    if mean < 0:
        raise ValueError(f"Poisson mean must be >= 0, got {mean}")
    return int(rng.poisson(mean))


def sample_uniform_ball(n: int, window: BallWindow, rng: np.random.Generator) -> np.ndarray:
    """``n`` i.i.d. uniform points in the ball (inverse-CDF radius)."""
    directions = sample_sphere(rng, n)
    radii = window.radius * np.cbrt(rng.random(n))
    return directions * radii[:, None]


def sample_poisson_ball(
    t: float, window: BallWindow | None = None, rng: np.random.Generator | None = None
) -> PointCloud:
    """Poisson process with intensity ``t`` per unit volume on ``window``."""
    if t < 0:
        raise ValueError(f"intensity must be >= 0, got {t}")
    window = window or BallWindow.unit_volume()
    rng = rng if rng is not None else np.random.default_rng()
    n = poisson_count(t * window.volume, rng)
    return PointCloud(sample_uniform_ball(n, window, rng), float(t), window)
