"""Planes through the origin, orthogonal projections, the unit-volume ball and
sphere sampling."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

UNIT_TOL = 1e-12

E1 = np.array([1.0, 0.0, 0.0])
E3 = np.array([0.0, 0.0, 1.0])


def as_sphere_point(x, tol: float = 1e-9) -> np.ndarray:
    """Return ``x`` as a float array of shape (3,), rejecting non-unit input."""
    arr = np.asarray(x, dtype=float).reshape(-1)
    if arr.shape != (3,) or not np.all(np.isfinite(arr)):
        raise ValueError(f"expected a finite 3-vector, got {x!r}")
    norm = float(np.linalg.norm(arr))
    if abs(norm - 1.0) > tol:
        raise ValueError(f"sphere point must have unit norm, got |x| = {norm!r}")
    return arr / norm


def normalize(x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    return arr / np.linalg.norm(arr)


@dataclass(frozen=True)
class BallWindow:
    """Closed ball of the given radius centred at the origin."""

    radius: float

    @classmethod
    def unit_volume(cls) -> "BallWindow":
        return cls((3.0 / (4.0 * math.pi)) ** (1.0 / 3.0))

    @property
    def volume(self) -> float:
        return 4.0 / 3.0 * math.pi * self.radius**3


@dataclass(frozen=True, eq=False)
class ProjectionPlane:
    """Two-dimensional linear subspace spanned by ``basis_u`` and ``basis_v``.

    ``normal`` completes the basis to an orthonormal frame. Use
    :func:`plane_from_sphere_point` for the canonical basis choice.
    """

    normal: np.ndarray
    basis_u: np.ndarray
    basis_v: np.ndarray

    def __post_init__(self):
        frame = np.stack([self.basis_u, self.basis_v, self.normal]).astype(float)
        if frame.shape != (3, 3):
            raise ValueError("normal and basis vectors must be 3-vectors")
        err = np.abs(frame @ frame.T - np.eye(3)).max()
        if err > 1e-10:
            raise ValueError(f"plane frame is not orthonormal (error {err:.3g})")
        for name, row in zip(("basis_u", "basis_v", "normal"), frame):
            row.setflags(write=False)
            object.__setattr__(self, name, row)

    @property
    def basis(self) -> np.ndarray:
        """(2, 3) matrix whose rows are ``basis_u`` and ``basis_v``."""
        return np.stack([self.basis_u, self.basis_v])

    def project(self, points) -> np.ndarray:
        """In-plane coordinates of one point (shape (3,)) or many (shape (n, 3))."""
        return np.asarray(points, dtype=float) @ self.basis.T

    def lift(self, uv) -> np.ndarray:
        """Inverse of :meth:`project` restricted to the plane."""
        uv = np.asarray(uv, dtype=float)
        return uv @ self.basis

    def rotated(self, angle: float) -> "ProjectionPlane":
        """Same subspace with the in-plane basis turned by ``angle`` about the normal."""
        c, s = math.cos(angle), math.sin(angle)
        return ProjectionPlane(
            self.normal,
            c * self.basis_u + s * self.basis_v,
            -s * self.basis_u + c * self.basis_v,
        )

    def same_subspace(self, other: "ProjectionPlane", tol: float = 1e-10) -> bool:
        return bool(np.all(np.abs(other.basis @ self.normal) <= tol))

    def __repr__(self):
        n = ", ".join(f"{c:.6g}" for c in self.normal)
        return f"ProjectionPlane(normal=({n}))"


def plane_from_sphere_point(x) -> ProjectionPlane:
    """Plane orthogonal to the unit vector ``x``.

    ``x`` and ``-x`` give the same subspace. The in-plane basis is
    ``u = normalize(a x n)``, ``v = n x u`` with ``a = e3`` unless the normal
    is within ~25 degrees of the z axis, in which case ``a = e1``.
    """
    n = as_sphere_point(x)
    a = E3 if abs(float(n @ E3)) < 0.9 else E1
    u = normalize(np.cross(a, n))
    v = np.cross(n, u)
    return ProjectionPlane(n, u, v)


def project(p, plane: ProjectionPlane) -> np.ndarray:
    return plane.project(p)


def spherical_distance(x, y) -> float:
    """Great-circle distance in radians between two unit vectors.

    ``atan2(|x cross y|, x . y)`` stays accurate near 0 and pi, where the
    arccos of the dot product loses about half the digits.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return math.atan2(float(np.linalg.norm(np.cross(x, y))), float(np.dot(x, y)))


def sample_sphere(rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Uniform points on the unit sphere via normalised Gaussians."""
    shape = (3,) if size is None else (size, 3)
    g = rng.standard_normal(shape)
    return g / np.sqrt(np.sum(g * g, axis=-1, keepdims=True))


def sample_sphere_pp(rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Uniform points on the open positive octant of the sphere.

    The coordinate-wise absolute value pushes the uniform sphere measure
    forward to the normalised uniform measure on the octant.
    """
    out = np.abs(sample_sphere(rng, size))
    # a zero Gaussian coordinate has probability zero, but keep the support open
    return np.where(out > 0.0, out, np.finfo(float).tiny)


def chord_length(q, ball: BallWindow) -> np.ndarray | float:
    """Length of the ball's intersection with the line through in-plane point
    ``q`` perpendicular to the plane.

    Only ``|q|`` matters since every plane passes through the ball's centre.
    Accepts one point or an (n, 2) array.
    """
    q = np.asarray(q, dtype=float)
    rho2 = np.sum(q * q, axis=-1)
    out = 2.0 * np.sqrt(np.maximum(ball.radius**2 - rho2, 0.0))
    return float(out) if out.ndim == 0 else out


def rotation_matrix(axis, angle: float) -> np.ndarray:
    """Rodrigues rotation about ``axis`` by ``angle`` radians."""
    k = normalize(axis)
    kx = np.array([[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]])
    return np.eye(3) + math.sin(angle) * kx + (1.0 - math.cos(angle)) * (kx @ kx)


def geodesic_step(x, direction, angle: float) -> np.ndarray:
    """Move from ``x`` along the great circle towards ``direction`` by ``angle``."""
    x = as_sphere_point(x)
    d = np.asarray(direction, dtype=float)
    d = normalize(d - (d @ x) * x)
    return math.cos(angle) * x + math.sin(angle) * d


def octant_grid(resolution: int) -> np.ndarray:
    """Equal-area ``g x g`` grid of directions covering the positive octant.

    Cell midpoints in ``(z, phi)`` with ``z = cos(polar angle)`` uniform on
    (0, 1) and ``phi`` uniform on (0, pi/2); every cell has the same spherical
    area. Returns shape (g*g, 3).
    """
    if resolution < 1:
        raise ValueError("grid resolution must be >= 1")
    k = (np.arange(resolution) + 0.5) / resolution
    z = k
    phi = k * (math.pi / 2.0)
    zz, pp = np.meshgrid(z, phi, indexing="ij")
    s = np.sqrt(1.0 - zz**2)
    return np.stack([s * np.cos(pp), s * np.sin(pp), zz], axis=-1).reshape(-1, 3)


# ---------------------------------------------------------------------------
# planar regions


@dataclass(frozen=True)
class Disk:
    """Closed disk in plane coordinates."""

    radius: float
    center: tuple[float, float] = (0.0, 0.0)

    def contains(self, uv) -> np.ndarray:
        uv = np.asarray(uv, dtype=float)
        d = uv - np.asarray(self.center)
        return np.sum(d * d, axis=-1) <= self.radius**2

    def __str__(self):
        if self.center == (0.0, 0.0):
            return f"disk:{self.radius!r}"
        return f"disk:{self.radius!r}@{self.center[0]!r},{self.center[1]!r}"


@dataclass(frozen=True)
class Rect:
    """Half-open rectangle ``[u_min, u_max) x [v_min, v_max)``.

    Half-open so that a tiling partitions the plane exactly.
    """

    u_min: float
    u_max: float
    v_min: float
    v_max: float

    def __post_init__(self):
        if not (self.u_min <= self.u_max and self.v_min <= self.v_max):
            raise ValueError(f"degenerate rectangle bounds {self}")

    def contains(self, uv) -> np.ndarray:
        uv = np.asarray(uv, dtype=float)
        u, v = uv[..., 0], uv[..., 1]
        return (u >= self.u_min) & (u < self.u_max) & (v >= self.v_min) & (v < self.v_max)

    def __str__(self):
        return f"rect:{self.u_min!r},{self.u_max!r},{self.v_min!r},{self.v_max!r}"


Region2 = Disk | Rect


def parse_region(text: str) -> Region2:
    """Parse ``disk:r``, ``disk:r@cu,cv`` or ``rect:u0,u1,v0,v1``."""
    kind, _, rest = text.strip().partition(":")
    try:
        if kind == "disk":
            radius, _, center = rest.partition("@")
            if center:
                cu, cv = (float(s) for s in center.split(","))
                return Disk(float(radius), (cu, cv))
            return Disk(float(radius))
        if kind == "rect":
            vals = [float(s) for s in rest.split(",")]
            if len(vals) != 4:
                raise ValueError
            return Rect(*vals)
    except ValueError:
        pass
    raise ValueError(f"cannot parse region {text!r}; use disk:r or rect:u0,u1,v0,v1")
