"""Closed-form constants, intensities and regime radii for d = 3.

Expected crossings on a region ``A`` of a plane are modelled as

    M(A) = (1/8) * c_d * t**4 * r**8 * f(A),

with ``f(A)`` the integral over ``A`` of the squared chord length of the ball
perpendicular to the plane and ``c_d = 8 pi kappa_1**2 B(3, 3/2)**2``.

:func:`pair_kernel_constant` evaluates the same segment-pair integral that
``c_d`` stands for directly (pi**3 / 8); the two disagree, and simulations
follow the direct integral. Both are exposed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

from scipy import integrate

from .geometry import BallWindow, Disk, ProjectionPlane, Rect, Region2

DIM = 3
KAPPA1 = 2.0  # length of the 1-D unit ball [-1, 1]
KAPPA3 = 4.0 * math.pi / 3.0
EXISTENCE_EXPONENT_LIMIT = 1.0 / 8.0


def beta_function(a: float, b: float) -> float:
    if not (a > 0 and b > 0):
        raise ValueError(f"beta function needs positive arguments, got ({a}, {b})")
    if a + b < 170.0:
        return math.gamma(a) * math.gamma(b) / math.gamma(a + b)
    return math.exp(math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b))


def c_d_constant() -> float:
    """``8 pi kappa_1^2 B(3, 3/2)^2`` reduced to ``8192 pi / 11025``."""
    return 8192.0 * math.pi / 11025.0


def c_d_from_beta() -> float:
    return 8.0 * math.pi * KAPPA1**2 * beta_function(3.0, DIM / 2.0) ** 2


def pair_kernel_constant() -> float:
    """``int_B int_B |a_L x c_L| da dc`` over two unit balls, ``a_L`` being
    the projection onto a plane.

    Uniform ball points project to radii with density ``3 s sqrt(1 - s^2)``,
    whose mean is ``3 pi / 16``; the mean ``|sin|`` of the uniform angle
    between the two projections is ``2 / pi``. Hence
    ``kappa_3^2 * (3 pi / 16)^2 * 2 / pi = pi^3 / 8``. It is the exact
    leading-order constant of the expected crossing count.
    """
    return math.pi**3 / 8.0


def f_full_plane(window: BallWindow | None = None) -> float:
    """Integral of the squared chord length over a whole plane: ``2 pi R^4``."""
    window = window or BallWindow.unit_volume()
    return 2.0 * math.pi * window.radius**4


def _circle_x_crossings(c1, r1, c2, r2) -> list[float]:
    (x1, y1), (x2, y2) = c1, c2
    d = math.hypot(x2 - x1, y2 - y1)
    if d == 0.0 or d > r1 + r2 or d < abs(r1 - r2):
        return []
    a = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d)
    h = math.sqrt(max(r1 * r1 - a * a, 0.0))
    mx = x1 + a * (x2 - x1) / d
    return [mx + h * (y2 - y1) / d, mx - h * (y2 - y1) / d]


def f_region(
    window: BallWindow | None,
    plane: ProjectionPlane | None,
    region: Region2 | None,
    *,
    tol: float = 1e-12,
) -> float:
    """Integral of the squared chord length over ``region`` (iterated adaptive
    quadrature, breakpoints at boundary kinks).

    The plane only fixes the coordinate frame; by the ball's symmetry every
    plane gives the same value. ``region=None`` means the whole plane.
    """
    del plane
    window = window or BallWindow.unit_volume()
    R = window.radius
    if region is None:
        return f_full_plane(window)

    def ball_half(u):
        return math.sqrt(max(R * R - u * u, 0.0))

    kinks: list[float] = []
    if isinstance(region, Rect):
        u_lo, u_hi = max(region.u_min, -R), min(region.u_max, R)

        def v_lims(u):
            h = ball_half(u)
            return max(region.v_min, -h), min(region.v_max, h)

        for v in (region.v_min, region.v_max):
            if abs(v) < R:
                kinks += [ball_half(v), -ball_half(v)]
    elif isinstance(region, Disk):
        cu, cv = region.center
        rho = region.radius
        u_lo, u_hi = max(cu - rho, -R), min(cu + rho, R)

        def v_lims(u):
            h = ball_half(u)
            g = math.sqrt(max(rho * rho - (u - cu) ** 2, 0.0))
            return max(cv - g, -h), min(cv + g, h)

        kinks += _circle_x_crossings((0.0, 0.0), R, region.center, rho)
    else:
        raise TypeError(f"unsupported region type {type(region).__name__}")
    if u_hi <= u_lo:
        return 0.0

    def inner(u):
        lo, hi = v_lims(u)
        if hi <= lo:
            return 0.0
        val, _ = integrate.quad(
            lambda v: 4.0 * (R * R - u * u - v * v), lo, hi, epsabs=tol, epsrel=tol
        )
        return val

    points = sorted({k for k in kinks if u_lo < k < u_hi})
    val, _ = integrate.quad(
        inner, u_lo, u_hi, points=points or None, epsabs=tol, epsrel=tol, limit=200
    )
    return val


def expected_crossings(
    t: float,
    r: float,
    window: BallWindow | None = None,
    region: Region2 | None = None,
    *,
    constant: float | None = None,
) -> float:
    """``(1/8) * constant * t^4 * r^8 * f(region)``; ``constant`` defaults to ``c_d``."""
    if t < 0 or r < 0:
        raise ValueError("t and r must be non-negative")
    k = c_d_constant() if constant is None else constant
    f = f_full_plane(window) if region is None else f_region(window, None, region)
    return k * t**4 * r**8 * f / 8.0


@dataclass(frozen=True)
class ModelConstants:
    R: float
    kappa1: float
    beta_3_32: float
    c_d: float
    f_full: float
    pair_kernel: float
    d: int = DIM

    @classmethod
    def compute(cls, window: BallWindow | None = None) -> "ModelConstants":
        window = window or BallWindow.unit_volume()
        return cls(
            R=window.radius,
            kappa1=KAPPA1,
            beta_3_32=beta_function(3.0, 1.5),
            c_d=c_d_constant(),
            f_full=f_full_plane(window),
            pair_kernel=pair_kernel_constant(),
        )


# ---------------------------------------------------------------------------
# regimes


@dataclass(frozen=True)
class RegimeSpec:
    """How the connection radius scales with ``t``.

    ``constant``: ``t^2 r^4 = parameter``. ``log``: ``r = (parameter * ln t / t^4)^(1/8)``.
    ``fixed``: ``r = parameter`` regardless of ``t`` (escape hatch).
    """

    kind: Literal["constant", "log", "fixed"]
    parameter: float

    def __post_init__(self):
        if self.kind not in ("constant", "log", "fixed"):
            raise ValueError(f"unknown regime kind {self.kind!r}")
        if not self.parameter > 0:
            raise ValueError(f"regime parameter must be > 0, got {self.parameter}")

    def radius(self, t: float) -> float:
        return radius_for_regime(t, self)

    @property
    def existence_exponent(self) -> float | None:
        """For the log regime, ``c`` with expected crossings per plane ``c ln t``."""
        if self.kind != "log":
            return None
        return existence_exponent(self.parameter)

    @property
    def in_proven_regime(self) -> bool | None:
        c = self.existence_exponent
        return None if c is None else c < EXISTENCE_EXPONENT_LIMIT

    @classmethod
    def parse(cls, text: str) -> "RegimeSpec":
        kind, _, value = text.partition(":")
        try:
            return cls(kind.strip(), float(value))  # type: ignore[arg-type]
        except ValueError as exc:
            raise ValueError(f"cannot parse regime {text!r}: {exc}") from None

    def __str__(self):
        return f"{self.kind}:{self.parameter!r}"


def radius_for_regime(t: float, spec: RegimeSpec) -> float:
    if spec.kind == "fixed":
        return spec.parameter
    if spec.kind == "constant":
        if t <= 0:
            raise ValueError("constant regime needs t > 0")
        return (spec.parameter / t**2) ** 0.25
    if t <= 1:
        raise ValueError(f"log regime needs t > 1 (ln t > 0), got t = {t}")
    return (spec.parameter * math.log(t) / t**4) ** 0.125


def existence_exponent(c_prime: float, window: BallWindow | None = None) -> float:
    """``c = c' * c_d * f_full / 8``: expected crossings per plane are ``c ln t``."""
    return c_prime * c_d_constant() * f_full_plane(window) / 8.0


def c_prime_for_exponent(c: float, window: BallWindow | None = None) -> float:
    return 8.0 * c / (c_d_constant() * f_full_plane(window))


def alpha_window(c: float) -> tuple[float, float] | None:
    """Open interval of ``alpha`` with ``c < alpha < 1/4 - c``, or None if empty."""
    lo, hi = c, 0.25 - c
    return (lo, hi) if lo < hi else None


def geometric_cdf(m: int, M: float) -> float:
    """Probability that one of ``m`` independent Poisson(M) planes is empty."""
    if m < 0 or M < 0:
        raise ValueError("m and M must be non-negative")
    return 1.0 - (1.0 - math.exp(-M)) ** m


def bound_terms(t: float, r: float, alpha: float) -> dict[str, float]:
    """Order terms (no constants) from the variance and covariance bounds, d = 3."""
    d = DIM
    cov4 = t ** (4 + alpha * d) * r ** (3 * d)
    cov6 = t**6 * r ** (3 * d + 4)
    return {
        "var t^7 r^16": t**7 * r ** (4 * d + 4),
        "var t^6 r^13": cov6,
        "var t^6 r^14": t**6 * r ** (4 * d + 2),
        "var t^5 r^11": t**5 * r ** (3 * d + 2),
        "cov t^6 r^13": cov6,
        "cov t^(4+3a) r^9": cov4,
        "dkr t^6 r^13 + t^(4+3a) r^9": cov6 + cov4,
        "intensity t^4 r^9": t**4 * r ** (2 * d + 3),
    }


def two_cylinder_height(r: float, angle: float) -> float:
    """Reach of the intersection of two radius-``2r`` cylinders whose axes
    meet at ``angle``: ``2r / sin(angle / 2)``."""
    if not 0.0 < angle <= math.pi:
        raise ValueError(f"angle must lie in (0, pi], got {angle}")
    return 2.0 * r / math.sin(angle / 2.0)
