"""Closed-form geometric probability kernels for rectangles.

``z_kernel(d, a, b)`` is the probability that a point at distance ``d`` in a
uniformly random direction from a uniform point of an ``a x b`` rectangle
(``a <= b``) also lies in the rectangle. Everything else here is built
from it: the Tx-Rx distance density of a building and the probability that
a link from a given room stays inside that room (LOS).
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate

from .exceptions import DomainError
from .layout import Floorplan, Room

__all__ = [
    "z_breakpoints",
    "z_kernel",
    "distance_pdf",
    "distance_cdf",
    "distance_cdf_table",
    "los_probability",
]


def z_breakpoints(a: float, b: float) -> tuple[float, float, float]:
    """Sorted points where ``z_kernel`` switches branch."""
    if not (0 < a <= b):
        raise DomainError(f"need 0 < a <= b, got a={a}, b={b}")
    return (a, b, math.hypot(a, b))


def z_kernel(d, a: float, b: float):
    """Piecewise closed form of the rectangle self-containment probability.

    Branches: ``[0, a]``, ``(a, b]``, ``(b, sqrt(a^2+b^2)]``, beyond. Scalar
    in, float out; arrays are evaluated elementwise.
    """
    a = float(a)
    b = float(b)
    if not (0 < a <= b):
        raise DomainError(f"need 0 < a <= b, got a={a}, b={b}")
    d = np.asarray(d, dtype=float)
    if np.any(d < 0):
        raise DomainError("distance must be non-negative")

    ab = a * b
    abpi = ab * math.pi
    diag2 = a * a + b * b
    out = np.zeros_like(d)

    m1 = d <= a
    m2 = (d > a) & (d <= b)
    m3 = (d > b) & (d * d < diag2)

    d1 = d[m1]
    out[m1] = (d1 * d1 - 2.0 * d1 * (a + b) + abpi) / abpi

    d2 = d[m2]
    if d2.size:
        ra = a / d2
        out[m2] = (-a * a + 2.0 * d2 * b * (np.sqrt(1.0 - ra * ra) - 1.0) + 2.0 * ab * np.arcsin(ra)) / abpi

    d3 = d[m3]
    if d3.size:
        ra = a / d3
        rb = b / d3
        num = (
            d3 * d3
            + diag2
            - 2.0 * d3 * (b * np.sqrt(1.0 - ra * ra) + a * np.sqrt(np.maximum(1.0 - rb * rb, 0.0)))
            + 2.0 * ab * (np.arccos(ra) + np.arccos(np.minimum(rb, 1.0)) - math.pi / 2.0)
        )
        out[m3] = -num / abpi

    np.clip(out, 0.0, 1.0, out=out)
    return float(out) if out.ndim == 0 else out


def distance_pdf(d, fp: Floorplan):
    """Density of the planar distance between two uniform points of the outline."""
    d = np.asarray(d, dtype=float)
    out = 2.0 * math.pi * d * z_kernel(np.maximum(d, 0.0), fp.y, fp.x) / fp.area
    out = np.where(d < 0, 0.0, out)
    return float(out) if out.ndim == 0 else out


def distance_cdf(d: float, fp: Floorplan) -> float:
    """``P(distance <= d)`` by adaptive quadrature split at the kernel branch points."""
    d = float(d)
    if d <= 0:
        return 0.0
    upper = min(d, fp.diagonal)
    pts = [p for p in z_breakpoints(fp.y, fp.x) if 0 < p < upper]
    val, _ = integrate.quad(distance_pdf, 0.0, upper, args=(fp,), points=pts or None,
                            epsabs=1e-13, epsrel=1e-11, limit=200)
    return min(val, 1.0)


def distance_cdf_table(fp: Floorplan, n: int = 4001) -> tuple[np.ndarray, np.ndarray]:
    """CDF sampled on ``n`` evenly spaced distances in ``[0, diagonal]``.

    Panels are integrated independently and accumulated, so the table is
    exact to quadrature precision at every node.
    """
    grid = np.linspace(0.0, fp.diagonal, n)
    brk = z_breakpoints(fp.y, fp.x)
    panels = np.empty(n - 1)
    for k in range(n - 1):
        lo, hi = grid[k], grid[k + 1]
        pts = [p for p in brk if lo < p < hi]
        panels[k] = integrate.quad(distance_pdf, lo, hi, args=(fp,), points=pts or None,
                                   epsabs=1e-14, epsrel=1e-12)[0]
    cdf = np.concatenate([[0.0], np.cumsum(panels)])
    return grid, np.minimum(cdf, 1.0)


def los_probability(d, room: Room, fp: Floorplan):
    """Probability a link from ``room`` at distance ``d`` stays in that room,
    given the receiver lies inside the building. Zero where the building
    kernel vanishes."""
    d = np.asarray(d, dtype=float)
    inner = np.asarray(z_kernel(d, room.short_edge, room.long_edge))
    outer = np.asarray(z_kernel(d, fp.y, fp.x))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(outer > 0, inner / np.where(outer > 0, outer, 1.0), 0.0)
    ratio = np.clip(ratio, 0.0, 1.0)
    return float(ratio) if ratio.ndim == 0 else ratio
