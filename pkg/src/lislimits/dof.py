"""Degrees of freedom from the wavenumber support seen on the receive surface.

At a receive point r, every transmit point s contributes an observed in-plane
wavenumber k(r, s). The region swept by k over the transmit surface is
approximated by the quadrilateral through the images of the four tx corners;
its area A(r) sets the local bandwidth B(r) = A(r)/4, and the number of
Nyquist samples over the receive surface gives D = (1/pi^2) * integral of B.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .geometry import LinkGeometry, Medium, RectSurface
from .quadrature import QuadratureSpec, integrate_surface

__all__ = [
    "WavenumberSample",
    "DofReport",
    "wavenumber",
    "shoelace_area",
    "corner_wavenumber_area",
    "local_bandwidth_area",
    "local_bandwidth",
    "dof_numeric",
    "dof_closed_parallel",
    "dof_closed_perpendicular",
    "dof_asymptotic_parallel",
    "dof_asymptotic_perpendicular",
    "dof_large_distance_parallel",
    "dof_large_distance_perpendicular",
    "dof_farfield_miller",
    "round_dof",
    "dof_report",
]

_X = np.array([1.0, 0.0, 0.0])
_Y = np.array([0.0, 1.0, 0.0])


class WavenumberSample(NamedTuple):
    k_x: np.ndarray
    k_y: np.ndarray


def wavenumber(r, s, medium: Medium, axis_u=_X, axis_v=_Y) -> WavenumberSample:
    """In-plane wavenumber at ``r`` of the wave from ``s``.

    Projects k0 * (r - s)/|r - s| onto the receive-plane axes (x and y by
    default). Broadcasts over leading axes of ``r`` and ``s``.
    """
    dr = np.asarray(r, dtype=float) - np.asarray(s, dtype=float)
    dist = np.linalg.norm(dr, axis=-1)
    if np.any(dist == 0):
        raise ValueError("receive and source points coincide")
    k0 = medium.wavenumber
    return WavenumberSample(k0 * (dr @ np.asarray(axis_u)) / dist, k0 * (dr @ np.asarray(axis_v)) / dist)


def shoelace_area(x, y):
    """Polygon area by the Gauss formula; vertices along the last axis, cycle closed implicitly."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    x1 = np.roll(x, -1, axis=-1)
    y1 = np.roll(y, -1, axis=-1)
    return 0.5 * np.abs(np.sum(x * y1 - x1 * y, axis=-1))


def corner_wavenumber_area(r, corners, medium: Medium, axis_u=_X, axis_v=_Y):
    """Shoelace area of the wavenumber images of ``corners`` (given in cyclic order)."""
    r = np.asarray(r, dtype=float)[..., None, :]
    k = wavenumber(r, np.asarray(corners, dtype=float), medium, axis_u, axis_v)
    return shoelace_area(k.k_x, k.k_y)


def local_bandwidth_area(r, tx: RectSurface, medium: Medium, axis_u=_X, axis_v=_Y):
    """Area A(r) of the wavenumber support of ``tx`` observed at ``r``.

    The corners are visited as a closed cycle around the rectangle; the
    criss-cross order (-,-), (+,-), (-,+), (+,+) would fold the quadrilateral
    into a bow-tie whose signed halves cancel.
    """
    return corner_wavenumber_area(r, tx.corners(), medium, axis_u, axis_v)


def local_bandwidth(r, tx: RectSurface, medium: Medium, axis_u=_X, axis_v=_Y):
    return local_bandwidth_area(r, tx, medium, axis_u, axis_v) / 4.0


def dof_numeric(link: LinkGeometry, spec: QuadratureSpec = QuadratureSpec()) -> float:
    """(1/4 pi^2) * integral over rx of A(r), by adaptive quadrature. Handles offsets."""
    rx = link.rx

    def f(r):
        return local_bandwidth_area(r, link.tx, link.medium, rx.axis_u, rx.axis_v)

    return float(integrate_surface(f, rx, spec).value / (4 * np.pi**2))


def _centered(link: LinkGeometry, kind: str, what: str):
    if link.kind != kind:
        raise ValueError(f"{what} needs a {kind} link, got {link.kind!r}")
    if not link.is_centered:
        raise ValueError(f"{what} is only valid for a centered transmitter, offset = {link.tx_offset}")


def dof_closed_parallel(link: LinkGeometry) -> float:
    """First-order closed form for a small centered tx parallel to the rx."""
    _centered(link, "parallel", "dof_closed_parallel")
    sx, sy, d = link.rx.len_u, link.rx.len_v, link.d
    a = np.sqrt(4 * d**2 + sx**2)
    b = np.sqrt(4 * d**2 + sy**2)
    bracket = sx * np.arctan(sy / a) / a + sy * np.arctan(sx / b) / b
    return float(2 * link.tx.area / link.medium.wavelength**2 * bracket)


def dof_closed_perpendicular(link: LinkGeometry) -> float:
    """First-order closed form for a small centered tx standing in the xz-plane."""
    _centered(link, "perpendicular", "dof_closed_perpendicular")
    sx, sy, d = link.rx.len_u, link.rx.len_v, link.d
    b = np.sqrt(4 * d**2 + sy**2)
    # acot(2d/S_x) = atan(S_x/2d) for positive arguments
    bracket = b * np.arctan(sx / (2 * d)) - 2 * d * np.arctan(sx / b)
    return float(2 * link.tx.area * bracket / (link.medium.wavelength**2 * b))


def dof_asymptotic_parallel(tx_area: float, wavelength: float) -> float:
    """Unbounded-rx limit pi A_T / lambda^2."""
    return np.pi * tx_area / wavelength**2


def dof_asymptotic_perpendicular(tx_area: float, wavelength: float) -> float:
    return np.pi * tx_area / wavelength**2


def dof_large_distance_parallel(link: LinkGeometry) -> float:
    """Far-field limit A_T A_R / (lambda d)^2."""
    return link.tx.area * link.rx.area / (link.medium.wavelength * link.d) ** 2


def dof_large_distance_perpendicular(link: LinkGeometry) -> float:
    """Far-field limit A_T A_R S_y / (4 lambda^2 d^3)."""
    lam, d = link.medium.wavelength, link.d
    return link.tx.area * link.rx.area * link.rx.len_v / (4 * lam**2 * d**3)


def dof_farfield_miller(tx_aperture, rx_aperture, d: float, wavelength: float) -> float:
    """Miller's count for far-apart collinear apertures: dxT dyT dxR dyR / (d lambda)^2."""
    (tx_x, tx_y), (rx_x, rx_y) = tx_aperture, rx_aperture
    return tx_x * tx_y * rx_x * rx_y / (d * wavelength) ** 2


def round_dof(D: float) -> int:
    """Nearest integer, floored at one mode."""
    return max(1, int(math.floor(D + 0.5)))


@dataclass(frozen=True)
class DofReport:
    d_numeric: float
    d_closed: float
    d_asymptotic: float
    d_farfield: float
    d_rounded: int


def dof_report(link: LinkGeometry, spec: QuadratureSpec = QuadratureSpec(), numeric: bool = True) -> DofReport:
    """DoF figures for a centered parallel or perpendicular link.

    ``d_farfield`` is Miller's count for parallel links and NaN for
    perpendicular ones, where it does not apply.
    """
    lam = link.medium.wavelength
    if link.kind == "parallel":
        d_closed = dof_closed_parallel(link)
        d_far = dof_farfield_miller(
            (link.tx.len_u, link.tx.len_v), (link.rx.len_u, link.rx.len_v), link.d, lam
        )
        d_asym = dof_asymptotic_parallel(link.tx.area, lam)
    else:
        d_closed = dof_closed_perpendicular(link)
        d_far = float("nan")
        d_asym = dof_asymptotic_perpendicular(link.tx.area, lam)
    return DofReport(
        d_numeric=dof_numeric(link, spec) if numeric else float("nan"),
        d_closed=d_closed,
        d_asymptotic=d_asym,
        d_farfield=d_far,
        d_rounded=round_dof(d_closed),
    )
