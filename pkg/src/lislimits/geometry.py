"""Surfaces, link placement and patch grids.

All lengths are SI meters. The receive surface of a canonical link lies on
the z = 0 plane centered at the origin; the transmit surface sits at height
``d`` either parallel to it (xy-plane) or perpendicular to it (xz-plane).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import constants
from scipy.optimize import lsq_linear

__all__ = [
    "GeometryError",
    "Medium",
    "RectSurface",
    "LinkGeometry",
    "SurfaceGrid",
    "make_parallel_link",
    "make_perpendicular_link",
    "grid",
]

_AXIS_TOL = 1e-12
_TILE_TOL = 1e-3


class GeometryError(ValueError):
    """Invalid surface, link or grid."""


@dataclass(frozen=True)
class Medium:
    """Monochromatic free-space propagation context."""

    wavelength: float

    def __post_init__(self):
        if not (self.wavelength > 0 and np.isfinite(self.wavelength)):
            raise GeometryError(f"wavelength must be positive, got {self.wavelength}")

    @property
    def wavenumber(self) -> float:
        return 2.0 * np.pi / self.wavelength

    @property
    def impedance(self) -> float:
        return float(np.sqrt(constants.mu_0 / constants.epsilon_0))

    @property
    def speed_of_light(self) -> float:
        return constants.c

    @property
    def permeability(self) -> float:
        return constants.mu_0

    @property
    def permittivity(self) -> float:
        return constants.epsilon_0

    @property
    def angular_frequency(self) -> float:
        return self.wavenumber * constants.c

    def scaled(self, factor: float) -> "Medium":
        return Medium(self.wavelength * factor)


def _vec3(v) -> tuple[float, float, float]:
    arr = np.asarray(v, dtype=float).reshape(-1)
    if arr.shape != (3,) or not np.all(np.isfinite(arr)):
        raise GeometryError(f"expected a finite 3-vector, got {v!r}")
    return tuple(float(x) for x in arr)


@dataclass(frozen=True)
class RectSurface:
    """Flat oriented rectangle.

    Points are ``center + u * axis_u + v * axis_v`` with
    ``|u| <= len_u / 2`` and ``|v| <= len_v / 2``.
    """

    center: tuple[float, float, float]
    axis_u: tuple[float, float, float]
    axis_v: tuple[float, float, float]
    len_u: float
    len_v: float

    def __post_init__(self):
        for name in ("center", "axis_u", "axis_v"):
            object.__setattr__(self, name, _vec3(getattr(self, name)))
        if not (self.len_u > 0 and self.len_v > 0):
            raise GeometryError(f"side lengths must be positive, got {self.len_u}, {self.len_v}")
        au, av = np.array(self.axis_u), np.array(self.axis_v)
        if abs(np.linalg.norm(au) - 1) > _AXIS_TOL or abs(np.linalg.norm(av) - 1) > _AXIS_TOL:
            raise GeometryError("in-plane axes must be unit vectors")
        if abs(au @ av) > _AXIS_TOL:
            raise GeometryError("in-plane axes must be orthogonal")

    @property
    def area(self) -> float:
        return self.len_u * self.len_v

    @property
    def normal(self) -> np.ndarray:
        return np.cross(self.axis_u, self.axis_v)

    def point(self, u, v) -> np.ndarray:
        """Map in-plane coordinates (broadcastable arrays) to 3D points, shape (..., 3)."""
        u = np.asarray(u, dtype=float)[..., None]
        v = np.asarray(v, dtype=float)[..., None]
        return np.asarray(self.center) + u * np.asarray(self.axis_u) + v * np.asarray(self.axis_v)

    def corners(self) -> np.ndarray:
        """Corners in cyclic order (-,-), (+,-), (+,+), (-,+); shape (4, 3)."""
        hu, hv = self.len_u / 2, self.len_v / 2
        return self.point([-hu, hu, hu, -hu], [-hv, -hv, hv, hv])

    def scaled(self, factor: float) -> "RectSurface":
        return RectSurface(
            tuple(factor * c for c in self.center),
            self.axis_u,
            self.axis_v,
            self.len_u * factor,
            self.len_v * factor,
        )


def min_distance(a: RectSurface, b: RectSurface) -> float:
    """Exact minimum point-to-point distance between two rectangles.

    Squared distance is a convex quadratic in the four in-plane coordinates,
    so a bounded linear least-squares solve gives the global minimum.
    """
    A = np.column_stack([a.axis_u, a.axis_v, -np.asarray(b.axis_u), -np.asarray(b.axis_v)])
    rhs = np.asarray(b.center) - np.asarray(a.center)
    hu = np.array([a.len_u, a.len_v, b.len_u, b.len_v]) / 2
    res = lsq_linear(A, rhs, bounds=(-hu, hu), tol=1e-14, lsmr_tol="auto", method="bvls")
    return float(np.linalg.norm(A @ res.x - rhs))


@dataclass(frozen=True)
class LinkGeometry:
    """Transmit/receive surface pair.

    ``kind`` is ``"parallel"`` or ``"perpendicular"`` for the canonical
    placements built by :func:`make_parallel_link` and
    :func:`make_perpendicular_link`, and ``"general"`` otherwise (for instance
    after :meth:`swapped`).
    """

    tx: RectSurface
    rx: RectSurface
    medium: Medium
    kind: str = "general"
    min_distance_wavelengths: float = 1.0
    separation: float = field(init=False)

    def __post_init__(self):
        if self.kind not in ("parallel", "perpendicular", "general"):
            raise GeometryError(f"unknown link kind {self.kind!r}")
        sep = min_distance(self.tx, self.rx)
        object.__setattr__(self, "separation", sep)
        if sep < self.min_distance_wavelengths * self.medium.wavelength:
            raise GeometryError(
                f"surfaces closer than {self.min_distance_wavelengths:g} wavelength(s) "
                f"(min distance {sep:.6g} m): reactive near-field"
            )
        if not self.F > 0:
            raise GeometryError("tx center lies in the rx plane (F = 0)")

    @cached_property
    def d(self) -> float:
        """Distance of the tx center from the rx plane."""
        return float(abs((np.asarray(self.tx.center) - np.asarray(self.rx.center)) @ self.rx.normal))

    @property
    def F(self) -> float:
        return self.d**2 / self.rx.area

    @property
    def aspect_ratio(self) -> float:
        """S_x : S_y of the receive surface, as a single number."""
        return self.rx.len_u / self.rx.len_v

    @property
    def tx_offset(self) -> tuple[float, float]:
        """In-plane offset (x0, y0) of the tx center in rx coordinates."""
        rel = np.asarray(self.tx.center) - np.asarray(self.rx.center)
        return float(rel @ self.rx.axis_u), float(rel @ self.rx.axis_v)

    @property
    def is_centered(self) -> bool:
        x0, y0 = self.tx_offset
        scale = max(self.rx.len_u, self.rx.len_v, self.d)
        return abs(x0) <= 1e-12 * scale and abs(y0) <= 1e-12 * scale

    def swapped(self) -> "LinkGeometry":
        return LinkGeometry(self.rx, self.tx, self.medium, "general", self.min_distance_wavelengths)

    def scaled(self, factor: float) -> "LinkGeometry":
        return LinkGeometry(
            self.tx.scaled(factor),
            self.rx.scaled(factor),
            self.medium.scaled(factor),
            self.kind,
            self.min_distance_wavelengths,
        )


def _check_sizes(*pairs):
    for pair in pairs:
        if len(pair) != 2 or not all(float(x) > 0 for x in pair):
            raise GeometryError(f"surface sizes must be two positive lengths, got {pair!r}")


def _canonical_rx(rx_size) -> RectSurface:
    return RectSurface((0, 0, 0), (1, 0, 0), (0, 1, 0), float(rx_size[0]), float(rx_size[1]))


def make_parallel_link(
    d: float,
    tx_size,
    rx_size,
    tx_center_offset=(0.0, 0.0),
    *,
    medium: Medium,
    min_distance_wavelengths: float = 1.0,
) -> LinkGeometry:
    """Receive surface on z = 0, transmit surface parallel at z = d centered at (x0, y0, d)."""
    _check_sizes(tx_size, rx_size)
    if d <= medium.wavelength:
        raise GeometryError(f"d = {d:g} m is not larger than the wavelength: reactive near-field")
    x0, y0 = (float(t) for t in tx_center_offset)
    tx = RectSurface((x0, y0, d), (1, 0, 0), (0, 1, 0), float(tx_size[0]), float(tx_size[1]))
    return LinkGeometry(tx, _canonical_rx(rx_size), medium, "parallel", min_distance_wavelengths)


def make_perpendicular_link(
    d: float,
    tx_size,
    rx_size,
    tx_center_offset=(0.0, 0.0),
    *,
    medium: Medium,
    min_distance_wavelengths: float = 1.0,
) -> LinkGeometry:
    """Transmit surface in the xz-plane with sides (L_x, L_z), centered at (x0, y0, d)."""
    _check_sizes(tx_size, rx_size)
    if d <= medium.wavelength:
        raise GeometryError(f"d = {d:g} m is not larger than the wavelength: reactive near-field")
    x0, y0 = (float(t) for t in tx_center_offset)
    # axis order (x, z) gives normal x × z = -y; orientation is irrelevant to every result
    tx = RectSurface((x0, y0, d), (1, 0, 0), (0, 0, 1), float(tx_size[0]), float(tx_size[1]))
    return LinkGeometry(tx, _canonical_rx(rx_size), medium, "perpendicular", min_distance_wavelengths)


@dataclass(frozen=True)
class SurfaceGrid:
    """Uniform patch tiling of a surface; samples are patch centers."""

    surface: RectSurface
    n_u: int
    n_v: int

    @property
    def delta_u(self) -> float:
        return self.surface.len_u / self.n_u

    @property
    def delta_v(self) -> float:
        return self.surface.len_v / self.n_v

    @property
    def patch_area(self) -> float:
        return self.delta_u * self.delta_v

    @property
    def size(self) -> int:
        return self.n_u * self.n_v

    @cached_property
    def indices(self) -> tuple[np.ndarray, np.ndarray]:
        """(u_index, v_index) per sample, u-major ordering."""
        iu, iv = np.meshgrid(np.arange(self.n_u), np.arange(self.n_v), indexing="ij")
        return iu.ravel(), iv.ravel()

    @cached_property
    def local(self) -> tuple[np.ndarray, np.ndarray]:
        iu, iv = self.indices
        u = (iu + 0.5) * self.delta_u - self.surface.len_u / 2
        v = (iv + 0.5) * self.delta_v - self.surface.len_v / 2
        return u, v

    @cached_property
    def points(self) -> np.ndarray:
        return self.surface.point(*self.local)


def _tile_count(length: float, delta: float) -> int:
    n = int(round(length / delta))
    if n < 1 or abs(n * delta - length) > _TILE_TOL * length:
        raise GeometryError(f"patch side {delta:g} does not tile length {length:g}")
    return n


def grid(surface: RectSurface, delta: float) -> SurfaceGrid:
    """Tile ``surface`` with square patches of side ``delta``."""
    if not delta > 0:
        raise GeometryError(f"patch side must be positive, got {delta}")
    return SurfaceGrid(surface, _tile_count(surface.len_u, delta), _tile_count(surface.len_v, delta))
