"""Coupling intensity, link power gain and capacity figures.

Gains are dimensionless power ratios for an x-polarized transmit current.
The y- and z-polarized variants follow by exchanging coordinates and are not
provided.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .geometry import LinkGeometry
from .green import column_x_norm2
from .quadrature import QuadratureSpec, integrate_double_surface, integrate_surface

__all__ = [
    "GainReport",
    "SmallTransmitterWarning",
    "coupling_intensity",
    "coupling_intensity_green",
    "gain_numeric",
    "gain_closed",
    "gain_closed_square",
    "gain_friis",
    "friis_gain",
    "friis_factors",
    "gain_large_lis",
    "transmit_aperture_gain",
    "capacity_gain",
    "spatial_density",
    "gain_report",
]


class SmallTransmitterWarning(UserWarning):
    """The transmit surface is not small compared with the link distance."""


def _require_parallel(link: LinkGeometry, what: str):
    if link.kind != "parallel":
        raise ValueError(f"{what} needs a parallel link, got {link.kind!r}")


def _require_centered_parallel(link: LinkGeometry, what: str):
    _require_parallel(link, what)
    if not link.is_centered:
        raise ValueError(f"{what} is only valid for a centered transmitter, offset = {link.tx_offset}")


def coupling_intensity(link: LinkGeometry, spec: QuadratureSpec = QuadratureSpec()) -> float:
    """Total normalized coupling c_x between the two surfaces.

    (1/lambda^2) * integral over rx and tx of ((r_y-s_y)^2 + (r_z-s_z)^2) / |r-s|^4.
    """
    lam2 = link.medium.wavelength**2

    def f(r, s):
        dr = r - s
        rho2 = np.einsum("ij,ij->i", dr, dr)
        return (dr[:, 1] ** 2 + dr[:, 2] ** 2) / (rho2 * rho2) / lam2

    return float(integrate_double_surface(f, link.rx, link.tx, spec).value)


def coupling_intensity_green(link: LinkGeometry, spec: QuadratureSpec = QuadratureSpec()) -> float:
    """Same quantity written through the Green tensor: (4/eta^2) * double integral of |G_x|^2."""
    medium = link.medium
    scale = 4.0 / medium.impedance**2
    res = integrate_double_surface(lambda r, s: column_x_norm2(r - s, medium), link.rx, link.tx, spec)
    return float(scale * res.value)


def gain_numeric(link: LinkGeometry, spec: QuadratureSpec = QuadratureSpec()) -> float:
    """Link gain by quadrature of the flux through the rx plane.

    Uses the small-transmitter approximation: every source point is collapsed
    to the tx center (x0, y0, d) and the tx area enters as a prefactor. Handles
    offset transmitters.
    """
    _require_parallel(link, "gain_numeric")
    tx = link.tx
    d = link.d
    if max(tx.len_u, tx.len_v) > d / 10:
        warnings.warn(
            f"transmit side {max(tx.len_u, tx.len_v):g} m exceeds d/10 = {d / 10:g} m; "
            "small-transmitter approximation may be inaccurate",
            SmallTransmitterWarning,
            stacklevel=2,
        )
    s0 = np.asarray(tx.center)
    lam2 = link.medium.wavelength**2

    def f(r):
        dr = r - s0
        rho = np.sqrt(np.einsum("ij,ij->i", dr, dr))
        return (dr[:, 1] ** 2 + d * d) * d / rho**5

    return float(tx.area / lam2 * integrate_surface(f, link.rx, spec).value)


def gain_closed(link: LinkGeometry) -> float:
    """Closed-form gain for a centered transmitter above a rectangular rx."""
    _require_centered_parallel(link, "gain_closed")
    sx, sy, d = link.rx.len_u, link.rx.len_v, link.d
    q = np.sqrt(sx**2 + sy**2 + 4 * d**2)
    bracket = sx * sy * d / ((sx**2 + 4 * d**2) * q) + np.arctan(sx * sy / (2 * d * q))
    return float(8 * link.tx.area * bracket / (3 * link.medium.wavelength**2))


def gain_closed_square(F, tx_area: float, wavelength: float):
    """Closed-form gain for a square rx as a function of F = d^2 / A_R."""
    F = np.asarray(F, dtype=float)
    if np.any(F <= 0):
        raise ValueError("F must be positive")
    root = np.sqrt(8 * F * (1 + 2 * F))
    # acot(x) = atan(1/x) for x > 0
    bracket = np.sqrt(2 * F) / (np.sqrt(1 + 2 * F) * (1 + 4 * F)) + 2 * np.arctan(1 / root)
    out = 4 * tx_area / (3 * wavelength**2) * bracket
    return float(out) if out.ndim == 0 else out


def friis_factors(link: LinkGeometry) -> tuple[float, float, float]:
    """(G_T, G_R, G_I): aperture gains of both surfaces and the isotropic path gain."""
    lam, d = link.medium.wavelength, link.d
    g_t = 4 * np.pi * link.tx.area / lam**2
    g_r = 4 * np.pi * link.rx.area / lam**2
    g_i = lam**2 / (4 * np.pi * d) ** 2
    return g_t, g_r, g_i


def friis_gain(tx_area: float, rx_area: float, d: float, wavelength: float) -> float:
    """Far-field gain A_T A_R / (lambda d)^2."""
    return tx_area * rx_area / (wavelength * d) ** 2


def gain_friis(link: LinkGeometry) -> float:
    return friis_gain(link.tx.area, link.rx.area, link.d, link.medium.wavelength)


def gain_large_lis(tx_area: float, wavelength: float) -> float:
    """Saturated gain 4 pi A_T / (3 lambda^2) of an unbounded receive surface."""
    return 4 * np.pi * tx_area / (3 * wavelength**2)


def transmit_aperture_gain(tx_area: float, wavelength: float) -> float:
    return 4 * np.pi * tx_area / wavelength**2


def capacity_gain(D: int, snr: float) -> float:
    """Capacity of D equal-power parallel channels relative to one channel."""
    if D < 1:
        raise ValueError("D must be >= 1")
    if not snr > 0:
        raise ValueError("snr must be positive")
    return float(D * np.log2(1 + snr / D) / np.log2(1 + snr))


def spatial_density(D: float, tx_area: float) -> float:
    """Orthogonal links per square meter."""
    if not tx_area > 0:
        raise ValueError("tx_area must be positive")
    return D / tx_area


@dataclass(frozen=True)
class GainReport:
    g_numeric: float
    g_closed: float | None
    g_friis: float
    g_large_lis: float
    normalized_gain: float


def gain_report(link: LinkGeometry, spec: QuadratureSpec = QuadratureSpec()) -> GainReport:
    """All gain figures for a parallel link; normalization uses the closed form when available."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SmallTransmitterWarning)
        g_num = gain_numeric(link, spec)
    g_cl = gain_closed(link) if link.is_centered else None
    lam = link.medium.wavelength
    g_t = transmit_aperture_gain(link.tx.area, lam)
    return GainReport(
        g_numeric=g_num,
        g_closed=g_cl,
        g_friis=gain_friis(link),
        g_large_lis=gain_large_lis(link.tx.area, lam),
        normalized_gain=(g_cl if g_cl is not None else g_num) / g_t,
    )
