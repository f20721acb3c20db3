"""Free-space dyadic Green's function.

Time convention exp(+j w t); outgoing waves carry exp(-j k0 r). Every function
is vectorized over leading axes of ``displacement`` (shape ``(..., 3)``).
"""

from __future__ import annotations

import numpy as np

from .geometry import Medium

__all__ = ["green_full", "green_farfield", "green_column_x", "transverse_projector"]


def _split(displacement):
    r_vec = np.asarray(displacement, dtype=float)
    if r_vec.shape[-1] != 3:
        raise ValueError(f"displacement must have trailing dimension 3, got shape {r_vec.shape}")
    r = np.linalg.norm(r_vec, axis=-1)
    if np.any(r == 0):
        raise ValueError("Green's function is singular at zero displacement")
    return r, r_vec / r[..., None]


def _outer(r_hat):
    return r_hat[..., :, None] * r_hat[..., None, :]


def _prefactor(r, medium: Medium):
    lam = medium.wavelength
    return -1j * medium.impedance * np.exp(-1j * medium.wavenumber * r) / (2 * lam * r)


def transverse_projector(displacement) -> np.ndarray:
    """I - r_hat r_hat^T, shape (..., 3, 3)."""
    _, r_hat = _split(displacement)
    return np.eye(3) - _outer(r_hat)


def green_full(displacement, medium: Medium) -> np.ndarray:
    """All three (1/r, 1/r^2, 1/r^3) terms of the tensor Green's function."""
    r, r_hat = _split(displacement)
    lam = medium.wavelength
    rr = _outer(r_hat)
    eye = np.eye(3)
    x = (lam / (2 * np.pi * r))[..., None, None]
    bracket = (eye - rr) + (1j * x - x**2) * (eye - 3 * rr)
    return _prefactor(r, medium)[..., None, None] * bracket


def green_farfield(displacement, medium: Medium) -> np.ndarray:
    """Radiating (1/r) part only: prefactor times the transverse projector."""
    r, r_hat = _split(displacement)
    return _prefactor(r, medium)[..., None, None] * (np.eye(3) - _outer(r_hat))


def green_column_x(displacement, medium: Medium) -> np.ndarray:
    """Far-field response to an x-directed point current, shape (..., 3).

    Equal to ``green_farfield(displacement, medium)[..., :, 0]`` without
    forming the full tensor.
    """
    r, r_hat = _split(displacement)
    col = -r_hat * r_hat[..., :1]
    col[..., 0] += 1.0
    return _prefactor(r, medium)[..., None] * col


def column_x_norm2(displacement, medium: Medium) -> np.ndarray:
    """|G_x|^2 = (eta / 2 lambda r)^2 (1 - r_hat_x^2), the sum-rule integrand."""
    r, r_hat = _split(displacement)
    amp = medium.impedance / (2 * medium.wavelength * r)
    return amp**2 * (1.0 - r_hat[..., 0] ** 2)
