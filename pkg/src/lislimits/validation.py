"""Self-check suite: closed forms against quadrature, sum rule, orthogonality, scaling."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import dof, eigenmodes, linkbudget
from .geometry import Medium, make_parallel_link, make_perpendicular_link
from .quadrature import QuadratureSpec

__all__ = ["CheckResult", "DEFAULT_TOLERANCES", "run_checks", "desk_link", "factory_link"]

DEFAULT_TOLERANCES = {
    "capacity_gain": 0.01,
    "spatial_density": 1e-12,
    "factory_dof": 0.1,
    "gain_closed_vs_numeric": 5e-3,
    "dof_closed_vs_numeric": 5e-2,
    "friis_limit": 1e-2,
    "perpendicular_asymptote": 1e-2,
    "sum_rule": 2e-2,
    "orthonormality": 1e-8,
    "reciprocity": 1e-8,
    "mode_count_vs_closed": 2.0,
    "mode_orthogonality": 1e-8,
    "scaling_invariance": 1e-9,
}

F_GRID_DB = (-20.0, -10.0, 0.0, 10.0, 20.0)
ASPECT_RATIOS = (1.0, 2.0, 4.0)


@dataclass(frozen=True)
class CheckResult:
    name: str
    measured: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.measured) and self.measured <= self.tolerance)


def factory_link():
    """5 x 5 m ceiling surface 5 m above a 5 x 5 cm transmitter at 1 cm wavelength."""
    return make_parallel_link(5.0, (0.05, 0.05), (5.0, 5.0), medium=Medium(0.01))


def desk_link():
    """Scaled-down eigenmode geometry: 2x2 and 8x8 wavelengths, 2 wavelengths apart."""
    return make_parallel_link(2.0, (2.0, 2.0), (8.0, 8.0), medium=Medium(1.0))


def sweep_link(F_db: float, aspect_ratio: float, tx_fraction: float = 0.1):
    """Parallel link at the given F with tx side ``tx_fraction * d``; d fixed at 20 wavelengths."""
    lam = 1.0
    d = 20.0 * lam
    area = d**2 / 10 ** (F_db / 10)
    sx, sy = np.sqrt(area * aspect_ratio), np.sqrt(area / aspect_ratio)
    side = tx_fraction * d
    return make_parallel_link(d, (side, side), (sx, sy), medium=Medium(lam))


def _max_rel(pairs):
    return max(abs(a / b - 1) for a, b in pairs)


def run_checks(tolerances: dict | None = None, spec: QuadratureSpec = QuadratureSpec()) -> list[CheckResult]:
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    unknown = set(tol) - set(DEFAULT_TOLERANCES)
    if unknown:
        raise KeyError(f"unknown validation checks: {sorted(unknown)}")
    measured = {}

    measured["capacity_gain"] = abs(linkbudget.capacity_gain(20, 100.0) - 7.76)
    measured["spatial_density"] = abs(linkbudget.spatial_density(20, 25e-4) / 8000 - 1)
    measured["factory_dof"] = abs(dof.dof_closed_parallel(factory_link()) - 18.8)

    links = [sweep_link(f, ar) for f in F_GRID_DB for ar in ASPECT_RATIOS]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", linkbudget.SmallTransmitterWarning)
        measured["gain_closed_vs_numeric"] = _max_rel(
            (linkbudget.gain_numeric(l, spec), linkbudget.gain_closed(l)) for l in links
        )
    measured["dof_closed_vs_numeric"] = _max_rel(
        (dof.dof_numeric(l, spec), dof.dof_closed_parallel(l)) for l in links
    )
    measured["friis_limit"] = abs(
        (1 / 1e3) / linkbudget.gain_closed_square(1e3, 1.0, 1.0) - 1
    )
    wide = make_perpendicular_link(10.0, (0.5, 0.5), (1e4, 1e4), medium=Medium(1.0))
    measured["perpendicular_asymptote"] = abs(
        dof.dof_closed_perpendicular(wide) / dof.dof_asymptotic_perpendicular(wide.tx.area, 1.0) - 1
    )

    link = desk_link()
    kernel = eigenmodes.assemble_kernel(link, 1 / 8, "x_to_vector")
    spectrum = eigenmodes.solve_modes(kernel)
    measured["sum_rule"] = eigenmodes.sum_rule_check(kernel, link, spec, spectrum)
    u, v = spectrum.left, spectrum.right
    measured["orthonormality"] = max(
        np.abs(u.conj().T @ u - np.eye(u.shape[1])).max(),
        np.abs(v.conj().T @ v - np.eye(v.shape[1])).max(),
    )
    swapped = eigenmodes.assemble_kernel(link.swapped(), 1 / 8, eigenmodes.reciprocal_mode("x_to_vector"))
    s_swap = np.linalg.svd(swapped.matrix, compute_uv=False)[: len(spectrum)]
    measured["reciprocity"] = float(np.abs(s_swap - spectrum.singular_values).max() / spectrum.singular_values[0])
    measured["mode_count_vs_closed"] = abs(eigenmodes.count_dof(spectrum, 3.0) - dof.dof_closed_parallel(link))
    measured["mode_orthogonality"] = float(abs(np.vdot(u[:, 0], u[:, 1])))

    factor = 3.7
    changes = []
    for l in (links[7], factory_link()):
        big = l.scaled(factor)
        g_t = linkbudget.transmit_aperture_gain
        pairs = [
            (big.F, l.F),
            (linkbudget.gain_closed(big) / g_t(big.tx.area, big.medium.wavelength),
             linkbudget.gain_closed(l) / g_t(l.tx.area, l.medium.wavelength)),
            (dof.dof_closed_parallel(big), dof.dof_closed_parallel(l)),
        ]
        changes.append(_max_rel(pairs))
    measured["scaling_invariance"] = max(changes)

    return [CheckResult(name, float(measured[name]), tol[name]) for name in DEFAULT_TOLERANCES]
