"""Brute-force communication modes by SVD of the discretized Green kernel.

Both surfaces are tiled with square patches carrying piecewise-constant,
unit-norm basis functions. The matrix element between rx patch i and tx patch
j is ``G(r_i - s_j) * sqrt(area_R * area_T)``, so singular values approximate
the continuous coupling strengths and the squared Frobenius norm approximates
the double surface integral of |G|^2.

Kernel modes:

``x_to_x``
    scalar x-current to x-field coupling, one row per rx patch.
``x_to_vector``
    x-current to full field vector, three rows (x, y, z) per rx patch.
``vector_to_x``
    full current vector to x-field, three columns per tx patch. This is the
    reciprocal dual of ``x_to_vector``: assembling it on the swapped link gives
    the transpose of the original matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import LinkGeometry, Medium, SurfaceGrid, grid
from .green import column_x_norm2, green_column_x
from .quadrature import QuadratureSpec, integrate_double_surface

__all__ = [
    "KERNEL_MODES",
    "DEFAULT_BUDGET",
    "KernelBudgetError",
    "ModeSolverError",
    "KernelMatrix",
    "ModeSpectrum",
    "FieldMap",
    "assemble_kernel",
    "solve_modes",
    "count_dof",
    "sum_rule_integral",
    "sum_rule_check",
    "eigenfunction_field",
    "project_current",
    "synthesize_field",
    "apply_kernel",
    "gram_singular_values",
    "reciprocal_mode",
]

KERNEL_MODES = ("x_to_x", "x_to_vector", "vector_to_x")
DEFAULT_BUDGET = 200_000_000
_CHUNK_PAIRS = 1 << 20


class KernelBudgetError(MemoryError):
    def __init__(self, required: int, budget: int):
        super().__init__(f"kernel needs {required} complex entries, budget is {budget}")
        self.required = required
        self.budget = budget


class ModeSolverError(RuntimeError):
    pass


def reciprocal_mode(mode: str) -> str:
    return {"x_to_x": "x_to_x", "x_to_vector": "vector_to_x", "vector_to_x": "x_to_vector"}[mode]


def _components(mode: str) -> tuple[int, int]:
    """(rx components per patch, tx components per patch)."""
    if mode not in KERNEL_MODES:
        raise ValueError(f"unknown kernel mode {mode!r}; expected one of {KERNEL_MODES}")
    return {"x_to_x": (1, 1), "x_to_vector": (3, 1), "vector_to_x": (1, 3)}[mode]


@dataclass(frozen=True, eq=False)
class KernelMatrix:
    matrix: np.ndarray
    tx_grid: SurfaceGrid
    rx_grid: SurfaceGrid
    mode: str
    medium: Medium

    @property
    def rx_components(self) -> int:
        return _components(self.mode)[0]

    @property
    def tx_components(self) -> int:
        return _components(self.mode)[1]

    @property
    def weight(self) -> float:
        return float(np.sqrt(self.tx_grid.patch_area * self.rx_grid.patch_area))

    def frobenius2(self) -> float:
        return float(np.vdot(self.matrix, self.matrix).real)


def _kernel_block(rx_pts, tx_pts, mode, medium, weight):
    col = green_column_x(rx_pts[:, None, :] - tx_pts[None, :, :], medium)  # (nr, nt, 3)
    nr, nt = col.shape[:2]
    if mode == "x_to_x":
        block = col[..., 0]
    elif mode == "x_to_vector":
        block = col.transpose(0, 2, 1).reshape(nr * 3, nt)
    else:
        # G is symmetric, so the x-row of G equals its x-column
        block = col.reshape(nr, nt * 3)
    return block * weight


def _grids(link: LinkGeometry, delta: float, mode: str, budget: int):
    tx_grid, rx_grid = grid(link.tx, delta), grid(link.rx, delta)
    c_rx, c_tx = _components(mode)
    required = c_rx * rx_grid.size * c_tx * tx_grid.size
    if required > budget:
        raise KernelBudgetError(required, budget)
    return tx_grid, rx_grid


def _row_chunks(rx_grid: SurfaceGrid, n_tx: int):
    step = max(1, _CHUNK_PAIRS // max(n_tx, 1))
    for start in range(0, rx_grid.size, step):
        yield slice(start, min(start + step, rx_grid.size))


def assemble_kernel(
    link: LinkGeometry, delta: float, mode: str = "x_to_vector", budget: int = DEFAULT_BUDGET
) -> KernelMatrix:
    """Discretize the far-field Green kernel between the link surfaces.

    Raises KernelBudgetError before allocating when the matrix would exceed
    ``budget`` complex entries.
    """
    tx_grid, rx_grid = _grids(link, delta, mode, budget)
    c_rx, c_tx = _components(mode)
    weight = np.sqrt(tx_grid.patch_area * rx_grid.patch_area)
    out = np.empty((c_rx * rx_grid.size, c_tx * tx_grid.size), dtype=complex)
    tx_pts, rx_pts = tx_grid.points, rx_grid.points
    for sl in _row_chunks(rx_grid, tx_grid.size):
        rows = slice(sl.start * c_rx, sl.stop * c_rx)
        out[rows] = _kernel_block(rx_pts[sl], tx_pts, mode, link.medium, weight)
    return KernelMatrix(out, tx_grid, rx_grid, mode, link.medium)


def gram_singular_values(
    link: LinkGeometry, delta: float, mode: str = "x_to_vector", budget: int = DEFAULT_BUDGET
) -> np.ndarray:
    """Singular values (descending) via the tx-side Gram matrix, assembled in chunks.

    Never holds the full kernel, so it reaches finer grids than
    :func:`assemble_kernel`. Accurate for the leading values only: relative
    error grows like eps * (xi_1 / xi_n)^2.
    """
    tx_grid, rx_grid = _grids(link, delta, mode, budget)
    c_tx = _components(mode)[1]
    weight = np.sqrt(tx_grid.patch_area * rx_grid.patch_area)
    n = c_tx * tx_grid.size
    gram = np.zeros((n, n), dtype=complex)
    for sl in _row_chunks(rx_grid, tx_grid.size):
        block = _kernel_block(rx_grid.points[sl], tx_grid.points, mode, link.medium, weight)
        gram += block.conj().T @ block
    ev = np.linalg.eigvalsh(gram)[::-1]
    return np.sqrt(np.clip(ev, 0.0, None))


@dataclass(frozen=True, eq=False)
class ModeSpectrum:
    singular_values: np.ndarray
    right: np.ndarray  # columns: discretized tx eigenfunctions phi_n
    left: np.ndarray  # columns: discretized rx eigenfunctions psi_n
    kernel: KernelMatrix
    threshold_db: float = 3.0

    def __len__(self):
        return self.singular_values.size

    @property
    def condition(self) -> float:
        """xi_1 / smallest nonzero xi."""
        s = self.singular_values
        nz = s[s > s[0] * np.finfo(float).eps * max(self.kernel.matrix.shape)]
        return float(nz[0] / nz[-1])


def solve_modes(kernel: KernelMatrix, threshold_db: float = 3.0) -> ModeSpectrum:
    """Thin SVD with descending singular values and a fixed phase convention.

    Each right vector is rotated so its first significant component is real
    and positive; the matching left vector gets the same rotation.
    """
    try:
        u, s, vh = np.linalg.svd(kernel.matrix, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise ModeSolverError(f"SVD did not converge: {exc}") from exc
    v = vh.conj().T
    mag = np.abs(v)
    first = np.argmax(mag > 1e-6 * mag.max(axis=0, keepdims=True), axis=0)
    lead = v[first, np.arange(v.shape[1])]
    rot = np.conj(lead) / np.abs(lead)
    return ModeSpectrum(s, v * rot, u * rot, kernel, threshold_db)


def count_dof(spectrum, threshold_db: float | None = None) -> int:
    """Number of modes whose power xi_n^2 lies within ``threshold_db`` of xi_1^2."""
    if isinstance(spectrum, ModeSpectrum):
        s = spectrum.singular_values
        if threshold_db is None:
            threshold_db = spectrum.threshold_db
    else:
        s = np.sort(np.asarray(spectrum, dtype=float))[::-1]
    if threshold_db is None:
        threshold_db = 3.0
    if s.size == 0:
        raise ValueError("empty spectrum")
    p = s**2
    floor = p[0] * 10 ** (-threshold_db / 10) * (1 - 1e-12)
    return max(1, int(np.count_nonzero(p >= floor)))


def sum_rule_integral(link: LinkGeometry, mode: str, spec: QuadratureSpec = QuadratureSpec()) -> float:
    """Double surface integral of the squared kernel for the chosen excitation."""
    medium = link.medium
    if mode == "x_to_x":

        def f(r, s):
            dr = r - s
            cos2 = dr[:, 0] ** 2 / np.einsum("ij,ij->i", dr, dr)
            return column_x_norm2(dr, medium) * (1 - cos2)

    else:

        def f(r, s):
            return column_x_norm2(r - s, medium)

    return float(integrate_double_surface(f, link.rx, link.tx, spec).value)


def sum_rule_check(
    kernel: KernelMatrix,
    link: LinkGeometry,
    spec: QuadratureSpec = QuadratureSpec(),
    spectrum: ModeSpectrum | None = None,
) -> float:
    """Relative gap between sum of xi_n^2 and the quadrature of |G|^2."""
    if kernel.tx_grid.surface != link.tx or kernel.rx_grid.surface != link.rx:
        raise ValueError("kernel was not assembled on this link")
    total = (
        float(np.sum(spectrum.singular_values**2)) if spectrum is not None else kernel.frobenius2()
    )
    ref = sum_rule_integral(link, kernel.mode, spec)
    return abs(total - ref) / ref


@dataclass(frozen=True, eq=False)
class FieldMap:
    """Complex vector samples on a surface grid, one row of (Ex, Ey, Ez) per patch."""

    grid: SurfaceGrid
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (self.grid.size, 3):
            raise ValueError(f"field has shape {self.values.shape}, grid needs ({self.grid.size}, 3)")

    @property
    def amplitude(self) -> np.ndarray:
        return np.abs(self.values)

    @property
    def phase(self) -> np.ndarray:
        """Phase per component in (-pi, pi]."""
        ph = np.angle(self.values)
        return np.where(ph <= -np.pi, np.pi, ph)

    def power(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2))

    def as_image(self, component: int = 0) -> np.ndarray:
        """One component reshaped to (n_u, n_v)."""
        return self.values[:, component].reshape(self.grid.n_u, self.grid.n_v)


def _to_field(vec: np.ndarray, grid_: SurfaceGrid, components: int) -> FieldMap:
    values = np.zeros((grid_.size, 3), dtype=complex)
    if components == 3:
        values[:] = vec.reshape(grid_.size, 3)
    else:
        values[:, 0] = vec
    return FieldMap(grid_, values)


def _from_field(field: FieldMap, grid_: SurfaceGrid, components: int) -> np.ndarray:
    if field.grid.surface != grid_.surface or (field.grid.n_u, field.grid.n_v) != (grid_.n_u, grid_.n_v):
        raise ValueError("field is not sampled on the solver grid")
    return field.values.reshape(-1) if components == 3 else field.values[:, 0]


def eigenfunction_field(spectrum: ModeSpectrum, n: int, side: str = "rx") -> FieldMap:
    """Sampled n-th eigenfunction (1-based) on the tx (phi_n) or rx (psi_n) surface."""
    if not 1 <= n <= len(spectrum):
        raise IndexError(f"mode {n} outside 1..{len(spectrum)}")
    k = spectrum.kernel
    if side == "rx":
        return _to_field(spectrum.left[:, n - 1], k.rx_grid, k.rx_components)
    if side == "tx":
        return _to_field(spectrum.right[:, n - 1], k.tx_grid, k.tx_components)
    raise ValueError(f"side must be 'tx' or 'rx', got {side!r}")


def project_current(current: FieldMap, spectrum: ModeSpectrum) -> np.ndarray:
    """Mode coefficients a_n = <phi_n, J> of a tx current."""
    k = spectrum.kernel
    j = _from_field(current, k.tx_grid, k.tx_components)
    return spectrum.right.conj().T @ j


def synthesize_field(coefficients, spectrum: ModeSpectrum, n_modes: int | None = None) -> FieldMap:
    """Received field sum_n xi_n a_n psi_n over the first ``n_modes`` modes (all by default)."""
    a = np.asarray(coefficients, dtype=complex)
    m = len(spectrum) if n_modes is None else n_modes
    b = spectrum.singular_values[:m] * a[:m]
    k = spectrum.kernel
    return _to_field(spectrum.left[:, :m] @ b, k.rx_grid, k.rx_components)


def apply_kernel(kernel: KernelMatrix, current: FieldMap) -> FieldMap:
    """Received field by direct matrix product."""
    j = _from_field(current, kernel.tx_grid, kernel.tx_components)
    return _to_field(kernel.matrix @ j, kernel.rx_grid, kernel.rx_components)
