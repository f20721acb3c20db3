"""Deterministic adaptive cubature over one surface or a pair of surfaces.

Each panel is integrated with a tensor Gauss-Legendre rule and compared with
the same rule applied to its two halves along every axis. The discrepancy is
the panel error estimate and the axis with the largest discrepancy is the one
bisected next. Panels are refined worst-first until the summed error estimate
drops below ``rel_tol * |value|``.

Integrands are vectorized: ``f(points)`` receives an ``(N, 3)`` array and
returns ``N`` values; the surface-pair variant receives ``(r, s)`` with both
``(N, 3)``.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, NamedTuple

import numpy as np

from .geometry import RectSurface

__all__ = [
    "QuadratureSpec",
    "QuadResult",
    "QuadratureError",
    "integrate_box",
    "integrate_surface",
    "integrate_double_surface",
]


class QuadratureError(RuntimeError):
    """Adaptive refinement failed to reach the requested tolerance."""


@dataclass(frozen=True)
class QuadratureSpec:
    nodes: int = 32
    rel_tol: float = 1e-6
    max_subdivisions: int = 12
    panels: int = 1
    # 32**4 points per 4D panel is impractical; the surface-pair rule uses its own order
    double_nodes: int = 8
    abs_tol: float = 0.0

    def __post_init__(self):
        if self.nodes < 2 or self.double_nodes < 2:
            raise ValueError("quadrature needs at least 2 nodes per axis")
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.max_subdivisions < 0 or self.panels < 1:
            raise ValueError("max_subdivisions must be >= 0 and panels >= 1")


class QuadResult(NamedTuple):
    value: complex | float
    error: float
    panels: int
    evaluations: int


@lru_cache(maxsize=None)
def _reference_rule(n: int, dim: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    grids = np.meshgrid(*([x] * dim), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    wgrids = np.meshgrid(*([w] * dim), indexing="ij")
    wts = np.prod(np.stack([g.ravel() for g in wgrids], axis=-1), axis=-1)
    return (pts + 1.0) / 2.0, wts / 2.0**dim


@dataclass
class _Panel:
    lo: np.ndarray
    hi: np.ndarray
    depth: int
    value: complex | float = 0.0
    error: float = 0.0
    axis: int = 0

    @property
    def key(self):
        return tuple(self.lo) + tuple(self.hi)


def _sub_boxes(lo, hi):
    boxes = [(lo, hi)]
    for a in range(lo.size):
        mid = 0.5 * (lo[a] + hi[a])
        upper, lower = hi.copy(), lo.copy()
        upper[a], lower[a] = mid, mid
        boxes += [(lo, upper), (lower, hi)]
    return boxes


def _evaluate(f, panels: list[_Panel], n: int) -> int:
    dim = panels[0].lo.size
    ref, wts = _reference_rule(n, dim)
    boxes = [b for p in panels for b in _sub_boxes(p.lo, p.hi)]
    pts = np.concatenate([lo + ref * (hi - lo) for lo, hi in boxes])
    vals = np.asarray(f(pts))
    if vals.shape != (pts.shape[0],):
        raise ValueError(f"integrand returned shape {vals.shape}, expected ({pts.shape[0]},)")
    if not np.all(np.isfinite(vals)):
        raise QuadratureError("integrand is not finite on the domain")
    vols = np.array([np.prod(hi - lo) for lo, hi in boxes])
    q = (vals.reshape(len(boxes), -1) @ wts) * vols
    per = 1 + 2 * dim
    for i, p in enumerate(panels):
        qp = q[i * per : (i + 1) * per]
        halves = qp[1::2] + qp[2::2]
        errs = np.abs(qp[0] - halves)
        p.axis = int(np.argmax(errs))
        p.error = float(errs[p.axis])
        p.value = halves[p.axis]
    return pts.shape[0]


def _fsum(values):
    values = list(values)
    if any(isinstance(v, complex) or np.iscomplexobj(v) for v in values):
        return complex(math.fsum(v.real for v in values), math.fsum(v.imag for v in values))
    return math.fsum(float(v) for v in values)


def integrate_box(
    f: Callable[[np.ndarray], np.ndarray],
    lo,
    hi,
    spec: QuadratureSpec = QuadratureSpec(),
    nodes: int | None = None,
) -> QuadResult:
    """Integrate ``f`` over the axis-aligned box ``[lo, hi]`` (any dimension)."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    n = nodes or spec.nodes
    edges = [np.linspace(a, b, spec.panels + 1) for a, b in zip(lo, hi)]
    starts = np.meshgrid(*[e[:-1] for e in edges], indexing="ij")
    stops = np.meshgrid(*[e[1:] for e in edges], indexing="ij")
    panels = [
        _Panel(np.array([s.flat[i] for s in starts]), np.array([s.flat[i] for s in stops]), 0)
        for i in range(starts[0].size)
    ]
    evaluations = _evaluate(f, panels, n)

    heap = [(-p.error, i, p) for i, p in enumerate(panels)]
    heapq.heapify(heap)
    counter = len(heap)
    while True:
        total = _fsum(p.value for _, _, p in heap)
        err = math.fsum(p.error for _, _, p in heap)
        if err <= max(spec.rel_tol * abs(total), spec.abs_tol):
            break
        _, _, worst = heapq.heappop(heap)
        if worst.depth >= spec.max_subdivisions:
            raise QuadratureError(
                f"no convergence after {spec.max_subdivisions} subdivisions: "
                f"value {total!r}, error estimate {err:.3g}"
            )
        a = worst.axis
        mid = 0.5 * (worst.lo[a] + worst.hi[a])
        upper, lower = worst.hi.copy(), worst.lo.copy()
        upper[a], lower[a] = mid, mid
        children = [_Panel(worst.lo, upper, worst.depth + 1), _Panel(lower, worst.hi, worst.depth + 1)]
        evaluations += _evaluate(f, children, n)
        for c in children:
            heapq.heappush(heap, (-c.error, counter, c))
            counter += 1

    # fixed summation order, independent of refinement history
    ordered = sorted((p for _, _, p in heap), key=lambda p: p.key)
    value = _fsum(p.value for p in ordered)
    return QuadResult(value, err, len(ordered), evaluations)


def integrate_surface(
    f: Callable[[np.ndarray], np.ndarray],
    surface: RectSurface,
    spec: QuadratureSpec = QuadratureSpec(),
) -> QuadResult:
    """Integrate a point function over a rectangle (surface measure)."""
    half = np.array([surface.len_u, surface.len_v]) / 2

    def g(uv):
        return f(surface.point(uv[:, 0], uv[:, 1]))

    return integrate_box(g, -half, half, spec)


def integrate_double_surface(
    f: Callable[[np.ndarray, np.ndarray], np.ndarray],
    s1: RectSurface,
    s2: RectSurface,
    spec: QuadratureSpec = QuadratureSpec(),
) -> QuadResult:
    """Integrate ``f(r, s)`` over ``r`` in ``s1`` and ``s`` in ``s2``."""
    half = np.array([s1.len_u, s1.len_v, s2.len_u, s2.len_v]) / 2

    def g(x):
        return f(s1.point(x[:, 0], x[:, 1]), s2.point(x[:, 2], x[:, 3]))

    return integrate_box(g, -half, half, spec, nodes=spec.double_nodes)
