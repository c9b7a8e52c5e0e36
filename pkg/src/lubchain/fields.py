"""Piecewise-constant and piecewise-affine fields with exact integration.

These two shapes carry every function the package manipulates: solid
characteristic functions, coarse densities, flux fields, velocity
interpolants and Galerkin solutions. All integrals are closed-form, so
convergence metrics contain no quadrature error.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


def _freeze(arr) -> np.ndarray:
    out = np.asarray(arr, dtype=float).copy()
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class PiecewiseConstantField:
    """Step function: values[j] on (breakpoints[j], breakpoints[j+1]).

    Evaluation at a breakpoint returns the right limit (the fixed
    convention; any fixed one gives the same integrals).
    """

    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        bp = _freeze(self.breakpoints)
        v = _freeze(self.values)
        if bp.ndim != 1 or v.ndim != 1 or len(bp) != len(v) + 1:
            raise ValueError("need m+1 breakpoints for m values")
        if not np.all(np.diff(bp) > 0):
            raise ValueError("breakpoints must be strictly increasing")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", v)

    @property
    def support(self) -> tuple[float, float]:
        return float(self.breakpoints[0]), float(self.breakpoints[-1])

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(self.breakpoints, x, side="right") - 1
        idx = np.clip(idx, 0, len(self.values) - 1)
        out = self.values[idx]
        return out if out.ndim else float(out)

    def _cumulative_at_breakpoints(self) -> np.ndarray:
        seg = self.values * np.diff(self.breakpoints)
        return np.concatenate(([0.0], np.cumsum(seg)))

    def cumulative(self, x):
        """Exact antiderivative vanishing at the left end of the support."""
        cum = self._cumulative_at_breakpoints()
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(self.breakpoints, x, side="right") - 1
        idx = np.clip(idx, 0, len(self.values) - 1)
        out = cum[idx] + self.values[idx] * (x - self.breakpoints[idx])
        return out if out.ndim else float(out)

    def integral(self, a: float | None = None, b: float | None = None) -> float:
        lo, hi = self.support
        a = lo if a is None else a
        b = hi if b is None else b
        return float(self.cumulative(b) - self.cumulative(a))

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values))) if len(self.values) else 0.0

    def total_variation(self) -> float:
        """Sum of interior jump magnitudes."""
        return float(np.sum(np.abs(np.diff(self.values))))

    def integrate_against(self, antiderivative: Callable[[np.ndarray], np.ndarray]) -> float:
        """Exact ∫ field * phi given Phi with Phi' = phi."""
        big_phi = np.asarray(antiderivative(self.breakpoints), dtype=float)
        return float(np.dot(self.values, np.diff(big_phi)))


@dataclass(frozen=True)
class PiecewiseAffineField:
    """Continuous piecewise-affine function through (nodes, values)."""

    nodes: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        xs = _freeze(self.nodes)
        vs = _freeze(self.values)
        if xs.ndim != 1 or vs.ndim != 1 or len(xs) != len(vs):
            raise ValueError("nodes and values must have equal length >= 2")
        if len(xs) < 2:
            raise ValueError("need at least two nodes")
        if not np.all(np.diff(xs) > 0):
            raise ValueError("nodes must be strictly increasing")
        object.__setattr__(self, "nodes", xs)
        object.__setattr__(self, "values", vs)

    def __call__(self, x):
        out = np.interp(np.asarray(x, dtype=float), self.nodes, self.values)
        return out if out.ndim else float(out)

    def derivative(self) -> PiecewiseConstantField:
        slopes = np.diff(self.values) / np.diff(self.nodes)
        return PiecewiseConstantField(self.nodes, slopes)

    def integral(self) -> float:
        return float(np.sum(0.5 * (self.values[1:] + self.values[:-1]) * np.diff(self.nodes)))


def zero_affine() -> PiecewiseAffineField:
    return PiecewiseAffineField(np.array([0.0, 1.0]), np.array([0.0, 0.0]))


def l2_distance(a: PiecewiseAffineField, b: PiecewiseAffineField) -> float:
    """Exact L2 distance of two piecewise-affine fields.

    On the merged node grid the squared difference is piecewise quadratic,
    so 3-point Simpson per piece integrates it exactly.
    """
    xs = np.union1d(a.nodes, b.nodes)
    left, right = xs[:-1], xs[1:]
    mid = 0.5 * (left + right)
    el = a(left) - b(left)
    em = a(mid) - b(mid)
    er = a(right) - b(right)
    total = np.sum((right - left) / 6.0 * (el * el + 4.0 * em * em + er * er))
    return float(np.sqrt(max(total, 0.0)))


def l2_norm(a: PiecewiseAffineField) -> float:
    return l2_distance(a, zero_affine())
