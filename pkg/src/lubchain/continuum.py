"""Macroscopic limit: -d/dx( (1-rho)^{-1} du/dx ) = rho f on (0, 1).

The coefficient blows up where the solid fraction reaches 1, so the
equation is solved in the generalized sense: minimize the Dirichlet
energy over fields whose derivative vanishes on the rigid set. The
Galerkin discretization mirrors the particle chain exactly: element
"conductivity" is the reciprocal of the element vacuum (a harmonic
composition, like gaps in series), and rigid elements have their nodes
merged into a single unknown instead of capping the coefficient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .discrete import RigidGlobalError
from .fields import PiecewiseAffineField, PiecewiseConstantField
from .profiles import (ConstantForce, DensityProfile, ForceProfile,
                       TabulatedForce, _gauss_piece)
from .tridiag import solve_chain

RIGID_THRESHOLD = 1e-10


@dataclass(frozen=True)
class MacroProblem:
    density: DensityProfile
    force: ForceProfile
    grid_size: int = 64
    rigid_threshold: float = RIGID_THRESHOLD

    def __post_init__(self):
        if self.grid_size < 2:
            raise ValueError("grid_size must be at least 2")


@dataclass(frozen=True)
class MacroSolution:
    field: PiecewiseAffineField
    flux: PiecewiseConstantField
    rigid_groups: tuple[tuple[int, int], ...]  # inclusive node ranges
    energy: float
    rigid_global: bool
    residual: float


def build_grid(problem: MacroProblem) -> np.ndarray:
    """Profile breakpoints become nodes; each piece between breakpoints is
    subdivided uniformly so the local width stays near 1/grid_size."""
    bps = np.union1d(problem.density.breakpoints(), problem.force.breakpoints())
    bps = bps[(bps >= 0.0) & (bps <= 1.0)]
    nodes = [0.0]
    for a, b in zip(bps[:-1], bps[1:]):
        k = max(1, int(math.ceil((b - a) * problem.grid_size - 1e-9)))
        nodes.extend(np.linspace(a, b, k + 1)[1:])
    out = np.array(nodes)
    out[-1] = 1.0
    return out


def _element_data(problem: MacroProblem, nodes: np.ndarray):
    """Vacuum integral and load contributions per element.

    vac_e = int_e (1 - rho) via the exact cumulative; the element is rigid
    when its mean solid fraction reaches 1 - rigid_threshold. Loads are
    int_e rho f phi for the two local hat restrictions, exact for
    piecewise-constant densities and Gauss for analytic ones.
    """
    dens, force = problem.density, problem.force
    h = np.diff(nodes)
    s = np.asarray(dens.cumulative(nodes))
    vac = h - np.diff(s)
    rigid = vac <= problem.rigid_threshold * h

    load_left = np.empty(len(h))
    load_right = np.empty(len(h))
    for e in range(len(h)):
        a, b = nodes[e], nodes[e + 1]
        if dens.is_piecewise_constant:
            rho_e = (s[e + 1] - s[e]) / h[e]
            f_int = float(force.window_integral(a, b))
            f_mom = force.moment(a, b)
            # hat sloping down from 1 at a: phi = (b - x)/h
            load_left[e] = rho_e * (b * f_int - f_mom) / h[e]
            load_right[e] = rho_e * (f_mom - a * f_int) / h[e]
        else:
            def rf(x):
                return np.asarray(dens.value(x)) * np.asarray(force.value(x))

            load_left[e] = _gauss_piece(lambda x: rf(x) * (b - x) / h[e], a, b)
            load_right[e] = _gauss_piece(lambda x: rf(x) * (x - a) / h[e], a, b)
    return h, vac, rigid, load_left, load_right


def _merge_groups(n_nodes: int, rigid: np.ndarray, reverse: bool):
    """Group id per node after union-find merging across rigid elements.

    Merging is an equivalence closure, so the sweep direction cannot change
    the outcome; the knob exists so tests can probe exactly that.
    """
    parent = list(range(n_nodes))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    order = reversed(range(len(rigid))) if reverse else range(len(rigid))
    for e in order:
        if rigid[e]:
            ra, rb = find(e), find(e + 1)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    gid = np.empty(n_nodes, dtype=int)
    seen: dict[int, int] = {}
    for j in range(n_nodes):
        root = find(j)
        if root not in seen:
            seen[root] = len(seen)
        gid[j] = seen[root]
    return gid


def solve_macro(problem: MacroProblem, merge_reverse: bool = False) -> MacroSolution:
    """Piecewise-affine Galerkin solution with exact rigid constraints."""
    nodes = build_grid(problem)
    h, vac, rigid, load_left, load_right = _element_data(problem, nodes)
    n_nodes = len(nodes)
    gid = _merge_groups(n_nodes, rigid, merge_reverse)
    n_groups = gid[-1] + 1

    loads = np.zeros(n_groups)
    np.add.at(loads, gid[:-1], load_left)
    np.add.at(loads, gid[1:], load_right)

    rigid_global = n_groups == 1
    group_val = np.zeros(n_groups)
    if not rigid_global and n_groups > 2:
        # one non-rigid element connects each consecutive group pair, so the
        # reduced system is the same vacuum-weighted chain as the discrete
        # model, with element vacuums as gaps (boundary groups pinned at 0)
        group_val[1:-1], _ = solve_chain(vac[~rigid], loads[1:-1])

    u = group_val[gid]
    fieldv = PiecewiseAffineField(nodes, u)

    # element flux: slope-over-vacuum where compliant, marching multiplier
    # across rigid runs (the constraint force, analogous to cohesion)
    sigma = np.zeros(len(h))
    free = ~rigid
    sigma[free] = (u[1:][free] - u[:-1][free]) / vac[free]
    node_load = np.zeros(n_nodes)
    node_load[:-1] += load_left
    node_load[1:] += load_right
    e = 0
    while e < len(h):
        if rigid[e]:
            run_start = e
            while e < len(h) and rigid[e]:
                e += 1
            run_end = e  # elements run_start..run_end-1 are rigid
            if run_start > 0:
                current = sigma[run_start - 1]
                for r in range(run_start, run_end):
                    current = current - node_load[r]
                    sigma[r] = current
            elif run_end < len(h):
                current = sigma[run_end]
                for r in range(run_end - 1, run_start - 1, -1):
                    current = current + node_load[r + 1]
                    sigma[r] = current
            # else: globally rigid, flux stays at the zero gauge
        else:
            e += 1

    flux = PiecewiseConstantField(nodes, sigma)
    res = _galerkin_residual(gid, vac, rigid, u, loads)
    j = energy(problem, fieldv)
    groups = _group_ranges(gid)
    return MacroSolution(fieldv, flux, groups, j, rigid_global, res)


def _group_ranges(gid: np.ndarray) -> tuple[tuple[int, int], ...]:
    out = []
    start = 0
    for j in range(1, len(gid)):
        if gid[j] != gid[j - 1]:
            if j - 1 > start:
                out.append((start, j - 1))
            start = j
    if len(gid) - 1 > start:
        out.append((start, len(gid) - 1))
    return tuple(out)


def _galerkin_residual(gid, vac, rigid, u, loads) -> float:
    """Recompute the reduced balance from the solved field itself."""
    n_groups = len(loads)
    if n_groups <= 2:
        return 0.0
    # the g-th non-rigid element (0-based g-1) links groups g-1 and g
    k = 1.0 / vac[~rigid]
    worst = 0.0
    for g in range(1, n_groups - 1):
        left = k[g - 1] * (u_of_group(u, gid, g) - u_of_group(u, gid, g - 1))
        right = k[g] * (u_of_group(u, gid, g + 1) - u_of_group(u, gid, g))
        worst = max(worst, abs(right - left + loads[g]))
    return worst


def u_of_group(u: np.ndarray, gid: np.ndarray, g: int) -> float:
    return float(u[np.searchsorted(gid, g)])


def energy(problem: MacroProblem, fieldv: PiecewiseAffineField) -> float:
    """Dirichlet energy 1/2 int K |u'|^2 - int rho f u, infinite whenever the
    field slopes inside a rigid region (it then leaves the constrained space)."""
    dens, force = problem.density, problem.force
    if abs(fieldv(0.0)) > 0 or abs(fieldv(1.0)) > 0:
        raise ValueError("energy is defined for fields vanishing at 0 and 1")
    xs = np.union1d(fieldv.nodes, np.union1d(dens.breakpoints(), force.breakpoints()))
    xs = xs[(xs >= 0.0) & (xs <= 1.0)]
    va = np.asarray(fieldv(xs))
    s = np.asarray(dens.cumulative(xs))
    total = 0.0
    for i in range(len(xs) - 1):
        a, b = xs[i], xs[i + 1]
        hseg = b - a
        if hseg <= 0:
            continue
        slope = (va[i + 1] - va[i]) / hseg
        vacseg = hseg - (s[i + 1] - s[i])
        if vacseg <= problem.rigid_threshold * hseg:
            if va[i + 1] != va[i]:
                return math.inf
            continue
        if dens.is_piecewise_constant:
            rho_seg = (s[i + 1] - s[i]) / hseg
            k_int = hseg / (1.0 - rho_seg)
        else:
            k_int = _gauss_piece(lambda x: 1.0 / (1.0 - np.asarray(dens.value(x))), a, b)
        total += 0.5 * slope * slope * k_int
        # load term: int rho f v with v affine on the segment
        f_int = float(force.window_integral(a, b))
        f_mom = force.moment(a, b)
        if dens.is_piecewise_constant:
            rho_seg = (s[i + 1] - s[i]) / hseg
            lin = va[i] * (b * f_int - f_mom) / hseg + va[i + 1] * (f_mom - a * f_int) / hseg
            total -= rho_seg * lin
        else:
            total -= _gauss_piece(
                lambda x: np.asarray(dens.value(x)) * np.asarray(force.value(x))
                * np.interp(x, fieldv.nodes, fieldv.values), a, b)
    return total


# ---------------------------------------------------------------------------
# closed-form references


@dataclass(frozen=True)
class ExactMacroSolution:
    """Flux-integration solution for piecewise-constant density and force.

    sigma(x) = sigma0 - int_0^x rho f with sigma0 fixed by the boundary
    compatibility int (1-rho) sigma = 0, then u(x) = int_0^x (1-rho) sigma.
    u is piecewise quadratic; rigid pieces get zero slope automatically.
    """

    breakpoints: np.ndarray
    rho: np.ndarray
    rf: np.ndarray      # rho*f per piece
    sigma0: float

    def flux(self, x):
        x = np.asarray(x, dtype=float)
        cum = np.concatenate(([0.0], np.cumsum(self.rf * np.diff(self.breakpoints))))
        idx = np.clip(np.searchsorted(self.breakpoints, x, side="right") - 1,
                      0, len(self.rf) - 1)
        out = self.sigma0 - (cum[idx] + self.rf[idx] * (x - self.breakpoints[idx]))
        return out if out.ndim else float(out)

    def evaluate(self, x):
        scalar = np.ndim(x) == 0
        x = np.atleast_1d(np.asarray(x, dtype=float))
        bp = self.breakpoints
        u_bp = self._u_at_breakpoints()
        idx = np.clip(np.searchsorted(bp, x, side="right") - 1, 0, len(self.rho) - 1)
        a = bp[idx]
        s_left = np.asarray(self.flux(a))
        dx = x - a
        out = u_bp[idx] + (1.0 - self.rho[idx]) * (s_left * dx - 0.5 * self.rf[idx] * dx * dx)
        return float(out[0]) if scalar else out

    def _u_at_breakpoints(self) -> np.ndarray:
        bp = self.breakpoints
        hs = np.diff(bp)
        s_left = np.asarray(self.flux(bp[:-1]))
        piece = (1.0 - self.rho) * (s_left * hs - 0.5 * self.rf * hs * hs)
        return np.concatenate(([0.0], np.cumsum(piece)))

    def on_grid(self, nodes: np.ndarray) -> PiecewiseAffineField:
        return PiecewiseAffineField(nodes, np.asarray(self.evaluate(nodes)))


def analytic_reference(problem: MacroProblem) -> ExactMacroSolution | None:
    """Closed-form solution when both profiles are piecewise constant;
    None outside the catalogue."""
    dens, force = problem.density, problem.force
    if not dens.is_piecewise_constant:
        return None
    if not isinstance(force, (ConstantForce, TabulatedForce)):
        return None
    bps = np.union1d(np.asarray(dens.breakpoints()), np.asarray(force.breakpoints()))
    rho = np.asarray(dens.value(0.5 * (bps[:-1] + bps[1:])))
    fvals = np.asarray(force.value(0.5 * (bps[:-1] + bps[1:])))
    rf = rho * fvals
    hs = np.diff(bps)
    vac = (1.0 - rho) * hs
    if np.sum(vac) <= 0:
        raise RigidGlobalError("globally rigid: the only admissible field is zero")
    # sigma0 * int(1-rho) = int (1-rho(x)) F(x) dx with F(x) = int_0^x rho f
    cum = np.concatenate(([0.0], np.cumsum(rf * hs)))
    piece_int_f = cum[:-1] * hs + 0.5 * rf * hs * hs  # int_piece F
    sigma0 = float(np.dot(1.0 - rho, piece_int_f) / np.sum(vac))
    return ExactMacroSolution(bps, rho, rf, sigma0)
