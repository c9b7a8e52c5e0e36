"""Force balance of the lubricated sphere chain.

The interaction between neighbours is viscous and scales with the inverse
gap, so strictly separated chains give a symmetric positive definite
tridiagonal system. Touching particles would make the coupling infinite;
they are constrained to a common velocity instead, turning each maximal
contact run into a single unknown, and the interface forces holding a run
together are recovered afterwards by substitution along the chain.

Index conventions (0-based throughout, chain of n+1 particles):
  gaps[i]    border gap between particles i and i+1,  i = 0..n-1
  forces[i]  total force on interior particle i+1,    i = 0..n-2
  u[i]       velocity of particle i,                  i = 0..n
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import PiecewiseAffineField, PiecewiseConstantField
from .geometry import (CONTACT_TOL, ClusterDecomposition, FeasibilityClass,
                       ParticleConfiguration, check_feasibility, detect_clusters)
from .tridiag import Tridiagonal, solve_chain


class RigidGlobalError(Exception):
    """The whole chain is one contact cluster: no vacuum, no compliance."""


@dataclass(frozen=True)
class DiscreteSolution:
    """Velocities of all particles plus per-cluster cohesion forces."""

    velocities: np.ndarray
    cohesion: tuple[np.ndarray, ...]
    solver: str
    residual: float
    rigid_global: bool = False
    cohesion_remainder: float = 0.0

    def __post_init__(self):
        u = np.asarray(self.velocities, dtype=float).copy()
        u.flags.writeable = False
        object.__setattr__(self, "velocities", u)


def build_matrix(config: ParticleConfiguration) -> Tridiagonal:
    """Stiffness matrix of the strictly separated chain.

    Row for interior particle j: diagonal 1/d_left + 1/d_right, symmetric
    off-diagonals -1/d shared with the neighbour.
    """
    d = config.gaps()
    if np.any(d <= CONTACT_TOL):
        raise ValueError("contact present: use solve_clustered for touching chains")
    inv = 1.0 / d
    diag = inv[:-1] + inv[1:]
    off = -inv[1:-1]
    return Tridiagonal(off.copy(), diag, off.copy())


def solve_strict(config: ParticleConfiguration, forces, u0: float = 0.0,
                 uN: float = 0.0, viscosity: float = 1.0) -> DiscreteSolution:
    """Thomas elimination on the strictly feasible chain.

    The eliminated solution is refined against the gap-level balance
    residual, so the result solves the exact-gap system rather than its
    rounded matrix; the reported residual is the refined balance residual.
    """
    f = np.asarray(forces, dtype=float) / viscosity
    if len(f) != config.n - 1:
        raise ValueError(f"expected {config.n - 1} interior forces, got {len(f)}")
    d = config.gaps()
    if np.any(d <= CONTACT_TOL):
        raise ValueError("contact present: use solve_clustered for touching chains")
    u_int, residual = solve_chain(d, f, u0, uN)
    u = np.concatenate(([u0], u_int, [uN]))
    return DiscreteSolution(u, (), "thomas", residual)


def solve_explicit(config: ParticleConfiguration, forces,
                   viscosity: float = 1.0) -> DiscreteSolution:
    """Closed-form solution via vacuum prefix sums, homogeneous boundaries.

    u_j = [(D_n - D_j) sum_{k<=j} D_k f_k + D_j sum_{k>j} (D_n - D_k) f_k] / D_n
    with D_j the cumulative vacuum. Two prefix passes, O(n); the formula
    stays valid with zero gaps, where it returns the cluster velocities.
    The prefix sums accumulate in long double: plain float64 running sums
    lose ~3 digits at n = 1e5, which would eat the oracle-agreement budget.
    """
    f = np.asarray(forces, dtype=float) / viscosity
    if len(f) != config.n - 1:
        raise ValueError(f"expected {config.n - 1} interior forces, got {len(f)}")
    d = config.gaps().astype(np.longdouble)
    cum = np.cumsum(d)
    total = cum[-1]
    clusters = detect_clusters(config)
    if total <= CONTACT_TOL:
        u = np.zeros(config.n + 1)
        return DiscreteSolution(u, (), "explicit", 0.0, rigid_global=True)
    fl = f.astype(np.longdouble)
    dk = cum[:-1]  # cumulative vacuum at interior particles
    prefix = np.cumsum(dk * fl)
    tail = np.cumsum((total - dk) * fl)
    suffix = tail[-1] - tail
    u_int = (((total - dk) * prefix + dk * suffix) / total).astype(float)
    u = np.concatenate(([0.0], u_int, [0.0]))
    residual = system_residual(config, clusters, u, f, 0.0, 0.0)
    return DiscreteSolution(u, (), "explicit", residual)


def _blocks(clusters: ClusterDecomposition) -> list[tuple[int, int]]:
    """Ordered inclusive particle ranges: clusters plus singleton blocks."""
    blocks = [(lo, hi) for lo, hi in clusters.clusters]
    blocks += [(i, i) for i in clusters.singletons]
    blocks.sort()
    return blocks


def _block_force_sums(blocks, forces) -> np.ndarray:
    n = len(forces) + 1
    out = np.zeros(len(blocks))
    for t, (lo, hi) in enumerate(blocks):
        a, b = max(lo, 1), min(hi, n - 1)
        if a <= b:
            out[t] = np.sum(forces[a - 1:b])
    return out


def solve_clustered(config: ParticleConfiguration, clusters: ClusterDecomposition,
                    forces, u0: float = 0.0, uN: float = 0.0,
                    viscosity: float = 1.0) -> DiscreteSolution:
    """Reduced solve with one unknown per cluster and per free particle.

    The reduced chain of blocks carries the same tridiagonal structure as
    the strict system, with block gaps and summed block forces; blocks
    containing an endpoint are pinned to its velocity.
    """
    f = np.asarray(forces, dtype=float) / viscosity
    if len(f) != config.n - 1:
        raise ValueError(f"expected {config.n - 1} interior forces, got {len(f)}")
    if check_feasibility(config) is FeasibilityClass.INFEASIBLE:
        raise ValueError("configuration is infeasible")
    d = config.gaps()
    blocks = _blocks(clusters)
    m = len(blocks)

    rigid_global = False
    if m == 1:
        if abs(u0 - uN) > 0:
            raise RigidGlobalError(
                "one cluster spans the whole chain: boundary velocities must match")
        u = np.full(config.n + 1, u0)
        rigid_global = True
        block_vel = np.array([u0])
    else:
        fsums = _block_force_sums(blocks, f)
        # gap to the left of block t (t >= 1) is the gap before its first particle
        g = np.array([d[blocks[t][0] - 1] for t in range(1, m)])
        n_unknown = m - 2
        block_vel = np.empty(m)
        block_vel[0] = u0
        block_vel[-1] = uN
        if n_unknown > 0:
            block_vel[1:-1], _ = solve_chain(g, fsums[1:-1], block_vel[0], block_vel[-1])
        u = np.empty(config.n + 1)
        for t, (lo, hi) in enumerate(blocks):
            u[lo:hi + 1] = block_vel[t]

    betas, remainder = _cohesion_from_forces(config, clusters, u, f)
    residual = system_residual(config, clusters, u, f, u0, uN)
    return DiscreteSolution(u, betas, "clustered", residual,
                            rigid_global=rigid_global, cohesion_remainder=remainder)


def solve(config: ParticleConfiguration, forces, u0: float = 0.0, uN: float = 0.0,
          viscosity: float = 1.0) -> DiscreteSolution:
    """Dispatch: Thomas when strictly separated, cluster reduction otherwise."""
    if check_feasibility(config) is FeasibilityClass.STRICTLY_FEASIBLE:
        return solve_strict(config, forces, u0, uN, viscosity)
    return solve_clustered(config, detect_clusters(config), forces, u0, uN, viscosity)


def solve_regularized(config: ParticleConfiguration, forces, eta: float,
                      u0: float = 0.0, uN: float = 0.0,
                      viscosity: float = 1.0) -> DiscreteSolution:
    """Strict solve with every contact gap replaced by eta > 0.

    The clustered solution is the eta -> 0 limit of this one, which makes
    the two solvers mutually checkable.
    """
    if eta <= 0:
        raise ValueError("eta must be positive")
    f = np.asarray(forces, dtype=float) / viscosity
    d = np.where(config.gaps() <= CONTACT_TOL, eta, config.gaps())
    u_int, residual = solve_chain(d, f, u0, uN)
    u = np.concatenate(([u0], u_int, [uN]))
    return DiscreteSolution(u, (), "thomas-eta", residual)


def system_residual(config: ParticleConfiguration, clusters: ClusterDecomposition,
                    velocities, forces, u0: float = 0.0, uN: float = 0.0) -> float:
    """Max-norm residual of the balance equations (free and clustered)."""
    d = config.gaps()
    u = np.asarray(velocities, dtype=float)
    f = np.asarray(forces, dtype=float)
    n = config.n
    worst = max(abs(u[0] - u0), abs(u[n] - uN))

    singles = np.asarray(clusters.singletons, dtype=int)
    interior = singles[(singles >= 1) & (singles <= n - 1)]
    if len(interior):
        j = interior
        r = (u[j + 1] - u[j]) / d[j] - (u[j] - u[j - 1]) / d[j - 1] + f[j - 1]
        worst = max(worst, float(np.max(np.abs(r))))

    for lo, hi in clusters.clusters:
        worst = max(worst, float(np.max(np.abs(u[lo:hi + 1] - u[lo]))))
        if lo >= 1 and hi <= n - 1:
            fsum = float(np.sum(f[lo - 1:hi]))
            r = (u[hi + 1] - u[hi]) / d[hi] - (u[lo] - u[lo - 1]) / d[lo - 1] + fsum
            worst = max(worst, abs(r))
    return worst


def _cohesion_from_forces(config: ParticleConfiguration,
                          clusters: ClusterDecomposition,
                          u: np.ndarray, forces: np.ndarray):
    """Interface forces along every cluster by substitution.

    The chain is bidiagonal, so one sweep fixes all unknowns; interior
    clusters keep one spare equation whose remainder certifies that the
    velocities satisfy the summed cluster balance.
    """
    d = config.gaps()
    f = np.asarray(forces, dtype=float)
    n = config.n
    betas = []
    worst = 0.0
    for lo, hi in clusters.clusters:
        size = hi - lo  # one force per internal interface
        beta = np.empty(size)
        if lo >= 1:
            inflow = (u[lo] - u[lo - 1]) / d[lo - 1]
            beta[0] = inflow - f[lo - 1]
            for j in range(lo + 1, hi):
                beta[j - lo] = beta[j - lo - 1] - f[j - 1]
            if hi <= n - 1:
                outflow = (u[hi + 1] - u[hi]) / d[hi]
                worst = max(worst, abs(outflow - beta[-1] + f[hi - 1]))
        elif hi <= n - 1:
            outflow = (u[hi + 1] - u[hi]) / d[hi]
            beta[-1] = outflow + f[hi - 1]
            for j in range(hi - 1, lo, -1):
                beta[j - lo - 1] = beta[j - lo] + f[j - 1]
        else:
            # chain pinned at both walls: the overall stress level is a
            # gauge; anchor the first interface at zero
            beta[0] = 0.0
            for j in range(lo + 1, hi):
                beta[j - lo] = beta[j - lo - 1] - f[j - 1]
        betas.append(beta)
    return tuple(betas), worst


def cohesion_forces(config: ParticleConfiguration, clusters: ClusterDecomposition,
                    solution: DiscreteSolution, f_eps, eps: float,
                    consistency_tol: float = 1e-8) -> tuple[np.ndarray, ...]:
    """Cohesion forces from window-averaged forces f_eps (totals 2 eps f_eps).

    Raises when the spare equation of an interior cluster is violated,
    which means the velocities do not satisfy the cluster balance.
    """
    total = 2.0 * eps * np.asarray(f_eps, dtype=float)
    betas, remainder = _cohesion_from_forces(config, clusters, solution.velocities, total)
    scale = 1.0 + float(np.sum(np.abs(total))) + max(
        (float(np.max(np.abs(b))) for b in betas if len(b)), default=0.0)
    if remainder > consistency_tol * scale:
        raise ValueError(
            f"cluster balance violated: consistency remainder {remainder:.3e}")
    return betas


def interpolant(config: ParticleConfiguration,
                solution: DiscreteSolution) -> PiecewiseAffineField:
    """Continuous piecewise-affine velocity through all particle centers."""
    return PiecewiseAffineField(config.centers(), solution.velocities)


def w_field(config: ParticleConfiguration, clusters: ClusterDecomposition,
            solution: DiscreteSolution, f_eps, eps: float) -> PiecewiseConstantField:
    """Flux field: velocity difference over gap between separated particles,
    cohesion force on contact intervals."""
    total = 2.0 * eps * np.asarray(f_eps, dtype=float)
    betas, _ = _cohesion_from_forces(config, clusters, solution.velocities, total)
    d = config.gaps()
    u = solution.velocities
    vals = np.empty(config.n)
    free = d > CONTACT_TOL
    vals[free] = (u[1:][free] - u[:-1][free]) / d[free]
    for (lo, hi), beta in zip(clusters.clusters, betas):
        for j in range(lo, hi):  # gap j sits between particles j and j+1
            vals[j] = beta[j - lo]
    return PiecewiseConstantField(config.centers(), vals)


def end_stress(config: ParticleConfiguration, solution: DiscreteSolution) -> float:
    """Force the chain exerts on the last particle in the boundary-driven
    force-free case: velocity difference over total vacuum."""
    total = config.total_vacuum()
    if total <= CONTACT_TOL:
        raise RigidGlobalError("no vacuum in the chain: stress is indeterminate")
    u = solution.velocities
    return float((u[0] - u[-1]) / total)
