"""Particle configurations on [0, 1]: feasibility, contacts, solid fields.

An array of n+1 spheres of common radius eps sits on the segment with the
first center pinned at 0 and the last at 1; only the n-1 interior centers
are data. Gap i (0-based) is the border-to-border distance between spheres
i and i+1. A configuration is feasible when no gap is negative; gaps below
the contact tolerance count as touching and form clusters.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .fields import PiecewiseConstantField
from .profiles import DensityProfile, ForceProfile

#: Absolute contact tolerance on gaps (domain length is 1). Generated
#: configurations snap near-zero gaps to exact contact, so anything inside
#: (-tol, tol] is a contact and anything below -tol is an overlap.
CONTACT_TOL = 1e-12


class FeasibilityClass(enum.Enum):
    INFEASIBLE = "infeasible"
    FEASIBLE = "feasible"
    STRICTLY_FEASIBLE = "strictly_feasible"


@dataclass(frozen=True)
class ParticleConfiguration:
    """Radius plus interior centers; endpoints at 0 and 1 are implied."""

    radius: float
    interior_centers: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.interior_centers, dtype=float).copy()
        if self.radius <= 0:
            raise ValueError(f"radius must be positive, got {self.radius}")
        if q.ndim != 1 or len(q) < 1:
            raise ValueError("need at least one interior center")
        if not np.all(np.diff(q) > 0):
            raise ValueError("interior centers must be strictly increasing")
        if q[0] <= 0 or q[-1] >= 1:
            raise ValueError("interior centers must lie strictly inside (0, 1)")
        q.flags.writeable = False
        object.__setattr__(self, "interior_centers", q)

    @property
    def n(self) -> int:
        """Index of the last particle; the chain has n+1 spheres and n gaps."""
        return len(self.interior_centers) + 1

    def centers(self) -> np.ndarray:
        return np.concatenate(([0.0], self.interior_centers, [1.0]))

    def gaps(self) -> np.ndarray:
        """gaps[i] = centers[i+1] - centers[i] - 2 eps, length n."""
        return np.diff(self.centers()) - 2.0 * self.radius

    def total_vacuum(self) -> float:
        """Sum of all gaps: 1 - 2 eps n when endpoints are pinned."""
        return float(np.sum(self.gaps()))

    def to_csv(self, path: str | Path):
        with open(path, "w") as fh:
            fh.write(f"epsilon={self.radius:.17g}\n")
            for q in self.interior_centers:
                fh.write(f"{q:.17g}\n")

    @classmethod
    def from_csv(cls, path: str | Path) -> "ParticleConfiguration":
        lines = [ln.strip() for ln in Path(path).read_text().splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("epsilon="):
            raise ValueError(f"{path}: first line must be 'epsilon=<value>'")
        eps = float(lines[0].split("=", 1)[1])
        centers = np.array([float(ln) for ln in lines[1:]])
        return cls(eps, centers)


@dataclass(frozen=True)
class ClusterDecomposition:
    """Maximal runs of touching particles, as inclusive index ranges."""

    clusters: tuple[tuple[int, int], ...]
    singletons: tuple[int, ...]
    n: int

    def __post_init__(self):
        covered = set(self.singletons)
        last = -1
        for lo, hi in self.clusters:
            if lo <= last or hi <= lo:
                raise ValueError("cluster ranges must be sorted, disjoint, length >= 2")
            covered.update(range(lo, hi + 1))
            last = hi
        if covered != set(range(self.n + 1)):
            raise ValueError("clusters and singletons must partition the particles")

    @property
    def has_contacts(self) -> bool:
        return bool(self.clusters)

    def cluster_of(self) -> dict[int, int]:
        """particle index -> cluster position (singletons absent)."""
        owner = {}
        for k, (lo, hi) in enumerate(self.clusters):
            for i in range(lo, hi + 1):
                owner[i] = k
        return owner


def check_feasibility(config: ParticleConfiguration,
                      contact_tol: float = CONTACT_TOL) -> FeasibilityClass:
    """Classify per the no-overlap inequalities on all gaps."""
    d = config.gaps()
    if np.any(d < -contact_tol):
        return FeasibilityClass.INFEASIBLE
    if np.all(d > contact_tol):
        return FeasibilityClass.STRICTLY_FEASIBLE
    return FeasibilityClass.FEASIBLE


def detect_clusters(config: ParticleConfiguration,
                    contact_tol: float = CONTACT_TOL) -> ClusterDecomposition:
    """Group maximal runs of consecutive contacts (gap <= tolerance)."""
    if check_feasibility(config, contact_tol) is FeasibilityClass.INFEASIBLE:
        raise ValueError("configuration is infeasible (overlapping spheres)")
    n = config.n
    contact = config.gaps() <= contact_tol
    idx = np.flatnonzero(contact)
    if len(idx) == 0:
        return ClusterDecomposition((), tuple(range(n + 1)), n)
    run_break = np.diff(idx) > 1
    starts = idx[np.concatenate(([True], run_break))]
    ends = idx[np.concatenate((run_break, [True]))]
    clusters = tuple((int(a), int(b) + 1) for a, b in zip(starts, ends))
    covered = np.zeros(n + 1, dtype=bool)
    for a, b in clusters:
        covered[a:b + 1] = True
    singles = tuple(int(i) for i in np.flatnonzero(~covered))
    return ClusterDecomposition(clusters, singles, n)


def characteristic_function(config: ParticleConfiguration) -> PiecewiseConstantField:
    """Indicator of the solid phase: half-spheres at the pinned endpoints,
    full spheres at interior centers, contact-touching intervals merged."""
    eps = config.radius
    q = config.centers()
    intervals = [(0.0, eps)]
    intervals += [(qi - eps, qi + eps) for qi in q[1:-1]]
    intervals.append((1.0 - eps, 1.0))
    merged = [list(intervals[0])]
    for a, b in intervals[1:]:
        if a - merged[-1][1] <= CONTACT_TOL:
            merged[-1][1] = max(merged[-1][1], b)
        else:
            merged.append([a, b])

    bps = [0.0]
    vals = []
    for a, b in merged:
        if a > bps[-1]:
            bps.append(a)
            vals.append(0.0)
        bps.append(b)
        vals.append(1.0)
    if bps[-1] < 1.0:
        bps.append(1.0)
        vals.append(0.0)
    return PiecewiseConstantField(np.array(bps), np.array(vals))


def coarse_density(config: ParticleConfiguration) -> PiecewiseConstantField:
    """Solid proportion per intercenter interval: 1 - gap/interval.

    Exactly 1 on contact intervals; the solid measure of every interval
    matches the characteristic function (both are 2 eps), which is what
    makes the two fields pairing-equivalent up to O(eps).
    """
    q = config.centers()
    span = np.diff(q)
    d = config.gaps()
    vals = np.where(d <= CONTACT_TOL, 1.0, 1.0 - d / span)
    return PiecewiseConstantField(q, vals)


def sample_forces(config: ParticleConfiguration, force: ForceProfile) -> np.ndarray:
    """Window averages (1/2eps) int_{q_i-eps}^{q_i+eps} f at interior centers."""
    eps = config.radius
    q = config.interior_centers
    return np.asarray(force.window_integral(q - eps, q + eps)) / (2.0 * eps)


def generate_configuration(density: DensityProfile, eps: float,
                           contact_tol: float = CONTACT_TOL) -> ParticleConfiguration:
    """Deterministic configuration realizing a target solid fraction.

    Places centers at equal increments of the cumulative solid mass:
    S(q_i) = 2 eps_eff i with eps_eff = M / (2 N), N = round(M / (2 eps)).
    Since rho <= 1 the spacing never drops below 2 eps_eff, so the result
    is feasible by construction, with exact contacts wherever rho = 1.
    """
    m = density.mass
    if m <= 0:
        raise ValueError("density must have positive total mass")
    n = int(math.floor(m / (2.0 * eps) + 0.5))
    if n < 2:
        raise ValueError(f"epsilon {eps} too large for mass {m}: fewer than 2 gaps")
    eps_eff = m / (2.0 * n)

    raw = np.array([density.invert_cumulative(2.0 * eps_eff * i) for i in range(1, n)])
    two_eps = 2.0 * eps_eff
    snapped = np.empty(n - 1)
    prev = 0.0
    for i, qi in enumerate(raw):
        if qi - (prev + two_eps) <= contact_tol:
            qi = prev + two_eps  # exact contact
        snapped[i] = qi
        prev = qi
    return ParticleConfiguration(eps_eff, snapped)
