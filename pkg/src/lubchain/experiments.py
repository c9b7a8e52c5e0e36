"""Numerical laboratory: epsilon sweeps, convergence metrics, bound checks.

A sweep realizes the micro-to-macro limit at desk scale: for each epsilon
it generates a configuration matching the target solid fraction, solves
the chain with the window-averaged forces, and compares the velocity
interpolant against the continuum solution. Weak convergence is probed
through pairings with a fixed closed-form test family, never through
strong norms: the limit theorem gives weak convergence only, and every
per-epsilon bound (flux sup bound, variation bound, the distributional
flux identity) is checked at its stated tolerance.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import continuum, discrete, geometry
from .fields import PiecewiseAffineField, PiecewiseConstantField, l2_distance
from .geometry import ParticleConfiguration
from .profiles import (ConstantDensity, ConstantForce, DensityProfile,
                       ForceProfile, SineForce, StepDensity, TabulatedForce,
                       _gauss_piece, density_from_json, force_from_json)
from .rng import XorShift64Star

LEMMA1_TOL = 1e-10
RESIDUAL_TOL = 1e-10


# ---------------------------------------------------------------------------
# test family


@dataclass(frozen=True)
class TestFunction:
    """Named test function with a closed-form antiderivative."""

    name: str
    fn: object
    antiderivative: object

    def __call__(self, x):
        return self.fn(x)


def _sine_test(k: int) -> TestFunction:
    w = k * np.pi
    return TestFunction(
        f"sin{k}",
        lambda x, w=w: np.sin(w * np.asarray(x, dtype=float)),
        lambda x, w=w: -np.cos(w * np.asarray(x, dtype=float)) / w,
    )


def _power_test(name: str, p: int) -> TestFunction:
    return TestFunction(
        name,
        lambda x, p=p: np.asarray(x, dtype=float) ** p if p else np.ones_like(np.asarray(x, dtype=float)),
        lambda x, p=p: np.asarray(x, dtype=float) ** (p + 1) / (p + 1),
    )


TEST_FAMILY: dict[str, TestFunction] = {
    tf.name: tf
    for tf in [
        _power_test("one", 0), _power_test("x", 1),
        _power_test("x2", 2), _power_test("x3", 3),
        _sine_test(1), _sine_test(2), _sine_test(3), _sine_test(4), _sine_test(5),
    ]
}

DEFAULT_FAMILY = tuple(TEST_FAMILY)


def resolve_family(names) -> list[TestFunction]:
    out = []
    for name in names:
        if name not in TEST_FAMILY:
            raise ValueError(f"unknown test function {name!r}; have {sorted(TEST_FAMILY)}")
        out.append(TEST_FAMILY[name])
    return out


# ---------------------------------------------------------------------------
# metrics


def weak_pairing(fieldv: PiecewiseConstantField, target, tf: TestFunction) -> float:
    """|int (A - target) phi|, exact for the closed-form family.

    target may be another piecewise-constant field, a density profile,
    or None for a plain integral against phi.
    """
    lhs = fieldv.integrate_against(tf.antiderivative)
    if target is None:
        rhs = 0.0
    elif isinstance(target, PiecewiseConstantField):
        rhs = target.integrate_against(tf.antiderivative)
    elif isinstance(target, DensityProfile):
        rhs = target.integral_against(tf.fn, tf.antiderivative)
    else:
        raise TypeError(f"unsupported pairing target {type(target)!r}")
    return abs(lhs - rhs)


def atom_pairing(positions, weights, density: DensityProfile,
                 force: ForceProfile, tf: TestFunction) -> float:
    """|sum_i w_i phi(q_i) - int rho f phi|: the force-atom convergence proxy."""
    lhs = float(np.dot(np.asarray(weights), np.asarray(tf.fn(positions))))
    if density.is_piecewise_constant:
        rhs = sum(rho * _integral_f_phi(force, tf, a, b)
                  for a, b, rho in density.pieces())
        return abs(lhs - rhs)
    bps = np.union1d(density.breakpoints(), force.breakpoints())
    rhs = sum(
        _gauss_piece(lambda x: np.asarray(density.value(x)) * np.asarray(force.value(x))
                     * np.asarray(tf.fn(x)), a, b)
        for a, b in zip(bps[:-1], bps[1:]))
    return abs(lhs - rhs)


def _integral_f_phi(force: ForceProfile, tf: TestFunction, a: float, b: float) -> float:
    """int_a^b f phi: closed form for step forces, Gauss on smooth pieces."""
    if isinstance(force, ConstantForce):
        return force.c * (float(tf.antiderivative(b)) - float(tf.antiderivative(a)))
    if isinstance(force, TabulatedForce):
        total = 0.0
        bp, vals = force.field.breakpoints, force.field.values
        lo = np.clip(bp[:-1], a, b)
        hi = np.clip(bp[1:], a, b)
        for left, right, v in zip(lo, hi, vals):
            if right > left:
                total += v * (float(tf.antiderivative(right)) - float(tf.antiderivative(left)))
        return total
    return _gauss_piece(lambda x: np.asarray(force.value(x)) * np.asarray(tf.fn(x)), a, b)


def l2_error(a: PiecewiseAffineField, b: PiecewiseAffineField) -> float:
    """Exact L2 distance of two piecewise-affine fields."""
    return l2_distance(a, b)


@dataclass(frozen=True)
class BoundCheck:
    w_inf: float
    w_var: float
    f_l1: float
    sup_ok: bool
    var_ok: bool

    @property
    def ok(self) -> bool:
        return self.sup_ok and self.var_ok


def bound_checks(w: PiecewiseConstantField, f_l1: float,
                 slack: float = 1e-12) -> BoundCheck:
    """Flux bounds for homogeneous boundary data: sup |w| <= 2 ||f||_L1 and
    Var(w) <= ||f||_L1 (exact sums for a step field)."""
    w_inf = w.sup_norm()
    w_var = w.total_variation()
    tol = slack * (1.0 + f_l1)
    return BoundCheck(w_inf, w_var, f_l1,
                      w_inf <= 2.0 * f_l1 + tol, w_var <= f_l1 + tol)


def h_minus1_residual(w: PiecewiseConstantField, positions, f_eps, eps: float,
                      hat_nodes=None) -> float:
    """Distributional flux identity, tested against a hat-function family.

    For every interior hat phi the flux satisfies int w phi' equal to the
    atom sum 2 eps f_i phi(q_i) exactly; both sides are closed form, so the
    returned max residual reflects solver consistency only.
    """
    q = np.asarray(positions, dtype=float)
    weights = 2.0 * eps * np.asarray(f_eps, dtype=float)
    if hat_nodes is None:
        hat_nodes = np.concatenate(([w.support[0]], q, [w.support[1]]))
    x = np.asarray(hat_nodes, dtype=float)
    if len(x) < 3:
        return 0.0
    h = np.diff(x)
    cumw = np.asarray(w.cumulative(x))
    seg = np.diff(cumw) / h  # mean of w per hat segment
    lhs = seg[:-1] - seg[1:]  # int w phi_j' for the hat at node j

    rhs = np.zeros(len(x))
    t = np.clip(np.searchsorted(x, q, side="right") - 1, 0, len(h) - 1)
    wl = (x[t + 1] - q) / h[t]
    np.add.at(rhs, t, weights * wl)
    np.add.at(rhs, t + 1, weights * (1.0 - wl))
    return float(np.max(np.abs(lhs - rhs[1:-1])))


# ---------------------------------------------------------------------------
# sweeps


@dataclass(frozen=True)
class SweepPlan:
    density: DensityProfile
    force: ForceProfile
    epsilons: tuple[float, ...]
    grid_size: int = 4096
    test_family: tuple[str, ...] = DEFAULT_FAMILY
    seed: int = 0

    def __post_init__(self):
        eps = tuple(float(e) for e in self.epsilons)
        if not eps or any(e <= 0 for e in eps):
            raise ValueError("epsilons must be positive")
        if any(b >= a for a, b in zip(eps[:-1], eps[1:])):
            raise ValueError("epsilons must be strictly decreasing")
        if not self.test_family:
            raise ValueError("test_family must not be empty")
        object.__setattr__(self, "epsilons", eps)
        object.__setattr__(self, "test_family", tuple(self.test_family))
        resolve_family(self.test_family)

    def to_json(self) -> dict:
        return {
            "density": self.density.to_json(),
            "force": self.force.to_json(),
            "epsilons": list(self.epsilons),
            "grid_size": self.grid_size,
            "test_family": list(self.test_family),
            "seed": self.seed,
        }


def plan_from_json(obj: dict, base_dir=None) -> SweepPlan:
    return SweepPlan(
        density=density_from_json(obj["density"], base_dir),
        force=force_from_json(obj["force"], base_dir),
        epsilons=tuple(obj["epsilons"]),
        grid_size=int(obj.get("grid_size", 4096)),
        test_family=tuple(obj.get("test_family", DEFAULT_FAMILY)),
        seed=int(obj.get("seed", 0)),
    )


@dataclass(frozen=True)
class SweepRow:
    eps_nominal: float
    status: str = "ok"
    eps_eff: float = math.nan
    n_spheres: int = 0
    n_clusters: int = 0
    solver: str = ""
    l2_error: float = math.nan
    w_inf: float = math.nan
    w_var: float = math.nan
    f_l1: float = math.nan
    lemma1_residual: float = math.nan
    solver_residual: float = math.nan
    bounds_ok: bool = False
    chi_pairings: dict = field(default_factory=dict)
    du_pairings: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SweepReport:
    plan: SweepPlan
    reference: str
    rows: tuple[SweepRow, ...]

    def ok_rows(self) -> list[SweepRow]:
        return [r for r in self.rows if r.status == "ok"]

    def summary(self) -> dict:
        rows = self.ok_rows()
        names = list(self.plan.test_family)
        out: dict = {
            "schema": "lubchain-summary-v1",
            "plan": self.plan.to_json(),
            "reference": self.reference,
            "rows_total": len(self.rows),
            "rows_ok": len(rows),
        }
        if not rows:
            return out
        l2 = [r.l2_error for r in rows]
        out["l2_first"] = l2[0]
        out["l2_last"] = l2[-1]
        out["l2_decreased"] = l2[-1] < l2[0] or (l2[0] == 0.0 and l2[-1] == 0.0)
        pos = [(r.eps_eff, r.l2_error) for r in rows if r.l2_error > 0]
        if len(pos) >= 2:
            xs = np.log([p[0] for p in pos])
            ys = np.log([p[1] for p in pos])
            out["l2_order_fit"] = float(np.polyfit(xs, ys, 1)[0])
        out["chi_pair_C"] = {
            name: max(r.chi_pairings[name] / r.eps_eff for r in rows) for name in names
        }
        floor = 1e-12
        out["du_pair_decreased"] = {
            name: rows[-1].du_pairings[name] <= max(rows[0].du_pairings[name], floor)
            for name in names
        }
        out["bounds_all_ok"] = all(r.bounds_ok for r in rows)
        out["lemma1_max"] = max(r.lemma1_residual for r in rows)
        out["solver_residual_max"] = max(r.solver_residual for r in rows)
        return out


def reference_solution(plan: SweepPlan):
    """Continuum reference: closed form when available, fine-grid FEM else."""
    problem = continuum.MacroProblem(plan.density, plan.force, plan.grid_size)
    exact = continuum.analytic_reference(problem)
    if exact is not None:
        nodes = np.union1d(np.linspace(0.0, 1.0, plan.grid_size + 1), exact.breakpoints)
        return exact.on_grid(nodes), "analytic"
    sol = continuum.solve_macro(problem)
    return sol.field, f"fem{plan.grid_size}"


def _sweep_row(plan: SweepPlan, eps: float, ref: PiecewiseAffineField) -> SweepRow:
    family = resolve_family(plan.test_family)
    try:
        config = geometry.generate_configuration(plan.density, eps)
    except ValueError as exc:
        return SweepRow(eps_nominal=eps, status=f"skipped: {exc}")
    eps_eff = config.radius
    f_eps = geometry.sample_forces(config, plan.force)
    forces = 2.0 * eps_eff * f_eps
    clusters = geometry.detect_clusters(config)
    if clusters.has_contacts:
        sol = discrete.solve_clustered(config, clusters, forces)
    else:
        sol = discrete.solve_strict(config, forces)
    u_eps = discrete.interpolant(config, sol)
    w = discrete.w_field(config, clusters, sol, f_eps, eps_eff)
    chi = geometry.characteristic_function(config)

    du_eps = u_eps.derivative()
    du_ref = ref.derivative()
    chi_pairs = {tf.name: weak_pairing(chi, plan.density, tf) for tf in family}
    du_pairs = {tf.name: weak_pairing(du_eps, du_ref, tf) for tf in family}
    f_l1 = plan.force.l1_norm()
    bounds = bound_checks(w, f_l1)
    lem1 = h_minus1_residual(w, config.interior_centers, f_eps, eps_eff)
    lem1 = max(lem1, h_minus1_residual(w, config.interior_centers, f_eps, eps_eff,
                                       hat_nodes=ref.nodes))
    return SweepRow(
        eps_nominal=eps, eps_eff=eps_eff, n_spheres=config.n + 1,
        n_clusters=len(clusters.clusters), solver=sol.solver,
        l2_error=l2_error(u_eps, ref),
        w_inf=bounds.w_inf, w_var=bounds.w_var, f_l1=f_l1,
        lemma1_residual=lem1, solver_residual=sol.residual,
        bounds_ok=bounds.ok, chi_pairings=chi_pairs, du_pairings=du_pairs,
    )


def run_sweep(plan: SweepPlan, jobs: int = 1) -> SweepReport:
    """One row per epsilon, largest first; rows are independent solves."""
    ref, ref_kind = reference_solution(plan)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_row, [plan] * len(plan.epsilons),
                                 plan.epsilons, [ref] * len(plan.epsilons)))
    else:
        rows = [_sweep_row(plan, eps, ref) for eps in plan.epsilons]
    return SweepReport(plan, ref_kind, tuple(rows))


# ---------------------------------------------------------------------------
# seeded random instances (deterministic xorshift streams)


def random_strict_config(rng: XorShift64Star, n: int) -> ParticleConfiguration:
    """Strictly feasible chain with n gaps and solid fraction in [0.3, 0.7]."""
    solid = rng.uniform(0.3, 0.7)
    eps = solid / (2.0 * n)
    raw = rng.uniform_array(n, 0.05, 1.05)
    d = raw * ((1.0 - solid) / float(np.sum(raw)))
    centers = np.cumsum(d)[:-1] + 2.0 * eps * np.arange(1, n)
    return ParticleConfiguration(eps, centers)


def random_clustered_config(rng: XorShift64Star, n: int,
                            n_clusters: int) -> ParticleConfiguration:
    """Feasible chain with the requested number of exact-contact runs."""
    if n < 4 * n_clusters + 2:
        raise ValueError("chain too short for that many clusters")
    sizes = [rng.randint(1, 3) for _ in range(n_clusters)]  # zero gaps per run
    n_zero = sum(sizes)
    n_free = n - n_zero
    # distribute free gaps around the runs, one separator minimum between
    slots = n_clusters + 1
    extra = n_free - (n_clusters - 1)
    counts = [0] * slots
    for _ in range(extra):
        counts[rng.randint(0, slots - 1)] += 1
    for s in range(1, n_clusters):
        counts[s] += 1

    contact = []
    for s in range(slots):
        contact.extend([False] * counts[s])
        if s < n_clusters:
            contact.extend([True] * sizes[s])
    contact = np.array(contact)

    solid = rng.uniform(0.3, 0.7)
    eps = solid / (2.0 * n)
    d = np.zeros(n)
    raw = rng.uniform_array(n_free, 0.05, 1.05)
    d[~contact] = raw * ((1.0 - solid) / float(np.sum(raw)))
    centers = np.cumsum(d)[:-1] + 2.0 * eps * np.arange(1, n)
    return ParticleConfiguration(eps, centers)


def random_step_force(rng: XorShift64Star, max_pieces: int = 5,
                      amplitude: float = 2.0) -> TabulatedForce:
    pieces = rng.randint(1, max_pieces)
    cuts = sorted({rng.uniform(0.05, 0.95) for _ in range(pieces - 1)})
    bps = np.array([0.0, *cuts, 1.0])
    vals = rng.uniform_array(len(bps) - 1, -amplitude, amplitude)
    return TabulatedForce(PiecewiseConstantField(bps, vals))


# ---------------------------------------------------------------------------
# invariant suite (the CLI `check` and the acceptance tests share these)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def check_oracle_equivalence(seed: int, trials: int,
                             sizes=(3, 10, 100, 2000), dense_max: int = 100) -> CheckResult:
    """Explicit prefix-sum formula vs Thomas vs dense elimination."""
    rng = XorShift64Star(seed)
    worst = 0.0
    for n in sizes:
        for _ in range(trials):
            sub = rng.spawn()
            config = random_strict_config(sub, n)
            forces = sub.uniform_array(n - 1, -1.0, 1.0)
            ue = discrete.solve_explicit(config, forces).velocities
            ut = discrete.solve_strict(config, forces).velocities
            scale = max(1e-30, float(np.max(np.abs(ut))))
            worst = max(worst, float(np.max(np.abs(ue - ut))) / scale)
            if n <= dense_max:
                dense = discrete.build_matrix(config).to_dense()
                ud = np.linalg.solve(dense, forces)
                worst = max(worst, float(np.max(np.abs(ut[1:-1] - ud))) / scale)
    return CheckResult("oracle_equivalence", worst <= 1e-12,
                       f"max relative spread {worst:.3e} (tol 1e-12)")


def check_cluster_regularization(seed: int, trials: int) -> CheckResult:
    """Clustered solve is the eta -> 0 limit of the regularized strict solve."""
    rng = XorShift64Star(seed)
    etas = (1e-2, 1e-4, 1e-6, 1e-8)
    ok = True
    worst_final = 0.0
    for _ in range(trials):
        sub = rng.spawn()
        n = sub.randint(30, 80)
        k = sub.randint(1, 5)
        config = random_clustered_config(sub, n, k)
        forces = sub.uniform_array(n - 1, -1.0, 1.0)
        clusters = geometry.detect_clusters(config)
        ref = discrete.solve_clustered(config, clusters, forces).velocities
        errs = []
        for eta in etas:
            ueta = discrete.solve_regularized(config, forces, eta).velocities
            errs.append(float(np.max(np.abs(ueta - ref))))
        ok &= all(b < a for a, b in zip(errs[:-1], errs[1:]))
        ok &= errs[-1] <= 1e-6
        worst_final = max(worst_final, errs[-1])
    return CheckResult("cluster_eta_limit", bool(ok),
                       f"max error at eta=1e-8: {worst_final:.3e} (tol 1e-6)")


def _random_trial_fields(sub: XorShift64Star):
    n = sub.randint(20, 80)
    if sub.uniform() < 0.5:
        config = random_strict_config(sub, n)
    else:
        config = random_clustered_config(sub, n, sub.randint(1, 3))
    force = random_step_force(sub)
    f_eps = geometry.sample_forces(config, force)
    eps = config.radius
    clusters = geometry.detect_clusters(config)
    sol = discrete.solve(config, 2.0 * eps * f_eps)
    w = discrete.w_field(config, clusters, sol, f_eps, eps)
    return config, force, f_eps, w


def check_lemma1(seed: int, trials: int) -> CheckResult:
    rng = XorShift64Star(seed)
    worst = 0.0
    for _ in range(trials):
        config, _, f_eps, w = _random_trial_fields(rng.spawn())
        worst = max(worst, h_minus1_residual(w, config.interior_centers,
                                             f_eps, config.radius))
    return CheckResult("lemma1_flux_identity", worst <= LEMMA1_TOL,
                       f"max hat residual {worst:.3e} (tol {LEMMA1_TOL:g})")


def check_flux_bounds(seed: int, trials: int) -> CheckResult:
    rng = XorShift64Star(seed)
    violations = 0
    for _ in range(trials):
        _, force, _, w = _random_trial_fields(rng.spawn())
        if not bound_checks(w, force.l1_norm()).ok:
            violations += 1
    return CheckResult("flux_bounds", violations == 0,
                       f"{violations} violations in {trials} trials")


def check_macro_constant(grid_size: int = 64) -> CheckResult:
    problem = continuum.MacroProblem(ConstantDensity(0.5), ConstantForce(1.0), grid_size)
    sol = continuum.solve_macro(problem)
    xs = sol.field.nodes
    exact = xs * (1.0 - xs) / 8.0
    err = float(np.max(np.abs(sol.field.values - exact)))
    return CheckResult("macro_constant_case", err <= 1e-12,
                       f"max nodal error {err:.3e} (tol 1e-12)")


def rigid_inclusion_density() -> StepDensity:
    return StepDensity(((0.0, 0.4, 0.5), (0.4, 0.6, 1.0), (0.6, 1.0, 0.5)))


def check_macro_rigid_plateau(grid_size: int = 64) -> CheckResult:
    problem = continuum.MacroProblem(rigid_inclusion_density(), ConstantForce(1.0),
                                     grid_size)
    sol = continuum.solve_macro(problem)
    xs = sol.field.nodes
    inside = (xs >= 0.4) & (xs <= 0.6)
    err = float(np.max(np.abs(sol.field.values[inside] - 0.04)))
    slopes = np.diff(sol.field.values) / np.diff(xs)
    mids = 0.5 * (xs[:-1] + xs[1:])
    rigid = (mids > 0.4) & (mids < 0.6)
    flat = float(np.max(np.abs(slopes[rigid]))) if np.any(rigid) else 0.0
    passed = err <= 1e-10 and flat == 0.0
    return CheckResult("macro_rigid_plateau", passed,
                       f"plateau error {err:.3e} (tol 1e-10), max rigid slope {flat:g}")


def h_convergence_study(ns=(16, 32, 64, 128), rho0: float = 0.5, k: int = 1):
    """Midpoint errors of the sine-forced smooth case; nodal values are exact
    by the 1D superconvergence, so midpoints carry the h^2 interpolation error."""
    amp = rho0 * (1.0 - rho0) / (k * np.pi) ** 2
    errors = []
    for n in ns:
        problem = continuum.MacroProblem(ConstantDensity(rho0), SineForce(k), n)
        sol = continuum.solve_macro(problem)
        xs = sol.field.nodes
        mids = 0.5 * (xs[:-1] + xs[1:])
        exact = amp * np.sin(k * np.pi * mids)
        errors.append(float(np.max(np.abs(np.asarray(sol.field(mids)) - exact))))
    hs = [1.0 / n for n in ns]
    order = float(np.polyfit(np.log(hs), np.log(errors), 1)[0])
    return list(ns), errors, order


def check_macro_order() -> CheckResult:
    ns, errors, order = h_convergence_study()
    return CheckResult("macro_h_order", order >= 1.9,
                       f"observed order {order:.3f} over n={ns} (need >= 1.9)")


def check_sweep_trend(epsilons=None, density=None) -> CheckResult:
    density = density or ConstantDensity(0.5)
    epsilons = epsilons or tuple(1.0 / 2**k for k in range(4, 9))
    plan = SweepPlan(density, ConstantForce(1.0), epsilons)
    report = run_sweep(plan)
    s = report.summary()
    passed = (s.get("rows_ok") == len(epsilons) and s.get("l2_decreased", False)
              and s.get("bounds_all_ok", False)
              and all(s.get("du_pair_decreased", {}).values())
              and s.get("lemma1_max", 1.0) <= LEMMA1_TOL)
    return CheckResult("sweep_trend", bool(passed),
                       f"l2 {s.get('l2_first', float('nan')):.3e} -> "
                       f"{s.get('l2_last', float('nan')):.3e}")


def check_generator(epsilons=None) -> CheckResult:
    epsilons = epsilons or tuple(1.0 / 2**k for k in range(4, 9))
    densities = [ConstantDensity(0.5), rigid_inclusion_density()]
    worst_c = 0.0
    for dens in densities:
        for eps in epsilons:
            config = geometry.generate_configuration(dens, eps)
            if geometry.check_feasibility(config) is geometry.FeasibilityClass.INFEASIBLE:
                return CheckResult("generator_soundness", False,
                                   f"infeasible output at eps={eps}")
            chi = geometry.characteristic_function(config)
            for tf in resolve_family(DEFAULT_FAMILY):
                worst_c = max(worst_c, weak_pairing(chi, dens, tf) / config.radius)
    return CheckResult("generator_soundness", math.isfinite(worst_c),
                       f"all feasible; fitted C = {worst_c:.3f}")


def check_determinism(seed: int = 7) -> CheckResult:
    plan = SweepPlan(ConstantDensity(0.5), ConstantForce(1.0),
                     tuple(1.0 / 2**k for k in range(4, 7)), seed=seed)
    a = run_sweep(plan)
    b = run_sweep(plan)
    same = a.rows == b.rows and a.summary() == b.summary()
    return CheckResult("determinism", bool(same),
                       "repeated runs produced identical rows" if same
                       else "rows differ between runs")


def run_invariant_suite(seed: int = 20260811, trials: int = 100) -> list[CheckResult]:
    return [
        check_oracle_equivalence(seed, max(5, trials // 4)),
        check_cluster_regularization(seed + 1, max(5, trials // 4)),
        check_lemma1(seed + 2, trials),
        check_flux_bounds(seed + 3, trials),
        check_macro_constant(),
        check_macro_rigid_plateau(),
        check_macro_order(),
        check_sweep_trend(),
        check_generator(),
        check_determinism(seed + 4),
    ]
