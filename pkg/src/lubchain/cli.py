"""Command-line front end: discrete/macro solves, sweeps, invariant checks.

All numeric output uses 17 significant digits so files round-trip 64-bit
floats exactly and repeated runs are byte-identical. Timestamps appear
only in the provenance block of summary JSON files.
"""

from __future__ import annotations

import argparse
import datetime
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, continuum, discrete, experiments, geometry
from .profiles import density_from_json, force_from_json

ENV_OUT = "LUBCHAIN_OUT"


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _json_floats(obj):
    """Round-trip-exact floats for JSON output."""
    if isinstance(obj, dict):
        return {k: _json_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_floats(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (float, np.floating)):
        return float(_fmt(obj))
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    return obj


def _write_json(path: Path, payload: dict):
    path.write_text(json.dumps(_json_floats(payload), indent=2, sort_keys=False) + "\n")


def _out_dir(args) -> Path:
    out = args.out or os.environ.get(ENV_OUT) or "out"
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _load_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


class SpecError(Exception):
    """Malformed run specification (exit code 2)."""


def _profile_pair(spec: dict, base_dir: Path):
    try:
        density = density_from_json(spec["density"], base_dir)
        force = force_from_json(spec["force"], base_dir)
    except (KeyError, ValueError, TypeError) as exc:
        raise SpecError(f"bad profile spec: {exc}") from exc
    return density, force


def cmd_discrete(args) -> int:
    out = _out_dir(args)
    spec = _load_json(args.profile)
    base = Path(args.profile).parent
    density, force = _profile_pair(spec, base)

    if args.particles:
        config = geometry.ParticleConfiguration.from_csv(args.particles)
    else:
        eps = spec.get("epsilon")
        if eps is None:
            raise SpecError("spec needs 'epsilon' when no particle file is given")
        config = geometry.generate_configuration(density, float(eps))
    u0 = float(spec.get("u0", 0.0))
    uN = float(spec.get("uN", 0.0))

    eps_eff = config.radius
    f_eps = geometry.sample_forces(config, force)
    forces = 2.0 * eps_eff * f_eps
    clusters = geometry.detect_clusters(config)
    if clusters.has_contacts:
        sol = discrete.solve_clustered(config, clusters, forces, u0, uN)
    else:
        sol = discrete.solve_strict(config, forces, u0, uN)
    w = discrete.w_field(config, clusters, sol, f_eps, eps_eff)

    centers = config.centers()
    with open(out / "solution.csv", "w") as fh:
        fh.write("# lubchain-solution-v1 columns=index,center,velocity\n")
        fh.write("index,center,velocity\n")
        for i, (c, u) in enumerate(zip(centers, sol.velocities)):
            fh.write(f"{i},{_fmt(c)},{_fmt(u)}\n")
    with open(out / "w_field.csv", "w") as fh:
        fh.write("# lubchain-wfield-v1 columns=left,right,value\n")
        fh.write("left,right,value\n")
        bp, vals = w.breakpoints, w.values
        for a, b, v in zip(bp[:-1], bp[1:], vals):
            fh.write(f"{_fmt(a)},{_fmt(b)},{_fmt(v)}\n")
    _write_json(out / "clusters.json", {
        "schema": "lubchain-clusters-v1",
        "epsilon_eff": eps_eff,
        "solver": sol.solver,
        "residual": sol.residual,
        "rigid_global": sol.rigid_global,
        "clusters": [
            {"first": lo, "last": hi, "beta": list(beta)}
            for (lo, hi), beta in zip(clusters.clusters, sol.cohesion)
        ],
        "singletons": list(clusters.singletons),
    })
    print(f"wrote {out}/solution.csv, w_field.csv, clusters.json")
    return 0


def cmd_macro(args) -> int:
    out = _out_dir(args)
    spec = _load_json(args.profile)
    density, force = _profile_pair(spec, Path(args.profile).parent)
    grid = args.grid or int(spec.get("grid_size", 64))
    sol = continuum.solve_macro(continuum.MacroProblem(density, force, grid))

    with open(out / "solution.csv", "w") as fh:
        fh.write("# lubchain-macro-solution-v1 columns=node,u\n")
        fh.write("node,u\n")
        for x, u in zip(sol.field.nodes, sol.field.values):
            fh.write(f"{_fmt(x)},{_fmt(u)}\n")
    with open(out / "flux.csv", "w") as fh:
        fh.write("# lubchain-macro-flux-v1 columns=element_left,element_right,sigma\n")
        fh.write("element_left,element_right,sigma\n")
        bp = sol.flux.breakpoints
        for a, b, s in zip(bp[:-1], bp[1:], sol.flux.values):
            fh.write(f"{_fmt(a)},{_fmt(b)},{_fmt(s)}\n")
    print(f"wrote {out}/solution.csv, flux.csv "
          f"(residual {sol.residual:.3e}, energy {sol.energy:.6g})")
    return 0


_REPORT_PREFIX = ["eps_nominal", "eps_eff", "n_spheres", "n_clusters", "status",
                  "solver", "l2_error", "w_inf", "w_var", "f_l1",
                  "lemma1_residual", "solver_residual", "bounds_ok"]


def write_report_csv(report: experiments.SweepReport, path: Path):
    names = list(report.plan.test_family)
    cols = _REPORT_PREFIX + [f"chi_pair_{n}" for n in names] + [f"du_pair_{n}" for n in names]
    with open(path, "w") as fh:
        fh.write("# lubchain-report-v1 one row per epsilon, largest first; "
                 "pairings are |int (A - target) phi| for the named phi\n")
        fh.write(",".join(cols) + "\n")
        for r in report.rows:
            row = [_fmt(r.eps_nominal), _fmt(r.eps_eff), str(r.n_spheres),
                   str(r.n_clusters), r.status, r.solver, _fmt(r.l2_error),
                   _fmt(r.w_inf), _fmt(r.w_var), _fmt(r.f_l1),
                   _fmt(r.lemma1_residual), _fmt(r.solver_residual),
                   str(int(r.bounds_ok))]
            row += [_fmt(r.chi_pairings.get(n, float("nan"))) for n in names]
            row += [_fmt(r.du_pairings.get(n, float("nan"))) for n in names]
            fh.write(",".join(row) + "\n")


def cmd_sweep(args) -> int:
    out = _out_dir(args)
    try:
        plan = experiments.plan_from_json(_load_json(args.plan), Path(args.plan).parent)
    except (KeyError, ValueError, TypeError) as exc:
        raise SpecError(f"bad sweep plan: {exc}") from exc
    report = experiments.run_sweep(plan, jobs=args.jobs)
    write_report_csv(report, out / "report.csv")
    summary = report.summary()
    summary["provenance"] = {
        "package_version": __version__,
        "generated_at": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    _write_json(out / "summary.json", summary)
    print(f"wrote {out}/report.csv, summary.json (reference: {report.reference})")
    return 0


def cmd_check(args) -> int:
    results = experiments.run_invariant_suite(seed=args.seed, trials=args.trials)
    width = max(len(r.name) for r in results)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status}  {r.name:<{width}}  {r.detail}")
    if args.out:
        out = _out_dir(args)
        with open(out / "check_report.csv", "w") as fh:
            fh.write("# lubchain-check-v1 columns=name,status,detail\n")
            fh.write("name,status,detail\n")
            for r in results:
                detail = r.detail.replace(",", ";")
                fh.write(f"{r.name},{'pass' if r.passed else 'fail'},{detail}\n")
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="lubchain",
        description="Lubricated sphere chains and their continuum limit.")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("discrete", help="solve one chain and export solution/w/clusters")
    d.add_argument("--profile", required=True, help="JSON with density, force, epsilon, u0, uN")
    d.add_argument("--particles", help="particle CSV (header epsilon=..., one center per line)")
    d.add_argument("--out", help=f"output directory (default ${ENV_OUT} or ./out)")
    d.set_defaults(fn=cmd_discrete)

    m = sub.add_parser("macro", help="solve the continuum equation and export solution/flux")
    m.add_argument("--profile", required=True, help="JSON with density and force")
    m.add_argument("--grid", type=int, help="number of elements (overrides spec)")
    m.add_argument("--out", help="output directory")
    m.set_defaults(fn=cmd_macro)

    s = sub.add_parser("sweep", help="epsilon sweep: report CSV + summary JSON")
    s.add_argument("--plan", required=True, help="sweep plan JSON")
    s.add_argument("--out", help="output directory")
    s.add_argument("--jobs", type=int, default=1, help="parallel rows")
    s.set_defaults(fn=cmd_sweep)

    c = sub.add_parser("check", help="run the invariant suite, exit 0 iff all pass")
    c.add_argument("--seed", type=int, default=20260811)
    c.add_argument("--trials", type=int, default=100)
    c.add_argument("--out", help="also write check_report.csv here")
    c.set_defaults(fn=cmd_check)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except SpecError as exc:
        json.dump({"schema": "lubchain-error-v1",
                   "error": {"type": "spec", "message": str(exc)}}, sys.stderr)
        sys.stderr.write("\n")
        return 2
    except (json.JSONDecodeError, FileNotFoundError) as exc:
        json.dump({"schema": "lubchain-error-v1",
                   "error": {"type": "spec", "message": str(exc)}}, sys.stderr)
        sys.stderr.write("\n")
        return 2
    except (ValueError, discrete.RigidGlobalError) as exc:
        json.dump({"schema": "lubchain-error-v1",
                   "error": {"type": "solver", "message": str(exc)}}, sys.stderr)
        sys.stderr.write("\n")
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
