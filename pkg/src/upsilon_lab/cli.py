"""Command-line runner: seeded experiment execution and report emission.

Subcommands
-----------
run      execute the checks listed in a TOML config, write JSON-lines reports
dist     transport distance between two configuration files
sample   draw a Poisson configuration into a CSV file
evolve   heat-flow trajectories of a configuration to CSV
hopflax  inf-convolution value of a distance functional

Exit codes: 0 all checks passed, 1 some check failed, 2 malformed input.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import approximation, verify
from .catalog import DistanceToConfig, ExpCylinder, random_configuration, random_cylinder
from .configuration import Ball, Box, Configuration, sample_poisson
from .errors import UpsilonLabError
from .seeding import derive_rng
from .space_forms import make_space, space_from_json
from .transport import HopfLaxOptions, d_upsilon, hopf_lax
from .dynamics import heat_flow_samples

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover - version-dependent import
    import tomli as tomllib


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UpsilonLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="upsilon-lab",
                                     description="configuration-space geometry lab")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a verification config")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_run.add_argument("--out", default=None, help="override the report path")
    p_run.add_argument("--jobs", type=int, default=1)
    p_run.set_defaults(func=cmd_run)

    p_dist = sub.add_parser("dist", help="transport distance between two configurations")
    p_dist.add_argument("file_a")
    p_dist.add_argument("file_b")
    p_dist.set_defaults(func=cmd_dist)

    p_sample = sub.add_parser("sample", help="sample a Poisson configuration")
    p_sample.add_argument("--space", required=True,
                          help='JSON descriptor, e.g. {"kind":"euclidean","dim":2}')
    p_sample.add_argument("--ball", help="region 'c1,c2,...;radius'")
    p_sample.add_argument("--box", help="region 'lo1,lo2;hi1,hi2' (Euclidean)")
    p_sample.add_argument("--intensity", type=float, required=True)
    p_sample.add_argument("--seed", type=int, required=True)
    p_sample.add_argument("--out", required=True)
    p_sample.set_defaults(func=cmd_sample)

    p_evolve = sub.add_parser("evolve", help="heat-flow trajectories to CSV")
    p_evolve.add_argument("--in", dest="infile", required=True)
    p_evolve.add_argument("--t", required=True, help="comma-separated times")
    p_evolve.add_argument("--samples", type=int, default=1)
    p_evolve.add_argument("--seed", type=int, required=True)
    p_evolve.add_argument("--out", required=True)
    p_evolve.set_defaults(func=cmd_evolve)

    p_hl = sub.add_parser("hopflax", help="inf-convolution of a distance functional")
    p_hl.add_argument("--in", dest="infile", required=True)
    p_hl.add_argument("--ref", required=True, help="reference configuration file")
    p_hl.add_argument("--t", type=float, required=True)
    p_hl.add_argument("--starts", type=int, default=8)
    p_hl.add_argument("--out", default=None, help="write the minimizer CSV here")
    p_hl.set_defaults(func=cmd_hopflax)

    return parser


# --------------------------------------------------------------------------
# run
# --------------------------------------------------------------------------

_KNOWN_CHECKS = (
    "quadruple", "bochner", "gradient_estimate", "contraction", "log_harnack",
    "hj", "heat_tail", "bishop_gromov", "appendix_convergence",
)


def cmd_run(args) -> int:
    try:
        with open(args.config, "rb") as fh:
            cfg = tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2

    problems = _validate_config(cfg)
    if problems:
        for p in problems:
            print(f"error: {p}", file=sys.stderr)
        return 2

    seed = int(args.seed if args.seed is not None else cfg["seed"])
    out_path = args.out or cfg.get("output", "reports.jsonl")
    space = make_space(cfg["space"]["kind"], cfg["space"].get("dim"),
                       cfg["space"].get("radius", 1.0))
    tolerances = cfg.get("tolerances", {})
    defaults = cfg.get("defaults", {})

    jobs = []
    for idx, block in enumerate(cfg.get("checks", [])):
        params = {**defaults, **block}
        name = params.pop("name")
        instances = int(params.pop("instances", 1))
        if name in tolerances:
            params.setdefault("tolerance", float(tolerances[name]))
        for inst in range(instances):
            jobs.append((idx, inst, name, dict(params)))

    def run_job(job):
        idx, inst, name, params = job
        return _dispatch_check(name, space, params, seed, idx, inst)

    if args.jobs > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(run_job, jobs))
    else:
        reports = [run_job(j) for j in jobs]

    flat = [r for group in reports for r in (group if isinstance(group, list) else [group])]
    with open(out_path, "w") as fh:
        for report in flat:
            fh.write(report.to_json_line() + "\n")
    all_passed = all(r.passed for r in flat)
    print(f"{len(flat)} report(s) -> {out_path}; "
          f"{'all passed' if all_passed else 'FAILURES present'}")
    return 0 if all_passed else 1


def _validate_config(cfg) -> list:
    problems = []
    if "seed" not in cfg:
        problems.append("config must declare a master seed (no entropy-source default)")
    if "space" not in cfg or "kind" not in cfg.get("space", {}):
        problems.append("config must declare [space] with a kind")
    for block in cfg.get("checks", []):
        name = block.get("name")
        if name not in _KNOWN_CHECKS:
            problems.append(f"unknown check name {name!r}")
    return problems


def _explicit_config(space, pts) -> Configuration:
    return Configuration(space, np.asarray(pts, dtype=float))


def _dispatch_check(name, space, params, seed, check_idx, inst):
    rng = derive_rng(seed, check_idx, inst)
    job_seed = int(derive_rng(seed, check_idx, inst, 0xFEED).integers(0, 2**31 - 1))
    window = float(params.get("window_radius", 2.0))
    n_points = params.get("n_points")
    tolerance = params.get("tolerance")

    def sample_cfg(count=None):
        return random_configuration(space, rng, window_radius=window,
                                    n_points=count if count is not None else n_points,
                                    intensity=float(params.get("intensity", 0.5)))

    if name == "quadruple":
        if "configs" in params:
            quad = [_explicit_config(space, pts) for pts in params["configs"]]
        else:
            base = sample_cfg()
            quad = [base] + [sample_cfg(len(base)) for _ in range(3)]
        K = float(params.get("K", min(space.sec_lower, 0.0)))
        kwargs = {"tolerance": tolerance} if tolerance is not None else {}
        return verify.check_quadruple(*quad, K=K, seed=job_seed, **kwargs)

    if name == "bochner":
        F = _functional_from_params(space, params, rng)
        gamma = sample_cfg()
        kwargs = {"tolerance": tolerance} if tolerance is not None else {}
        return verify.check_bochner(F, gamma, seed=job_seed, **kwargs)

    if name == "gradient_estimate":
        F = _functional_from_params(space, params, rng)
        gamma = sample_cfg()
        return verify.check_gradient_estimate(
            F, gamma, t=float(params.get("t", 0.1)),
            n_samples=int(params.get("n_samples", 2000)), seed=job_seed,
            tolerance=tolerance or 0.0)

    if name == "contraction":
        gamma = sample_cfg()
        sigma = sample_cfg(len(gamma))
        return verify.check_contraction(
            gamma, sigma, t=float(params.get("t", 0.05)),
            n_samples=int(params.get("n_samples", 200)), seed=job_seed,
            coupled=bool(params.get("coupled", True)), tolerance=tolerance or 0.0)

    if name == "log_harnack":
        F = _functional_from_params(space, params, rng, bounded=True)
        f = ExpCylinder(F)
        gamma = sample_cfg()
        sigma = sample_cfg(len(gamma))
        return verify.check_log_harnack(
            f, gamma, sigma, t=float(params.get("t", 0.1)),
            n_samples=int(params.get("n_samples", 2000)), seed=job_seed,
            tolerance=tolerance or 0.0)

    if name == "hj":
        gamma = sample_cfg(int(params.get("n_points", 2) or 2))
        ref = sample_cfg(len(gamma))
        t0 = float(params.get("t0", 0.1))
        spacing = float(params.get("spacing", 1e-3))
        count = int(params.get("grid_points", 5))
        grid = t0 + spacing * np.arange(count)
        return verify.check_hj(DistanceToConfig(ref), gamma, grid,
                               tolerance=tolerance if tolerance is not None else 1e-3,
                               seed=job_seed)

    if name == "heat_tail":
        t = float(params.get("t", 1.0))
        r = float(params["r"]) if "r" in params else float(params.get("r_factor", 6.0)) * math.sqrt(t)
        return verify.check_heat_tail(
            space, r=r, t=t, n_samples=int(params.get("n_samples", 100000)),
            lam=float(params.get("lambda", 0.45)), seed=job_seed,
            tolerance=tolerance or 0.0)

    if name == "bishop_gromov":
        grid = params.get("r_grid", [1, 2, 3, 4, 5, 6, 7, 8, 9, 10])
        kwargs = {"tolerance": tolerance} if tolerance is not None else {}
        return verify.check_bishop_gromov(space, grid, seed=job_seed, **kwargs)

    if name == "appendix_convergence":
        n_grid = [int(v) for v in params.get("n_grid", [1, 2, 4, 8, 16])]
        n_samp = int(params.get("n_samples", 32))
        gamma = sample_cfg()
        mu = [gamma] * n_samp
        seq = approximation.check_appendix_convergence(mu, mu, n_grid, rng)
        reports = []
        for n, cost, se in seq:
            import time

            started = time.perf_counter()
            reports.append(verify.make_report(
                "appendix_convergence", {"n": n, "n_samples": n_samp},
                cost.d2, 1.0 / n, tolerance or 0.0, se, job_seed, started))
        return reports

    raise UpsilonLabError(f"unknown check {name!r}")


def _functional_from_params(space, params, rng, bounded=True):
    from .calculus import CylinderFunction

    if "cylinder" in params:
        return CylinderFunction.from_json(params["cylinder"])
    return random_cylinder(space, rng, n_inner=params.get("n_inner"),
                           window_radius=float(params.get("window_radius", 2.0)),
                           bounded=bounded)


# --------------------------------------------------------------------------
# dist / sample / evolve / hopflax
# --------------------------------------------------------------------------


def cmd_dist(args) -> int:
    try:
        a = Configuration.from_file(args.file_a)
        b = Configuration.from_file(args.file_b)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    cost = d_upsilon(a, b)
    print(json.dumps(cost.to_json()))
    return 0


def _parse_vector(text):
    return np.array([float(v) for v in text.split(",")], dtype=float)


def cmd_sample(args) -> int:
    space = space_from_json(args.space)
    if bool(args.ball) == bool(args.box):
        print("error: exactly one of --ball / --box is required", file=sys.stderr)
        return 2
    if args.ball:
        center_text, radius_text = args.ball.split(";")
        region = Ball(space, _parse_vector(center_text), float(radius_text))
    else:
        lo_text, hi_text = args.box.split(";")
        region = Box(space, _parse_vector(lo_text), _parse_vector(hi_text))
    rng = derive_rng(args.seed, 0x5A)
    gamma = sample_poisson(space, region, args.intensity, rng)
    gamma.to_csv(args.out)
    print(f"{len(gamma)} point(s) -> {args.out}")
    return 0


def cmd_evolve(args) -> int:
    gamma = Configuration.from_file(args.infile)
    times = sorted(float(v) for v in args.t.split(","))
    rng = derive_rng(args.seed, 0xE0)
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sample_id", "time", "point_id"]
                        + [f"x{i}" for i in range(gamma.space.ambient_dim)])
        for t in times:
            samples = heat_flow_samples(gamma, t, args.samples, rng)
            for s in range(args.samples):
                for pid, point in enumerate(samples[s]):
                    writer.writerow([s, repr(t), pid] + [repr(v) for v in point])
    print(f"trajectories -> {args.out}")
    return 0


def cmd_hopflax(args) -> int:
    gamma = Configuration.from_file(args.infile)
    ref = Configuration.from_file(args.ref)
    f = DistanceToConfig(ref)
    result = hopf_lax(f, gamma, args.t, HopfLaxOptions(n_starts=args.starts))
    print(json.dumps({"value": result.value, "converged": result.converged,
                      "sweeps": result.sweeps}))
    if args.out:
        result.minimizer.to_csv(args.out)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
