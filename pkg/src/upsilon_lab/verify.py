"""Inequality checks: statistic vs bound, one CheckReport per check.

Sign convention: margin = bound - statistic, and a check passes iff
margin >= -(tolerance + 2 * std_error) with the std_error term present only
for Monte Carlo checks.  Reports serialize to JSON lines under the versioned
schema "upsilon-lab/report/1"; +inf never appears in a report (infinite
distances produce skip-reports instead).
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass

import numpy as np

from .calculus import CylinderFunction, gamma2_cylinder, gamma_cylinder, gamma_cylinder_points, grad_cylinder_points
from .configuration import Configuration
from .dynamics import (
    coupled_heat_samples,
    heat_flow_samples,
    semigroup_expectation,
    semigroup_samples,
)
from .errors import DomainError, InfiniteDistanceError, SpaceMismatchError
from .seeding import derive_rng
from .space_forms import DEFAULT_HEAT_SUBSTEP, Euclidean, SpaceForm, Sphere2
from .transport import HopfLaxOptions, d_upsilon, empirical_w2_with_se, hopf_lax

REPORT_SCHEMA_ID = "upsilon-lab/report/1"

REPORT_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "properties": {
        "schema": {"const": REPORT_SCHEMA_ID},
        "check_name": {"type": "string"},
        "params": {"type": "object"},
        "statistic": {"type": "number"},
        "bound": {"type": "number"},
        "margin": {"type": "number"},
        "tolerance": {"type": "number", "minimum": 0},
        "std_error": {"type": ["number", "null"]},
        "passed": {"type": "boolean"},
        "seed": {"type": "integer"},
        "runtime_ms": {"type": "integer"},
    },
    "required": [
        "schema", "check_name", "params", "statistic", "bound", "margin",
        "tolerance", "std_error", "passed", "seed", "runtime_ms",
    ],
    "additionalProperties": False,
}

_Z_SCORE = 2.0


@dataclass(frozen=True)
class CheckReport:
    check_name: str
    params: dict
    statistic: float
    bound: float
    margin: float
    tolerance: float
    std_error: float | None
    passed: bool
    seed: int
    runtime_ms: int

    def to_json_dict(self) -> dict:
        d = asdict(self)
        d["schema"] = REPORT_SCHEMA_ID
        return d

    def to_json_line(self) -> str:
        import jsonschema

        d = self.to_json_dict()
        jsonschema.validate(d, REPORT_SCHEMA)
        return json.dumps(d, sort_keys=True)

    @staticmethod
    def from_json(obj) -> "CheckReport":
        if isinstance(obj, str):
            obj = json.loads(obj)
        obj = dict(obj)
        obj.pop("schema", None)
        return CheckReport(**obj)


def make_report(check_name, params, statistic, bound, tolerance, std_error, seed,
                started) -> CheckReport:
    margin = float(bound) - float(statistic)
    slack = float(tolerance) + (_Z_SCORE * std_error if std_error is not None else 0.0)
    return CheckReport(
        check_name=check_name,
        params=params,
        statistic=float(statistic),
        bound=float(bound),
        margin=margin,
        tolerance=float(tolerance),
        std_error=None if std_error is None else float(std_error),
        passed=bool(margin >= -slack),
        seed=int(seed),
        runtime_ms=int((time.perf_counter() - started) * 1000),
    )


def _skip_report(check_name, params, seed, started, reason) -> CheckReport:
    params = dict(params)
    params["skipped"] = reason
    return make_report(check_name, params, 0.0, 0.0, 0.0, None, seed, started)


# --------------------------------------------------------------------------
# quadruple comparison
# --------------------------------------------------------------------------


def check_quadruple(g0: Configuration, g1: Configuration, g2: Configuration,
                    g3: Configuration, K: float, tolerance: float = 1e-9,
                    seed: int = 0) -> CheckReport:
    """Four-point comparison at curvature parameter K.

    K = 0 compares squared distances; K < 0 compares cosh-transformed and
    K > 0 cos-transformed distances (with the inequality reversed).  Callers
    probing a lifted bound should pass the effective value min(K_sec, 0).
    """
    started = time.perf_counter()
    params = {"K": float(K), "sizes": [len(g) for g in (g0, g1, g2, g3)]}
    others = [g1, g2, g3]
    d0 = [d_upsilon(g0, g) for g in others]
    dij = {}
    for i in range(3):
        for j in range(i + 1, 3):
            dij[(i, j)] = d_upsilon(others[i], others[j])
    if any(not c.is_finite for c in d0) or any(not c.is_finite for c in dij.values()):
        return _skip_report("quadruple", params, seed, started, "infinite distance")

    lam = math.sqrt(abs(K))
    if K == 0:
        lhs = sum(c.d2 for c in d0)
        rhs = sum(2.0 * c.d2 for c in dij.values()) / 6.0
        statistic, bound = rhs, lhs
    elif K < 0:
        lhs = sum(math.cosh(lam * c.d) for c in d0) ** 2
        rhs = 3.0 + sum(2.0 * math.cosh(lam * c.d) for c in dij.values())
        statistic, bound = rhs, lhs
    else:
        lhs = sum(math.cos(lam * c.d) for c in d0) ** 2
        rhs = 3.0 + sum(2.0 * math.cos(lam * c.d) for c in dij.values())
        statistic, bound = lhs, rhs  # reversed inequality for K > 0
    return make_report("quadruple", params, statistic, bound, tolerance, None, seed, started)


# --------------------------------------------------------------------------
# Bochner inequality
# --------------------------------------------------------------------------


def check_bochner(F: CylinderFunction, gamma: Configuration,
                  space: SpaceForm | None = None, tolerance: float = 1e-8,
                  seed: int = 0) -> CheckReport:
    """Pointwise curvature inequality for cylinder functions:
    Gamma_2(F) >= K Gamma(F) with K the Ricci constant of the model."""
    started = time.perf_counter()
    space = space or gamma.space
    if space != gamma.space:
        raise SpaceMismatchError("configuration does not live on the given space")
    K = space.ric_lower
    g1 = gamma_cylinder(F, gamma)
    g2 = gamma2_cylinder(F, gamma)
    params = {"K": K, "n_points": len(gamma), "n_inner": F.m}
    return make_report("bochner", params, K * g1 - g2, 0.0, tolerance, None, seed, started)


# --------------------------------------------------------------------------
# gradient estimate
# --------------------------------------------------------------------------


def check_gradient_estimate(F: CylinderFunction, gamma: Configuration, t: float,
                            n_samples: int, seed: int = 0, fd_step: float = 1e-4,
                            tolerance: float = 0.0,
                            substep: float = DEFAULT_HEAT_SUBSTEP) -> CheckReport:
    """Commutation-type estimate Gamma(T_t F) <= e^{-2Kt} T_t Gamma(F) at gamma.

    Both sides share one set of kernel draws (common random numbers).  The
    left side uses the commuting-gradient identity on Euclidean models and
    central differences of the Monte Carlo functional in normal coordinates
    on curved ones; the report's std_error is a delta-method estimate for the
    margin itself, accounting for the correlation between the sides.
    """
    started = time.perf_counter()
    if t < 0:
        raise DomainError("t must be >= 0")
    space = gamma.space
    K = space.ric_lower
    params = {"t": t, "n_samples": n_samples, "K": K, "n_points": len(gamma)}
    if t == 0 or gamma.is_empty:
        both = gamma_cylinder(F, gamma)
        return make_report("gradient_estimate", params, both, both, tolerance, 0.0,
                           seed, started)

    rng = derive_rng(seed, 0x6E51)
    decay = math.exp(-2.0 * K * t)
    n, amb = gamma.points.shape

    if isinstance(space, Euclidean):
        samples = heat_flow_samples(gamma, t, n_samples, rng, substep)
        grads = grad_cylinder_points(F, samples)          # (S, n, amb)
        gammas = gamma_cylinder_points(F, samples)        # (S,)
        flat = grads.reshape(n_samples, n * amb)
        mean_grad = flat.mean(axis=0)
        lhs = float(np.sum(mean_grad**2))
        rhs = decay * float(gammas.mean())
        joint = np.concatenate([gammas[:, None], flat], axis=1)
        dvec = np.concatenate([[decay], -2.0 * mean_grad])
    else:
        samples, diffs = _crn_gradient_samples(F, gamma, t, n_samples, rng, fd_step,
                                               substep)
        gammas = gamma_cylinder_points(F, samples)
        mean_diff = diffs.mean(axis=0)                    # (n * dim,)
        lhs = float(np.sum(mean_diff**2))
        rhs = decay * float(gammas.mean())
        joint = np.concatenate([gammas[:, None], diffs], axis=1)
        dvec = np.concatenate([[decay], -2.0 * mean_diff])

    cov = np.cov(joint, rowvar=False)
    var_margin = float(dvec @ np.atleast_2d(cov) @ dvec) / n_samples
    se = math.sqrt(max(var_margin, 0.0))
    return make_report("gradient_estimate", params, lhs, rhs, tolerance, se, seed, started)


def _crn_gradient_samples(F, gamma, t, n_samples, rng, fd_step, substep):
    """Kernel draws plus per-sample central differences of F along frame
    directions at each starting point, all under one noise array."""
    space = gamma.space
    n, amb = gamma.points.shape
    n_sub = max(1, math.ceil(t / substep))
    noise = rng.standard_normal((n_sub, n_samples, n, space.dim))
    scale = math.sqrt(2.0 * (t / n_sub))

    def flow(start_points):
        xs = np.broadcast_to(start_points, (n_samples, n, amb)).copy()
        for k in range(n_sub):
            frame = space.tangent_frame(xs)
            v = scale * np.einsum("snk,snkj->snj", noise[k], frame)
            xs = space.exp(xs, v)
        return xs

    samples = flow(gamma.points)
    frames0 = space.tangent_frame(gamma.points)  # (n, dim, amb)
    diffs = np.empty((n_samples, n * space.dim))
    col = 0
    for i in range(n):
        for k in range(space.dim):
            plus = np.array(gamma.points)
            plus[i] = space.exp(gamma.points[i], fd_step * frames0[i, k])
            minus = np.array(gamma.points)
            minus[i] = space.exp(gamma.points[i], -fd_step * frames0[i, k])
            v_plus = F.eval_points(flow(plus))
            v_minus = F.eval_points(flow(minus))
            diffs[:, col] = (v_plus - v_minus) / (2.0 * fd_step)
            col += 1
    return samples, diffs


# --------------------------------------------------------------------------
# Wasserstein contraction
# --------------------------------------------------------------------------


def check_contraction(gamma: Configuration, sigma: Configuration, t: float,
                      n_samples: int, seed: int = 0, coupled: bool = True,
                      tolerance: float = 0.0,
                      substep: float = DEFAULT_HEAT_SUBSTEP) -> CheckReport:
    """Kernel contraction W_2(p_t(gamma, .), p_t(sigma, .)) <= e^{-Kt} d(gamma, sigma),
    estimated by empirical transport between sample clouds (coupled draws by
    default, which upper-bound the true W_2)."""
    started = time.perf_counter()
    space = gamma.space
    K = space.ric_lower
    params = {"t": t, "n_samples": n_samples, "K": K, "coupled": coupled,
              "n_points": len(gamma)}
    base = d_upsilon(gamma, sigma)
    if not base.is_finite:
        return _skip_report("contraction", params, seed, started, "infinite distance")
    bound = math.exp(-K * t) * base.d
    rng = derive_rng(seed, 0xC0)
    if coupled:
        xs, ys = coupled_heat_samples(gamma, sigma, t, n_samples, rng, substep)
    else:
        xs = heat_flow_samples(gamma, t, n_samples, rng, substep)
        ys = heat_flow_samples(sigma, t, n_samples, derive_rng(seed, 0xC1), substep)
    cloud_a = [gamma.with_points(p) for p in xs]
    cloud_b = [gamma.with_points(p) for p in ys]
    cost, se_d2 = empirical_w2_with_se(cloud_a, cloud_b)
    statistic = cost.d
    se = se_d2 / (2.0 * statistic) if statistic > 0 else se_d2
    return make_report("contraction", params, statistic, bound, tolerance, se, seed, started)


# --------------------------------------------------------------------------
# log-Harnack
# --------------------------------------------------------------------------


def harnack_coefficient(K: float, t: float) -> float:
    """K / (2 (1 - e^{-2Kt})), with the K -> 0 limit 1/(4t)."""
    if t <= 0:
        raise DomainError("harnack coefficient needs t > 0")
    if abs(K) < 1e-12:
        return 1.0 / (4.0 * t)
    return K / (2.0 * (1.0 - math.exp(-2.0 * K * t)))


def check_log_harnack(f, gamma: Configuration, sigma: Configuration, t: float,
                      n_samples: int, seed: int = 0, tolerance: float = 0.0,
                      substep: float = DEFAULT_HEAT_SUBSTEP) -> CheckReport:
    """T_t(log f)(gamma) <= log(T_t f(sigma)) + c_K(t) d^2(gamma, sigma) for a
    positive bounded functional f exposing log f (catalog: f = exp(cylinder)).

    The log term's std_error uses the delta method; the two Monte Carlo
    estimates are independent, so their variances add.
    """
    started = time.perf_counter()
    base = d_upsilon(gamma, sigma)
    if not base.is_finite:
        raise InfiniteDistanceError("log-Harnack requires configurations at finite distance")
    K = gamma.space.ric_lower
    params = {"t": t, "n_samples": n_samples, "K": K, "d2": base.d2}
    log_f = getattr(f, "log_functional", None)
    if log_f is None:
        raise DomainError("functional must expose log_functional for the log side")
    est_log, se_log_side = semigroup_expectation(
        log_f, gamma, t, n_samples, derive_rng(seed, 0x10A), substep)
    est_f, se_f = semigroup_expectation(
        f, sigma, t, n_samples, derive_rng(seed, 0x10B), substep)
    if est_f <= 0:
        raise DomainError("positive functional produced a nonpositive mean")
    bound = math.log(est_f) + harnack_coefficient(K, t) * base.d2
    se = math.sqrt(se_log_side**2 + (se_f / est_f) ** 2)
    return make_report("log_harnack", params, est_log, bound, tolerance, se, seed, started)


# --------------------------------------------------------------------------
# Hamilton-Jacobi residual
# --------------------------------------------------------------------------


def check_hj(f, gamma: Configuration, t_grid, tolerance: float = 1e-3,
             opts: HopfLaxOptions | None = None, seed: int = 0) -> CheckReport:
    """Subsolution residual of the inf-convolution semigroup:
    max over interior grid points of | dQ_t/dt + (1/2) (d(gamma, eta_t)/t)^2 |,
    with the slope taken from the minimizer via the envelope identity."""
    started = time.perf_counter()
    t_grid = np.asarray(t_grid, dtype=float)
    if len(t_grid) < 3 or np.any(np.diff(t_grid) <= 0) or t_grid[0] <= 0:
        raise DomainError("t_grid must be at least 3 increasing positive times")
    opts = opts or HopfLaxOptions()
    results = [hopf_lax(f, gamma, float(t), opts) for t in t_grid]
    values = np.array([r.value for r in results])
    converged = all(r.converged for r in results)
    residuals = []
    for i in range(1, len(t_grid) - 1):
        dqdt = (values[i + 1] - values[i - 1]) / (t_grid[i + 1] - t_grid[i - 1])
        slope = d_upsilon(gamma, results[i].minimizer).d / t_grid[i]
        residuals.append(abs(dqdt + 0.5 * slope * slope))
    params = {"t_grid": t_grid.tolist(), "converged": converged, "n_points": len(gamma)}
    return make_report("hamilton_jacobi", params, max(residuals), tolerance, 0.0,
                       None, seed, started)


# --------------------------------------------------------------------------
# heat-kernel tail
# --------------------------------------------------------------------------


def check_heat_tail(space: SpaceForm, r: float, t: float, n_samples: int,
                    lam: float, seed: int = 0, x=None, tolerance: float = 0.0,
                    substep: float = DEFAULT_HEAT_SUBSTEP) -> CheckReport:
    """Empirical kernel tail frequency P[d(X_t, x) >= r] against the closed-form
    Gaussian-type bound; Wilson-interval standard error."""
    started = time.perf_counter()
    if not 0.0 < lam <= 0.5:
        raise DomainError("lambda must lie in (0, 1/2] for the tail check")
    if r <= 0:
        raise DomainError("tail radius must be positive")
    x = space.origin() if x is None else space.validate_point(np.asarray(x, dtype=float))
    rng = derive_rng(seed, 0x7A11)
    starts = np.broadcast_to(x, (n_samples, space.ambient_dim)).copy()
    ends = space.heat_step(starts, t, rng, substep)
    dist = space.geodesic_distance(ends, x)
    hits = int(np.count_nonzero(dist >= r))
    freq = hits / n_samples
    bound = space.heat_tail_bound(r, t, lam)
    z2 = _Z_SCORE**2
    n_t = n_samples + z2
    p_t = (hits + z2 / 2.0) / n_t
    se = math.sqrt(p_t * (1.0 - p_t) / n_t)
    params = {"r": r, "t": t, "lambda": lam, "n_samples": n_samples, "dim": space.dim}
    return make_report("heat_tail", params, freq, bound, tolerance, se, seed, started)


# --------------------------------------------------------------------------
# volume growth
# --------------------------------------------------------------------------


def check_bishop_gromov(space: SpaceForm, r_grid, tolerance: float = 0.0,
                        seed: int = 0) -> CheckReport:
    """Exponential volume growth: max_r vol(B_r) / (vol(B_1) e^{c r}) <= 1 on
    the grid, with c = dim for every model (the hyperbolic plane saturates at
    c = 2)."""
    started = time.perf_counter()
    r_grid = np.asarray(r_grid, dtype=float)
    if np.any(r_grid < 1.0):
        raise DomainError("volume-growth grid starts at r = 1")
    c = float(space.dim)
    vol1 = space.ball_volume(1.0)
    ratios = []
    for r in r_grid:
        r_eff = r
        if isinstance(space, Sphere2):
            r_eff = min(r, math.pi * space.radius)  # ball saturates at the full sphere
        ratios.append(space.ball_volume(float(r_eff)) / (vol1 * math.exp(c * r)))
    params = {"r_grid": r_grid.tolist(), "c": c}
    return make_report("bishop_gromov", params, max(ratios), 1.0, tolerance, None,
                       seed, started)
