"""Transport distance between configurations and derived machinery.

The distance is the non-normalized L2 matching cost: infinite across
cardinality classes, and realized by an optimal point assignment otherwise.
The assignment is solved exactly (no entropic regularization on any path that
feeds an inequality check).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment, minimize

from .configuration import Configuration
from .errors import DomainError, InfiniteDistanceError, SpaceMismatchError
from .seeding import derive_rng
from .space_forms import Euclidean

_TIE_TOL = 1e-12


@dataclass(frozen=True)
class ExtendedCost:
    """A squared transport cost that may be infinite (cardinality mismatch)."""

    d2: float

    def __post_init__(self):
        if not (self.d2 >= 0.0 or math.isinf(self.d2)):
            raise DomainError("cost must be nonnegative or infinite")

    @property
    def d(self) -> float:
        return math.sqrt(self.d2) if math.isfinite(self.d2) else math.inf

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.d2)

    def to_json(self) -> dict:
        return {"d2": self.d2 if self.is_finite else "inf",
                "d": self.d if self.is_finite else "inf"}

    @staticmethod
    def infinite() -> "ExtendedCost":
        return ExtendedCost(math.inf)


@dataclass(frozen=True)
class Matching:
    """A cost-minimizing bijection i -> pairs[i] between two equal-cardinality
    configurations, with its squared cost."""

    pairs: tuple
    squared_cost: float

    @property
    def permutation(self) -> np.ndarray:
        return np.array([j for _, j in self.pairs], dtype=int)

    def to_json(self) -> dict:
        return {"d2": self.squared_cost, "pairs": [list(p) for p in self.pairs]}


def _check_same_space(gamma: Configuration, omega: Configuration) -> None:
    if gamma.space != omega.space:
        raise SpaceMismatchError("configurations live on different spaces")


def _cost_matrix(gamma: Configuration, omega: Configuration) -> np.ndarray:
    d = gamma.space.distance_matrix(gamma.points, omega.points)
    return d * d


def d_upsilon(gamma: Configuration, omega: Configuration) -> ExtendedCost:
    """Transport distance between configurations; infinite when the
    cardinalities differ."""
    _check_same_space(gamma, omega)
    if len(gamma) != len(omega):
        return ExtendedCost.infinite()
    if len(gamma) == 0:
        return ExtendedCost(0.0)
    cost = _cost_matrix(gamma, omega)
    rows, cols = linear_sum_assignment(cost)
    return ExtendedCost(float(cost[rows, cols].sum()))


def optimal_matching(gamma: Configuration, omega: Configuration) -> Matching:
    """A cost-minimizing assignment; ties resolved toward the lexicographically
    smallest permutation, which stands in for a measurable selection."""
    _check_same_space(gamma, omega)
    if len(gamma) != len(omega):
        raise InfiniteDistanceError("matching requires equal cardinalities")
    n = len(gamma)
    if n == 0:
        return Matching(pairs=(), squared_cost=0.0)
    cost = _cost_matrix(gamma, omega)
    rows, cols = linear_sum_assignment(cost)
    best = float(cost[rows, cols].sum())
    tol = _TIE_TOL * max(1.0, best) * n
    perm = _lex_smallest_optimal(cost, best, tol)
    total = float(cost[np.arange(n), perm].sum())
    return Matching(pairs=tuple((i, int(perm[i])) for i in range(n)), squared_cost=total)


def _lex_smallest_optimal(cost: np.ndarray, best: float, tol: float) -> np.ndarray:
    """Fix assignments row by row, keeping the smallest column index that still
    admits an optimal completion."""
    n = cost.shape[0]
    perm = np.full(n, -1, dtype=int)
    free_cols = list(range(n))
    prefix = 0.0
    for i in range(n):
        remaining_rows = np.arange(i + 1, n)
        chosen = None
        for j in sorted(free_cols):
            cand_prefix = prefix + cost[i, j]
            if cand_prefix > best + tol:
                continue
            rest_cols = [c for c in free_cols if c != j]
            if len(remaining_rows) == 0:
                completion = 0.0
            else:
                sub = cost[np.ix_(remaining_rows, rest_cols)]
                r, c = linear_sum_assignment(sub)
                completion = float(sub[r, c].sum())
            if cand_prefix + completion <= best + tol:
                chosen = j
                prefix = cand_prefix
                break
        if chosen is None:  # numerically impossible, but stay safe
            raise RuntimeError("tie-breaking lost the optimal assignment")
        perm[i] = chosen
        free_cols.remove(chosen)
    return perm


def config_geodesic(gamma: Configuration, omega: Configuration, s: float) -> Configuration:
    """Constant-speed geodesic through configuration space: each matched pair
    moves along its base-space geodesic."""
    if not 0.0 <= s <= 1.0:
        raise DomainError("geodesic parameter s must lie in [0, 1]")
    match = optimal_matching(gamma, omega)  # raises on cardinality mismatch
    if len(gamma) == 0:
        return gamma
    target = omega.points[match.permutation]
    if s == 0.0:
        return gamma
    if s == 1.0:
        return gamma.with_points(target)
    pts = gamma.space.geodesic_point(gamma.points, target, s)
    return gamma.with_points(pts)


def pairwise_d2_matrix(samples_a, samples_b) -> np.ndarray:
    """Matrix of squared configuration distances; inf where cardinalities differ."""
    n_a, n_b = len(samples_a), len(samples_b)
    out = np.full((n_a, n_b), np.inf)
    for i, ga in enumerate(samples_a):
        for j, gb in enumerate(samples_b):
            if len(ga) == len(gb):
                out[i, j] = d_upsilon(ga, gb).d2
    return out


def empirical_w2(samples_a, samples_b) -> ExtendedCost:
    """Plug-in Wasserstein distance between two equally weighted sample clouds
    of configurations: exact assignment on the matrix of squared distances."""
    if len(samples_a) == 0 or len(samples_b) == 0:
        raise DomainError("empirical_w2 needs nonempty sample lists")
    if len(samples_a) != len(samples_b):
        raise DomainError("empirical_w2 needs equally many samples on both sides")
    cost = pairwise_d2_matrix(samples_a, samples_b)
    try:
        rows, cols = linear_sum_assignment(cost)
    except ValueError:
        return ExtendedCost.infinite()
    mean_cost = float(cost[rows, cols].mean())
    if not math.isfinite(mean_cost):
        return ExtendedCost.infinite()
    return ExtendedCost(mean_cost)


def empirical_w2_with_se(samples_a, samples_b):
    """(cost, standard error of the squared estimate) treating matched pair
    costs as independent draws; the se is an MC diagnostic, not a bound."""
    cost = pairwise_d2_matrix(samples_a, samples_b)
    try:
        rows, cols = linear_sum_assignment(cost)
    except ValueError:
        return ExtendedCost.infinite(), math.inf
    matched = cost[rows, cols]
    if not np.all(np.isfinite(matched)):
        return ExtendedCost.infinite(), math.inf
    se = float(matched.std(ddof=1) / math.sqrt(len(matched))) if len(matched) > 1 else 0.0
    return ExtendedCost(float(matched.mean())), se


@dataclass
class HopfLaxOptions:
    """Inner-solver knobs for the inf-convolution."""

    n_starts: int = 8
    max_sweeps: int = 500
    value_tol: float = 1e-8
    seed: int = 0
    golden_range: float | None = None  # curved-model line-search half-width


@dataclass
class HopfLaxResult:
    value: float
    minimizer: Configuration
    converged: bool
    sweeps: int


def hopf_lax(f, gamma: Configuration, t: float, opts: HopfLaxOptions | None = None) -> HopfLaxResult:
    """Inf-convolution  Q_t f(gamma) = inf_eta [ f(eta) + d2(gamma, eta)/(2t) ]
    over the fixed-cardinality fiber of gamma.

    Block-coordinate descent: re-match against gamma, then minimize over point
    positions with the matching frozen; multistart from gamma plus Gaussian
    perturbations at scale sqrt(t).  Always returns a value <= f(gamma).
    """
    if t <= 0:
        raise DomainError("hopf_lax requires t > 0")
    opts = opts or HopfLaxOptions()
    rng = derive_rng(opts.seed, 0x401F, len(gamma))

    starts = [gamma]
    scale = math.sqrt(t)
    for _ in range(max(0, opts.n_starts - 1)):
        starts.append(_perturb(gamma, scale, rng))

    best_value = float(f(gamma))  # eta = gamma is always admissible
    best_eta = gamma
    best_converged = True
    best_sweeps = 0
    for eta0 in starts:
        value, eta, converged, sweeps = _descend(f, gamma, eta0, t, opts)
        if value < best_value - 1e-15 * max(1.0, abs(best_value)):
            best_value, best_eta, best_converged, best_sweeps = value, eta, converged, sweeps
    return HopfLaxResult(best_value, best_eta, best_converged, best_sweeps)


def _perturb(gamma: Configuration, scale: float, rng) -> Configuration:
    space = gamma.space
    if gamma.is_empty:
        return gamma
    frame = space.tangent_frame(gamma.points)
    z = scale * rng.standard_normal((len(gamma), space.dim))
    return gamma.with_points(space.exp(gamma.points, np.einsum("nk,nkj->nj", z, frame)))


def _objective(f, gamma, eta, t) -> float:
    return float(f(eta)) + d_upsilon(gamma, eta).d2 / (2.0 * t)


def _descend(f, gamma, eta, t, opts):
    value = _objective(f, gamma, eta, t)
    converged = False
    sweeps = 0
    for sweeps in range(1, opts.max_sweeps + 1):
        match = optimal_matching(gamma, eta)
        anchors = gamma.points[_inverse_perm(match.permutation)] if len(gamma) else gamma.points
        if isinstance(gamma.space, Euclidean):
            eta = _continuous_step_euclidean(f, gamma.space, anchors, eta, t)
        else:
            eta = _continuous_step_curved(f, gamma.space, anchors, eta, t, opts)
        new_value = _objective(f, gamma, eta, t)
        if value - new_value < opts.value_tol:
            value = min(value, new_value)
            converged = True
            break
        value = new_value
    return value, eta, converged, sweeps


def _inverse_perm(perm: np.ndarray) -> np.ndarray:
    inv = np.empty_like(perm)
    inv[perm] = np.arange(len(perm))
    return inv


def _continuous_step_euclidean(f, space, anchors, eta, t):
    """Minimize f(eta) + sum |anchor_i - p_i|^2 / (2t) over the stacked point
    coordinates with the matching frozen."""
    n, d = eta.points.shape if len(eta) else (0, space.dim)
    if n == 0:
        return eta
    shape = (n, d)

    grad_f = getattr(f, "gradient", None)

    def fun(flat):
        pts = flat.reshape(shape)
        return float(f(eta.with_points(pts))) + float(np.sum((pts - anchors) ** 2)) / (2.0 * t)

    if grad_f is not None:

        def jac(flat):
            pts = flat.reshape(shape)
            g = np.asarray(grad_f(eta.with_points(pts)), dtype=float)
            return (g + (pts - anchors) / t).ravel()

        res = minimize(fun, eta.points.ravel(), jac=jac, method="L-BFGS-B",
                       options={"maxiter": 200, "ftol": 1e-14, "gtol": 1e-12})
    else:
        res = minimize(fun, eta.points.ravel(), method="L-BFGS-B",
                       options={"maxiter": 200, "ftol": 1e-14, "gtol": 1e-10})
    return eta.with_points(res.x.reshape(shape))


def _continuous_step_curved(f, space, anchors, eta, t, opts):
    """Per-point golden-section line searches along tangent frame directions."""
    from scipy.optimize import minimize_scalar

    pts = np.array(eta.points)
    half = opts.golden_range if opts.golden_range is not None else 2.0 * math.sqrt(t) + 0.5
    for i in range(len(pts)):
        frame = space.tangent_frame(pts[i])
        for k in range(space.dim):
            direction = frame[k]

            def along(step):
                trial = pts.copy()
                trial[i] = space.exp(pts[i], step * direction)
                dist = space.geodesic_distance(trial, anchors)
                return float(f(eta.with_points(trial))) + float(np.sum(dist * dist)) / (2.0 * t)

            res = minimize_scalar(along, bounds=(-half, half), method="bounded",
                                  options={"xatol": 1e-9})
            if res.fun < along(0.0):
                pts[i] = space.exp(pts[i], float(res.x) * direction)
    return eta.with_points(pts)
