"""Independent-particle heat flow on configurations.

The kernel at time t moves every point of a configuration by an independent
draw from the base-space heat kernel; cardinality is conserved.  The coupled
step drives matched point pairs with common Gaussian increments expressed in
parallel-synchronized tangent frames, which keeps the pair marginals exact
and upper-bounds the Wasserstein distance between the two kernels.
"""

from __future__ import annotations

import math

import numpy as np

from .configuration import Configuration
from .errors import DomainError, InfiniteDistanceError
from .space_forms import DEFAULT_HEAT_SUBSTEP, Euclidean
from .transport import optimal_matching


def heat_step_config(
    gamma: Configuration, t: float, rng: np.random.Generator,
    substep: float = DEFAULT_HEAT_SUBSTEP,
) -> Configuration:
    """One draw from the configuration heat kernel p_t(gamma, .)."""
    if t < 0:
        raise DomainError("heat_step_config requires t >= 0")
    if t == 0 or gamma.is_empty:
        return gamma
    return gamma.with_points(gamma.space.heat_step(gamma.points, t, rng, substep))


def heat_flow_samples(
    gamma: Configuration, t: float, n_samples: int, rng: np.random.Generator,
    substep: float = DEFAULT_HEAT_SUBSTEP,
) -> np.ndarray:
    """n_samples independent kernel draws, stacked as (n_samples, n, ambient)."""
    if n_samples <= 0:
        raise DomainError("need at least one sample")
    tiled = np.broadcast_to(gamma.points, (n_samples,) + gamma.points.shape).copy()
    if t == 0 or gamma.is_empty:
        return tiled
    return gamma.space.heat_step(tiled, t, rng, substep)


def semigroup_expectation(
    F, gamma: Configuration, t: float, n_samples: int, rng: np.random.Generator,
    substep: float = DEFAULT_HEAT_SUBSTEP,
):
    """Monte Carlo estimate (mean, standard error) of T_t F (gamma).

    F is any functional of configurations; functionals exposing
    ``eval_batch(space, points)`` are evaluated on the whole stacked sample
    array at once.  t = 0 returns (F(gamma), 0) exactly.
    """
    if n_samples <= 0:
        raise DomainError("n_samples must be positive")
    if t < 0:
        raise DomainError("semigroup_expectation requires t >= 0")
    if t == 0:
        return float(F(gamma)), 0.0
    values = semigroup_samples(F, gamma, t, n_samples, rng, substep)
    se = float(values.std(ddof=1) / math.sqrt(n_samples)) if n_samples > 1 else 0.0
    return float(values.mean()), se


def semigroup_samples(
    F, gamma: Configuration, t: float, n_samples: int, rng: np.random.Generator,
    substep: float = DEFAULT_HEAT_SUBSTEP,
) -> np.ndarray:
    """The raw Monte Carlo draws F(gamma_t^(s)) behind semigroup_expectation."""
    samples = heat_flow_samples(gamma, t, n_samples, rng, substep)
    batch = getattr(F, "eval_batch", None)
    if batch is not None:
        return np.asarray(batch(gamma.space, samples), dtype=float)
    return np.array([F(gamma.with_points(p)) for p in samples], dtype=float)


def coupled_heat_step(
    gamma: Configuration, sigma: Configuration, t: float, rng: np.random.Generator,
    substep: float = DEFAULT_HEAT_SUBSTEP,
):
    """One common-randomness draw from the two kernels p_t(gamma, .) and
    p_t(sigma, .), coupled along an optimal matching.

    On Euclidean space matched pairs receive identical increments, so the
    transport distance is conserved exactly; on curved models the increments
    agree in parallel-synchronized frames, re-synchronized every substep.
    """
    ga, sa = coupled_heat_samples(gamma, sigma, t, 1, rng, substep)
    return gamma.with_points(ga[0]), gamma.with_points(sa[0])


def coupled_heat_samples(
    gamma: Configuration, sigma: Configuration, t: float, n_samples: int,
    rng: np.random.Generator, substep: float = DEFAULT_HEAT_SUBSTEP,
):
    """n_samples coupled draws, stacked as two (n_samples, n, ambient) arrays.

    The second array is returned in matched order (sigma relabeled along the
    optimal matching); labels are bookkeeping, multiset semantics unchanged.
    """
    if t < 0:
        raise DomainError("coupled_heat_samples requires t >= 0")
    if len(gamma) != len(sigma):
        raise InfiniteDistanceError("coupling requires equal cardinalities")
    match = optimal_matching(gamma, sigma)
    space = gamma.space
    y0 = sigma.points[match.permutation] if len(sigma) else sigma.points
    xs = np.broadcast_to(gamma.points, (n_samples,) + gamma.points.shape).copy()
    ys = np.broadcast_to(y0, (n_samples,) + y0.shape).copy()
    if t == 0 or gamma.is_empty:
        return xs, ys

    if isinstance(space, Euclidean):
        z = rng.standard_normal(xs.shape)
        inc = math.sqrt(2.0 * t) * z
        return xs + inc, ys + inc

    n_sub = max(1, math.ceil(t / substep))
    h = t / n_sub
    scale = math.sqrt(2.0 * h)
    for _ in range(n_sub):
        frame_x, frame_y = space.parallel_frames(xs, ys)
        z = rng.standard_normal(xs.shape[:-1] + (space.dim,))
        vx = scale * np.einsum("...k,...kj->...j", z, frame_x)
        vy = scale * np.einsum("...k,...kj->...j", z, frame_y)
        xs = space.exp(xs, vx)
        ys = space.exp(ys, vy)
    return xs, ys
