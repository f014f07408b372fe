"""Functional catalogs and seeded instance generators.

The verification runner only ever submits bounded functionals to the heat
semigroup; the Hopf-Lax and Hamilton-Jacobi paths use Lipschitz functionals.
Everything here is deterministic given the generator passed in.
"""

from __future__ import annotations

import math

import numpy as np

from .calculus import CylinderFunction, PowerSaturated, TanhComposed, TestFunction
from .configuration import Ball, Configuration, sample_poisson
from .errors import DomainError
from .space_forms import Euclidean, SpaceForm
from .transport import d_upsilon, optimal_matching


class DistanceToConfig:
    """f(eta) = d(eta, ref): 1-Lipschitz on the cardinality fiber of ref."""

    def __init__(self, ref: Configuration):
        self.ref = ref

    def __call__(self, eta: Configuration) -> float:
        return d_upsilon(self.ref, eta).d

    def gradient(self, eta: Configuration) -> np.ndarray:
        """Euclidean per-point gradient (zero at the nonsmooth diagonal)."""
        if not isinstance(eta.space, Euclidean):
            raise DomainError("analytic gradient implemented on Euclidean models only")
        match = optimal_matching(eta, self.ref)
        diff = eta.points - self.ref.points[match.permutation]
        dist = math.sqrt(float(np.sum(diff * diff)))
        if dist <= 1e-14:
            return np.zeros_like(eta.points)
        return diff / dist

    @property
    def lipschitz_constant(self) -> float:
        return 1.0


class CylinderFunctional:
    """Adapter exposing a cylinder function as a plain configuration functional
    with a Euclidean gradient (for the Hopf-Lax inner solver)."""

    def __init__(self, F: CylinderFunction):
        self.F = F

    def __call__(self, eta: Configuration) -> float:
        return self.F(eta)

    def eval_batch(self, space, points):
        return self.F.eval_batch(space, points)

    def gradient(self, eta: Configuration) -> np.ndarray:
        from .calculus import grad_cylinder

        return grad_cylinder(self.F, eta)


class ExpCylinder:
    """f = exp(F) for a bounded cylinder F: positive, bounded away from zero,
    with log f available in closed form for the log-Harnack check."""

    def __init__(self, F: CylinderFunction):
        if not F.is_bounded:
            raise DomainError("log-Harnack catalog requires a bounded cylinder")
        self.F = F

    def __call__(self, eta: Configuration) -> float:
        return math.exp(self.F(eta))

    def eval_batch(self, space, points):
        return np.exp(self.F.eval_batch(space, points))

    def log_value(self, eta: Configuration) -> float:
        return self.F(eta)

    @property
    def log_functional(self):
        return self.F


# --------------------------------------------------------------------------
# seeded random instances
# --------------------------------------------------------------------------


def random_configuration(
    space: SpaceForm, rng: np.random.Generator, *, window_radius: float = 2.0,
    n_points: int | None = None, intensity: float = 0.5,
) -> Configuration:
    """A Poisson draw in the ball window around the origin, or exactly
    n_points uniform points when a fixed cardinality is needed."""
    window = Ball(space, space.origin(), window_radius)
    if n_points is None:
        return sample_poisson(space, window, intensity, rng)
    pts = window.sample_uniform(n_points, rng) if n_points else np.empty((0, space.ambient_dim))
    return Configuration(space, pts)


def random_bump(space: SpaceForm, rng: np.random.Generator, *,
                window_radius: float = 2.0) -> TestFunction:
    center_window = Ball(space, space.origin(), window_radius)
    center = center_window.sample_uniform(1, rng)[0]
    max_r = 2.5
    if hasattr(space, "radius"):
        max_r = min(max_r, 0.9 * math.pi * space.radius)
    radius = rng.uniform(0.8, max_r)
    amplitude = rng.uniform(0.5, 1.5) * rng.choice([-1.0, 1.0])
    return TestFunction(space, center, radius, amplitude)


def random_cylinder(
    space: SpaceForm, rng: np.random.Generator, *, n_inner: int | None = None,
    window_radius: float = 2.0, bounded: bool = True,
) -> CylinderFunction:
    """A seeded catalog member: random bumps under a bounded outer."""
    m = int(n_inner if n_inner is not None else rng.integers(1, 4))
    inners = [random_bump(space, rng, window_radius=window_radius) for _ in range(m)]
    if bounded and rng.random() < 0.5:
        outer = TanhComposed(rng.uniform(0.3, 1.0, m), scale=float(rng.uniform(0.5, 1.5)))
    else:
        outer = PowerSaturated(rng.uniform(0.3, 1.2, m))
    return CylinderFunction(outer, inners)
