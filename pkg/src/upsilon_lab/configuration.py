"""Finite point configurations, windows, and Poisson sampling.

A configuration is a finite multiset of points of a base space; the stored
order is bookkeeping only.  Windows are metric balls (any model) or axis
boxes (Euclidean only); they carry the closed-boundary convention throughout.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, SpaceMismatchError
from .space_forms import Euclidean, SpaceForm, space_from_json

MULTISET_TOL = 1e-12


@dataclass(frozen=True)
class Configuration:
    """An ordered list of points standing in for the multiset it represents."""

    space: SpaceForm
    points: np.ndarray = field(default_factory=lambda: np.empty((0, 0)))

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.size == 0:
            pts = np.empty((0, self.space.ambient_dim))
        if pts.ndim != 2 or pts.shape[1] != self.space.ambient_dim:
            raise DomainError(
                f"points must have shape (n, {self.space.ambient_dim}), got {pts.shape}"
            )
        if len(pts):
            self.space.validate_point(pts)
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def is_empty(self) -> bool:
        return len(self.points) == 0

    def with_points(self, points: np.ndarray) -> "Configuration":
        return Configuration(self.space, points)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Configuration):
            return NotImplemented
        return self.space == other.space and multiset_equal(self, other)

    def __hash__(self):  # order-independent: hash only coarse invariants
        return hash((self.space, len(self.points)))

    # --- external interfaces ------------------------------------------------

    def to_json(self) -> dict:
        return {"space": self.space.to_json(), "points": self.points.tolist()}

    @staticmethod
    def from_json(obj) -> "Configuration":
        if isinstance(obj, str):
            obj = json.loads(obj)
        space = space_from_json(obj["space"])
        return Configuration(space, np.asarray(obj["points"], dtype=float))

    def to_csv(self, path) -> None:
        """One point per row; the header records the space descriptor."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([f"space={json.dumps(self.space.to_json())}"])
            writer.writerow([f"x{i}" for i in range(self.space.ambient_dim)])
            for p in self.points:
                writer.writerow([repr(v) for v in p])

    @staticmethod
    def from_csv(path) -> "Configuration":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows or not rows[0] or not rows[0][0].startswith("space="):
            raise DomainError(f"{path}: missing space header")
        space = space_from_json(rows[0][0][len("space=") :])
        body = [r for r in rows[2:] if r]
        pts = np.array([[float(v) for v in r] for r in body], dtype=float)
        if pts.size == 0:
            pts = np.empty((0, space.ambient_dim))
        return Configuration(space, pts)

    @staticmethod
    def from_file(path) -> "Configuration":
        path = str(path)
        if path.endswith(".json"):
            with open(path) as fh:
                return Configuration.from_json(json.load(fh))
        return Configuration.from_csv(path)


def multiset_equal(a: Configuration, b: Configuration, tol: float = MULTISET_TOL) -> bool:
    """Whether some point permutation matches a to b within tol."""
    if len(a) != len(b):
        return False
    if len(a) == 0:
        return True
    from scipy.optimize import linear_sum_assignment

    dist = a.space.distance_matrix(a.points, b.points)
    rows, cols = linear_sum_assignment(dist)
    return bool(dist[rows, cols].max() <= tol)


class Region:
    """A window with finite volume: a metric ball or a Euclidean box."""

    space: SpaceForm

    def volume(self) -> float:
        raise NotImplementedError

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Boolean mask, closed-region convention."""
        raise NotImplementedError

    def sample_uniform(self, size: int, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class Ball(Region):
    space: SpaceForm
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", self.space.validate_point(np.asarray(self.center, dtype=float)))
        if self.radius < 0:
            raise DomainError("ball radius must be >= 0")

    def volume(self) -> float:
        return self.space.ball_volume(self.radius)

    def contains(self, points: np.ndarray) -> np.ndarray:
        return self.space.geodesic_distance(points, self.center) <= self.radius

    def sample_uniform(self, size, rng):
        return self.space.sample_uniform_ball(self.center, self.radius, size, rng)


@dataclass(frozen=True)
class Box(Region):
    """Axis-aligned box; Euclidean models only."""

    space: SpaceForm
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        if not isinstance(self.space, Euclidean):
            raise DomainError("box regions are Euclidean-only")
        lo = np.asarray(self.lo, dtype=float)
        hi = np.asarray(self.hi, dtype=float)
        if lo.shape != (self.space.dim,) or hi.shape != (self.space.dim,):
            raise DomainError("box bounds must match the space dimension")
        if np.any(hi < lo):
            raise DomainError("box needs lo <= hi")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def volume(self) -> float:
        return float(np.prod(self.hi - self.lo))

    def contains(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        return np.all((points >= self.lo) & (points <= self.hi), axis=-1)

    def sample_uniform(self, size, rng):
        return rng.uniform(self.lo, self.hi, (size, self.space.dim))


def sample_poisson(
    space: SpaceForm, region: Region, intensity: float, rng: np.random.Generator
) -> Configuration:
    """Poisson point process on the window: count ~ Poisson(intensity * vol),
    positions i.i.d. uniform given the count."""
    if intensity <= 0:
        raise DomainError("intensity must be positive")
    vol = region.volume()
    if not math.isfinite(vol) or vol < 0:
        raise DomainError("region must have finite volume")
    count = int(rng.poisson(intensity * vol))
    if count == 0 or vol == 0:
        return Configuration(space, np.empty((0, space.ambient_dim)))
    return Configuration(space, region.sample_uniform(count, rng))


def restrict(gamma: Configuration, region: Region) -> Configuration:
    """The sub-configuration inside the (closed) region."""
    if gamma.is_empty:
        return gamma
    mask = region.contains(gamma.points)
    return gamma.with_points(gamma.points[mask])


def split(gamma: Configuration, region: Region):
    """(inside, outside) partition of gamma by the closed region."""
    if gamma.is_empty:
        return gamma, gamma
    mask = region.contains(gamma.points)
    return gamma.with_points(gamma.points[mask]), gamma.with_points(gamma.points[~mask])


def count_ball(gamma: Configuration, center: np.ndarray, r: float) -> int:
    """Number of points of gamma in the closed ball B(center, r)."""
    if gamma.is_empty:
        return 0
    d = gamma.space.geodesic_distance(gamma.points, np.asarray(center, dtype=float))
    return int(np.count_nonzero(d <= r))

def good_config_witness(
    gamma: Configuration, center: np.ndarray, alpha: float, r_max: int
) -> float:
    """Minimal C with gamma(B_r) <= C e^{alpha r} for integer r in [1, r_max].

    Finite configurations always admit a finite witness; the growth exponent
    alpha is meaningful for alpha >= 1, smaller values only draw a warning so
    the diagnostic stays usable for exploration.
    """
    if alpha <= 0:
        raise DomainError("alpha must be positive")
    if r_max < 1:
        raise DomainError("r_max must be >= 1")
    if alpha < 1.0:
        warnings.warn("growth exponent alpha < 1 is outside the good-configuration regime")
    if gamma.is_empty:
        return 0.0
    radii = np.arange(1, int(r_max) + 1)
    counts = np.array([count_ball(gamma, center, float(r)) for r in radii])
    return float(np.max(counts * np.exp(-alpha * radii)))
