"""Constant-curvature base spaces.

Three models are supported: Euclidean ``R^d``, the round 2-sphere of radius
``rho`` (embedded in ``R^3``), and the hyperbolic plane in the hyperboloid
model (Minkowski signature ``(-,+,+)``).  Each space supplies distances,
geodesics, exponential/logarithm maps, orthonormal tangent frames, heat-kernel
sampling, a Gaussian tail bound for the kernel, and closed-form ball volumes.

Conventions
-----------
* The heat semigroup has generator Delta (not Delta/2), so the Euclidean
  kernel at time t is a Gaussian with variance ``2t`` per coordinate.
* Curved-space heat sampling uses a geodesic random walk with substep ``h``
  (default 1e-3): each substep moves by the exponential of a Gaussian tangent
  vector with variance ``2h`` per tangent coordinate.
* Point arguments broadcast: methods accept arrays of shape
  ``(..., ambient_dim)`` and apply pointwise.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, InvalidPointError, NonUniqueGeodesicError

POINT_TOL = 1e-12
DEFAULT_HEAT_SUBSTEP = 1e-3


def minkowski_dot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Signature (-,+,+) inner product, broadcasting over leading axes."""
    return -a[..., 0] * b[..., 0] + np.sum(a[..., 1:] * b[..., 1:], axis=-1)


class SpaceForm:
    """Common interface of the three constant-curvature models."""

    kind: str
    dim: int

    # --- curvature constants -------------------------------------------------

    @property
    def sec_lower(self) -> float:
        """Constant sectional curvature of the model."""
        raise NotImplementedError

    @property
    def ric_lower(self) -> float:
        """Ricci lower bound K = (dim - 1) * sec_lower (equality on space forms)."""
        return (self.dim - 1) * self.sec_lower

    @property
    def ambient_dim(self) -> int:
        raise NotImplementedError

    def origin(self) -> np.ndarray:
        """A canonical base point (homogeneity makes the choice immaterial)."""
        raise NotImplementedError

    # --- points and tangent vectors ------------------------------------------

    def is_valid_point(self, x: np.ndarray) -> bool:
        raise NotImplementedError

    def validate_point(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.ambient_dim or not self.is_valid_point(x):
            raise InvalidPointError(
                f"point with shape {x.shape} is not on the {self.kind} model surface"
            )
        return x

    def tangent_dot(self, x: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Metric inner product of tangent vectors at x."""
        raise NotImplementedError

    def tangent_frame(self, x: np.ndarray) -> np.ndarray:
        """Orthonormal tangent basis at x, shape ``(..., dim, ambient_dim)``."""
        raise NotImplementedError

    def parallel_frames(self, x: np.ndarray, y: np.ndarray):
        """Orthonormal frames at x and at y, synchronized by parallel transport
        along the connecting geodesic.  Used for coupled heat steps."""
        raise NotImplementedError

    # --- geodesics ------------------------------------------------------------

    def geodesic_distance(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def geodesic_point(self, x: np.ndarray, y: np.ndarray, s: float) -> np.ndarray:
        """Point at parameter s in [0, 1] on the unique geodesic from x to y."""
        raise NotImplementedError

    def exp(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Exponential map: follow the geodesic from x with initial velocity v
        for unit time."""
        raise NotImplementedError

    def log(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Inverse of ``exp`` at x; the tangent norm of the result is d(x, y)."""
        raise NotImplementedError

    def distance_matrix(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """All pairwise distances, shape ``(len(a), len(b))``."""
        return self.geodesic_distance(a[:, None, :], b[None, :, :])

    # --- heat kernel ------------------------------------------------------------

    def heat_step(
        self,
        x: np.ndarray,
        t: float,
        rng: np.random.Generator,
        substep: float = DEFAULT_HEAT_SUBSTEP,
    ) -> np.ndarray:
        """One draw from the heat kernel p_t(x, .); handles a batch of points.

        Exact on Euclidean space; geodesic random walk with ``ceil(t/substep)``
        substeps on the curved models (weak error O(substep)).
        """
        if t < 0:
            raise DomainError("heat_step requires t >= 0")
        x = np.asarray(x, dtype=float)
        if t == 0:
            return x.copy()
        return self._heat_step_positive(x, t, rng, substep)

    def _heat_step_positive(self, x, t, rng, substep):
        n_sub = max(1, math.ceil(t / substep))
        h = t / n_sub
        scale = math.sqrt(2.0 * h)
        batch_shape = x.shape[:-1]
        for _ in range(n_sub):
            frame = self.tangent_frame(x)
            z = rng.standard_normal(batch_shape + (self.dim,))
            v = scale * np.einsum("...k,...kj->...j", z, frame)
            x = self.exp(x, v)
        return x

    def heat_tail_bound(self, r: float, t: float, lam: float) -> float:
        """Upper bound on P[ sup_{s<=t} d(B_s, x) >= r ] for Brownian motion
        with generator Delta.

        Value: ``2/sqrt(1-lam) * exp(-lam r^2/(2t) + lam (2d + Kd^2 t)/(1-lam))``
        with d = dim and K = max(0, -ric_lower); nonnegative curvature uses
        K = 0 since the bound is nondecreasing in K.
        """
        if not 0.0 < lam < 1.0:
            raise DomainError("lambda must lie in (0, 1)")
        if t <= 0:
            raise DomainError("heat_tail_bound requires t > 0")
        if r < 0:
            raise DomainError("heat_tail_bound requires r >= 0")
        d = self.dim
        k_neg = max(0.0, -self.ric_lower)
        exponent = -lam * r * r / (2.0 * t) + lam * (2 * d + k_neg * d * d * t) / (1.0 - lam)
        return 2.0 / math.sqrt(1.0 - lam) * math.exp(exponent)

    # --- volume -----------------------------------------------------------------

    def ball_volume(self, r: float) -> float:
        """Riemannian volume of a metric ball of radius r (center-independent)."""
        raise NotImplementedError

    def min_ball_volume_constants(self) -> tuple[float, float]:
        """Constants (kappa, N) with ball_volume(r) >= kappa * r^N for r in (0, 1/2]."""
        raise NotImplementedError

    def sample_uniform_ball(
        self, center: np.ndarray, r: float, size: int, rng: np.random.Generator
    ) -> np.ndarray:
        """size i.i.d. points uniform (w.r.t. volume) on the closed ball B(center, r)."""
        raise NotImplementedError

    # --- radial data for test-function calculus ---------------------------------

    def radial_unit_gradient(self, x: np.ndarray, center: np.ndarray) -> np.ndarray:
        """Gradient of d(., center) at x: the unit tangent pointing away from
        center; zero vector at x == center."""
        raise NotImplementedError

    def cot_generalized(self, r: np.ndarray) -> np.ndarray:
        """ct_K(r): sqrt(K) cot(sqrt(K) r), 1/r, or coth(r) according to the
        sign of the sectional curvature.  Governs Hess d = ct_K (g - dr x dr)."""
        raise NotImplementedError

    # --- serialization ------------------------------------------------------------

    def to_json(self) -> dict:
        raise NotImplementedError

    def __repr__(self):  # pragma: no cover - debugging aid
        return f"{type(self).__name__}({self.to_json()})"

    def __eq__(self, other):
        return isinstance(other, SpaceForm) and self.to_json() == other.to_json()

    def __hash__(self):
        return hash(tuple(sorted(self.to_json().items())))


class Euclidean(SpaceForm):
    """Flat R^d with the standard metric."""

    kind = "euclidean"

    def __init__(self, dim: int):
        if dim < 1:
            raise DomainError("euclidean dimension must be >= 1")
        self.dim = int(dim)

    @property
    def sec_lower(self) -> float:
        return 0.0

    @property
    def ambient_dim(self) -> int:
        return self.dim

    def origin(self) -> np.ndarray:
        return np.zeros(self.dim)

    def is_valid_point(self, x) -> bool:
        return bool(np.all(np.isfinite(x)))

    def tangent_dot(self, x, u, v):
        return np.sum(u * v, axis=-1)

    def tangent_frame(self, x):
        x = np.asarray(x, dtype=float)
        frame = np.eye(self.dim)
        return np.broadcast_to(frame, x.shape[:-1] + (self.dim, self.dim)).copy()

    def parallel_frames(self, x, y):
        f = self.tangent_frame(x)
        return f, f.copy()

    def geodesic_distance(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return np.linalg.norm(x - y, axis=-1)

    def geodesic_point(self, x, y, s):
        _check_unit_interval(s)
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return (1.0 - s) * x + s * y

    def exp(self, x, v):
        return np.asarray(x, dtype=float) + v

    def log(self, x, y):
        return np.asarray(y, dtype=float) - np.asarray(x, dtype=float)

    def _heat_step_positive(self, x, t, rng, substep):
        # exact Gaussian increment; substepping is unnecessary on flat space
        return x + math.sqrt(2.0 * t) * rng.standard_normal(x.shape)

    def ball_volume(self, r: float) -> float:
        if r < 0:
            raise DomainError("ball radius must be >= 0")
        d = self.dim
        unit = math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0)
        return unit * r**d

    def min_ball_volume_constants(self):
        return self.ball_volume(1.0), float(self.dim)

    def sample_uniform_ball(self, center, r, size, rng):
        d = self.dim
        z = rng.standard_normal((size, d))
        z /= np.maximum(np.linalg.norm(z, axis=-1, keepdims=True), 1e-300)
        radii = r * rng.random(size) ** (1.0 / d)
        return np.asarray(center, dtype=float) + radii[:, None] * z

    def radial_unit_gradient(self, x, center):
        diff = np.asarray(x, dtype=float) - np.asarray(center, dtype=float)
        r = np.linalg.norm(diff, axis=-1, keepdims=True)
        safe = np.where(r > POINT_TOL, r, 1.0)
        return np.where(r > POINT_TOL, diff / safe, 0.0)

    def cot_generalized(self, r):
        return 1.0 / np.asarray(r, dtype=float)

    def to_json(self):
        return {"kind": self.kind, "dim": self.dim}


class Sphere2(SpaceForm):
    """Round 2-sphere of radius rho, embedded in R^3 with |x| = rho."""

    kind = "sphere2"
    dim = 2

    def __init__(self, radius: float = 1.0):
        if radius <= 0:
            raise DomainError("sphere radius must be positive")
        self.radius = float(radius)

    @property
    def sec_lower(self) -> float:
        return 1.0 / self.radius**2

    @property
    def ambient_dim(self) -> int:
        return 3

    def origin(self) -> np.ndarray:
        return np.array([0.0, 0.0, self.radius])

    def is_valid_point(self, x) -> bool:
        norms = np.linalg.norm(np.asarray(x, dtype=float), axis=-1)
        return bool(np.all(np.abs(norms - self.radius) <= 1e-12 * max(1.0, self.radius)))

    def _project(self, x):
        return x * (self.radius / np.linalg.norm(x, axis=-1, keepdims=True))

    def tangent_dot(self, x, u, v):
        return np.sum(u * v, axis=-1)

    def tangent_frame(self, x):
        x = np.asarray(x, dtype=float)
        xhat = x / self.radius
        # axis least aligned with x gives a stable first tangent direction
        batch = xhat.reshape(-1, 3)
        idx = np.argmin(np.abs(batch), axis=-1)
        a = np.zeros_like(batch)
        a[np.arange(len(batch)), idx] = 1.0
        a = a.reshape(xhat.shape)
        e1 = a - np.sum(a * xhat, axis=-1, keepdims=True) * xhat
        e1 /= np.linalg.norm(e1, axis=-1, keepdims=True)
        e2 = np.cross(xhat, e1)
        return np.stack([e1, e2], axis=-2)

    def parallel_frames(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        d = self.geodesic_distance(x, y)
        if np.ndim(d) == 0 and d <= POINT_TOL:
            f = self.tangent_frame(x)
            return f, f.copy()
        theta = d / self.radius
        if np.any(np.abs(theta - math.pi) < 1e-9):
            raise NonUniqueGeodesicError("antipodal points have no unique geodesic")
        xhat = x / self.radius
        u = self.log(x, y)
        norm_u = np.linalg.norm(u, axis=-1, keepdims=True)
        small = norm_u[..., 0] <= POINT_TOL
        u = np.where(norm_u > POINT_TOL, u / np.maximum(norm_u, 1e-300), 0.0)
        w = np.cross(xhat, u)
        theta_e = theta[..., None] if np.ndim(theta) else theta
        u_y = -np.sin(theta_e) * xhat + np.cos(theta_e) * u
        frame_x = np.stack([u, w], axis=-2)
        frame_y = np.stack([u_y, w], axis=-2)
        if np.any(small):
            fallback = self.tangent_frame(x)
            frame_x = np.where(small[..., None, None], fallback, frame_x)
            frame_y = np.where(small[..., None, None], fallback, frame_y)
        return frame_x, frame_y

    def geodesic_distance(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        rho2 = self.radius**2
        cross = np.linalg.norm(np.cross(x, y), axis=-1)
        dot = np.sum(x * y, axis=-1)
        return self.radius * np.arctan2(cross / rho2, dot / rho2)

    def geodesic_point(self, x, y, s):
        _check_unit_interval(s)
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        theta = self.geodesic_distance(x, y) / self.radius
        theta = np.asarray(theta)
        if np.any(np.abs(theta - math.pi) < 1e-9):
            raise NonUniqueGeodesicError("antipodal points have no unique geodesic")
        sin_theta = np.sin(theta)
        tiny = sin_theta <= POINT_TOL
        safe_sin = np.where(tiny, 1.0, sin_theta)
        z = (
            np.sin((1.0 - s) * theta)[..., None] * x
            + np.sin(s * theta)[..., None] * y
        ) / safe_sin[..., None]
        z = np.where(tiny[..., None], x, z)
        return self._project(z)

    def exp(self, x, v):
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        norm_v = np.linalg.norm(v, axis=-1, keepdims=True)
        theta = norm_v / self.radius
        tiny = norm_v <= POINT_TOL
        unit = np.where(tiny, 0.0, v / np.maximum(norm_v, 1e-300))
        z = np.cos(theta) * x + self.radius * np.sin(theta) * unit
        return self._project(z)

    def log(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        d = self.geodesic_distance(x, y)
        proj = y - (np.sum(x * y, axis=-1, keepdims=True) / self.radius**2) * x
        norm_p = np.linalg.norm(proj, axis=-1, keepdims=True)
        scale = np.where(norm_p > POINT_TOL, d[..., None] / np.maximum(norm_p, 1e-300), 0.0)
        return proj * scale

    def ball_volume(self, r: float) -> float:
        if r < 0:
            raise DomainError("ball radius must be >= 0")
        if r > math.pi * self.radius + 1e-12:
            raise DomainError("sphere ball radius exceeds pi * rho")
        r = min(r, math.pi * self.radius)
        return 2.0 * math.pi * self.radius**2 * (1.0 - math.cos(r / self.radius))

    def min_ball_volume_constants(self):
        # 1 - cos(u) >= 2 u^2 / pi^2 on [0, pi] gives vol >= (4/pi) r^2
        return 4.0 / math.pi, 2.0

    def sample_uniform_ball(self, center, r, size, rng):
        # uniform height over the cap (area-preserving cylindrical coordinates)
        center = np.asarray(center, dtype=float)
        cos_max = math.cos(min(r / self.radius, math.pi))
        u = rng.uniform(cos_max, 1.0, size)
        colat = np.arccos(u)
        phi = rng.uniform(0.0, 2.0 * math.pi, size)
        frame = self.tangent_frame(center)
        direction = np.cos(phi)[:, None] * frame[0] + np.sin(phi)[:, None] * frame[1]
        return self.exp(
            np.broadcast_to(center, (size, 3)), (self.radius * colat)[:, None] * direction
        )

    def radial_unit_gradient(self, x, center):
        d = self.geodesic_distance(x, np.asarray(center, dtype=float))
        v = self.log(x, np.broadcast_to(np.asarray(center, dtype=float), np.shape(x)))
        safe = np.where(d > POINT_TOL, d, 1.0)
        return np.where(d[..., None] > POINT_TOL, -v / safe[..., None], 0.0)

    def cot_generalized(self, r):
        r = np.asarray(r, dtype=float)
        return np.cos(r / self.radius) / (self.radius * np.sin(r / self.radius))

    def to_json(self):
        return {"kind": self.kind, "dim": self.dim, "radius": self.radius}


class Hyperbolic2(SpaceForm):
    """Hyperbolic plane in the hyperboloid model: <x,x> = -1, x0 > 0, with
    the (-,+,+) Minkowski form."""

    kind = "hyperbolic2"
    dim = 2

    @property
    def sec_lower(self) -> float:
        return -1.0

    @property
    def ambient_dim(self) -> int:
        return 3

    def origin(self) -> np.ndarray:
        return np.array([1.0, 0.0, 0.0])

    def is_valid_point(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        q = minkowski_dot(x, x)
        return bool(np.all(np.abs(q + 1.0) <= 1e-12) and np.all(x[..., 0] > 0))

    def _project(self, x):
        # renormalize onto the hyperboloid sheet
        q = -minkowski_dot(x, x)
        return x / np.sqrt(q)[..., None]

    def tangent_dot(self, x, u, v):
        return minkowski_dot(u, v)

    def tangent_frame(self, x):
        x = np.asarray(x, dtype=float)
        shape = x.shape[:-1]
        a1 = np.zeros(shape + (3,))
        a1[..., 1] = 1.0
        a2 = np.zeros(shape + (3,))
        a2[..., 2] = 1.0
        # Minkowski projection onto the tangent space: v = a + <x,a> x
        v1 = a1 + minkowski_dot(x, a1)[..., None] * x
        v1 /= np.sqrt(minkowski_dot(v1, v1))[..., None]
        v2 = a2 + minkowski_dot(x, a2)[..., None] * x
        v2 = v2 - minkowski_dot(v1, v2)[..., None] * v1
        v2 /= np.sqrt(minkowski_dot(v2, v2))[..., None]
        return np.stack([v1, v2], axis=-2)

    def parallel_frames(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        d = self.geodesic_distance(x, y)
        u = self.log(x, y)
        norm_u = np.sqrt(np.maximum(minkowski_dot(u, u), 0.0))[..., None]
        small = norm_u[..., 0] <= POINT_TOL
        u = np.where(norm_u > POINT_TOL, u / np.maximum(norm_u, 1e-300), 0.0)
        # Minkowski-orthogonal completion of the geodesic direction
        frame0 = self.tangent_frame(x)
        w = frame0[..., 0, :] - minkowski_dot(frame0[..., 0, :], u)[..., None] * u
        wn = np.sqrt(np.maximum(minkowski_dot(w, w), 0.0))[..., None]
        degenerate = wn[..., 0] <= 1e-8
        if np.any(degenerate):
            alt = frame0[..., 1, :] - minkowski_dot(frame0[..., 1, :], u)[..., None] * u
            altn = np.sqrt(np.maximum(minkowski_dot(alt, alt), 0.0))[..., None]
            w = np.where(degenerate[..., None], alt, w)
            wn = np.where(degenerate[..., None], altn, wn)
        w = w / np.maximum(wn, 1e-300)
        d_e = d[..., None] if np.ndim(d) else d
        u_y = np.sinh(d_e) * x + np.cosh(d_e) * u
        frame_x = np.stack([u, w], axis=-2)
        frame_y = np.stack([u_y, w], axis=-2)
        if np.any(small):
            frame_x = np.where(small[..., None, None], frame0, frame_x)
            frame_y = np.where(small[..., None, None], frame0, frame_y)
        return frame_x, frame_y

    def geodesic_distance(self, x, y):
        # chordal formula: <x-y, x-y> = 4 sinh^2(d/2); precise for small d
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        diff = x - y
        q = np.maximum(minkowski_dot(diff, diff), 0.0)
        return 2.0 * np.arcsinh(0.5 * np.sqrt(q))

    def geodesic_point(self, x, y, s):
        _check_unit_interval(s)
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        d = np.asarray(self.geodesic_distance(x, y))
        sinh_d = np.sinh(d)
        tiny = sinh_d <= POINT_TOL
        safe = np.where(tiny, 1.0, sinh_d)
        z = (
            np.sinh((1.0 - s) * d)[..., None] * x + np.sinh(s * d)[..., None] * y
        ) / safe[..., None]
        z = np.where(tiny[..., None], x, z)
        return self._project(z)

    def exp(self, x, v):
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        norm_v = np.sqrt(np.maximum(minkowski_dot(v, v), 0.0))[..., None]
        tiny = norm_v <= POINT_TOL
        unit = np.where(tiny, 0.0, v / np.maximum(norm_v, 1e-300))
        z = np.cosh(norm_v) * x + np.sinh(norm_v) * unit
        return self._project(z)

    def log(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        d = np.asarray(self.geodesic_distance(x, y))
        u = y - np.cosh(d)[..., None] * x
        norm_u = np.sqrt(np.maximum(minkowski_dot(u, u), 0.0))[..., None]
        scale = np.where(norm_u > POINT_TOL, d[..., None] / np.maximum(norm_u, 1e-300), 0.0)
        return u * scale

    def ball_volume(self, r: float) -> float:
        if r < 0:
            raise DomainError("ball radius must be >= 0")
        return 2.0 * math.pi * (math.cosh(r) - 1.0)

    def min_ball_volume_constants(self):
        # cosh(r) - 1 >= r^2 / 2 gives vol >= pi r^2
        return math.pi, 2.0

    def sample_uniform_ball(self, center, r, size, rng):
        # inverse-CDF radius for polar density sinh(s), uniform angle
        center = np.asarray(center, dtype=float)
        u = rng.random(size)
        radii = np.arccosh(1.0 + u * (math.cosh(r) - 1.0))
        phi = rng.uniform(0.0, 2.0 * math.pi, size)
        frame = self.tangent_frame(center)
        direction = np.cos(phi)[:, None] * frame[0] + np.sin(phi)[:, None] * frame[1]
        return self.exp(np.broadcast_to(center, (size, 3)), radii[:, None] * direction)

    def radial_unit_gradient(self, x, center):
        d = self.geodesic_distance(x, np.asarray(center, dtype=float))
        v = self.log(x, np.broadcast_to(np.asarray(center, dtype=float), np.shape(x)))
        safe = np.where(d > POINT_TOL, d, 1.0)
        return np.where(d[..., None] > POINT_TOL, -v / safe[..., None], 0.0)

    def cot_generalized(self, r):
        r = np.asarray(r, dtype=float)
        return np.cosh(r) / np.sinh(r)

    def to_json(self):
        return {"kind": self.kind, "dim": self.dim}


def _check_unit_interval(s: float) -> None:
    if not 0.0 <= s <= 1.0:
        raise DomainError("geodesic parameter s must lie in [0, 1]")


def make_space(kind: str, dim: int | None = None, radius: float = 1.0) -> SpaceForm:
    """Factory used by the JSON/TOML interfaces."""
    if kind == "euclidean":
        if dim is None:
            raise DomainError("euclidean space needs a dimension")
        return Euclidean(dim)
    if kind == "sphere2":
        return Sphere2(radius)
    if kind == "hyperbolic2":
        return Hyperbolic2()
    raise DomainError(f"unknown space kind {kind!r}")


def space_from_json(obj) -> SpaceForm:
    if isinstance(obj, str):
        import json

        obj = json.loads(obj)
    return make_space(obj["kind"], obj.get("dim"), obj.get("radius", 1.0))
