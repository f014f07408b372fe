"""Cylinder functions and their first/second-order Gamma calculus.

A cylinder function is F(gamma) = g(<phi_1, gamma>, ..., <phi_m, gamma>) with
a smooth outer g and compactly supported radial bumps phi_i.  On the three
constant-curvature models every operator below has a closed form built from
per-point radial data:

* bump profile  psi(u) = exp(1 - 1/(1 - u^2)) on [0, 1), 0 outside, psi(0)=1;
* phi(x) = a psi(r/R) with r the distance to the bump center;
* grad phi = (a/R) psi'(r/R) grad r,  |grad r| = 1;
* Hess phi = A dr x dr + B (g - dr x dr), where A = (a/R^2) psi''(r/R) and
  B = (a/R) psi'(r/R) ct_K(r); ct_K is the generalized cotangent and
  Hess r = ct_K(r) (g - dr x dr) on a space form;
* Gamma(phi_i, phi_j) = <grad phi_i, grad phi_j>;
* Gamma_2(phi_i, phi_j) = <Hess phi_i, Hess phi_j>_HS + K <grad phi_i, grad phi_j>
  with K the (constant) Ricci curvature.

All evaluators accept stacked point arrays of shape (..., n, ambient) so that
Monte-Carlo batches stay vectorized.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .configuration import Configuration
from .errors import DomainError, SpaceMismatchError
from .space_forms import Hyperbolic2, SpaceForm, Sphere2, minkowski_dot, space_from_json

_CENTER_TOL = 1e-13


def bump_profile(u: np.ndarray) -> np.ndarray:
    """psi(u) = exp(1 - 1/(1-u^2)) for |u| < 1, 0 outside; psi(0) = 1."""
    u = np.asarray(u, dtype=float)
    inside = np.abs(u) < 1.0
    safe = np.where(inside, u, 0.0)
    w = 1.0 - safe * safe
    with np.errstate(under="ignore"):
        val = np.exp(1.0 - 1.0 / w)
    return np.where(inside, val, 0.0)


def _profile_derivatives(u: np.ndarray):
    """(psi, psi', psi'') evaluated together; zero outside the support."""
    u = np.asarray(u, dtype=float)
    inside = np.abs(u) < 1.0
    safe = np.where(inside, u, 0.0)
    w = 1.0 - safe * safe
    inv = 1.0 / w
    with np.errstate(under="ignore"):
        psi = np.exp(1.0 - inv)
    p = -2.0 * safe * inv * inv  # psi'/psi
    dpsi = psi * p
    ddpsi = psi * (p * p - 2.0 * inv * inv - 8.0 * safe * safe * inv * inv * inv)
    zero = np.zeros_like(psi)
    return (
        np.where(inside, psi, zero),
        np.where(inside, dpsi, zero),
        np.where(inside, ddpsi, zero),
    )


@dataclass(frozen=True)
class TestFunction:
    """A smooth compactly supported radial bump on the base space."""

    space: SpaceForm
    center: np.ndarray
    radius: float
    amplitude: float = 1.0

    def __post_init__(self):
        object.__setattr__(
            self, "center", self.space.validate_point(np.asarray(self.center, dtype=float))
        )
        if self.radius <= 0:
            raise DomainError("bump radius must be positive")
        if isinstance(self.space, Sphere2) and self.radius >= math.pi * self.space.radius:
            raise DomainError("bump support must stay inside the sphere injectivity radius")

    def value(self, points: np.ndarray) -> np.ndarray:
        r = self.space.geodesic_distance(points, self.center)
        return self.amplitude * bump_profile(r / self.radius)

    def point_data(self, points: np.ndarray):
        """Radial derivative data at each point.

        Returns (value, grad, A, B, lap, u_rad, u_norm2); grad and u_rad are
        ambient tangent vectors, A/B the radial and transverse Hessian
        eigenvalues, lap the Laplacian, u_norm2 is 1 away from the center and
        0 at it (where the radial direction degenerates but the Hessian is
        isotropic: A = B there).
        """
        points = np.asarray(points, dtype=float)
        r = self.space.geodesic_distance(points, self.center)
        u = r / self.radius
        psi, dpsi, ddpsi = _profile_derivatives(u)
        a, R = self.amplitude, self.radius

        value = a * psi
        A = (a / R**2) * ddpsi

        at_center = r <= _CENTER_TOL
        r_safe = np.where(at_center, 1.0, r)
        ct = self.space.cot_generalized(r_safe)
        B = np.where(at_center, A, (a / R) * dpsi * ct)

        u_rad = self.space.radial_unit_gradient(points, self.center)
        grad = ((a / R) * dpsi)[..., None] * u_rad
        lap = A + B * (self.space.dim - 1)
        # degenerate center: isotropic Hessian, trace = A * dim
        lap = np.where(at_center, A * self.space.dim, lap)
        u_norm2 = np.where(at_center | (u >= 1.0), 0.0, 1.0)
        return value, grad, A, B, lap, u_rad, u_norm2

    def to_json(self) -> dict:
        return {
            "center": self.center.tolist(),
            "radius": self.radius,
            "amplitude": self.amplitude,
        }

    @staticmethod
    def from_json(space: SpaceForm, obj: dict) -> "TestFunction":
        return TestFunction(space, np.asarray(obj["center"], dtype=float),
                            float(obj["radius"]), float(obj.get("amplitude", 1.0)))


# --------------------------------------------------------------------------
# outer catalog: smooth maps R^m -> R with closed-form first/second partials
# --------------------------------------------------------------------------


class OuterFunction:
    """Protocol: value/grad/hess broadcast over leading axes of v (..., m)."""

    kind: str
    is_bounded: bool = False

    def value(self, v: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def grad(self, v: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def hess(self, v: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError


class Linear(OuterFunction):
    kind = "linear"

    def __init__(self, coeffs, const: float = 0.0):
        self.coeffs = np.asarray(coeffs, dtype=float)
        self.const = float(const)

    def value(self, v):
        return self.const + np.sum(v * self.coeffs, axis=-1)

    def grad(self, v):
        return np.broadcast_to(self.coeffs, np.shape(v)).copy()

    def hess(self, v):
        m = len(self.coeffs)
        return np.zeros(np.shape(v)[:-1] + (m, m))

    def to_json(self):
        return {"kind": self.kind, "coeffs": self.coeffs.tolist(), "const": self.const}


class Product(OuterFunction):
    """g(v) = prod_i v_i."""

    kind = "product"

    def __init__(self, m: int):
        self.m = int(m)

    def value(self, v):
        return np.prod(v, axis=-1)

    def grad(self, v):
        m = self.m
        out = np.empty(np.shape(v))
        for i in range(m):
            idx = [j for j in range(m) if j != i]
            out[..., i] = np.prod(v[..., idx], axis=-1) if idx else 1.0
        return out

    def hess(self, v):
        m = self.m
        out = np.zeros(np.shape(v)[:-1] + (m, m))
        for i in range(m):
            for j in range(m):
                if i == j:
                    continue
                idx = [k for k in range(m) if k not in (i, j)]
                out[..., i, j] = np.prod(v[..., idx], axis=-1) if idx else 1.0
        return out

    def to_json(self):
        return {"kind": self.kind, "m": self.m}


class PowerSaturated(OuterFunction):
    """g(v) = sum_i c_i v_i / sqrt(1 + v_i^2); bounded with bounded derivatives."""

    kind = "power_saturated"
    is_bounded = True

    def __init__(self, coeffs):
        self.coeffs = np.asarray(coeffs, dtype=float)

    def value(self, v):
        return np.sum(self.coeffs * v / np.sqrt(1.0 + v * v), axis=-1)

    def grad(self, v):
        return self.coeffs * (1.0 + v * v) ** -1.5

    def hess(self, v):
        m = len(self.coeffs)
        diag = self.coeffs * (-3.0) * v * (1.0 + v * v) ** -2.5
        out = np.zeros(np.shape(v)[:-1] + (m, m))
        idx = np.arange(m)
        out[..., idx, idx] = diag
        return out

    def to_json(self):
        return {"kind": self.kind, "coeffs": self.coeffs.tolist()}


class TanhComposed(OuterFunction):
    """g(v) = scale * tanh(<w, v>); bounded with bounded derivatives."""

    kind = "tanh"
    is_bounded = True

    def __init__(self, weights, scale: float = 1.0):
        self.weights = np.asarray(weights, dtype=float)
        self.scale = float(scale)

    def value(self, v):
        return self.scale * np.tanh(np.sum(v * self.weights, axis=-1))

    def grad(self, v):
        th = np.tanh(np.sum(v * self.weights, axis=-1))
        return self.scale * (1.0 - th * th)[..., None] * self.weights

    def hess(self, v):
        th = np.tanh(np.sum(v * self.weights, axis=-1))
        factor = self.scale * (-2.0) * th * (1.0 - th * th)
        return factor[..., None, None] * np.outer(self.weights, self.weights)

    def to_json(self):
        return {"kind": self.kind, "weights": self.weights.tolist(), "scale": self.scale}


class BlockSum(OuterFunction):
    """g((u, v)) = left(u) + sign * right(v); used for polarization identities."""

    kind = "block_sum"

    def __init__(self, left: OuterFunction, m_left: int, right: OuterFunction,
                 m_right: int, sign: float = 1.0):
        self.left, self.right = left, right
        self.m_left, self.m_right = int(m_left), int(m_right)
        self.sign = float(sign)
        self.is_bounded = left.is_bounded and right.is_bounded

    def value(self, v):
        return self.left.value(v[..., : self.m_left]) + self.sign * self.right.value(
            v[..., self.m_left :]
        )

    def grad(self, v):
        gl = self.left.grad(v[..., : self.m_left])
        gr = self.right.grad(v[..., self.m_left :])
        return np.concatenate([gl, self.sign * gr], axis=-1)

    def hess(self, v):
        m = self.m_left + self.m_right
        out = np.zeros(np.shape(v)[:-1] + (m, m))
        out[..., : self.m_left, : self.m_left] = self.left.hess(v[..., : self.m_left])
        out[..., self.m_left :, self.m_left :] = self.sign * self.right.hess(
            v[..., self.m_left :]
        )
        return out

    def to_json(self):
        raise DomainError("block-sum outers are not part of the serializable catalog")


def outer_from_json(obj: dict) -> OuterFunction:
    kind = obj["kind"]
    if kind == "linear":
        return Linear(obj["coeffs"], obj.get("const", 0.0))
    if kind == "product":
        return Product(obj["m"])
    if kind == "power_saturated":
        return PowerSaturated(obj["coeffs"])
    if kind == "tanh":
        return TanhComposed(obj["weights"], obj.get("scale", 1.0))
    raise DomainError(f"unknown outer kind {kind!r}")


# --------------------------------------------------------------------------
# cylinder functions
# --------------------------------------------------------------------------


class CylinderFunction:
    """F(gamma) = outer(<phi_1, gamma>, ..., <phi_m, gamma>)."""

    def __init__(self, outer: OuterFunction, inners):
        inners = list(inners)
        if not inners:
            raise DomainError("a cylinder function needs at least one inner bump")
        space = inners[0].space
        if any(tf.space != space for tf in inners):
            raise SpaceMismatchError("all inner bumps must share one space")
        self.outer = outer
        self.inners = inners
        self.space = space

    @property
    def m(self) -> int:
        return len(self.inners)

    @property
    def is_bounded(self) -> bool:
        return self.outer.is_bounded

    def pairings(self, points: np.ndarray) -> np.ndarray:
        """<phi_i, gamma> for stacked points (..., n, ambient) -> (..., m)."""
        points = np.asarray(points, dtype=float)
        if points.shape[-2] == 0:
            return np.zeros(points.shape[:-2] + (self.m,))
        vals = [tf.value(points) for tf in self.inners]  # each (..., n)
        return np.stack([v.sum(axis=-1) for v in vals], axis=-1)

    def eval_points(self, points: np.ndarray) -> np.ndarray:
        return self.outer.value(self.pairings(points))

    def __call__(self, gamma: Configuration) -> float:
        self._check(gamma)
        return float(self.eval_points(gamma.points))

    def eval_batch(self, space: SpaceForm, points: np.ndarray) -> np.ndarray:
        return self.eval_points(points)

    def _check(self, gamma: Configuration) -> None:
        if gamma.space != self.space:
            raise SpaceMismatchError("configuration and cylinder function spaces differ")

    def _inner_data(self, points: np.ndarray):
        """Stacked radial data for all inners: arrays keyed (..., n, m[, ambient])."""
        data = [tf.point_data(points) for tf in self.inners]
        stack = lambda k: np.stack([d[k] for d in data], axis=-1)
        V = stack(0)
        G = np.stack([d[1] for d in data], axis=-2)  # (..., n, m, ambient)
        A = stack(2)
        B = stack(3)
        L = stack(4)
        U = np.stack([d[5] for d in data], axis=-2)
        N2 = stack(6)
        return V, G, A, B, L, U, N2

    def _tdot(self, u, v):
        """Metric inner product of tangent vectors (constant in ambient coords)."""
        if isinstance(self.space, Hyperbolic2):
            return minkowski_dot(u, v)
        return np.sum(u * v, axis=-1)

    def to_json(self) -> dict:
        return {
            "space": self.space.to_json(),
            "outer": self.outer.to_json(),
            "inners": [tf.to_json() for tf in self.inners],
        }

    @staticmethod
    def from_json(obj) -> "CylinderFunction":
        if isinstance(obj, str):
            obj = json.loads(obj)
        space = space_from_json(obj["space"])
        inners = [TestFunction.from_json(space, o) for o in obj["inners"]]
        return CylinderFunction(outer_from_json(obj["outer"]), inners)


# --------------------------------------------------------------------------
# operators
# --------------------------------------------------------------------------


def eval_cylinder(F: CylinderFunction, gamma: Configuration) -> float:
    return F(gamma)


def grad_cylinder(F: CylinderFunction, gamma: Configuration) -> np.ndarray:
    """Per-point tangent vectors of the lifted gradient, shape (n, ambient)."""
    F._check(gamma)
    return grad_cylinder_points(F, gamma.points)


def grad_cylinder_points(F: CylinderFunction, points: np.ndarray) -> np.ndarray:
    points = np.asarray(points, dtype=float)
    if points.shape[-2] == 0:
        return np.zeros(points.shape)
    V, G, *_ = F._inner_data(points)
    gi = F.outer.grad(V.sum(axis=-2))  # (..., m)
    return np.einsum("...m,...nmj->...nj", gi, G)


def gamma_cylinder(F: CylinderFunction, gamma: Configuration) -> float:
    F._check(gamma)
    return float(gamma_cylinder_points(F, gamma.points))


def gamma_cylinder_points(F: CylinderFunction, points: np.ndarray) -> np.ndarray:
    """Carre du champ of F: sum_{i,j} g_i g_j <Gamma(phi_i, phi_j), gamma>."""
    points = np.asarray(points, dtype=float)
    if points.shape[-2] == 0:
        return np.zeros(points.shape[:-2])
    V, G, *_ = F._inner_data(points)
    gi = F.outer.grad(V.sum(axis=-2))
    gmat = _gamma_matrix(F, G)
    return np.einsum("...i,...j,...ij->...", gi, gi, gmat)


def _gamma_matrix(F: CylinderFunction, G: np.ndarray) -> np.ndarray:
    """<Gamma(phi_i, phi_j), gamma> summed over points: (..., m, m)."""
    dots = F._tdot(G[..., :, None, :], G[..., None, :, :])  # (..., n, m, m)
    return dots.sum(axis=-3)


def gamma_cylinder_pair(F: CylinderFunction, G_fun: CylinderFunction,
                        gamma: Configuration) -> float:
    """Bilinear carre du champ Gamma(F, G) in closed form."""
    F._check(gamma)
    G_fun._check(gamma)
    points = gamma.points
    if len(gamma) == 0:
        return 0.0
    _, GF, *_ = F._inner_data(points)
    _, GG, *_ = G_fun._inner_data(points)
    gF = F.outer.grad(F.pairings(points))
    gG = G_fun.outer.grad(G_fun.pairings(points))
    cross = F._tdot(GF[..., :, None, :], GG[..., None, :, :]).sum(axis=-3)
    return float(np.einsum("...i,...j,...ij->...", gF, gG, cross))


def laplacian_cylinder(F: CylinderFunction, gamma: Configuration) -> float:
    """Lifted Laplacian: sum_i g_i <Delta phi_i, gamma>
    + sum_{ij} g_{ij} <Gamma(phi_i, phi_j), gamma>."""
    F._check(gamma)
    points = gamma.points
    if len(gamma) == 0:
        return 0.0
    V, G, A, B, L, U, N2 = F._inner_data(points)
    v = V.sum(axis=-2)
    gi = F.outer.grad(v)
    hij = F.outer.hess(v)
    gmat = _gamma_matrix(F, G)
    first = np.einsum("...m,...m->...", gi, L.sum(axis=-2))
    second = np.einsum("...ij,...ij->...", hij, gmat)
    return float(first + second)


def gamma2_cylinder(F: CylinderFunction, gamma: Configuration) -> float:
    F._check(gamma)
    return float(gamma2_cylinder_points(F, gamma.points))


def gamma2_cylinder_points(F: CylinderFunction, points: np.ndarray) -> np.ndarray:
    """Iterated carre du champ of F, expanded into the three closed-form groups:

    sum_{ij} g_i g_j <Gamma_2(phi_i, phi_j), gamma>
    + sum_{ijkl} g_{ik} g_{jl} <Gamma(phi_i, phi_j), gamma> <Gamma(phi_k, phi_l), gamma>
    + sum_{ijk} g_i g_{jk} [ 2 <Gamma(phi_j, Gamma(phi_i, phi_k)), gamma>
                             - <Gamma(phi_i, Gamma(phi_j, phi_k)), gamma> ].
    """
    points = np.asarray(points, dtype=float)
    if points.shape[-2] == 0:
        return np.zeros(points.shape[:-2])
    V, G, A, B, L, U, N2 = F._inner_data(points)
    v = V.sum(axis=-2)
    gi = F.outer.grad(v)
    hij = F.outer.hess(v)
    d = F.space.dim
    K = F.space.ric_lower

    dot_g = F._tdot(G[..., :, None, :], G[..., None, :, :])  # (..., n, m, m)
    gmat = dot_g.sum(axis=-3)

    # Hilbert-Schmidt inner products of the radial Hessians
    c = F._tdot(U[..., :, None, :], U[..., None, :, :])  # (..., n, m, m)
    AmB = A - B
    hs = (
        B[..., :, None] * B[..., None, :] * d
        + B[..., :, None] * AmB[..., None, :] * N2[..., None, :]
        + AmB[..., :, None] * B[..., None, :] * N2[..., :, None]
        + AmB[..., :, None] * AmB[..., None, :] * c * c
    )
    gamma2_mat = (hs + K * dot_g).sum(axis=-3)

    # T[a,b,c] = <Gamma(phi_a, Gamma(phi_b, phi_c)), gamma>; the gradient of a
    # carre du champ needs only Hessians:
    #   grad Gamma(phi_b, phi_c) = Hess phi_b grad phi_c + Hess phi_c grad phi_b,
    # so T[a,b,c] = sum_x [ Hess_b(g_a, g_c) + Hess_c(g_a, g_b) ](x) with
    #   Hess_b(v, w) = B_b <v, w> + (A_b - B_b) <u_b, v> <u_b, w>.
    ug = F._tdot(U[..., :, None, :], G[..., None, :, :])  # (..., n, b, a) = <u_b, g_a>
    hess_b_ac = (
        B[..., None, :, None] * dot_g[..., :, None, :]
        + AmB[..., None, :, None] * np.einsum("...ba,...bc->...abc", ug, ug)
    )
    hess_c_ab = (
        B[..., None, None, :] * dot_g[..., :, :, None]
        + AmB[..., None, None, :] * np.einsum("...ca,...cb->...abc", ug, ug)
    )
    T = (hess_b_ac + hess_c_ab).sum(axis=-4)

    s1 = np.einsum("...i,...j,...ij->...", gi, gi, gamma2_mat)
    s2 = np.einsum("...ik,...jl,...ij,...kl->...", hij, hij, gmat, gmat)
    s3 = 2.0 * np.einsum("...i,...jk,...jik->...", gi, hij, T) - np.einsum(
        "...i,...jk,...ijk->...", gi, hij, T
    )
    return s1 + s2 + s3
