"""Independent oracles used by the test suite.

Everything here recomputes expected values by a route independent of the
implementation under test: factorial enumeration for assignments, finite
differences in normal coordinates for the calculus operators, dense grids for
inf-convolutions, and quadrature/Monte Carlo for kernel expectations.
"""

import itertools
import math

import numpy as np


def brute_force_min_cost(cost: np.ndarray) -> float:
    """Exact assignment minimum by enumerating all permutations (n <= 8)."""
    n = cost.shape[0]
    perms = np.array(list(itertools.permutations(range(n))))
    totals = cost[np.arange(n), perms].sum(axis=1)
    return float(totals.min())


def brute_force_best_perm(cost: np.ndarray):
    """(min cost, lexicographically smallest optimal permutation)."""
    n = cost.shape[0]
    perms = list(itertools.permutations(range(n)))
    totals = np.array([cost[np.arange(n), p].sum() for p in perms])
    best = totals.min()
    optimal = [p for p, c in zip(perms, totals) if c <= best + 1e-12 * max(1.0, best)]
    return float(best), min(optimal)


# --- finite differences on products of model spaces -------------------------


def move_point(space, pts, i, vec):
    out = np.array(pts)
    out[i] = space.exp(pts[i], vec)
    return out


def fd_gradient_coeffs(space, f, pts, h=1e-5):
    """Directional derivatives of f (a function of the point array) along
    orthonormal frame directions: (n, dim) coefficients plus the frames."""
    n = len(pts)
    frames = space.tangent_frame(pts)
    out = np.zeros((n, space.dim))
    for i in range(n):
        for k in range(space.dim):
            e = frames[i, k]
            out[i, k] = (f(move_point(space, pts, i, h * e))
                         - f(move_point(space, pts, i, -h * e))) / (2.0 * h)
    return out, frames


def fd_gamma(space, f, g, pts, h=1e-5):
    """Carre du champ by first differences: sum of products of directional
    derivatives over an orthonormal frame."""
    cf, _ = fd_gradient_coeffs(space, f, pts, h)
    cg, _ = fd_gradient_coeffs(space, g, pts, h)
    return float(np.sum(cf * cg))


def fd_laplacian(space, f, pts, h=1e-3):
    """Laplace-Beltrami on the product space by symmetric second differences
    in normal coordinates (Christoffel terms vanish at the base point)."""
    f0 = f(pts)
    frames = space.tangent_frame(pts)
    total = 0.0
    for i in range(len(pts)):
        for k in range(space.dim):
            e = frames[i, k]
            total += (f(move_point(space, pts, i, h * e)) - 2.0 * f0
                      + f(move_point(space, pts, i, -h * e))) / h**2
    return total


def fd_laplacian_richardson(space, f, pts, h=1e-3):
    l1 = fd_laplacian(space, f, pts, h)
    l2 = fd_laplacian(space, f, pts, h / 2.0)
    return (4.0 * l2 - l1) / 3.0


def fd_gamma2(space, F_eval, pts, h_outer=1e-3, h_inner=1e-4):
    """Definitional iterated operator (1/2) Delta Gamma(F) - Gamma(F, Delta F),
    every piece by nested finite differences.

    The inner step is larger than for standalone first-order checks: its
    truncation error is smooth (harmless under the outer second difference)
    while its rounding noise would be amplified by 1/h_outer^2.
    """
    gamma_of = lambda p: fd_gamma(space, F_eval, F_eval, p, h_inner)
    lap_of_F = lambda p: fd_laplacian_richardson(space, F_eval, p, h_outer)
    term1 = 0.5 * fd_laplacian_richardson(space, gamma_of, pts, h_outer)
    term2 = fd_gamma(space, F_eval, lap_of_F, pts, h_inner)
    return term1 - term2


# --- quadrature oracles ------------------------------------------------------


def gauss_convolution_1d(phi, x, t, half_width=12.0, n_nodes=4001):
    """(p_t * phi)(x) for the generator-Delta kernel (variance 2t) in 1D."""
    z = np.linspace(-half_width, half_width, n_nodes)
    sigma = math.sqrt(2.0 * t)
    weights = np.exp(-z * z / 2.0) / math.sqrt(2.0 * math.pi)
    vals = phi(x + sigma * z)
    return float(np.trapezoid(vals * weights, z))


def gauss_convolution_2d(phi, x, t, half_width=10.0, n_nodes=241):
    """(p_t * phi)(x) in 2D by tensor-product trapezoid quadrature."""
    z = np.linspace(-half_width, half_width, n_nodes)
    sigma = math.sqrt(2.0 * t)
    zz1, zz2 = np.meshgrid(z, z, indexing="ij")
    pts = np.stack([x[0] + sigma * zz1, x[1] + sigma * zz2], axis=-1)
    weights = np.exp(-(zz1**2 + zz2**2) / 2.0) / (2.0 * math.pi)
    vals = phi(pts.reshape(-1, 2)).reshape(zz1.shape)
    inner = np.trapezoid(vals * weights, z, axis=1)
    return float(np.trapezoid(inner, z))


def mc_ball_volume(space, r, n_samples, rng):
    """Monte Carlo surface/volume integration of a metric ball on the curved
    models: stratified sampling of the radial parameter (one uniform draw per
    stratum keeps it a Monte Carlo estimate while shrinking the variance).

    Sphere: colatitude measure sin(theta) d theta d phi around the north pole.
    Hyperbolic: polar measure sinh(s) ds d phi around the apex.
    """
    kind = space.kind
    strata = (np.arange(n_samples) + rng.random(n_samples)) / n_samples
    if kind == "sphere2":
        rho = space.radius
        theta = strata * math.pi
        frac = np.mean((theta <= r / rho) * np.sin(theta) * math.pi)
        return float(2.0 * math.pi * rho**2 * frac)
    if kind == "hyperbolic2":
        s_max = r + 1.0
        s = strata * s_max
        frac = np.mean((s <= r) * np.sinh(s) * s_max)
        return float(2.0 * math.pi * frac)
    raise ValueError(kind)


def dense_grid_inf_convolution(f_vals_on_grid, grid, x, t):
    """1D Hopf-Lax by dense grid minimization: min_y f(y) + (x - y)^2 / (2t)."""
    return float(np.min(f_vals_on_grid + (grid - x) ** 2 / (2.0 * t)))
