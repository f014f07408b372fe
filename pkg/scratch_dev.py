"""Dev scratch: FD validation of the Gamma calculus (deleted before delivery)."""
import numpy as np

import upsilon_lab as ul
from upsilon_lab.calculus import (
    CylinderFunction, Linear, PowerSaturated, TanhComposed, TestFunction,
    gamma2_cylinder, gamma_cylinder, grad_cylinder, laplacian_cylinder,
)
from upsilon_lab.catalog import random_configuration, random_cylinder
from upsilon_lab.seeding import derive_rng

# ---- generic FD machinery on M^N via normal coordinates ----

def move_point(space, pts, i, vec):
    out = np.array(pts)
    out[i] = space.exp(pts[i], vec)
    return out

def fd_gradient(space, F_eval, pts, h=1e-5):
    """first-order directional derivatives along frame dirs -> per point tangent (n, dim) coeffs + frames"""
    n = len(pts)
    frames = space.tangent_frame(pts)
    out = np.zeros((n, space.dim))
    for i in range(n):
        for k in range(space.dim):
            e = frames[i, k]
            fp = F_eval(move_point(space, pts, i, h * e))
            fm = F_eval(move_point(space, pts, i, -h * e))
            out[i, k] = (fp - fm) / (2 * h)
    return out, frames

def fd_gamma(space, F_eval, G_eval, pts, h=1e-5):
    gF, _ = fd_gradient(space, F_eval, pts, h)
    gG, _ = fd_gradient(space, G_eval, pts, h)
    return float(np.sum(gF * gG))

def fd_laplacian(space, F_eval, pts, h=1e-4):
    """Laplace-Beltrami on M^N via second differences in normal coordinates."""
    n = len(pts)
    frames = space.tangent_frame(pts)
    f0 = F_eval(pts)
    total = 0.0
    for i in range(n):
        for k in range(space.dim):
            e = frames[i, k]
            fp = F_eval(move_point(space, pts, i, h * e))
            fm = F_eval(move_point(space, pts, i, -h * e))
            total += (fp - 2 * f0 + fm) / h**2
    return total

def fd_laplacian_rich(space, F_eval, pts, h=1e-3):
    """Richardson-extrapolated second differences: kills the O(h^2) term."""
    l1 = fd_laplacian(space, F_eval, pts, h)
    l2 = fd_laplacian(space, F_eval, pts, h / 2)
    return (4.0 * l2 - l1) / 3.0

def fd_gamma2(space, F, pts, h_outer=1e-3, h_inner=1e-5):
    """(1/2) Delta Gamma(F) - Gamma(F, Delta F), all by nested FD."""
    F_eval = lambda p: F.eval_points(p)
    gamma_eval = lambda p: fd_gamma(space, F_eval, F_eval, p, h_inner)
    lap_F_eval = lambda p: fd_laplacian_rich(space, F_eval, p, h_outer)
    term1 = 0.5 * fd_laplacian_rich(space, gamma_eval, pts, h_outer)
    term2 = fd_gamma(space, F_eval, lap_F_eval, pts, h_inner)
    return term1 - term2

rngs = derive_rng(42, 1)
for space in [ul.Euclidean(2), ul.Sphere2(1.0), ul.Hyperbolic2(), ul.Euclidean(1)]:
    print("=== space:", space.kind, space.to_json().get('dim'))
    for trial in range(4):
        rng = derive_rng(100, trial, hash(space.kind) & 0xFFFF)
        F = random_cylinder(space, rng, n_inner=2, window_radius=1.5)
        gamma = random_configuration(space, rng, window_radius=1.5, n_points=3)
        pts = gamma.points

        # gradient check
        g_closed = grad_cylinder(F, gamma)   # (n, amb) ambient vectors
        g_fd, frames = fd_gradient(space, lambda p: F.eval_points(p), pts)
        # convert closed-form ambient vectors to frame coeffs
        if space.kind == 'hyperbolic2':
            from upsilon_lab.space_forms import minkowski_dot
            coef = np.stack([minkowski_dot(g_closed, frames[:, k]) for k in range(space.dim)], axis=1)
        else:
            coef = np.einsum('nj,nkj->nk', g_closed, frames)
        err_g = np.max(np.abs(coef - g_fd)) / max(1e-9, np.max(np.abs(g_fd)))

        # gamma check
        gam_closed = gamma_cylinder(F, gamma)
        gam_fd = fd_gamma(space, F.eval_points, F.eval_points, pts)
        err_gam = abs(gam_closed - gam_fd) / max(1e-9, abs(gam_fd))

        # laplacian check
        lap_closed = laplacian_cylinder(F, gamma)
        lap_fd = fd_laplacian(space, F.eval_points, pts)
        err_lap = abs(lap_closed - lap_fd) / max(1e-9, abs(lap_fd))

        # gamma2 check
        g2_closed = gamma2_cylinder(F, gamma)
        g2_fd = fd_gamma2(space, F, pts)
        err_g2 = abs(g2_closed - g2_fd) / max(1e-6, abs(g2_fd))

        print(f" trial {trial}: grad {err_g:.2e} gamma {err_gam:.2e} lap {err_lap:.2e} gamma2 {err_g2:.2e}  (g2={g2_closed:.6f} fd={g2_fd:.6f})")
