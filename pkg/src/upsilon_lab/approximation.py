"""Finite-entropy approximation of measures on configuration space.

Given matched configurations (gamma, omega) and a window B, the mixing map
keeps gamma-points of matched pairs lying entirely in B x B and omega-points
of all other pairs; the result agrees with omega outside B and carries the
same number of points inside B.  Smearing then replaces each in-window point
by a uniform draw on a small ball of radius alpha = 1/(2 sqrt(n k)) (shifted
inward so the ball stays in the window), which gives the smeared law a finite
density at squared-transport cost at most 1/n.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from .configuration import Ball, Configuration
from .errors import DomainError, InfiniteDistanceError
from .transport import empirical_w2_with_se, optimal_matching

logger = logging.getLogger(__name__)


def xi_construction(gamma: Configuration, omega: Configuration, ball: Ball) -> Configuration:
    """Mix gamma and omega along their optimal matching relative to the window.

    Output invariants (exact): the restriction to the window complement equals
    omega's, and the window holds exactly omega(B) points.
    """
    if len(gamma) != len(omega):
        raise InfiniteDistanceError("mixing map requires equal cardinalities")
    if len(gamma) == 0:
        return gamma
    match = optimal_matching(gamma, omega)
    partner = omega.points[match.permutation]
    in_b_gamma = ball.contains(gamma.points)
    in_b_partner = ball.contains(partner)
    keep_gamma = in_b_gamma & in_b_partner
    pts = np.where(keep_gamma[:, None], gamma.points, partner)
    return gamma.with_points(pts)


def _inward_shift(xi: Configuration, ball: Ball, alpha: float) -> np.ndarray:
    """chi(x): points within alpha of the window boundary move distance alpha
    toward the center (capped at the center for tiny windows)."""
    space = xi.space
    pts = np.array(xi.points)
    d_center = space.geodesic_distance(pts, ball.center)
    boundary_dist = ball.radius - d_center
    for i in range(len(pts)):
        if boundary_dist[i] > alpha:
            continue
        if d_center[i] <= alpha:
            pts[i] = ball.center
        else:
            pts[i] = space.geodesic_point(pts[i], ball.center, alpha / d_center[i])
    return pts


def smear_alpha(xi: Configuration, ball: Ball, n: int, rng: np.random.Generator):
    """Replace each in-window point by a uniform draw on B(chi(x), alpha) with
    alpha = 1/(2 sqrt(n k)), k the in-window count.

    Returns (smeared configuration, alpha); alpha is None when the window is
    empty and the input is returned unchanged.
    """
    if n < 1:
        raise DomainError("n must be a positive integer")
    space = xi.space
    inside = ball.contains(xi.points) if len(xi) else np.zeros(0, dtype=bool)
    k = int(np.count_nonzero(inside))
    if k == 0:
        return xi, None
    alpha = 1.0 / (2.0 * math.sqrt(n * k))
    pts = np.array(xi.points)
    shifted = _inward_shift(xi.with_points(pts[inside]), ball, alpha)
    clip = space.geodesic_distance(shifted, ball.center) + alpha > ball.radius + 1e-12
    draws = np.empty_like(shifted)
    for i, chi in enumerate(shifted):
        draws[i] = space.sample_uniform_ball(chi, alpha, 1, rng)[0]
        while clip[i] and not ball.contains(draws[i][None, :])[0]:
            # degenerate tiny window: keep the draw inside B by rejection
            draws[i] = space.sample_uniform_ball(chi, alpha, 1, rng)[0]
    pts[inside] = draws
    return xi.with_points(pts), alpha


def entropy_smear_bound(xi: Configuration, ball: Ball, n: int) -> float:
    """Relative entropy of the product of uniform ball laws against the
    normalized window volume: sum_i log( m(B) / m(B(chi_i, alpha)) ).

    The smear balls lie inside the window except for degenerate tiny windows,
    where the per-point volume is capped at m(B) (entropy contribution 0).
    """
    if n < 1:
        raise DomainError("n must be a positive integer")
    space = xi.space
    inside = ball.contains(xi.points) if len(xi) else np.zeros(0, dtype=bool)
    k = int(np.count_nonzero(inside))
    if k == 0:
        return 0.0
    alpha = 1.0 / (2.0 * math.sqrt(n * k))
    vol_b = ball.volume()
    vol_alpha = min(space.ball_volume(alpha), vol_b)
    return k * math.log(vol_b / vol_alpha)


def entropy_envelope(xi: Configuration, ball: Ball, n: int) -> float:
    """Closed-form envelope C k (1 + log k + log n) dominating the smeared
    entropy, with C from the model's small-ball lower bound m(B(x, r)) >= kappa r^N."""
    space = xi.space
    inside = ball.contains(xi.points) if len(xi) else np.zeros(0, dtype=bool)
    k = int(np.count_nonzero(inside))
    if k == 0:
        return 0.0
    kappa, N = space.min_ball_volume_constants()
    c_model = max(math.log(max(ball.volume(), 1e-300) / kappa) + N * math.log(2.0), N / 2.0)
    return c_model * k * (1.0 + math.log(k) + math.log(n))


def check_appendix_convergence(mu_samples, nu_samples, n_grid, rng: np.random.Generator,
                               x0=None):
    """Distance of the empirical measure to its window-n approximation, for
    each n in the grid: mix each matched sample pair inside B(x0, n), smear,
    and estimate W_2 against the original cloud.

    Returns a list of (n, w2_estimate, std_error); pairs with mismatched
    cardinalities are skipped with a logged warning.
    """
    if len(mu_samples) != len(nu_samples) or not mu_samples:
        raise DomainError("need equally many (paired) samples on both sides")
    space = mu_samples[0].space
    center = space.origin() if x0 is None else space.validate_point(np.asarray(x0, dtype=float))
    pairs = []
    for idx, (g, w) in enumerate(zip(mu_samples, nu_samples)):
        if len(g) != len(w):
            logger.warning("skipping sample pair %d: cardinalities %d vs %d",
                           idx, len(g), len(w))
            continue
        pairs.append((g, w))
    if not pairs:
        raise DomainError("no sample pair with matching cardinalities")
    out = []
    for n in n_grid:
        n = int(n)
        window = Ball(space, center, float(n))
        kept = [g for g, _ in pairs]
        approx = []
        for g, w in pairs:
            xi = xi_construction(g, w, window)
            smeared, _ = smear_alpha(xi, window, n, rng)
            approx.append(smeared)
        cost, se = empirical_w2_with_se(kept, approx)
        out.append((n, cost, se))
    return out
