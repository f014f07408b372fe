import math

import numpy as np
import pytest
from scipy import stats

from upsilon_lab.errors import DomainError, InvalidPointError, NonUniqueGeodesicError
from upsilon_lab.seeding import derive_rng
from upsilon_lab.space_forms import (
    Euclidean,
    Hyperbolic2,
    Sphere2,
    make_space,
    minkowski_dot,
    space_from_json,
)

import oracles

ALL_SPACES = [Euclidean(1), Euclidean(2), Euclidean(3), Sphere2(1.0), Sphere2(2.0), Hyperbolic2()]


def random_points(space, n, rng, spread=1.5):
    from upsilon_lab.configuration import Ball

    return Ball(space, space.origin(), spread).sample_uniform(n, rng)


# --- curvature constants and validation --------------------------------------


def test_curvature_constants():
    assert Euclidean(3).sec_lower == 0.0 and Euclidean(3).ric_lower == 0.0
    s = Sphere2(2.0)
    assert s.sec_lower == pytest.approx(0.25)
    assert s.ric_lower == pytest.approx((s.dim - 1) * s.sec_lower)
    h = Hyperbolic2()
    assert h.sec_lower == -1.0 and h.ric_lower == -1.0


def test_point_validation():
    s = Sphere2(1.0)
    s.validate_point(np.array([0.0, 0.0, 1.0]))
    with pytest.raises(InvalidPointError):
        s.validate_point(np.array([0.0, 0.0, 1.1]))
    h = Hyperbolic2()
    h.validate_point(np.array([1.0, 0.0, 0.0]))
    with pytest.raises(InvalidPointError):
        h.validate_point(np.array([-1.0, 0.0, 0.0]))  # wrong sheet
    with pytest.raises(InvalidPointError):
        h.validate_point(np.array([1.0, 0.5, 0.0]))


def test_space_json_round_trip():
    for space in [Euclidean(4), Sphere2(1.5), Hyperbolic2()]:
        assert space_from_json(space.to_json()) == space
    assert make_space("sphere2", radius=2.0).radius == 2.0
    with pytest.raises(DomainError):
        make_space("torus")


# --- geodesic distance --------------------------------------------------------


def test_distance_euclidean_norm():
    e = Euclidean(1)
    assert e.geodesic_distance(np.array([0.0]), np.array([3.0])) == pytest.approx(3.0)


def test_distance_sphere_antipodal():
    s = Sphere2(1.0)
    north = np.array([0.0, 0.0, 1.0])
    south = np.array([0.0, 0.0, -1.0])
    assert s.geodesic_distance(north, south) == pytest.approx(math.pi)


def test_distance_hyperbolic_step_integration_oracle():
    # point at hyperboloid parameter s=1 along the first spatial axis;
    # oracle: chordal sum of 1e4 Minkowski segment lengths along the curve
    h = Hyperbolic2()
    x = h.origin()
    y = np.array([math.cosh(1.0), math.sinh(1.0), 0.0])
    s_grid = np.linspace(0.0, 1.0, 10_001)
    curve = np.stack([np.cosh(s_grid), np.sinh(s_grid), np.zeros_like(s_grid)], axis=1)
    seg = np.diff(curve, axis=0)
    length = float(np.sum(np.sqrt(np.maximum(minkowski_dot(seg, seg), 0.0))))
    assert h.geodesic_distance(x, y) == pytest.approx(1.0, abs=1e-9)
    assert length == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("space", ALL_SPACES, ids=lambda s: f"{s.kind}{getattr(s, 'dim', '')}")
def test_triangle_inequality(space):
    rng = derive_rng(101, hash(space.kind) & 0xFF, space.dim)
    pts = random_points(space, 3 * 10_000, rng).reshape(10_000, 3, -1)
    d01 = space.geodesic_distance(pts[:, 0], pts[:, 1])
    d12 = space.geodesic_distance(pts[:, 1], pts[:, 2])
    d02 = space.geodesic_distance(pts[:, 0], pts[:, 2])
    slack = d01 + d12 - d02
    assert slack.min() >= -1e-10
    # symmetry and identity
    assert np.allclose(space.geodesic_distance(pts[:, 1], pts[:, 0]), d01, atol=1e-12)
    assert np.all(space.geodesic_distance(pts[:, 0], pts[:, 0]) <= 1e-12)


# --- geodesic interpolation -----------------------------------------------------


@pytest.mark.parametrize("space", ALL_SPACES, ids=lambda s: f"{s.kind}{getattr(s, 'dim', '')}")
def test_geodesic_point_consistency(space):
    rng = derive_rng(102, hash(space.kind) & 0xFF, space.dim)
    x = random_points(space, 200, rng)
    y = random_points(space, 200, rng)
    d = space.geodesic_distance(x, y)
    for s in (0.0, 0.25, 0.5, 0.9, 1.0):
        z = space.geodesic_point(x, y, s)
        dxz = space.geodesic_distance(x, z)
        dzy = space.geodesic_distance(z, y)
        assert np.max(np.abs(dxz - s * d)) < 1e-10
        assert np.max(np.abs(dxz + dzy - d)) < 1e-9


def test_geodesic_point_endpoints_and_midpoint():
    e = Euclidean(2)
    x, y = np.array([0.0, 0.0]), np.array([2.0, 0.0])
    assert np.allclose(e.geodesic_point(x, y, 0.0), x)
    assert np.allclose(e.geodesic_point(x, y, 0.5), [1.0, 0.0])


def test_geodesic_point_sphere_rotation_oracle():
    # midpoint between the pole and the point a quarter-arc (pi/4) away should
    # sit at colatitude pi/8; oracle: rotation about the great-circle normal
    s = Sphere2(1.0)
    pole = np.array([0.0, 0.0, 1.0])
    y = np.array([math.sin(math.pi / 4), 0.0, math.cos(math.pi / 4)])
    mid = s.geodesic_point(pole, y, 0.5)
    half = math.pi / 8
    rot = np.array(
        [
            [math.cos(half), 0.0, math.sin(half)],
            [0.0, 1.0, 0.0],
            [-math.sin(half), 0.0, math.cos(half)],
        ]
    )
    assert np.allclose(mid, rot @ pole, atol=1e-12)


def test_geodesic_point_antipodal_error():
    s = Sphere2(1.0)
    with pytest.raises(NonUniqueGeodesicError):
        s.geodesic_point(np.array([0.0, 0.0, 1.0]), np.array([0.0, 0.0, -1.0]), 0.5)


def test_geodesic_parameter_domain():
    e = Euclidean(1)
    with pytest.raises(DomainError):
        e.geodesic_point(np.array([0.0]), np.array([1.0]), 1.5)


# --- exponential / logarithm maps ---------------------------------------------


@pytest.mark.parametrize("space", [Sphere2(1.0), Sphere2(2.0), Hyperbolic2()])
def test_exp_log_inverse(space):
    rng = derive_rng(103, hash(space.kind) & 0xFF)
    x = random_points(space, 100, rng)
    y = random_points(space, 100, rng)
    v = space.log(x, y)
    back = space.exp(x, v)
    assert np.max(np.abs(back - y)) < 1e-10
    norms = np.sqrt(np.maximum(space.tangent_dot(x, v, v), 0.0))
    assert np.allclose(norms, space.geodesic_distance(x, y), atol=1e-10)


@pytest.mark.parametrize("space", [Sphere2(1.0), Hyperbolic2()])
def test_tangent_frames_orthonormal(space):
    rng = derive_rng(104, hash(space.kind) & 0xFF)
    x = random_points(space, 50, rng)
    frame = space.tangent_frame(x)
    for a in range(space.dim):
        for b in range(space.dim):
            dots = space.tangent_dot(x, frame[:, a], frame[:, b])
            assert np.allclose(dots, 1.0 if a == b else 0.0, atol=1e-10)


@pytest.mark.parametrize("space", [Sphere2(1.0), Hyperbolic2()])
def test_parallel_frames_preserve_products(space):
    rng = derive_rng(105, hash(space.kind) & 0xFF)
    x = random_points(space, 40, rng)
    y = random_points(space, 40, rng)
    fx, fy = space.parallel_frames(x, y)
    for a in range(2):
        for b in range(2):
            dx = space.tangent_dot(x, fx[:, a], fx[:, b])
            dy = space.tangent_dot(y, fy[:, a], fy[:, b])
            assert np.allclose(dx, dy, atol=1e-9)
    # the first frame vector is the geodesic direction: transported vector at y
    # points along the continuation of the geodesic
    d = space.geodesic_distance(x, y)
    cont = space.geodesic_point(x, y, 1.0)  # == y
    assert np.allclose(cont, y, atol=1e-9)


# --- heat kernel ---------------------------------------------------------------


def test_heat_step_zero_time():
    for space in ALL_SPACES:
        x = space.origin()
        out = space.heat_step(x, 0.0, derive_rng(1))
        assert np.array_equal(out, x)


def test_heat_step_negative_time():
    with pytest.raises(DomainError):
        Euclidean(2).heat_step(np.zeros(2), -0.1, derive_rng(1))


def test_heat_step_euclidean_second_moment():
    # E d(x, X_t)^2 = 2 * dim * t under the generator-Delta convention
    e = Euclidean(2)
    t = 0.3
    n = 100_000
    rng = derive_rng(106)
    starts = np.zeros((n, 2))
    ends = e.heat_step(starts, t, rng)
    sq = np.sum(ends**2, axis=1)
    expected = 2 * e.dim * t
    se = sq.std(ddof=1) / math.sqrt(n)
    assert abs(sq.mean() - expected) < 3 * se


def test_heat_step_euclidean_ks():
    e = Euclidean(2)
    t = 0.5
    rng = derive_rng(107)
    ends = e.heat_step(np.zeros((100_000, 2)), t, rng)
    stat = stats.kstest(ends[:, 0], "norm", args=(0.0, math.sqrt(2 * t)))
    assert stat.pvalue > 0.01


def test_heat_step_sphere_stays_on_sphere():
    s = Sphere2(1.0)
    rng = derive_rng(108)
    ends = s.heat_step(np.broadcast_to(s.origin(), (2000, 3)).copy(), 0.2, rng)
    assert np.max(np.abs(np.linalg.norm(ends, axis=1) - 1.0)) < 1e-12


def test_heat_step_hyperbolic_stays_on_sheet():
    h = Hyperbolic2()
    rng = derive_rng(109)
    ends = h.heat_step(np.broadcast_to(h.origin(), (2000, 3)).copy(), 0.2, rng)
    q = minkowski_dot(ends, ends)
    assert np.max(np.abs(q + 1.0)) < 1e-12
    assert np.all(ends[:, 0] > 0)


# --- heat tail bound -------------------------------------------------------------


def test_heat_tail_bound_formula_value():
    # lambda = 1/2, d = 2, flat: 2 sqrt(2) e^4
    e = Euclidean(2)
    assert e.heat_tail_bound(0.0, 1.0, 0.5) == pytest.approx(2.0 * math.sqrt(2.0) * math.e**4)


def test_heat_tail_bound_monotonicity():
    e = Euclidean(2)
    h = Hyperbolic2()
    r_values = np.linspace(0.0, 10.0, 50)
    bounds = [e.heat_tail_bound(r, 1.0, 0.4) for r in r_values]
    assert all(b1 > b2 for b1, b2 in zip(bounds, bounds[1:]))
    # nondecreasing in the negative part of the curvature: hyperbolic >= flat
    assert h.heat_tail_bound(2.0, 1.0, 0.4) >= e.heat_tail_bound(2.0, 1.0, 0.4)
    # positively curved spaces use the flat bound
    assert Sphere2(1.0).heat_tail_bound(2.0, 1.0, 0.4) == pytest.approx(
        e.heat_tail_bound(2.0, 1.0, 0.4)
    )


def test_heat_tail_bound_domain():
    e = Euclidean(2)
    with pytest.raises(DomainError):
        e.heat_tail_bound(1.0, 1.0, 1.5)
    with pytest.raises(DomainError):
        e.heat_tail_bound(1.0, 0.0, 0.4)


# --- ball volumes ----------------------------------------------------------------


def test_ball_volume_euclidean():
    assert Euclidean(2).ball_volume(1.0) == pytest.approx(math.pi)
    assert Euclidean(3).ball_volume(2.0) == pytest.approx(4.0 / 3.0 * math.pi * 8.0)
    assert Euclidean(1).ball_volume(5.0) == pytest.approx(10.0)


@pytest.mark.parametrize(
    "space,expected",
    [
        (Sphere2(1.0), 2 * math.pi * (1 - math.cos(1.0))),
        (Hyperbolic2(), 2 * math.pi * (math.cosh(1.0) - 1.0)),
    ],
)
def test_ball_volume_curved_mc_oracle(space, expected):
    assert space.ball_volume(1.0) == pytest.approx(expected)
    mc = oracles.mc_ball_volume(space, 1.0, 2_000_000, derive_rng(110, hash(space.kind) & 0xFF))
    assert abs(mc - expected) / expected < 1e-3


def test_ball_volume_sphere_domain():
    s = Sphere2(1.0)
    with pytest.raises(DomainError):
        s.ball_volume(3.5)
    assert s.ball_volume(math.pi) == pytest.approx(4 * math.pi)


def test_volume_growth_envelope_hyperbolic():
    h = Hyperbolic2()
    v1 = h.ball_volume(1.0)
    for r in range(1, 11):
        assert h.ball_volume(float(r)) <= v1 * math.exp(2.0 * r)


# --- uniform ball sampling --------------------------------------------------------


@pytest.mark.parametrize("space", [Euclidean(2), Sphere2(1.0), Hyperbolic2()])
def test_uniform_ball_sampling_radial_law(space):
    # the radial CDF is vol(B_s)/vol(B_r); KS test against it
    r = 1.2
    rng = derive_rng(111, hash(space.kind) & 0xFF)
    pts = space.sample_uniform_ball(space.origin(), r, 50_000, rng)
    d = space.geodesic_distance(pts, space.origin())
    assert d.max() <= r + 1e-9
    cdf = lambda s: np.array([space.ball_volume(min(float(v), r)) for v in np.atleast_1d(s)]) / space.ball_volume(r)
    stat = stats.kstest(d, cdf)
    assert stat.pvalue > 0.01
