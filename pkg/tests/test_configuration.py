import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from upsilon_lab.configuration import (
    Ball,
    Box,
    Configuration,
    count_ball,
    good_config_witness,
    multiset_equal,
    restrict,
    sample_poisson,
    split,
)
from upsilon_lab.errors import DomainError
from upsilon_lab.seeding import derive_rng
from upsilon_lab.space_forms import Euclidean, Hyperbolic2, Sphere2

E1 = Euclidean(1)
E2 = Euclidean(2)


def line_config(values):
    return Configuration(E1, [[v] for v in values])


# --- configuration semantics --------------------------------------------------


def test_multiset_equality_permutation_invariant():
    a = Configuration(E2, [[0.0, 0.0], [1.0, 2.0]])
    b = Configuration(E2, [[1.0, 2.0], [0.0, 0.0]])
    assert a == b
    c = Configuration(E2, [[0.0, 0.0], [1.0, 2.0 + 1e-9]])
    assert a != c


@given(st.lists(st.floats(-10, 10), min_size=0, max_size=6))
@settings(max_examples=50, deadline=None)
def test_multiset_equality_hypothesis(values):
    a = line_config(values)
    b = line_config(list(reversed(values)))
    assert multiset_equal(a, b)


def test_points_are_read_only():
    a = Configuration(E1, [[1.0]])
    with pytest.raises(ValueError):
        a.points[0, 0] = 2.0


def test_configuration_validates_points():
    s = Sphere2(1.0)
    with pytest.raises(Exception):
        Configuration(s, [[0.0, 0.0, 2.0]])


def test_config_json_round_trip():
    a = Configuration(E2, [[0.5, -1.0], [2.0, 3.0]])
    b = Configuration.from_json(json.dumps(a.to_json()))
    assert a == b


def test_config_csv_round_trip(tmp_path):
    for space, pts in [
        (E2, [[0.5, -1.0], [2.0, 3.0]]),
        (Hyperbolic2(), [[1.0, 0.0, 0.0]]),
        (E1, []),
    ]:
        a = Configuration(space, np.asarray(pts, dtype=float).reshape(-1, space.ambient_dim))
        path = tmp_path / f"cfg_{space.kind}.csv"
        a.to_csv(path)
        b = Configuration.from_csv(path)
        assert a == b


# --- regions --------------------------------------------------------------------


def test_region_volumes():
    assert Ball(E2, np.zeros(2), 1.0).volume() == pytest.approx(math.pi)
    assert Box(E2, np.array([0.0, 0.0]), np.array([2.0, 3.0])).volume() == pytest.approx(6.0)
    with pytest.raises(DomainError):
        Box(Sphere2(1.0), np.zeros(2), np.ones(2))


def test_region_contains_closed_boundary():
    ball = Ball(E1, np.zeros(1), 5.0)
    pts = np.array([[5.0], [5.0 + 1e-9], [-5.0]])
    inside = ball.contains(pts)
    assert inside.tolist() == [True, False, True]


# --- poisson sampling -------------------------------------------------------------


def test_sample_poisson_zero_volume():
    region = Ball(E2, np.zeros(2), 0.0)
    for seed in range(20):
        gamma = sample_poisson(E2, region, 3.0, derive_rng(seed))
        assert gamma.is_empty


def test_sample_poisson_determinism():
    region = Ball(E2, np.zeros(2), 2.0)
    a = sample_poisson(E2, region, 1.0, derive_rng(42))
    b = sample_poisson(E2, region, 1.0, derive_rng(42))
    assert np.array_equal(a.points, b.points)


def test_sample_poisson_empty_probability():
    # intensity * vol = 1 -> P[count = 0] = e^{-1} within 3 standard errors
    region = Ball(E1, np.zeros(1), 0.5)  # volume 1
    n = 100_000
    rng = derive_rng(7)
    zeros = sum(1 for _ in range(n) if len(sample_poisson(E1, region, 1.0, rng)) == 0)
    p_hat = zeros / n
    p = math.exp(-1.0)
    se = math.sqrt(p * (1 - p) / n)
    assert abs(p_hat - p) < 3 * se


def test_sample_poisson_count_chi_square():
    # counts ~ Poisson(intensity * vol) at the 1% level over 1e5 seeds
    region = Box(E2, np.zeros(2), np.array([2.0, 1.5]))  # volume 3
    mean = 0.8 * 3.0
    n = 100_000
    rng = derive_rng(8)
    counts = np.array([len(sample_poisson(E2, region, 0.8, rng)) for _ in range(n)])
    kmax = int(counts.max())
    observed = np.bincount(counts, minlength=kmax + 1).astype(float)
    expected = np.array([stats.poisson.pmf(k, mean) for k in range(kmax + 1)]) * n
    # fold the tail into the last bin with expected count >= 5
    cut = np.searchsorted(np.cumsum(expected[::-1]), 5.0)
    cut = len(expected) - cut - 1
    obs = np.append(observed[:cut], observed[cut:].sum())
    exp = np.append(expected[:cut], expected[cut:].sum())
    exp *= obs.sum() / exp.sum()
    chi2 = stats.chisquare(obs, exp)
    assert chi2.pvalue > 0.01


def test_sample_poisson_uniform_positions():
    region = Box(E2, np.zeros(2), np.array([1.0, 1.0]))
    rng = derive_rng(9)
    xs = []
    for _ in range(2000):
        xs.append(sample_poisson(E2, region, 5.0, rng).points)
    pts = np.concatenate(xs)
    assert stats.kstest(pts[:, 0], "uniform").pvalue > 0.01


def test_disjoint_region_count_independence():
    window = Box(E2, np.array([-4.0, -4.0]), np.array([4.0, 4.0]))
    b1 = Ball(E2, np.array([-2.0, 0.0]), 1.0)
    b2 = Ball(E2, np.array([2.0, 0.0]), 1.0)
    rng = derive_rng(10)
    n = 20_000
    c1 = np.empty(n)
    c2 = np.empty(n)
    for i in range(n):
        gamma = sample_poisson(E2, window, 0.5, rng)
        c1[i] = len(restrict(gamma, b1))
        c2[i] = len(restrict(gamma, b2))
    corr = np.corrcoef(c1, c2)[0, 1]
    assert abs(corr) < 3.0 / math.sqrt(n)


def test_sample_poisson_rejects_bad_inputs():
    with pytest.raises(DomainError):
        sample_poisson(E2, Ball(E2, np.zeros(2), 1.0), -1.0, derive_rng(0))


# --- restriction -------------------------------------------------------------------


def test_restrict_membership_example():
    gamma = line_config([1.0, 10.0])
    region = Ball(E1, np.zeros(1), 5.0)
    assert restrict(gamma, region) == line_config([1.0])


def test_restrict_empty_and_idempotent():
    region = Ball(E1, np.zeros(1), 5.0)
    empty = line_config([])
    assert restrict(empty, region).is_empty
    gamma = line_config([-7.0, -2.0, 0.0, 3.0, 9.0])
    once = restrict(gamma, region)
    assert restrict(once, region) == once


@given(st.lists(st.floats(-10, 10), min_size=0, max_size=8), st.floats(0.1, 8.0))
@settings(max_examples=50, deadline=None)
def test_restrict_partition(values, radius):
    gamma = line_config(values)
    region = Ball(E1, np.zeros(1), radius)
    inside, outside = split(gamma, region)
    merged = line_config(inside.points.ravel().tolist() + outside.points.ravel().tolist())
    assert multiset_equal(merged, gamma)


# --- ball counting and growth witness ------------------------------------------------


def test_count_ball_examples():
    gamma = line_config([0.0, 1.0, 3.0])
    assert count_ball(gamma, np.zeros(1), 2.0) == 2
    assert count_ball(line_config([]), np.zeros(1), 2.0) == 0
    counts = [count_ball(gamma, np.zeros(1), r) for r in (0.5, 1.0, 2.9, 3.0, 10.0)]
    assert counts == sorted(counts)
    assert count_ball(gamma, np.zeros(1), 3.0) == 3  # closed ball


def test_good_config_witness_examples():
    assert good_config_witness(line_config([]), np.zeros(1), 1.0, 10) == 0.0
    # k points inside the unit ball: C = k e^{-alpha}
    k = 4
    gamma = line_config([0.1, -0.2, 0.5, 0.9])
    for alpha in (1.0, 1.7):
        assert good_config_witness(gamma, np.zeros(1), alpha, 10) == pytest.approx(
            k * math.exp(-alpha)
        )
    # witness is indeed minimal: counts never exceed C e^{alpha r}
    gamma2 = line_config([0.5, 1.5, 2.5, 6.0, -8.0])
    alpha = 1.0
    c = good_config_witness(gamma2, np.zeros(1), alpha, 10)
    for r in range(1, 11):
        assert count_ball(gamma2, np.zeros(1), float(r)) <= c * math.exp(alpha * r) + 1e-12


def test_good_config_witness_poisson_finite():
    rng = derive_rng(11)
    gamma = sample_poisson(E2, Box(E2, -3 * np.ones(2), 3 * np.ones(2)), 1.0, rng)
    c = good_config_witness(gamma, np.zeros(2), 1.0, 8)
    assert np.isfinite(c) and c >= 0


def test_good_config_witness_warns_small_alpha():
    gamma = line_config([0.5])
    with pytest.warns(UserWarning):
        good_config_witness(gamma, np.zeros(1), 0.5, 5)
