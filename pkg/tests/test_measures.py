import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import pair_energy_oracle
from holderlab.functions import constant_function, linear_function, takagi
from holderlab.measures import (DiscreteMeasure, aliasing_limit, ball_mass, decay_exponent, density_estimate,
                                density_measure, dyadic_bands, empty_measure, energy, fourier, fourier_uniform,
                                lift_measure, local_dimension, measure_from_csv, measure_to_csv, pair_energy,
                                point_mass, project, sobolev_integral, uniform_measure)

RADII = [2.0 ** -k for k in range(3, 9)]


def test_lift_of_zero():
    mu = lift_measure(constant_function(0.0), 2)
    assert np.array_equal(mu.points, [[0.25, 0.0], [0.75, 0.0]])
    assert np.array_equal(mu.weights, [0.5, 0.5])


@given(st.integers(1, 300))
def test_lift_total_mass(n):
    assert lift_measure(takagi(0.4), n).total_mass == pytest.approx(1.0, abs=1e-12)


def test_lift_of_identity_on_diagonal():
    mu = lift_measure(linear_function(1.0), 4)
    assert np.array_equal(mu.points[:, 0], mu.points[:, 1])


def test_projection_examples():
    mu = DiscreteMeasure(np.array([[0.3, 7.0]]), np.array([1.0]))
    assert project(mu, 0.0).points[0] == 0.3
    assert project(mu, math.pi / 2).points[0] == 7.0
    one = DiscreteMeasure(np.array([[1.0, 1.0]]), np.array([1.0]))
    assert project(one, math.pi / 4).points[0] == pytest.approx(math.sqrt(2), abs=1e-15)


@given(st.floats(0, 2 * math.pi), st.integers(1, 50))
def test_projection_preserves_mass(theta, n):
    mu = lift_measure(takagi(0.3), n)
    assert project(mu, theta).total_mass == mu.total_mass


def test_fourier_at_zero_is_mass():
    mu = DiscreteMeasure(np.array([0.1, 0.4]), np.array([0.25, 0.5]))
    assert fourier(mu, 0.0) == 0.75


def test_fourier_uniform_closed_form():
    mu = uniform_measure(4096)
    assert abs(abs(fourier(mu, math.pi)) - 2 / math.pi) <= 1e-3


def test_fourier_of_atom():
    mu = point_mass(0.0)
    assert np.allclose(np.abs(fourier(mu, np.array([1.0, 17.0, 1e4]))), 1.0)


def test_fourier_matches_direct_sum():
    rng = np.random.default_rng(0)
    pts, w = rng.uniform(-1, 2, 50), rng.uniform(0.1, 1, 50)
    mu = DiscreteMeasure(pts, w)
    xi = np.array([0.5, 3.0, 40.0])
    direct = np.array([np.sum(w * np.exp(1j * x * pts)) for x in xi])
    assert np.allclose(fourier(mu, xi), direct, atol=1e-12)
    assert np.allclose(fourier_uniform(mu, 0.5, 0.25, 7), [np.sum(w * np.exp(1j * (0.5 + 0.25 * k) * pts))
                                                          for k in range(7)], atol=1e-11)


def test_fourier_bounded_by_mass(rng):
    mu = lift_measure(takagi(0.4), 257)
    nu = project(mu, 1.0)
    xi = rng.uniform(-500, 500, 1000)
    assert np.all(np.abs(fourier(nu, xi)) <= nu.total_mass * (1 + 1e-12))


def test_aliasing_limit():
    assert aliasing_limit(uniform_measure(100)) == pytest.approx(100 * math.pi)
    assert aliasing_limit(point_mass(0.0)) == math.inf


def test_decay_of_atom():
    assert abs(decay_exponent(point_mass(0.0), dyadic_bands(1, 7)).eta) < 1e-9


def test_decay_of_uniform():
    assert decay_exponent(uniform_measure(4096), dyadic_bands(1, 7)).eta == pytest.approx(2.0, abs=0.3)


def test_decay_of_triangle_density():
    mu = density_measure(lambda x: 2 * (1 - np.abs(2 * x - 1)), 4096)
    assert decay_exponent(mu, dyadic_bands(2, 8)).eta == pytest.approx(4.0, abs=0.5)


def test_decay_rejects_aliased_bands():
    with pytest.raises(ValueError):
        decay_exponent(uniform_measure(16), dyadic_bands(1, 7))


def test_sobolev_atom_grows_like_power():
    tr = sobolev_integral(point_mass(0.0), 1.5, 4.0, 5)
    assert tr.ratios[-1] == pytest.approx(2 ** 2.5, rel=1e-2)


def test_sobolev_uniform_convergent_and_divergent():
    mu = uniform_measure(2 ** 14)
    assert sobolev_integral(mu, 0.5, 4.0, 8).ratios[-1] == pytest.approx(1.0, abs=0.05)
    assert sobolev_integral(mu, 1.5, 4.0, 8).ratios[-1] == pytest.approx(2 ** 0.5, abs=0.05)


def test_sobolev_matches_quadrature_oracle():
    mu = uniform_measure(512)
    xi = np.linspace(0, 3.0, 20001)
    vals = xi ** 1.2 * np.abs(fourier(mu, xi)) ** 2
    oracle = 2 * np.sum(0.5 * (vals[1:] + vals[:-1]) * np.diff(xi))
    assert sobolev_integral(mu, 1.2, 3.0, 1, step=1e-3).integrals[0] == pytest.approx(oracle, rel=1e-5)
    # the default step resolves the oscillation but not the cusp of xi**beta at 0
    assert sobolev_integral(mu, 1.2, 3.0, 1).integrals[0] == pytest.approx(oracle, rel=1e-2)


def test_energy_uniform_closed_form():
    est = energy(uniform_measure(4096), 0.5)
    assert est.value == pytest.approx(8 / 3, rel=0.02)
    assert not est.diverging


def test_energy_two_points():
    mu = DiscreteMeasure(np.array([0.0, 1.0]), np.array([0.5, 0.5]))
    for s in (0.3, 1.0, 2.5):
        assert energy(mu, s).value == pytest.approx(0.5, abs=1e-15)


def test_energy_near_divergence_drifts():
    mu = uniform_measure(2048)
    assert energy(mu, 0.99).convergence_ratio > energy(mu, 0.5).convergence_ratio + 0.05


def test_energy_coincident_atoms_diverge():
    mu = DiscreteMeasure(np.array([0.2, 0.2, 0.5]), np.ones(3))
    est = energy(mu, 0.5)
    assert est.diverging and est.coincident and est.value == math.inf


def test_energy_matches_oracle():
    rng = np.random.default_rng(3)
    for shape in ((40,), (40, 2)):
        pts = rng.uniform(0, 1, shape)
        w = rng.uniform(0.1, 1, 40)
        value, _ = pair_energy(DiscreteMeasure(pts, w), 0.7)
        assert value == pytest.approx(pair_energy_oracle(pts, w, 0.7), rel=1e-12)


@given(st.permutations(list(range(30))), st.floats(0.1, 1.9))
def test_energy_permutation_invariant(perm, s):
    rng = np.random.default_rng(11)
    pts, w = rng.uniform(0, 1, (30, 2)), rng.uniform(0.1, 1, 30)
    a = pair_energy(DiscreteMeasure(pts, w), s)[0]
    b = pair_energy(DiscreteMeasure(pts[perm], w[perm]), s)[0]
    assert b == pytest.approx(a, rel=1e-12)


@given(st.floats(0.05, 20.0), st.floats(0.1, 1.9))
def test_energy_scaling(a, s):
    rng = np.random.default_rng(5)
    pts, w = rng.uniform(0, 1, 25), rng.uniform(0.1, 1, 25)
    base = pair_energy(DiscreteMeasure(pts, w), s)[0]
    scaled = pair_energy(DiscreteMeasure(a * pts, w), s)[0]
    assert scaled == pytest.approx(a ** (-s) * base, rel=1e-12)


def test_local_dimension_examples():
    assert local_dimension(uniform_measure(2 ** 14), 0.5, RADII).value == pytest.approx(1.0, abs=0.05)
    assert abs(local_dimension(point_mass(0.3), 0.3, RADII).value) < 1e-12
    mu = density_measure(lambda x: 2 * x, 2 ** 14)
    assert local_dimension(mu, 0.0, RADII).value == pytest.approx(2.0, abs=0.1)


def test_local_dimension_uniform_at_random_points(rng):
    mu = uniform_measure(2 ** 14)
    for y in rng.uniform(0.1, 0.9, 100):
        assert local_dimension(mu, y, RADII).value == pytest.approx(1.0, abs=0.1)


def test_density_estimates():
    assert density_estimate(uniform_measure(1000), 0.5, 0.1) == pytest.approx(1.0, rel=1e-9)
    assert density_estimate(uniform_measure(1000), 5.0, 0.1) == 0.0
    mu = density_measure(lambda x: 2 * x, 2 ** 14)
    assert density_estimate(mu, 0.75, 0.05) == pytest.approx(1.5, rel=0.02)


def test_ball_mass_closed():
    mu = DiscreteMeasure(np.array([0.0, 1.0]), np.array([1.0, 1.0]))
    assert ball_mass(mu, 0.5, 0.5) == 2.0


def test_decay_and_sobolev_agree():
    mu = uniform_measure(2 ** 14)
    beta = 0.5
    fit = decay_exponent(mu, dyadic_bands(1, 7))
    assert fit.eta > beta + 1
    assert sobolev_integral(mu, beta, 4.0, 8).ratios[-1] <= 1.1


def test_measure_csv_round_trip(tmp_path):
    for mu in (lift_measure(takagi(0.4), 33), uniform_measure(17)):
        path = tmp_path / "m.csv"
        measure_to_csv(mu, path)
        back = measure_from_csv(path)
        assert np.array_equal(back.points, mu.points) and np.array_equal(back.weights, mu.weights)


def test_invalid_measures():
    with pytest.raises(ValueError):
        DiscreteMeasure(np.array([0.0]), np.array([0.0]))
    with pytest.raises(ValueError):
        DiscreteMeasure(np.zeros((2, 3)), np.ones(2))
    assert len(empty_measure(2)) == 0
