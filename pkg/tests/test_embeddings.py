import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from holderlab.embeddings import (WeierstrassEmbeddingSpec, build_koch, build_lacunary, build_weierstrass_embedding,
                                  certify_biholder, embedding_from_callable, helix_embedding, identity_embedding,
                                  koch_maps, koch_parameters, lacunary_depth, reverse_holder_fraction,
                                  search_embedding)
from holderlab.functions import (Perturbation, constant_function, cosine_generator, linear_function, perturb,
                                 takagi, triangle_generator)


def brute_ratios(values, xs, alpha):
    """All pairwise max-norm ratios by explicit broadcasting."""
    diff = np.abs(values[:, None, :] - values[None, :, :]).max(axis=2)
    sep = np.abs(xs[:, None] - xs[None, :])
    iu = np.triu_indices(len(xs), 1)
    return diff[iu] / sep[iu] ** alpha


def test_lacunary_dimension():
    assert lacunary_depth(4, 2.0 ** -12) == 6
    assert build_lacunary(0.5, 4, 2.0 ** -12).d == 15


def test_lacunary_at_zero():
    emb = build_lacunary(0.37, 4, 2.0 ** -10)
    v = emb(np.array([0.0]))[0]
    K = lacunary_depth(4, 2.0 ** -10)
    assert np.allclose(v[0:2 * (K + 1):2], 4.0 ** (-0.37 * np.arange(K + 1)), rtol=0, atol=1e-15)
    assert np.all(v[1:2 * (K + 1):2] == 0.0)


def test_lacunary_dimension_ceiling():
    with pytest.raises(ValueError):
        build_lacunary(0.4, 4, 2.0 ** -40, max_dim=16)


def test_lacunary_certificate_stable():
    emb = build_lacunary(0.4, 4, 2.0 ** -16)
    cert = certify_biholder(emb, grids=(2 ** 12, 2 ** 16))
    (_, a), (_, b) = cert.trace
    assert b > 0 and abs(b - a) / a <= 0.1


def test_lacunary_grid_path_matches_float_path():
    emb = build_lacunary(0.4, 4, 2.0 ** -12)
    n = 999
    assert np.allclose(emb.at_rationals(np.arange(n + 1), n), emb(np.arange(n + 1) / n), atol=1e-9)


def test_lacunary_certificate_matches_brute_force():
    emb = build_lacunary(0.4, 4, 2.0 ** -6)
    n = 128
    xs = np.arange(n + 1) / n
    r = brute_ratios(emb(xs), xs, 0.4)
    cert = certify_biholder(emb, grids=(n,))
    assert cert.c1 == pytest.approx(r.min(), rel=1e-12)
    assert cert.c2 == pytest.approx(r.max(), rel=1e-12)


@given(st.floats(0.1, 0.9), st.sampled_from([2, 3, 4, 8]), st.integers(3, 10))
def test_lacunary_upper_bound_sound(alpha, lam, k):
    emb = build_lacunary(alpha, lam, float(lam) ** -k)
    cert = certify_biholder(emb, grids=(256,))
    assert cert.c2 <= emb.c2_bound


def test_koch_parameters_classical():
    r, phi = koch_parameters(math.log(3) / math.log(4))
    assert r == pytest.approx(1 / 3, abs=1e-14)
    assert phi == pytest.approx(math.pi / 3, abs=1e-7)


def test_koch_endpoints():
    emb = build_koch(0.75)
    v = emb(np.array([0.0, 1.0]))
    assert np.allclose(v, [[0, 0], [1, 0]], atol=1e-12)


def test_koch_dyadic_ratio_spread():
    a = math.log(3) / math.log(4)
    emb = build_koch(a)
    ratios = []
    for k in range(1, 9):
        h = 4.0 ** -k
        x = np.arange(0, 1 - h + 1e-15, h)
        d = np.abs(emb(x + h) - emb(x)).max(axis=1)
        ratios.append(d / h ** a)
    ratios = np.concatenate(ratios)
    assert ratios.min() > 0 and ratios.max() / ratios.min() < 10


@given(st.floats(0.55, 0.95), st.floats(0.0, 1.0))
def test_koch_self_similarity(alpha, x):
    emb = build_koch(alpha)
    offsets, mults = koch_maps(alpha)
    z = emb(np.array([x]))[0]
    w = offsets[0] + mults[0] * complex(z[0], z[1])
    lhs = emb(np.array([x / 4]))[0]
    assert np.allclose(lhs, [w.real, w.imag], atol=1e-10)


def test_koch_rejects_small_alpha():
    with pytest.raises(ValueError):
        build_koch(0.4)


def test_weierstrass_embedding_single_cosine():
    emb = build_weierstrass_embedding(WeierstrassEmbeddingSpec((cosine_generator(),), 2, 0.5))
    assert emb(np.array([0.0]))[0, 0] == pytest.approx(1 / (1 - 2 ** -0.5), abs=1e-9)
    assert emb.d == 1 and emb.periodic


def test_weierstrass_embedding_zero_perturbation():
    emb = build_weierstrass_embedding(WeierstrassEmbeddingSpec((cosine_generator(), triangle_generator()), 2, 0.4))
    f = takagi(0.4)
    assert np.array_equal(perturb(f, Perturbation((0.0, 0.0), emb)).on_grid(64), f.on_grid(64))


def test_weierstrass_embedding_shifted_copy_differs():
    g = cosine_generator()
    emb = build_weierstrass_embedding(WeierstrassEmbeddingSpec((g, g.shifted(0.25)), 2, 0.5))
    v = emb.at_rationals(np.arange(65), 64)
    assert not np.allclose(v[:, 0], v[:, 1])


def test_identity_certificate():
    cert = certify_biholder(identity_embedding(), 1.0, grids=(64, 256))
    assert cert.c1 == pytest.approx(1.0, abs=1e-12) and cert.c2 == pytest.approx(1.0, abs=1e-12)


def test_helix_is_rejected():
    cert = certify_biholder(helix_embedding(), 0.5, grids=(2 ** 10, 2 ** 14))
    (_, a), (_, b) = cert.trace
    assert a / b == pytest.approx(4.0, rel=0.05)


def test_certificate_trace_monotone():
    emb = build_lacunary(0.6, 3, 3.0 ** -7)
    cert = certify_biholder(emb, grids=(64, 256, 1024, 8192), full_scan_max=1024, random_pairs=10 ** 4)
    c1 = [c for _, c in cert.trace]
    c2 = [c for _, c in cert.upper_trace]
    assert all(b <= a for a, b in zip(c1, c1[1:]))
    assert all(b >= a for a, b in zip(c2, c2[1:]))
    assert cert.c1 == c1[-1] and cert.c2 == c2[-1]


def test_reverse_holder_linear():
    frac = reverse_holder_fraction(linear_function(1.0), 0.5, 0.5, 0.0, (0.0, 1.0), n=4096)
    assert frac == pytest.approx(0.75, abs=1e-3)


def test_reverse_holder_constant():
    assert reverse_holder_fraction(constant_function(2.0), 0.5, 0.01, 0.3, (0.0, 1.0)) == 0.0


def test_reverse_holder_takagi_positive():
    f = takagi(0.5)
    rng = np.random.default_rng(7)
    fracs = []
    for _ in range(64):
        k = int(rng.integers(0, 7))
        j = int(rng.integers(0, 2 ** k))
        lo, hi = j / 2 ** k, (j + 1) / 2 ** k
        fracs.append(reverse_holder_fraction(f, 0.5, 0.05, float(rng.uniform(lo, hi)), (lo, hi), n=1024))
    assert min(fracs) > 0


@given(st.floats(0.01, 0.5), st.floats(0.0, 1.0))
def test_reverse_holder_monotone_in_eps(eps, x):
    f = takagi(0.5)
    a = reverse_holder_fraction(f, 0.5, eps, x, (0.0, 1.0), n=512)
    b = reverse_holder_fraction(f, 0.5, 2 * eps, x, (0.0, 1.0), n=512)
    assert b <= a


def test_reverse_holder_requires_point_in_interval():
    with pytest.raises(ValueError):
        reverse_holder_fraction(takagi(0.5), 0.5, 0.1, 0.9, (0.0, 0.5))
    with pytest.raises(ValueError):
        reverse_holder_fraction(takagi(0.5), 0.5, 0.1, 0.5, (0.5, 0.5))


def test_search_budget_one_returns_seed_specimen():
    spec, cert = search_embedding(2, 0.7, 2, 1, seed=3, grids=(256,))
    again = search_embedding(2, 0.7, 2, 1, seed=3, grids=(256,))
    assert len(again.trace) == 1
    assert spec == again.spec and cert == again.certificate


def test_search_is_deterministic_and_elitist():
    a = search_embedding(2, 0.7, 4, 30, seed=1, working_n=256, grids=(256, 1024))
    b = search_embedding(2, 0.7, 4, 30, seed=1, working_n=256, grids=(256, 1024))
    assert np.array_equal(a.coefficients, b.coefficients)
    assert a.trace == b.trace
    assert all(y >= x for x, y in zip(a.trace, a.trace[1:]))
    assert a.trace[-1] >= a.trace[0]


def test_search_normalises_generators():
    res = search_embedding(3, 0.6, 3, 3, seed=0, working_n=128, grids=(128,))
    for g in res.spec.generators:
        assert g.lipschitz_bound == pytest.approx(1.0, rel=1e-12)


def test_custom_embedding_shape():
    emb = embedding_from_callable(lambda x: np.column_stack([x, x ** 2, x ** 3]), 3, 0.5)
    assert emb(np.linspace(0, 1, 7)).shape == (7, 3)


def test_search_full_budget_improves_on_initial_specimen():
    res = search_embedding(2, 0.7, 4, 200, seed=0, grids=(2 ** 8, 2 ** 10, 2 ** 12))
    assert len(res.trace) == 200
    assert res.trace[-1] >= res.trace[0]
    assert res.certificate.trace[0][0] == 2 ** 8
