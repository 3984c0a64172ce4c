import numpy as np
import pytest

import oracles
from conftest import closed_groups
from cocycle_lab import kernels
from cocycle_lab.errors import CarrierClosureError
from cocycle_lab.groups import build_word_ball

GROUPS = closed_groups()


@pytest.mark.parametrize("name", sorted(GROUPS))
def test_convolve_matches_loops(backend, name, rng):
    g = GROUPS[name]
    a = rng.standard_normal(g.order) + 1j * rng.standard_normal(g.order)
    b = rng.standard_normal(g.order) + 1j * rng.standard_normal(g.order)
    got = kernels.convolve(g.mul, a, b, backend=backend)
    np.testing.assert_allclose(got, oracles.convolve(g.mul, a, b), atol=1e-12)


@pytest.mark.parametrize("name", sorted(GROUPS))
def test_gram_convolve_with_unit_weight_is_adjoint_product(backend, name, rng):
    g = GROUPS[name]
    a = rng.standard_normal(g.order) + 1j * rng.standard_normal(g.order)
    b = rng.standard_normal(g.order)
    astar = np.conj(a[g.inv])
    got = kernels.gram_convolve(g.mul, g.inv, a, b, backend=backend)
    np.testing.assert_allclose(got, oracles.convolve(g.mul, astar, b), atol=1e-12)


def test_gram_convolve_weighted(backend, rng):
    g = GROUPS["S3"]
    n = g.order
    a, b = rng.standard_normal(n), rng.standard_normal(n)
    w = rng.standard_normal((n, n))
    want = np.zeros(n, dtype=complex)
    for x in range(n):
        for y in range(n):
            want[g.mul[g.inv[x], y]] += a[x] * b[y] * w[x, y]
    got = kernels.gram_convolve(g.mul, g.inv, a, b, w, backend=backend)
    np.testing.assert_allclose(got, want, atol=1e-12)


@pytest.mark.parametrize("name", ["Z6", "D4", "S4"])
def test_regular_matrix_matches_permutation_sum(backend, name, rng):
    g = GROUPS[name]
    a = rng.standard_normal(g.order) + 1j * rng.standard_normal(g.order)
    np.testing.assert_allclose(kernels.regular_matrix(g.mul, a, backend=backend),
                               oracles.dense(g.mul, a), atol=1e-12)


def test_regular_matrix_on_a_ball(backend):
    ball = build_word_ball(2, 2)
    ident = np.zeros(ball.order)
    ident[0] = 2.0
    assert np.array_equal(kernels.regular_matrix(ball.mul, ident, backend=backend),
                          2 * np.eye(ball.order))
    gen = (np.arange(ball.order) == 1).astype(float)
    with pytest.raises(CarrierClosureError):
        kernels.regular_matrix(ball.mul, gen, backend=backend)


def test_products_leaving_the_ball_raise(backend):
    ball = build_word_ball(2, 1)
    a = np.zeros(ball.order)
    a[1] = 1.0
    with pytest.raises(CarrierClosureError):
        kernels.convolve(ball.mul, a, a[ball.inv] * 0 + (np.arange(ball.order) == 3), backend=backend)
    # inside the ball nothing escapes
    e = np.zeros(ball.order)
    e[0] = 1.0
    np.testing.assert_allclose(kernels.convolve(ball.mul, a, e, backend=backend), a)


def test_latin_and_associativity(backend):
    g = GROUPS["S3"]
    assert kernels.is_latin(g.mul, backend=backend)
    assert kernels.associativity_exhaustive(g.mul, backend=backend) is None
    # a Latin square that is not associative: x*y = x - y mod 5
    bad = (np.arange(5)[:, None] - np.arange(5)[None, :]) % 5
    assert kernels.is_latin(bad, backend=backend)
    assert kernels.associativity_exhaustive(bad, backend=backend) is not None
    triples = np.array([[1, 2, 3], [0, 0, 0]])
    assert kernels.associativity_sampled(bad, triples, backend=backend) == (1, 2, 3)
    broken = g.mul.copy()
    broken[1, 1] = broken[1, 2]
    assert not kernels.is_latin(broken, backend=backend)


def test_backends_agree_on_large_group(rng):
    impls = kernels.backends()
    if len(impls) < 2:
        pytest.skip("compiled backend not built")
    from cocycle_lab.groups import build_symmetric
    g = build_symmetric(5)
    a = rng.standard_normal(g.order)
    b = rng.standard_normal(g.order)
    outs = [kernels.convolve(g.mul, a, b, backend=impl) for impl in impls.values()]
    np.testing.assert_allclose(outs[0], outs[1], atol=1e-12)
