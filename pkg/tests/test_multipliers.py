import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize

from cocycle_lab.algebra import (AlgebraElement, conditional_expectation_G0, lp_norm,
                                 random_element)
from cocycle_lab.catalog import directional, haagerup, heisenberg_pullback, zn_roots
from cocycle_lab.cocycles import LengthFunction, build_cocycle, random_length_function
from cocycle_lab.errors import InvalidParameter, SymbolEvaluationError, ValidationError
from cocycle_lab.expr import compile_expression, cutoff
from cocycle_lab.groups import build_cyclic
from cocycle_lab.multipliers import (MultiplierSymbol, amplified_multiplier_norm, apply,
                                     constant_symbol, duality_probe, epsilon_free_conditions,
                                     g0_indicator, imaginary_power_symbol, l2_norm_exact,
                                     lifted_symbol, lp_norm_search, mihlin_check,
                                     SHELLS, multi_indices, partial_derivative, radial_symbol,
                                     riesz_symbol, schur_riesz_residual, sphere_directions)
import oracles
from conftest import closed_groups

ROOTS = zn_roots(4)
Z4 = ROOTS.group


def test_apply_identity_and_projection():
    f = random_element(Z4, np.random.default_rng(0))
    assert np.array_equal(apply(constant_symbol(Z4), f).coeffs, f.coeffs)
    e = apply(MultiplierSymbol(Z4, [1, 0, 0, 0]), f)
    assert np.array_equal(e.coeffs, [f.coeffs[0], 0, 0, 0])
    hp = heisenberg_pullback(2)
    g = random_element(hp.group, np.random.default_rng(1))
    assert np.array_equal(apply(g0_indicator(hp), g).coeffs,
                          conditional_expectation_G0(hp, g).coeffs)


def test_apply_group_mismatch():
    with pytest.raises(ValidationError):
        apply(constant_symbol(build_cyclic(4)), AlgebraElement.delta(Z4, 1))


def test_symbol_composition():
    rng = np.random.default_rng(2)
    m1 = MultiplierSymbol(Z4, rng.standard_normal(4))
    m2 = MultiplierSymbol(Z4, rng.standard_normal(4) + 1j)
    f = random_element(Z4, rng)
    twice = apply(m1, apply(m2, f)).coeffs
    assert np.abs(twice - apply(m1 * m2, f).coeffs).max() <= 1e-12


def test_riesz_roots_example():
    m = riesz_symbol(ROOTS, [1.0, 0.0])
    want = [0, 1j / np.sqrt(2), 1j, 1j / np.sqrt(2)]
    assert np.abs(m.values - want).max() <= 1e-12
    assert np.array_equal(riesz_symbol(ROOTS, [0.0, 0.0]).values, np.zeros(4))
    with pytest.raises(InvalidParameter):
        riesz_symbol(ROOTS, [1.0])


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_riesz_bounded_by_eta(seed):
    rng = np.random.default_rng(seed)
    c = haagerup(2, 2)
    eta = rng.standard_normal(c.dim)
    eta /= np.linalg.norm(eta)
    assert np.abs(riesz_symbol(c, eta).values).max() <= 1 + 1e-12


def test_radial_and_lifted():
    assert np.array_equal(radial_symbol(ROOTS, lambda x: np.ones_like(x)).values, np.ones(4))
    m = lifted_symbol(ROOTS, lambda b: (b ** 2).sum(axis=1))
    assert np.allclose(m.values, [0, 2, 4, 2])
    hp = heisenberg_pullback(2)
    lifted = lifted_symbol(hp, compile_expression("sin(xi1) + xi4 * r", n=4))
    centre = np.flatnonzero(hp.psi < 1e-12)
    assert np.allclose(lifted.values[centre], lifted.values[0])


def test_radial_constant_on_level_sets():
    psi = random_length_function(closed_groups()["S4"], np.random.default_rng(0))
    m = radial_symbol(psi, np.cos)
    for level in np.unique(np.round(psi.values, 9)):
        vals = m.values[np.abs(psi.values - level) < 1e-9]
        assert np.ptp(vals) == 0


def test_symbol_evaluation_error_names_element():
    with pytest.raises(SymbolEvaluationError) as info, np.errstate(divide="ignore"):
        radial_symbol(ROOTS, lambda x: 1.0 / x)
    assert info.value.element == 0


def test_imaginary_power_is_unimodular_off_g0():
    m = imaginary_power_symbol(ROOTS, 1.7)
    assert m.values[0] == 0
    assert np.allclose(np.abs(m.values[1:]), 1.0)
    assert m.values[2] == pytest.approx(4 ** 1.7j)


def test_symbol_json_round_trip():
    m = riesz_symbol(ROOTS, [0.3, 0.4])
    again = MultiplierSymbol.from_json(Z4, m.to_json())
    assert np.array_equal(again.values, m.values) and again.provenance == "riesz"
    with pytest.raises(ValidationError):
        MultiplierSymbol(Z4, np.ones(4), provenance="magic")


def test_l2_norm_exact_is_operator_norm():
    m = riesz_symbol(ROOTS, [0.6, 0.8])
    rng = np.random.default_rng(4)
    for _ in range(50):
        f = random_element(Z4, rng)
        assert lp_norm(apply(m, f), 2) <= l2_norm_exact(m) + 1e-12
    top = int(np.argmax(np.abs(m.values)))
    assert lp_norm(apply(m, AlgebraElement.delta(Z4, top)), 2) == pytest.approx(l2_norm_exact(m))


# -- Mihlin ----------------------------------------------------------------


def test_sphere_directions():
    d = sphere_directions(3, 16)
    assert d.shape == (16, 3)
    assert np.allclose(np.linalg.norm(d, axis=1), 1)
    assert np.array_equal(d[:6], np.concatenate([np.eye(3), -np.eye(3)]))


def test_multi_indices():
    assert sorted(multi_indices(2, 2)) == [(0, 2), (1, 1), (2, 0)]
    assert len(list(multi_indices(3, 3))) == 10


@pytest.mark.parametrize("beta,expected", [
    ((1, 0), lambda x, y: 3 * x ** 2 * y),
    ((0, 2), lambda x, y: 0 * x),
    ((1, 1), lambda x, y: 3 * x ** 2),
    ((2, 1), lambda x, y: 6 * x),
])
def test_partial_derivative_on_polynomial(beta, expected):
    f = compile_expression("xi1**3 * xi2", n=2)
    pts = np.array([[1.0, 2.0], [0.5, -1.0], [2.0, 3.0]])
    got = partial_derivative(f, pts, beta, step_rel=1e-3)
    assert np.allclose(got, expected(pts[:, 0], pts[:, 1]), rtol=1e-5, atol=1e-5)


def test_mihlin_riesz_direction():
    rep = mihlin_check(compile_expression("xi1 / |xi|", n=2), n=2, order=0)
    assert rep.hormander[0] == pytest.approx(1.0)
    assert rep.passed


def test_mihlin_constant():
    rep = mihlin_check(compile_expression("2", n=3), n=3)
    assert rep.order == 2
    assert rep.hormander[0] == 2
    assert rep.hormander[1] == 0 and rep.hormander[2] == 0


def test_mihlin_power_matches_closed_form():
    a = 0.5
    shells = np.logspace(-2, 0, 5)
    rep = mihlin_check(compile_expression(f"r**{a}", n=1), n=1, order=1, shells=shells)
    # |xi| |d/dxi |xi|^a| = a |xi|^a; every envelope peaks on the outer shell
    assert rep.hormander[1] == pytest.approx(a * shells.max() ** a, rel=1e-6)
    assert rep.minus_eps[1] == pytest.approx(a * shells.max() ** (a - 0.1), rel=1e-6)
    assert rep.plus_eps[1] == pytest.approx(a * shells.max() ** (a + 0.1), rel=1e-6)


def test_mihlin_quadratic_second_order():
    rep = mihlin_check(compile_expression("r**2", n=2), n=2, order=2, shells=[1.0, 2.0])
    # Hessian of |xi|^2 is 2 I
    assert rep.hormander[2] == pytest.approx(2 * 2.0 ** 2, rel=1e-6)


def test_mihlin_truncated_power_is_finite():
    f = compile_expression("|xi|**0.5 * cutoff(r, 3, 4)", n=4)
    rep = mihlin_check(f, n=4)
    assert rep.order == 3 and rep.directions >= 16
    assert all(np.isfinite(rep.hormander)) and not rep.nonfinite
    # order 0 is the radial profile itself, sampled on the shells
    assert rep.hormander[0] == pytest.approx((np.sqrt(SHELLS) * cutoff(SHELLS, 3, 4)).max())


def test_mihlin_threshold_and_nonfinite():
    rep = mihlin_check(compile_expression("r", n=1), n=1, order=1, threshold=10.0)
    assert not rep.passed
    rep = mihlin_check(compile_expression("log(r - 1)", n=1), n=1, order=0)
    assert rep.nonfinite and not rep.passed


def test_mihlin_order_cap():
    with pytest.raises(InvalidParameter):
        mihlin_check(compile_expression("r", n=2), n=2, order=5)


# -- Riesz factorization ---------------------------------------------------


@pytest.mark.parametrize("c,eta", [
    (zn_roots(4), [1.0, 0.0]),
    (zn_roots(8), [0.3, -0.7]),
    (directional([1.0, 0.5]), [1.0]),
    (heisenberg_pullback(3), [1.0, 0.0, 0.0, 0.0]),
])
def test_schur_riesz_residual(c, eta):
    assert schur_riesz_residual(c, eta) <= 1e-10
    assert schur_riesz_residual(c, np.zeros(c.dim)) == 0


def test_schur_riesz_needs_dimension():
    c = build_cocycle(LengthFunction(Z4, np.zeros(4)))
    with pytest.raises(InvalidParameter):
        schur_riesz_residual(c, [])


# -- norm probes --------------------------------------------------------------


@pytest.mark.parametrize("p", [1.5, 3, 4])
def test_search_on_scalar_multiplier(p):
    res = lp_norm_search(constant_symbol(Z4, 0.7j), p, trials=2, steps=10)
    assert res.lower_bound == pytest.approx(0.7, abs=1e-6)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2 ** 16))
def test_search_never_beats_plancherel(seed):
    rng = np.random.default_rng(seed)
    m = MultiplierSymbol(Z4, rng.standard_normal(4) + 1j * rng.standard_normal(4))
    res = lp_norm_search(m, 2, trials=2, steps=20, seed=seed)
    assert res.lower_bound <= l2_norm_exact(m) + 1e-9


def test_search_deterministic_under_seed():
    m = riesz_symbol(ROOTS, [1.0, 0.0])
    a = lp_norm_search(m, 4, seed=42)
    b = lp_norm_search(m, 4, seed=42)
    assert a.lower_bound == b.lower_bound and a.witness == b.witness


def test_riesz_z4_lower_bound():
    m = riesz_symbol(ROOTS, [1.0, 0.0])
    res = lp_norm_search(m, 4, trials=4, steps=50, seed=42)
    assert 1.0 <= res.lower_bound <= 10.0
    assert res.lower_bound == pytest.approx(1.0, abs=1e-12)
    assert res.best_start <= res.lower_bound

    # independent optimizer on the dense ratio
    mul = Z4.mul.tolist()

    def neg_ratio(x):
        f = x[:4] + 1j * x[4:]
        num = oracles.lp_norm(oracles.dense(mul, m.values * f), 4)
        return -num / oracles.lp_norm(oracles.dense(mul, f), 4)

    best = max(-minimize(neg_ratio, np.random.default_rng(s).standard_normal(8),
                         method="Nelder-Mead", options={"maxiter": 2000}).fun for s in range(3))
    assert best <= res.lower_bound + 1e-6


def test_search_rejects_bad_arguments():
    m = constant_symbol(Z4)
    with pytest.raises(InvalidParameter):
        lp_norm_search(m, 0.5)
    with pytest.raises(InvalidParameter):
        lp_norm_search(m, 2, trials=0)
    with pytest.raises(ValidationError):
        lp_norm_search(riesz_symbol(haagerup(2, 1), np.ones(4)), 2)


def test_duality_probe_reports():
    out = duality_probe(riesz_symbol(ROOTS, [1.0, 0.0]), 4, trials=1, steps=5)
    assert out["p_dual"] == pytest.approx(4 / 3)
    assert out["gap"] >= 0


def test_amplified_multiplier_with_scalar_blocks():
    m = riesz_symbol(ROOTS, [1.0, 0.0])
    f = random_element(Z4, np.random.default_rng(3))
    blocks = f.coeffs[:, None, None] * np.eye(2)
    want = lp_norm(apply(m, f), 4) / lp_norm(f, 4)
    assert amplified_multiplier_norm(m, blocks, 4) == pytest.approx(want)


def test_epsilon_free_conditions():
    roots = epsilon_free_conditions(ROOTS)
    assert roots["abelian"] and roots["lattice"] and roots["finite_action"]
    assert not roots["radial"]
    s4 = closed_groups()["S4"]
    c = build_cocycle(random_length_function(s4, np.random.default_rng(0)))
    assert not epsilon_free_conditions(c)["abelian"]
    irrational = directional([1.0, np.sqrt(2)])
    assert not epsilon_free_conditions(irrational)["lattice"]
    assert epsilon_free_conditions(directional([1.0, 0.5]))["lattice"]
