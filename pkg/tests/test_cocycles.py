import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cocycle_lab.catalog import zn_roots
from cocycle_lab.cocycles import (SCHOENBERG_GRID, LengthFunction, ball_count_check,
                                  build_cocycle, cocycle_residuals, gromov_form,
                                  is_conditionally_negative, left_right_isometry_residual,
                                  random_length_function, schoenberg_check, separation_report)
from cocycle_lab.errors import NotApplicableError, ValidationError
from cocycle_lab.groups import build_cyclic, build_symmetric, build_word_ball
from conftest import closed_groups
from oracles import brute_cn

Z4 = build_cyclic(4)
ROOTS = LengthFunction(Z4, [0, 2, 4, 2])


def _relative(group, psi):
    n = group.order
    return np.array([[psi[group.mul[group.inv[g], h]] for h in range(n)] for g in range(n)])


def _inversions(label):
    p = list(map(int, label))
    return sum(p[i] > p[j] for i in range(len(p)) for j in range(i + 1, len(p)))


def test_length_function_validation():
    with pytest.raises(ValidationError):
        LengthFunction(Z4, [1, 2, 4, 2])
    with pytest.raises(ValidationError):
        LengthFunction(Z4, [0, 1, 4, 2])
    with pytest.raises(ValidationError):
        LengthFunction(Z4, [0, -1, 4, -1])
    with pytest.raises(ValidationError):
        LengthFunction(Z4, [0, 1, 1])


def test_gromov_form_roots():
    k = gromov_form(ROOTS)
    assert k[1, 2] == 2 and k[1, 3] == 0 and k[2, 2] == 4
    assert (k[0] == 0).all()
    assert np.allclose(k, k.T)
    assert np.array_equal(k, gromov_form(ROOTS, "right"))


def test_gromov_form_rejects_bad_side():
    with pytest.raises(ValidationError):
        gromov_form(ROOTS, "up")


def test_gromov_form_needs_closed_group():
    c = build_word_ball(2, 1)
    with pytest.raises(NotApplicableError):
        gromov_form(LengthFunction(c, [0, 1, 1, 1, 1]))


@pytest.mark.parametrize("values,expected", [
    ([0, 2, 4, 2], True),
    ([0, 0, 0, 0], True),
    ([0, 1, 10, 1], False),
    ([0, 1, 1, 1], True),
])
def test_negativity_matches_oracles(values, expected):
    psi = LengthFunction(Z4, values)
    cert = is_conditionally_negative(psi)
    assert cert.passed is expected
    worst = brute_cn(_relative(Z4, psi.values))
    assert bool(worst <= 1e-9) is expected
    # circulant eigenvalues; the constant vector adds a zero eigenvalue
    eig = np.fft.fft(values).real[1:]
    assert cert.min_eig == pytest.approx(-max(0.0, eig.max()), abs=1e-12)


def test_failing_psi_value_frozen():
    cert = is_conditionally_negative(LengthFunction(Z4, [0, 1, 10, 1]))
    assert cert.min_eig == pytest.approx(-8.0, abs=1e-12)


def test_schoenberg_forward():
    res = schoenberg_check(ROOTS, [0.0, 0.1, 1.0, 10.0])
    assert all(ok for _, ok, _ in res)
    assert res[0][2] == pytest.approx(0.0, abs=1e-12)


def test_schoenberg_converse_on_grid():
    bad = LengthFunction(Z4, [0, 1, 10, 1])
    failing = [t for t, ok, _ in schoenberg_check(bad, SCHOENBERG_GRID) if not ok]
    assert failing and failing[0] == pytest.approx(1e-3)


def test_schoenberg_rejects_negative_time():
    with pytest.raises(ValidationError):
        schoenberg_check(ROOTS, [-1.0])


def test_build_roots_cocycle():
    c = build_cocycle(ROOTS)
    assert c.dim == 2
    assert np.abs(c.gram - gromov_form(ROOTS)).max() <= 1e-10
    # same geometry as the hand-made cocycle up to an orthogonal change of basis
    assert np.allclose(c.gram, zn_roots(4).gram, atol=1e-10)


def test_build_zero_psi():
    c = build_cocycle(LengthFunction(Z4, np.zeros(4)))
    assert c.dim == 0 and c.b.shape == (4, 0)
    rep = separation_report(c)
    assert rep.delta == 0 and not rep.injective and not rep.standard


def test_build_z2():
    c = build_cocycle(LengthFunction(build_cyclic(2), [0, 4]))
    assert c.dim == 1
    assert abs(c.b[1, 0]) == pytest.approx(2.0)


def test_build_rejects_non_negative_type():
    with pytest.raises(ValidationError):
        build_cocycle(LengthFunction(Z4, [0, 1, 10, 1]))


@pytest.mark.parametrize("name", sorted(closed_groups()))
@pytest.mark.parametrize("side", ["left", "right"])
def test_round_trip_random_psi(name, side):
    g = closed_groups()[name]
    psi = random_length_function(g, np.random.default_rng(3), rank=2)
    c = build_cocycle(psi, side)
    res = cocycle_residuals(c)
    assert res["gram"] <= 1e-10 * max(1, psi.values.max())
    assert res["length"] <= 1e-10 * max(1, psi.values.max())
    assert res["law"] <= 1e-8 and res["orthogonality"] <= 1e-8
    assert res["representation"] <= 1e-8


def test_left_right_isometry_abelian():
    l, r = build_cocycle(ROOTS, "left"), build_cocycle(ROOTS, "right")
    assert left_right_isometry_residual(l, r) <= 1e-12


def test_left_right_isometry_s3_inversions():
    s3 = build_symmetric(3)
    sq = LengthFunction(s3, [_inversions(x) ** 2 for x in s3.labels])
    assert not is_conditionally_negative(sq).passed
    psi = LengthFunction(s3, [_inversions(x) for x in s3.labels])
    assert brute_cn(_relative(s3, psi.values)) <= 1e-9
    l, r = build_cocycle(psi, "left"), build_cocycle(psi, "right")
    assert l.dim == 3
    assert left_right_isometry_residual(l, r) <= 1e-8


def test_left_right_isometry_zero_dim():
    z = LengthFunction(Z4, np.zeros(4))
    assert left_right_isometry_residual(build_cocycle(z), build_cocycle(z, "right")) == 0


def test_left_right_isometry_needs_sides():
    c = build_cocycle(ROOTS)
    with pytest.raises(ValidationError):
        left_right_isometry_residual(c, c)


def test_separation_roots():
    rep = separation_report(build_cocycle(ROOTS))
    assert rep.delta == pytest.approx(2.0)
    assert rep.injective and rep.standard


def test_ball_count_roots():
    rows = ball_count_check(build_cocycle(ROOTS), [0.0, 1.5, 10.0])
    assert rows[0]["count"] == 1 and rows[0]["bound"] == 1
    assert rows[1]["count"] == 3 and rows[1]["bound"] == pytest.approx(6.25)
    assert rows[2]["count"] == 4
    assert all(r["pass"] for r in rows)


def test_ball_count_needs_separation():
    with pytest.raises(NotApplicableError):
        ball_count_check(build_cocycle(LengthFunction(Z4, np.zeros(4))), [1.0])


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from(["Z6", "D4", "S3", "Heis2"]))
def test_random_psi_is_negative_type(seed, name):
    g = closed_groups()[name]
    psi = random_length_function(g, np.random.default_rng(seed))
    assert is_conditionally_negative(psi).passed
    assert all(ok for _, ok, _ in schoenberg_check(psi, SCHOENBERG_GRID))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_action_preserves_inner_products(seed):
    rng = np.random.default_rng(seed)
    g = closed_groups()["S4"]
    c = build_cocycle(random_length_function(g, rng, rank=1))
    x, y = rng.standard_normal((2, c.dim))
    a = c.alpha[rng.integers(g.order)]
    assert abs((a @ x) @ (a @ y) - x @ y) <= 1e-8 * (1 + abs(x) @ abs(y))
