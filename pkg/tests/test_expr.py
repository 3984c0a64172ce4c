import numpy as np
import pytest

from cocycle_lab.errors import InvalidParameter
from cocycle_lab.expr import compile_expression, compile_scalar, cutoff, smooth_step


def test_smooth_step_limits():
    x = np.array([-1.0, 0.0, 0.5, 1.0, 2.0])
    assert smooth_step(x).tolist() == [0.0, 0.0, 0.5, 1.0, 1.0]


def test_cutoff():
    t = np.array([0.0, 3.0, 3.5, 4.0, 9.0])
    out = cutoff(t, 3, 4)
    assert out[0] == 1 and out[1] == 1 and out[3] == 0 and out[4] == 0
    assert out[2] == pytest.approx(0.5)


@pytest.mark.parametrize("src,point,want", [
    ("xi1 + 2*xi2", [1.0, 3.0], 7.0),
    ("|xi|", [3.0, 4.0], 5.0),
    ("r**2 - x1*x2", [3.0, 4.0], 13.0),
    ("sin(pi*xi1/2) + exp(0)", [1.0, 0.0], 2.0),
    ("abs(-xi2)", [0.0, -2.0], 2.0),
    ("sqrt(xi1) * log(e)", [4.0, 0.0], 2.0),
])
def test_expression_values(src, point, want):
    f = compile_expression(src, n=2)
    assert f(np.array([point]))[0] == pytest.approx(want)


def test_one_dimensional_aliases():
    f = compile_expression("xi * x + |xi|", n=1)
    assert f(np.array([[-2.0]])).tolist() == [6.0]
    assert f(np.array([[1.0], [2.0]])).tolist() == [2.0, 6.0]


def test_constant_broadcasts():
    f = compile_expression("3", n=2)
    assert f(np.zeros((4, 2))).tolist() == [3.0] * 4


@pytest.mark.parametrize("src", ["__import__('os')", "xi1.real", "lambda: 1", "xi3", "[1]",
                                 "sin(x=1)", "1 +"])
def test_rejects_unsafe_or_bad_input(src):
    with pytest.raises(InvalidParameter):
        compile_expression(src, n=2)


def test_scalar_bump():
    f = compile_scalar("cutoff(s, 1, 2)")
    assert f(np.array([0.5, 3.0])).tolist() == [1.0, 0.0]
    with pytest.raises(InvalidParameter):
        compile_scalar("t + 1")
