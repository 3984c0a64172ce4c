"""A small, safe expression language for declarative symbols.

Expressions are parsed with :mod:`ast` and only arithmetic, a handful of
functions and the declared variables are accepted.  ``|xi|`` is shorthand
for the Euclidean norm ``r``.

    >>> f = compile_expression("cutoff(r, 3, 4) * r**0.5", n=2)
    >>> float(f([[3.0, 4.0]])[0])
    0.0
"""
from __future__ import annotations

import ast
import operator
import re

import numpy as np

from .errors import InvalidParameter


def smooth_step(x):
    """C-infinity step: 0 for x <= 0, 1 for x >= 1."""
    x = np.asarray(x, dtype=np.float64)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        a = np.where(x > 0, np.exp(-1.0 / np.where(x > 0, x, 1.0)), 0.0)
        b = np.where(x < 1, np.exp(-1.0 / np.where(x < 1, 1.0 - x, 1.0)), 0.0)
        return a / (a + b)


def cutoff(t, a, b):
    """Smooth truncation: 1 for ``t <= a``, 0 for ``t >= b``."""
    return 1.0 - smooth_step((np.asarray(t, dtype=np.float64) - a) / (b - a))


FUNCTIONS = {
    "abs": np.abs, "sin": np.sin, "cos": np.cos, "exp": np.exp, "sqrt": np.sqrt,
    "log": np.log, "cutoff": cutoff, "step": smooth_step,
}
CONSTANTS = {"pi": np.pi, "e": np.e}
_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_UNARY = {ast.USub: operator.neg, ast.UAdd: operator.pos}


def _check(node, names):
    if isinstance(node, ast.Expression):
        return _check(node.body, names)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float, complex)):
        return
    if isinstance(node, ast.Name):
        if node.id not in names and node.id not in CONSTANTS:
            raise InvalidParameter(f"unknown name {node.id!r} in expression")
        return
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        _check(node.left, names)
        return _check(node.right, names)
    if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
        return _check(node.operand, names)
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) \
            and node.func.id in FUNCTIONS and not node.keywords:
        for a in node.args:
            _check(a, names)
        return
    raise InvalidParameter(f"unsupported syntax: {ast.dump(node)[:60]}")


def _eval(node, env):
    if isinstance(node, ast.Expression):
        return _eval(node.body, env)
    if isinstance(node, ast.Constant):
        return node.value
    if isinstance(node, ast.Name):
        return env[node.id] if node.id in env else CONSTANTS[node.id]
    if isinstance(node, ast.BinOp):
        return _BINOPS[type(node.op)](_eval(node.left, env), _eval(node.right, env))
    if isinstance(node, ast.UnaryOp):
        return _UNARY[type(node.op)](_eval(node.operand, env))
    return FUNCTIONS[node.func.id](*[_eval(a, env) for a in node.args])


def parse(source: str, names) -> ast.Expression:
    source = re.sub(r"\|\s*xi\s*\|", "r", source)
    try:
        tree = ast.parse(source, mode="eval")
    except SyntaxError as exc:
        raise InvalidParameter(f"cannot parse expression {source!r}: {exc.msg}") from None
    _check(tree, set(names))
    return tree


def compile_expression(source: str, n: int = 1):
    """Vectorized symbol ``xi -> value`` over points of shape ``(..., n)``.

    Variables: ``xi1..xin`` (``x1..xn`` also accepted), ``r = |xi|``.
    """
    names = [f"xi{i + 1}" for i in range(n)] + [f"x{i + 1}" for i in range(n)] + ["r"]
    if n == 1:
        names += ["xi", "x"]
    tree = parse(source, names)

    def symbol(xi):
        xi = np.asarray(xi, dtype=np.float64)
        if n == 1 and (xi.ndim == 0 or xi.shape[-1] != 1):
            xi = xi[..., None]
        env = {"r": np.linalg.norm(xi, axis=-1)}
        for i in range(n):
            env[f"xi{i + 1}"] = env[f"x{i + 1}"] = xi[..., i]
        if n == 1:
            env["xi"] = env["x"] = xi[..., 0]
        with np.errstate(all="ignore"):
            out = _eval(tree, env)
        return np.broadcast_to(np.asarray(out), env["r"].shape).copy()

    symbol.source = source
    return symbol


def compile_scalar(source: str, var: str = "s"):
    """Vectorized ``s -> value`` for one-variable expressions (bump functions)."""
    tree = parse(source, [var])

    def fn(s):
        s = np.asarray(s, dtype=np.float64)
        with np.errstate(all="ignore"):
            out = _eval(tree, {var: s})
        return np.broadcast_to(np.asarray(out), s.shape).copy()

    fn.source = source
    return fn
