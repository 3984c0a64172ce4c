"""Dyadic Littlewood-Paley families and row/column square functions."""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

from .algebra import (AlgebraElement, g0_mask, lp_norm, project_J, psd_lp_norm, psi_values,
                      to_matrix)
from .errors import InvalidParameter, UnsupportedRangeError
from .expr import compile_scalar, smooth_step


def eta(s):
    """Smooth cutoff: 1 on [0, 1], 0 on [2, inf)."""
    return 1.0 - smooth_step(np.asarray(s, dtype=np.float64) - 1.0)


def default_bump(s):
    """``eta(s) - eta(2s)``: supported in the annulus [1/2, 2]."""
    return eta(s) - eta(2.0 * s)


@dataclass(frozen=True)
class DyadicFamily:
    """``h_m(x) = rho(2^-m sqrt(x))`` for ``m_min <= m <= m_max``; ``h_m(0) = 0``."""

    rho: object = default_bump
    m_min: int = -4
    m_max: int = 4
    normalized: bool = True
    bump: str = "default"
    extended: bool = False

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.m_min, self.m_max + 1)

    def raw(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        s = np.sqrt(np.clip(x, 0.0, None))[None, :] * 2.0 ** (-self.indices[:, None])
        out = np.asarray(self.rho(s), dtype=np.float64).reshape(s.shape)
        out[:, x <= 0] = 0.0
        return out

    def evaluate(self, x) -> np.ndarray:
        """Table of shape ``(M, len(x))``."""
        h = self.raw(x)
        if self.normalized:
            tot = np.sqrt((h ** 2).sum(axis=0))
            h = np.divide(h, tot, out=np.zeros_like(h), where=tot > 0)
        return h

    def covers(self, values) -> bool:
        lo, hi = required_range(values)
        return lo is None or (self.m_min <= lo and self.m_max >= hi)

    def to_json(self) -> dict:
        return {"bump": self.bump, "m_min": self.m_min, "m_max": self.m_max,
                "normalize": self.normalized, "extended": self.extended}


def required_range(values):
    """Smallest ``[m_min, m_max]`` with ``2^m`` spanning ``[sqrt(min+)/2, 2 sqrt(max)]``."""
    v = np.asarray(values, dtype=np.float64)
    pos = v[v > 1e-12 * (1.0 + v.max(initial=0.0))]
    if pos.size == 0:
        return None, None
    lo = int(np.floor(np.log2(0.5 * np.sqrt(pos.min()))))
    hi = int(np.ceil(np.log2(2.0 * np.sqrt(pos.max()))))
    return lo, hi


def dyadic_family(rho="default", m_range=None, normalize: bool = True,
                  values=None) -> DyadicFamily:
    """Build a family; widen ``m_range`` automatically when ``values`` escape it.

    ``rho`` is ``"default"``, an expression in ``s`` or a callable.
    """
    if isinstance(rho, str):
        name = rho
        fn = default_bump if rho == "default" else compile_scalar(rho, "s")
    else:
        name, fn = getattr(rho, "source", getattr(rho, "__name__", "callable")), rho
    need = required_range(values) if values is not None else (None, None)
    extended = False
    if m_range is None:
        lo, hi = need if need[0] is not None else (-4, 4)
    else:
        lo, hi = int(m_range[0]), int(m_range[1])
        if lo > hi:
            raise InvalidParameter("m_min must not exceed m_max", operation="dyadic_family")
        if need[0] is not None and (need[0] < lo or need[1] > hi):
            lo, hi, extended = min(lo, need[0]), max(hi, need[1]), True
    fam = DyadicFamily(fn, lo, hi, normalize, name, extended)
    if values is not None and normalize:
        v = np.asarray(values, dtype=np.float64)
        tot = (fam.raw(v[v > 0]) ** 2).sum(axis=0)
        if (tot <= 0).any():
            raise InvalidParameter("bump vanishes at a needed value; cannot normalize",
                                   operation="dyadic_family")
    return fam


def _pieces(psi, family, f):
    vals = psi_values(psi)
    h = family.evaluate(vals)
    return [AlgebraElement(f.group, row * f.coeffs) for row in h]


def _check_p(p, op):
    if not p >= 2:
        raise UnsupportedRangeError(
            f"p = {p} < 2 needs the sum decomposition of row and column spaces, which is not "
            "implemented", operation=op)


@dataclass
class SquareNorms:
    column: float
    row: float
    rc: float
    min_eig: float
    extras: dict = field(default_factory=dict)


def square_sums(psi, family, f):
    """``(sum_m T_m f^* T_m f, sum_m T_m f T_m f^*)`` as matrices."""
    mats = [to_matrix(t) for t in _pieces(psi, family, f)]
    col = sum(m.conj().T @ m for m in mats)
    row = sum(m @ m.conj().T for m in mats)
    return col, row


def square_function_norms(psi, family, f, p: float) -> SquareNorms:
    _check_p(p, "square_function_norms")
    col, row = square_sums(psi, family, f)
    c, lo_c = psd_lp_norm(col, p)
    r, lo_r = psd_lp_norm(row, p)
    return SquareNorms(c, r, max(c, r), min(lo_c, lo_r))


def reconstruction_check(psi, family, f, p: float) -> dict:
    """``||J f||_p`` against the RC square-function norm."""
    _check_p(p, "reconstruction_check")
    if not family.normalized:
        raise InvalidParameter("reconstruction needs a normalized family",
                               operation="reconstruction_check")
    lhs = lp_norm(project_J(psi, f), p)
    rhs = square_function_norms(psi, family, f, p).rc
    ratio = lhs / rhs if rhs > 0 else (1.0 if lhs == 0 else float("inf"))
    return {"lhs": lhs, "rhs": rhs, "ratio": ratio if lhs or rhs else None}


def partition_defect(psi, family) -> float:
    """``max |sum_m h_m(psi(g))^2 - 1|`` over ``g`` off ``G_0``."""
    vals = psi_values(psi)
    off = ~g0_mask(psi)
    tot = (family.evaluate(vals[off]) ** 2).sum(axis=0)
    return float(np.abs(tot - 1.0).max(initial=0.0))


def derivative_envelope(family, k: int, grid=None, step_rel: float = 1e-3) -> float:
    """Empirical ``c`` in ``sum_m |d^k h_m(x)|^2 <= c x^(-2k)`` on a log grid."""
    x = np.logspace(-2, 2, 401) if grid is None else np.asarray(grid, dtype=np.float64)
    if k == 0:
        return float((family.evaluate(x) ** 2).sum(axis=0).max())
    h = step_rel * x
    acc = 0.0
    for j in range(k + 1):
        acc = acc + (-1) ** j * comb(k, j) * family.evaluate(x + (k / 2 - j) * h)
    deriv = acc / h ** k
    return float(((deriv ** 2).sum(axis=0) * x ** (2 * k)).max())
