"""Group von Neumann algebra numerics on finite carriers.

Elements are coefficient vectors ``f_hat`` indexed by group elements; the
trace is ``f_hat[0]`` and norms come from the left-regular matrix.
"""
from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .cocycles import Cocycle, LengthFunction, zero_tol
from .errors import InvalidParameter, NumericalInconsistency, ValidationError
from .groups import is_closed

BMO_GRID = np.logspace(-4, 4, 25)
KS_TOL = 1e-8


def psi_values(psi) -> np.ndarray:
    """Length values from a LengthFunction, a Cocycle or a plain array."""
    if isinstance(psi, LengthFunction):
        return psi.values
    if isinstance(psi, Cocycle):
        return psi.psi
    return np.asarray(psi, dtype=np.float64)


def _group_of(psi):
    return getattr(psi, "group", None)


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    group: object
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=np.complex128).ravel()
        if c.shape != (self.group.order,):
            raise ValidationError(f"{c.size} coefficients for a carrier of order {self.group.order}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def delta(cls, group, g: int = 0, scale: complex = 1.0) -> "AlgebraElement":
        """The character ``scale * lambda(g)``."""
        c = np.zeros(group.order, dtype=np.complex128)
        c[g] = scale
        return cls(group, c)

    @classmethod
    def zero(cls, group) -> "AlgebraElement":
        return cls(group, np.zeros(group.order, dtype=np.complex128))

    def _same(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        if other.group is not self.group:
            raise ValidationError("elements live on different groups", operation="algebra")
        return other

    def __add__(self, other):
        other = self._same(other)
        return AlgebraElement(self.group, self.coeffs + other.coeffs)

    def __sub__(self, other):
        other = self._same(other)
        return AlgebraElement(self.group, self.coeffs - other.coeffs)

    def __neg__(self):
        return AlgebraElement(self.group, -self.coeffs)

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return convolve(self, other)
        return AlgebraElement(self.group, self.coeffs * other)

    def __rmul__(self, scalar):
        return AlgebraElement(self.group, self.coeffs * scalar)

    @property
    def adjoint(self) -> "AlgebraElement":
        return adjoint(self)

    def to_json(self) -> dict:
        return {"group_id": getattr(self.group, "name", "group"),
                "coeffs": [[float(z.real), float(z.imag)] for z in self.coeffs]}

    @classmethod
    def from_json(cls, group, data: dict) -> "AlgebraElement":
        if data.get("group_id", group.name) != group.name:
            raise ValidationError(f"element belongs to {data['group_id']}, not {group.name}")
        pairs = np.asarray(data["coeffs"], dtype=np.float64).reshape(-1, 2)
        return cls(group, pairs[:, 0] + 1j * pairs[:, 1])


def _check_pair(f1, f2):
    if f1.group is not f2.group:
        raise ValidationError("elements live on different groups", operation="convolve")


def adjoint(f: AlgebraElement) -> AlgebraElement:
    return AlgebraElement(f.group, np.conj(f.coeffs[f.group.inv]))


def convolve(f1: AlgebraElement, f2: AlgebraElement) -> AlgebraElement:
    _check_pair(f1, f2)
    return AlgebraElement(f1.group, kernels.convolve(f1.group.mul, f1.coeffs, f2.coeffs))


def to_matrix(f: AlgebraElement) -> np.ndarray:
    """Matrix of left multiplication by ``f`` on l2(G): ``[lambda(g)]_{gh,h} = 1``."""
    _require_closed(f.group, "to_matrix")
    return kernels.regular_matrix(f.group.mul, f.coeffs)


def _require_closed(group, op):
    if not is_closed(group):
        raise ValidationError(f"{op} needs a closed group, got the partial carrier {group.name}",
                              operation=op)


def trace(f: AlgebraElement) -> complex:
    return complex(f.coeffs[0])


def _check_p(p):
    p = float(p)
    if not p >= 1:
        raise InvalidParameter(f"p must lie in [1, inf], got {p}", operation="lp_norm")
    return p


def schatten(singular_values: np.ndarray, p: float) -> float:
    """Normalized Schatten norm ``((1/N) sum s^p)^(1/p)``; ``p = inf`` gives ``max s``."""
    s = np.asarray(singular_values)
    if np.isinf(p):
        return float(s.max(initial=0.0))
    top = s.max(initial=0.0)
    if top == 0.0:
        return 0.0
    # scale out the top singular value so large p does not overflow
    return float(top * np.mean((s / top) ** p) ** (1.0 / p))


def matrix_lp_norm(m: np.ndarray, p: float) -> float:
    p = _check_p(p)
    return schatten(np.linalg.svd(m, compute_uv=False), p)


def psd_lp_norm(h: np.ndarray, p: float, tol: float = 1e-10) -> tuple:
    """``||h^(1/2)||_p`` for a Hermitian PSD ``h``; returns (norm, min eigenvalue)."""
    mu = np.linalg.eigvalsh((h + h.conj().T) / 2)
    lo = float(mu.min(initial=0.0))
    scale = max(1.0, float(np.abs(mu).max(initial=0.0)))
    if lo < -tol * scale:
        raise NumericalInconsistency(f"square function is not PSD (min eigenvalue {lo:.3e})",
                                     operation="psd_lp_norm")
    return schatten(np.sqrt(np.clip(mu, 0.0, None)), p), lo


def lp_norm(f: AlgebraElement, p: float) -> float:
    p = _check_p(p)
    return schatten(np.linalg.svd(to_matrix(f), compute_uv=False), p)


def l2_norm(f: AlgebraElement) -> float:
    """Plancherel: the coefficient l2 norm."""
    return float(np.linalg.norm(f.coeffs))


def amplified_matrix(group, blocks) -> np.ndarray:
    """``sum_g lambda(g) (x) F_g`` for ``blocks`` of shape ``(N, m, m)``."""
    _require_closed(group, "amplified_matrix")
    blocks = np.asarray(blocks, dtype=np.complex128)
    n, m = group.order, blocks.shape[1]
    out = np.zeros((n, m, n, m), dtype=np.complex128)
    ar = np.arange(n)
    for g in range(n):
        out[group.mul[g, ar], :, ar, :] += blocks[g]
    return out.reshape(n * m, n * m)


def amplified_lp_norm(group, blocks, p: float) -> float:
    """Norm in ``S_p^m(L_p(G))``: normalized trace on L(G), plain trace on M_m."""
    p = _check_p(p)
    s = np.linalg.svd(amplified_matrix(group, blocks), compute_uv=False)
    m = np.asarray(blocks).shape[1]
    if np.isinf(p):
        return float(s.max(initial=0.0))
    return schatten(s, p) * m ** (1.0 / p)


def semigroup_apply(psi, t: float, f: AlgebraElement) -> AlgebraElement:
    if t < 0:
        raise InvalidParameter(f"semigroup time must be >= 0, got {t}", operation="semigroup_apply")
    return AlgebraElement(f.group, np.exp(-t * psi_values(psi)) * f.coeffs)


def g0_mask(psi) -> np.ndarray:
    """Membership in ``G_0 = {psi = 0}``; validates that it is a subgroup."""
    vals = psi_values(psi)
    mask = vals <= zero_tol(vals)
    group = _group_of(psi)
    if group is not None and is_closed(group):
        idx = np.flatnonzero(mask)
        if not mask[group.mul[np.ix_(idx, idx)]].all() or not mask[group.inv[idx]].all():
            raise ValidationError("zero set of psi is not a subgroup",
                                  operation="conditional_expectation_G0")
    return mask


def conditional_expectation_G0(psi, f: AlgebraElement) -> AlgebraElement:
    return AlgebraElement(f.group, np.where(g0_mask(psi), f.coeffs, 0))


def project_J(psi, f: AlgebraElement) -> AlgebraElement:
    return AlgebraElement(f.group, np.where(g0_mask(psi), 0, f.coeffs))


def random_element(group, rng, mask=None, normalize: bool = True) -> AlgebraElement:
    """Complex gaussian coefficients on ``mask`` (default: all), unit l2 norm."""
    n = group.order
    mask = np.ones(n, dtype=bool) if mask is None else np.asarray(mask, dtype=bool)
    if not mask.any():
        return AlgebraElement.zero(group)
    while True:
        c = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) * mask
        norm = np.linalg.norm(c)
        if norm > 0:
            return AlgebraElement(group, c / norm if normalize else c)


@dataclass
class BmoReport:
    column: float
    row: float
    norm: float
    min_eigs: list
    t_grid: list
    argmax_t: float
    boundary_warning: bool

    def to_json(self) -> dict:
        return dict(self.__dict__)


def _deviation(psi, t, f):
    st = semigroup_apply(psi, t, f)
    ff = kernels.gram_convolve(f.group.mul, f.group.inv, f.coeffs, f.coeffs)
    dev = np.exp(-t * psi_values(psi)) * ff - kernels.gram_convolve(
        f.group.mul, f.group.inv, st.coeffs, st.coeffs)
    mat = to_matrix(AlgebraElement(f.group, dev))
    return np.linalg.eigvalsh((mat + mat.conj().T) / 2)


def bmo_norm(psi, f: AlgebraElement, t_grid=None, tol: float = KS_TOL) -> BmoReport:
    """Semigroup BMO norm, sup over ``t`` taken on a finite grid.

    ``D_t = S_t(f* f) - (S_t f)*(S_t f)`` must be PSD; a negative eigenvalue
    beyond ``tol`` means the semigroup is not completely positive.
    """
    grid = np.asarray(BMO_GRID if t_grid is None else t_grid, dtype=np.float64)
    if grid.size == 0 or (grid <= 0).any():
        raise InvalidParameter("t grid must be nonempty and positive", operation="bmo_norm")
    scale = max(1.0, float(np.abs(f.coeffs).sum()) ** 2)
    fstar = adjoint(f)
    cols, rows, mins = [], [], []
    for t in grid:
        ec, er = _deviation(psi, t, f), _deviation(psi, t, fstar)
        lo = float(min(ec[0], er[0]))
        if lo < -tol * scale:
            raise NumericalInconsistency(
                f"Kadison-Schwarz deviation has eigenvalue {lo:.3e} at t={t:g}",
                operation="bmo_norm")
        mins.append(lo)
        cols.append(np.sqrt(max(ec[-1], 0.0)))
        rows.append(np.sqrt(max(er[-1], 0.0)))
    both = np.maximum(cols, rows)
    k = int(np.argmax(both))
    boundary = both[k] > 0 and k in (0, grid.size - 1)
    if boundary:
        warnings.warn(f"BMO sup attained at the grid edge t={grid[k]:g}; the grid may underestimate")
    return BmoReport(float(max(cols)), float(max(rows)), float(both[k]), mins, grid.tolist(),
                     float(grid[k]), bool(boundary))


def write_norm_rows(path, rows) -> None:
    """CSV of ``(group, element_id, p, norm)`` rows."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["group", "element_id", "p", "norm"])
        for r in rows:
            w.writerow(r)
