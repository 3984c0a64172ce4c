"""Generator, gradient form and the gaussian derivation at finite scale.

Expectations over the gaussian field that are quadratic in the field are
computed exactly with the covariance rule ``E[B(v) B(w)] = <v, w>``;
Monte Carlo is used only for Schatten norms with ``p != 2``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .algebra import (AlgebraElement, adjoint, convolve, g0_mask, lp_norm, psd_lp_norm,
                      psi_values, random_element, to_matrix)
from .cocycles import Cocycle
from .errors import (CarrierClosureError, DomainError, InvalidParameter, NotApplicableError,
                     NumericalInconsistency, UnsupportedRangeError, ValidationError)
from .groups import is_closed
from .seeding import child_rng

MC_BATCHES = 10
MC_CHUNK = 4096


def generator_apply(psi, f: AlgebraElement, s: float = 1.0) -> AlgebraElement:
    """``f_hat(g) -> psi(g)^s f_hat(g)``; negative ``s`` only off ``G_0``."""
    vals = psi_values(psi)
    zero = g0_mask(psi)
    if s < 0 and np.abs(f.coeffs[zero]).max(initial=0.0) > 0:
        raise DomainError("negative power of the generator on a G_0 coefficient",
                          operation="generator_apply")
    out = np.zeros_like(f.coeffs)
    if s == 0:
        out[:] = f.coeffs
    else:
        out[~zero] = vals[~zero] ** s * f.coeffs[~zero]
    return AlgebraElement(f.group, out)


def gamma_generator(psi, f1: AlgebraElement, f2: AlgebraElement) -> AlgebraElement:
    """``1/2 (A(f1*) f2 + f1* A(f2) - A(f1* f2))``, from the length values only."""
    vals = psi_values(psi)

    def gen(f):
        return AlgebraElement(f.group, vals * f.coeffs)

    f1s = adjoint(f1)
    t1 = convolve(gen(f1s), f2)
    t2 = convolve(f1s, gen(f2))
    t3 = gen(convolve(f1s, f2))
    return AlgebraElement(f1.group, 0.5 * (t1.coeffs + t2.coeffs - t3.coeffs))


def _check_matches(c: Cocycle, psi, op):
    if c.side != "left":
        raise ValidationError("the gradient form needs the left cocycle", operation=op)
    if psi is None:
        return
    vals = psi_values(psi)
    if vals.shape != c.psi.shape or np.abs(vals - c.psi).max() > 1e-8 * (1 + vals.max()):
        raise ValidationError("cocycle does not induce the given length function", operation=op)


def gamma_gram(c: Cocycle, f1: AlgebraElement, f2: AlgebraElement, psi=None) -> AlgebraElement:
    """``sum_{g,h} conj(f1(g)) f2(h) <b(g), b(h)> lambda(g^-1 h)``."""
    _check_matches(c, psi, "gamma_gram")
    if f1.group is not c.group or f2.group is not c.group:
        raise ValidationError("elements do not live on the cocycle's carrier",
                              operation="gamma_gram")
    g = c.group
    return AlgebraElement(g, kernels.gram_convolve(g.mul, g.inv, f1.coeffs, f2.coeffs, c.gram))


def random_trig_polynomial(psi, rng) -> AlgebraElement:
    """Complex gaussian coefficients off ``G_0``, unit l2 norm."""
    return random_element(psi.group, rng, mask=~g0_mask(psi))


def _gradient_norms(c, f, p):
    col, lo1 = psd_lp_norm(to_matrix(gamma_gram(c, f, f)), p, tol=1e-9)
    fs = adjoint(f)
    row, lo2 = psd_lp_norm(to_matrix(gamma_gram(c, fs, fs)), p, tol=1e-9)
    return col, row, min(lo1, lo2)


def meyer_ratio(psi, c: Cocycle, p: float, num_samples: int = 100, seed: int = 0) -> dict:
    """``||A^(1/2) f||_p / max(||Gamma(f,f)^(1/2)||_p, ||Gamma(f*,f*)^(1/2)||_p)``."""
    if not p >= 2:
        raise UnsupportedRangeError("p < 2 needs the infimum over decompositions",
                                    operation="meyer_ratio")
    _check_matches(c, psi, "meyer_ratio")
    ratios = []
    for i in range(num_samples):
        f = random_trig_polynomial(psi, child_rng(seed, "meyer", i))
        num = lp_norm(generator_apply(psi, f, 0.5), p)
        col, row, _ = _gradient_norms(c, f, p)
        ratios.append(num / max(col, row))
    r = np.array(ratios)
    return {"p": float(p), "n": num_samples, "min": float(r.min()), "max": float(r.max()),
            "median": float(np.median(r)), "ratios": r.tolist()}


@dataclass
class GaussianField:
    """Samples ``z`` of a standard gaussian on ``R^d``; ``B(v) = <z, v>``."""

    dim: int
    z: np.ndarray = field(repr=False)

    @classmethod
    def sample(cls, dim: int, num: int, seed: int = 0, label: str = "field"):
        return cls(dim, child_rng(seed, label).standard_normal((num, dim)))

    def B(self, v) -> np.ndarray:
        return self.z @ np.asarray(v)

    def transported(self, alpha_g, v) -> np.ndarray:
        """``alpha_g(B(v)) = B(alpha_g v)``."""
        return self.B(np.asarray(alpha_g) @ np.asarray(v))

    def covariance(self, v, w) -> dict:
        prod = self.B(v) * self.B(w)
        mean = float(prod.mean())
        se = float(prod.std(ddof=1) / np.sqrt(len(prod)))
        exact = float(np.dot(v, w))
        return {"mean": mean, "se": se, "exact": exact,
                "within": abs(mean - exact) <= 4 * se + 1e-12}


@dataclass(frozen=True, eq=False)
class DerivationElement:
    """``sum_g B(w_g) lambda(g)`` with complex fields ``w`` of shape ``(N, d)``.

    A term ``(v_g, c_g)`` of the gaussian derivation is stored as ``w_g = c_g v_g``.
    """

    cocycle: Cocycle
    field: np.ndarray = field(repr=False)

    def __post_init__(self):
        w = np.array(self.field, dtype=np.complex128).reshape(self.cocycle.group.order,
                                                             self.cocycle.dim)
        w.setflags(write=False)
        object.__setattr__(self, "field", w)

    @property
    def group(self):
        return self.cocycle.group

    @classmethod
    def from_terms(cls, c: Cocycle, vectors, coeffs) -> "DerivationElement":
        return cls(c, np.asarray(coeffs)[:, None] * np.asarray(vectors))

    def _same(self, other):
        if other.cocycle is not self.cocycle:
            raise ValidationError("derivation elements over different cocycles")

    def __add__(self, other):
        self._same(other)
        return DerivationElement(self.cocycle, self.field + other.field)

    def __sub__(self, other):
        self._same(other)
        return DerivationElement(self.cocycle, self.field - other.field)

    def __mul__(self, scalar):
        return DerivationElement(self.cocycle, self.field * scalar)

    __rmul__ = __mul__

    def right_mul(self, f: AlgebraElement) -> "DerivationElement":
        """``D . f``: ``B(w_g) lambda(g) lambda(h) = B(w_g) lambda(gh)``."""
        g = self.group
        contrib = self.field[:, None, :] * f.coeffs[None, :, None]
        return self._scatter(g.mul, contrib)

    def left_mul(self, f: AlgebraElement) -> "DerivationElement":
        """``f . D``: ``lambda(h) B(w_g) lambda(g) = B(alpha_h w_g) lambda(hg)``."""
        g = self.group
        moved = np.einsum("hij,gj->hgi", self.cocycle.alpha, self.field)
        return self._scatter(g.mul, moved * f.coeffs[:, None, None])

    def _scatter(self, idx, contrib):
        n, d = self.field.shape
        live = np.abs(contrib).max(axis=2) > 0 if d else np.zeros(idx.shape, bool)
        if (live & (idx < 0)).any():
            raise CarrierClosureError("product leaves the carrier", operation="derivation")
        out = np.zeros((n, d), dtype=np.complex128)
        ok = idx >= 0
        np.add.at(out, idx[ok], contrib[ok])
        return DerivationElement(self.cocycle, out)


def delta(psi, c: Cocycle, f: AlgebraElement) -> DerivationElement:
    """Gaussian derivation ``lambda(g) -> B(b(g)) lambda(g)``."""
    _check_matches(c, psi, "delta")
    return DerivationElement(c, f.coeffs[:, None] * c.b)


def expect_adjoint_product(d1: DerivationElement, d2: DerivationElement) -> AlgebraElement:
    """``E(D1* D2) = sum_{g,h} <conj w1_g, w2_h> lambda(g^-1 h)``."""
    g = d1.group
    out = np.zeros(g.order, dtype=np.complex128)
    for k in range(d1.field.shape[1]):
        out += kernels.gram_convolve(g.mul, g.inv, d1.field[:, k], d2.field[:, k])
    return AlgebraElement(g, out)


def expect_product_adjoint(d1: DerivationElement, d2: DerivationElement) -> AlgebraElement:
    """``E(D1 D2*) = sum_{g,h} <w1_g, alpha_g alpha_{h^-1} conj w2_h> lambda(g h^-1)``."""
    g = d1.group
    a = d1.cocycle.alpha
    back = np.einsum("hij,hj->hi", a[g.inv], np.conj(d2.field))  # alpha_{h^-1} conj w2_h
    moved = np.einsum("gij,hj->ghi", a, back)
    vals = np.einsum("gi,ghi->gh", d1.field, moved)
    idx = g.mul[:, g.inv]
    if (idx < 0).any() and np.abs(vals[idx < 0]).max() > 0:
        raise CarrierClosureError("product leaves the carrier", operation="expect_product_adjoint")
    out = np.zeros(g.order, dtype=np.complex128)
    ok = idx >= 0
    np.add.at(out, idx[ok], vals[ok])
    return AlgebraElement(g, out)


def expect_field_against(eta, d: DerivationElement) -> AlgebraElement:
    """``E((B(eta) 1)* D) = sum_g <eta, w_g> lambda(g)`` for real ``eta``."""
    return AlgebraElement(d.group, d.field @ np.asarray(eta, dtype=np.float64))


def leibniz_residual(c: Cocycle, f1: AlgebraElement, f2: AlgebraElement) -> dict:
    """``delta(f1 f2) - delta(f1) f2 - f1 delta(f2)``, fieldwise and after ``E(D* D)``."""
    lhs = delta(None, c, convolve(f1, f2))
    rhs = delta(None, c, f1).right_mul(f2) + delta(None, c, f2).left_mul(f1)
    diff = lhs - rhs
    cov = expect_adjoint_product(diff, diff)
    return {"field": float(np.abs(diff.field).max(initial=0.0)),
            "covariance": float(np.abs(cov.coeffs).max(initial=0.0))}


def riesz_extraction(c: Cocycle, eta, f: AlgebraElement) -> AlgebraElement:
    """``-i E((B(eta) 1)* delta(A^(-1/2) J f))`` by the covariance rule."""
    psi = c.length_function()
    jf = AlgebraElement(f.group, np.where(g0_mask(psi), 0, f.coeffs))
    d = delta(None, c, generator_apply(psi, jf, -0.5))
    return AlgebraElement(f.group, -1j * expect_field_against(eta, d).coeffs)


# -- Monte Carlo -------------------------------------------------------------

def crossed_matrix_stack(d: DerivationElement) -> np.ndarray:
    """``W[g, h] = alpha_{g^-1} w_{g h^-1}``, so ``M(z) = <z, W>``."""
    g = d.group
    if not is_closed(g):
        raise NotApplicableError("crossed-product matrices need a closed group",
                                 operation="crossed_lp_montecarlo")
    k = g.mul[:, g.inv]
    a = d.cocycle.alpha[g.inv]  # alpha_{g^-1}
    return np.einsum("gij,ghj->ghi", a, d.field[k])


def schatten_power(mats: np.ndarray, p: float) -> np.ndarray:
    """``(1/N) sum_i s_i^p`` for each matrix in a stack."""
    n = mats.shape[-1]
    if p == 2:
        return (np.abs(mats) ** 2).sum(axis=(1, 2)) / n
    if float(p).is_integer() and int(p) % 2 == 0:
        h = np.conj(np.swapaxes(mats, 1, 2)) @ mats
        acc = h
        for _ in range(int(p) // 2 - 1):
            acc = acc @ h
        return np.real(np.trace(acc, axis1=1, axis2=2)) / n
    s = np.linalg.svd(mats, compute_uv=False)
    return (s ** p).sum(axis=1) / n


def crossed_lp_montecarlo(d: DerivationElement, p: float, num_z: int = 10_000,
                          seed: int = 0) -> dict:
    """Monte Carlo ``||D||_p`` in the crossed product with the gaussian algebra.

    The standard error comes from batch means over the p-th powers and the
    delta method for the p-th root.
    """
    if not p >= 1:
        raise InvalidParameter(f"p must be >= 1, got {p}", operation="crossed_lp_montecarlo")
    if num_z < 100:
        raise InvalidParameter("num_z must be at least 100", operation="crossed_lp_montecarlo")
    w = crossed_matrix_stack(d)
    dim = d.cocycle.dim
    powers = np.empty(num_z)
    for start in range(0, num_z, MC_CHUNK):
        stop = min(start + MC_CHUNK, num_z)
        z = child_rng(seed, "crossed_lp", start // MC_CHUNK).standard_normal((stop - start, dim))
        powers[start:stop] = schatten_power(np.einsum("zd,ghd->zgh", z, w), p) if dim else 0.0
    mean = float(powers.mean())
    batches = np.array([b.mean() for b in np.array_split(powers, MC_BATCHES)])
    se_mean = float(batches.std(ddof=1) / np.sqrt(MC_BATCHES))
    est = mean ** (1.0 / p)
    se = se_mean / p * mean ** (1.0 / p - 1.0) if mean > 0 else 0.0
    return {"estimate": est, "std_error": se, "power_mean": mean, "power_se": se_mean,
            "p": float(p), "num_z": num_z}


def khintchine_band(psi, c: Cocycle, f: AlgebraElement, p: float, num_z: int = 10_000,
                    seed: int = 0) -> dict:
    """Monte Carlo norm of ``delta f`` against the row/column gradient norm."""
    if not p >= 2:
        raise UnsupportedRangeError("p < 2 is outside the row/column intersection range",
                                    operation="khintchine_band")
    _check_matches(c, psi, "khintchine_band")
    mc = crossed_lp_montecarlo(delta(psi, c, f), p, num_z, seed)
    col, row, _ = _gradient_norms(c, f, p)
    rc = max(col, row)
    off = np.abs(f.coeffs[~g0_mask(psi)]).max(initial=0.0)
    if rc == 0 and off > 0:
        raise NumericalInconsistency("gradient norm vanishes on an element off G_0",
                                     operation="khintchine_band")
    se = mc["std_error"]
    ratio = mc["estimate"] / rc if rc > 0 else None
    lower_ok = mc["estimate"] >= rc - 4 * se - 1e-12
    return {"mc_norm": mc["estimate"], "std_error": se, "rc_norm": rc, "column": col,
            "row": row, "ratio": ratio, "lower_ok": bool(lower_ok), "p": float(p)}
