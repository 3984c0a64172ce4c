"""Fourier multipliers on group algebras: symbols, Mihlin checks and norm probes."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb

import numpy as np
from scipy.stats import norm as _normal
from scipy.stats import qmc

from .algebra import (AlgebraElement, amplified_lp_norm, g0_mask, lp_norm, psi_values,
                      random_element)
from .cocycles import Cocycle, zero_tol
from .errors import InvalidParameter, SymbolEvaluationError, ValidationError
from .groups import is_closed
from .seeding import child_rng

PROVENANCES = ("lifted", "radial", "riesz", "imaginary_power", "explicit")


@dataclass(frozen=True, eq=False)
class MultiplierSymbol:
    group: object
    values: np.ndarray = field(repr=False)
    provenance: str = "explicit"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.array(self.values, dtype=np.complex128).ravel()
        if v.shape != (self.group.order,):
            raise ValidationError(f"symbol has {v.size} values for order {self.group.order}")
        if self.provenance not in PROVENANCES:
            raise ValidationError(f"unknown provenance {self.provenance!r}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __mul__(self, other: "MultiplierSymbol") -> "MultiplierSymbol":
        if other.group is not self.group:
            raise ValidationError("symbols live on different groups")
        return MultiplierSymbol(self.group, self.values * other.values)

    def to_json(self) -> dict:
        return {"group_id": getattr(self.group, "name", "group"), "provenance": self.provenance,
                "params": self.params,
                "values": [[float(z.real), float(z.imag)] for z in self.values]}

    @classmethod
    def from_json(cls, group, data):
        pairs = np.asarray(data["values"], dtype=np.float64).reshape(-1, 2)
        return cls(group, pairs[:, 0] + 1j * pairs[:, 1], data.get("provenance", "explicit"),
                   data.get("params", {}))


def apply(m: MultiplierSymbol, f: AlgebraElement) -> AlgebraElement:
    if m.group is not f.group:
        raise ValidationError("symbol and element live on different groups", operation="apply")
    return AlgebraElement(f.group, m.values * f.coeffs)


def constant_symbol(group, value: complex = 1.0) -> MultiplierSymbol:
    return MultiplierSymbol(group, np.full(group.order, value, dtype=np.complex128))


def g0_indicator(psi) -> MultiplierSymbol:
    return MultiplierSymbol(psi.group, g0_mask(psi).astype(np.complex128), "explicit",
                            {"name": "indicator_G0"})


def riesz_symbol(c: Cocycle, eta) -> MultiplierSymbol:
    """``m_g = -i <b(g), eta> / sqrt(psi(g))``, and 0 on ``G_0``."""
    eta = np.asarray(eta, dtype=np.float64).ravel()
    if eta.shape != (c.dim,):
        raise InvalidParameter(f"eta has dimension {eta.size}, cocycle has {c.dim}",
                               operation="riesz_symbol")
    psi = c.psi
    off = psi > zero_tol(psi)
    m = np.zeros(c.group.order, dtype=np.complex128)
    m[off] = -1j * (c.b[off] @ eta) / np.sqrt(psi[off])
    return MultiplierSymbol(c.group, m, "riesz", {"eta": eta.tolist()})


def _evaluate(fn, points, labels_of, op):
    try:
        vals = np.asarray(fn(points), dtype=np.complex128).reshape(len(points))
    except Exception as exc:  # noqa: BLE001 - surfaced with context
        raise SymbolEvaluationError(f"symbol evaluation failed: {exc}", operation=op) from exc
    bad = np.flatnonzero(~np.isfinite(vals))
    if bad.size:
        g = int(bad[0])
        raise SymbolEvaluationError(f"symbol is not finite at element {labels_of(g)}",
                                    operation=op, element=g)
    return vals


def _label(group):
    labels = getattr(group, "labels", ())
    return lambda g: labels[g] if g < len(labels) else str(g)


def radial_symbol(psi, h) -> MultiplierSymbol:
    """``m_g = h(psi(g))``."""
    vals = psi_values(psi)
    return MultiplierSymbol(psi.group, _evaluate(h, vals, _label(psi.group), "radial_symbol"),
                            "radial", {"h": getattr(h, "source", repr(h))})


def imaginary_power_symbol(psi, s: float) -> MultiplierSymbol:
    """``m_g = psi(g)^(i s)`` off ``G_0``; 0 on ``G_0`` (handled by the expectation)."""
    vals = psi_values(psi)
    off = ~g0_mask(psi)
    m = np.zeros(vals.size, dtype=np.complex128)
    m[off] = np.exp(1j * s * np.log(vals[off]))
    return MultiplierSymbol(psi.group, m, "imaginary_power", {"s": float(s)})


def lifted_symbol(c: Cocycle, mtilde) -> MultiplierSymbol:
    """``m_g = mtilde(b(g))``: a function on the cocycle's Hilbert space."""
    return MultiplierSymbol(c.group, _evaluate(mtilde, c.b, _label(c.group), "lifted_symbol"),
                            "lifted", {"mtilde": getattr(mtilde, "source", repr(mtilde))})


def l2_norm_exact(m: MultiplierSymbol) -> float:
    return float(np.abs(m.values).max(initial=0.0))


# -- Mihlin checks ---------------------------------------------------------

SHELLS = np.logspace(-3, 3, 13)
MIN_DIRECTIONS = 16


def sphere_directions(n: int, count: int = MIN_DIRECTIONS) -> np.ndarray:
    """Coordinate directions plus Halton points pushed to the sphere."""
    axes = np.concatenate([np.eye(n), -np.eye(n)])
    extra = max(count - len(axes), 0)
    if extra == 0:
        return axes
    if n == 1:
        return axes
    u = qmc.Halton(d=n, scramble=False).random(extra + 1)[1:]
    z = _normal.ppf(np.clip(u, 1e-12, 1 - 1e-12))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    return np.concatenate([axes, z])


def multi_indices(n: int, k: int):
    """All ``beta`` with ``|beta| = k`` as tuples of per-axis orders."""
    for combo in itertools.combinations_with_replacement(range(n), k):
        beta = [0] * n
        for i in combo:
            beta[i] += 1
        yield tuple(beta)


def _stencil(beta, h):
    """Offsets (in units of ``h``) and weights of the central difference for ``beta``."""
    per_axis = []
    for k in beta:
        per_axis.append([((k / 2 - j), (-1) ** j * comb(k, j)) for j in range(k + 1)])
    offsets, weights = [], []
    for combo in itertools.product(*per_axis):
        offsets.append([o for o, _ in combo])
        weights.append(np.prod([w for _, w in combo]))
    return np.array(offsets, dtype=np.float64), np.array(weights, dtype=np.float64)


def partial_derivative(mtilde, points, beta, step_rel: float = 1e-4):
    """Central finite difference of ``d^beta mtilde`` with step ``step_rel * |xi|``."""
    points = np.asarray(points, dtype=np.float64)
    r = np.linalg.norm(points, axis=1)
    h = step_rel * r
    k = sum(beta)
    offs, wts = _stencil(beta, 1.0)
    shifted = points[:, None, :] + offs[None, :, :] * h[:, None, None]
    vals = np.asarray(mtilde(shifted.reshape(-1, points.shape[1])), dtype=np.complex128)
    vals = vals.reshape(len(points), len(offs))
    return (vals @ wts) / h ** k


@dataclass
class MihlinReport:
    n: int
    order: int
    eps: float
    step_rel: float
    shells: list
    directions: int
    hormander: list            # per order: sup |xi|^k |d^beta m|
    minus_eps: list            # sup |xi|^(k-eps) |d^beta m|
    plus_eps: list             # sup |xi|^(k+eps) |d^beta m|
    theorem_a: list            # sup |d^beta m| / min(|xi|^(-k+eps), |xi|^(-k-eps))
    threshold: float = None
    nonfinite: list = field(default_factory=list)
    passed: bool = True

    def to_json(self) -> dict:
        return dict(self.__dict__)


def mihlin_check(mtilde, n: int, order: int = None, eps: float = 0.1, shells=None,
                 directions: int = MIN_DIRECTIONS, threshold: float = None,
                 step_rel: float = 1e-4, max_order: int = None) -> MihlinReport:
    """Sample the Hormander-Mihlin quantities on log-spaced spheres.

    Pass means every sample is finite and, when ``threshold`` is given, the
    Hormander sup at every order stays below it.
    """
    default = n // 2 + 1
    order = default if order is None else int(order)
    cap = max_order if max_order is not None else max(default, n + 2)
    if order < 0 or order > cap:
        raise InvalidParameter(f"order {order} outside [0, {cap}]", operation="mihlin_check")
    shells = SHELLS if shells is None else np.asarray(shells, dtype=np.float64)
    dirs = sphere_directions(n, directions)
    pts = (shells[:, None, None] * dirs[None, :, :]).reshape(-1, n)
    r = np.linalg.norm(pts, axis=1)
    rep = MihlinReport(n, order, eps, step_rel, shells.tolist(), len(dirs), [], [], [], [],
                       threshold)
    for k in range(order + 1):
        sup = np.zeros(4)
        for beta in multi_indices(n, k):
            d = np.abs(partial_derivative(mtilde, pts, beta, step_rel)) if k else \
                np.abs(np.asarray(mtilde(pts), dtype=np.complex128))
            bad = np.flatnonzero(~np.isfinite(d))
            if bad.size:
                rep.nonfinite.append({"order": k, "beta": list(beta), "point": pts[bad[0]].tolist()})
                rep.passed = False
                d = np.where(np.isfinite(d), d, 0.0)
            weights = (r ** k, r ** (k - eps), r ** (k + eps), np.maximum(r ** (k - eps), r ** (k + eps)))
            sup = np.maximum(sup, [float((d * w).max()) for w in weights])
        rep.hormander.append(sup[0])
        rep.minus_eps.append(sup[1])
        rep.plus_eps.append(sup[2])
        rep.theorem_a.append(sup[3])
    if threshold is not None and max(rep.hormander) > threshold:
        rep.passed = False
    return rep


def schur_riesz_residual(c: Cocycle, eta, samples: int = 64, seed: int = 0) -> float:
    """``max |m_eta(alpha_g xi) - <xi/|xi|, alpha_{g^-1} eta>|`` over sphere samples and g.

    ``m_eta(x) = <x, eta>/|x|`` is the Riesz symbol on the Hilbert space.
    """
    eta = np.asarray(eta, dtype=np.float64).ravel()
    if c.dim < 1:
        raise InvalidParameter("cocycle has dimension 0", operation="schur_riesz_residual")
    rng = child_rng(seed, "schur_riesz")
    xi = rng.standard_normal((max(samples, 64), c.dim))
    xi /= np.linalg.norm(xi, axis=1, keepdims=True)
    moved = np.einsum("gij,sj->gsi", c.alpha, xi)
    lhs = (moved @ eta) / np.linalg.norm(moved, axis=2)
    back = c.alpha[c.group.inv] @ eta
    rhs = xi @ back.T
    return float(np.abs(lhs - rhs.T).max(initial=0.0))


# -- norm probes --------------------------------------------------------------

@dataclass
class SearchResult:
    lower_bound: float
    witness: list
    best_start: float
    best_character: float
    p: float

    def to_json(self):
        return dict(self.__dict__)


def _ratio(m, f, p):
    den = lp_norm(f, p)
    if den == 0:
        return 0.0
    return lp_norm(AlgebraElement(f.group, m.values * f.coeffs), p) / den


def lp_norm_search(m: MultiplierSymbol, p: float, trials: int = 4, steps: int = 50,
                   seed: int = 0) -> SearchResult:
    """Randomized lower bound for ``||T_m||_{L_p -> L_p}``.

    Only a lower bound: single characters give ``max |m_g|`` at every p, then
    each trial climbs from a random gaussian start by coordinate moves that
    are accepted only when the ratio increases.
    """
    if not p >= 1:
        raise InvalidParameter(f"p must be >= 1, got {p}", operation="lp_norm_search")
    if trials < 1 or steps < 1:
        raise InvalidParameter("trials and steps must be >= 1", operation="lp_norm_search")
    group = m.group
    if not is_closed(group):
        raise ValidationError("norm search needs a closed group", operation="lp_norm_search")
    n = group.order
    mags = np.abs(m.values)
    best_char = float(mags.max(initial=0.0))
    witness = np.zeros(n, dtype=np.complex128)
    witness[int(np.argmax(mags))] = 1.0
    best, best_start = best_char, 0.0
    for trial in range(trials):
        rng = child_rng(seed, "lp_norm_search", trial)
        f = random_element(group, rng).coeffs.copy()
        cur = _ratio(m, AlgebraElement(group, f), p)
        best_start = max(best_start, cur)
        for _ in range(steps):
            j = int(rng.integers(n))
            size = 10.0 ** rng.uniform(-3, 0)
            cand = f.copy()
            cand[j] += size * (rng.standard_normal() + 1j * rng.standard_normal()) / np.sqrt(2)
            val = _ratio(m, AlgebraElement(group, cand), p)
            if val > cur:
                f, cur = cand, val
        if cur > best:
            best, witness = cur, f / np.linalg.norm(f)
    return SearchResult(float(best), [[float(z.real), float(z.imag)] for z in witness],
                        float(best_start), best_char, float(p))


def duality_probe(m: MultiplierSymbol, p: float, **kw) -> dict:
    """Lower bounds at ``(m, p)`` and ``(conj m o inv, p')``; reported, never asserted."""
    q = np.inf if p == 1 else (1.0 if np.isinf(p) else p / (p - 1))
    dual = MultiplierSymbol(m.group, np.conj(m.values[m.group.inv]))
    a = lp_norm_search(m, p, **kw).lower_bound
    b = lp_norm_search(dual, q, **kw).lower_bound
    return {"p": p, "p_dual": q, "lower": a, "lower_dual": b, "gap": abs(a - b)}


def amplified_multiplier_norm(m: MultiplierSymbol, blocks, p: float) -> float:
    """``||(id (x) T_m) F||_p / ||F||_p`` for matrix-valued ``F`` (cb sanity check)."""
    blocks = np.asarray(blocks, dtype=np.complex128)
    den = amplified_lp_norm(m.group, blocks, p)
    if den == 0:
        return 0.0
    return amplified_lp_norm(m.group, m.values[:, None, None] * blocks, p) / den


def epsilon_free_conditions(c: Cocycle, tol: float = 1e-9) -> dict:
    """Which of the conditions that remove the epsilon loss hold for ``c``.

    abelian: the group is commutative; lattice: the cocycle image sits in a
    lattice of its span; finite_action: the action takes at most as many
    distinct matrices as the carrier has elements; radial: not a property
    of the cocycle, reported False.
    """
    group = c.group
    abelian = bool(is_closed(group) and group.is_abelian())
    lattice = _is_lattice(c.b, tol)
    mats = np.round(c.alpha.reshape(len(c.alpha), -1) / tol) * tol
    finite = len(np.unique(mats, axis=0)) <= group.order
    return {"abelian": abelian, "lattice": lattice, "finite_action": bool(finite), "radial": False}


MAX_DENOMINATOR = 24


def _is_lattice(b, tol):
    """True when the cocycle vectors have rational coordinates in a basis taken from b.

    Denominators up to ``MAX_DENOMINATOR`` are tried; this is a numerical
    proxy, not a decision procedure.
    """
    if b.shape[1] == 0 or not np.abs(b).max(initial=0.0) > tol:
        return True
    _, s, vt = np.linalg.svd(b, full_matrices=False)
    rank = int((s > tol * s[0]).sum())
    coords = b @ vt[:rank].T
    # greedy basis: pick rank independent rows, express the rest
    basis = []
    for row in coords:
        trial = np.array(basis + [row])
        if np.linalg.matrix_rank(trial, tol=1e-8) > len(basis):
            basis.append(row)
        if len(basis) == rank:
            break
    x = np.linalg.lstsq(np.array(basis).T, coords.T, rcond=None)[0]
    # rational coordinates with a common small denominator span a lattice
    for den in range(1, MAX_DENOMINATOR + 1):
        if np.abs(x * den - np.round(x * den)).max(initial=0.0) < 1e-6:
            return True
    return False


__all__ = [
    "MultiplierSymbol", "apply", "constant_symbol", "g0_indicator", "riesz_symbol",
    "radial_symbol", "imaginary_power_symbol", "lifted_symbol", "l2_norm_exact",
    "mihlin_check", "MihlinReport", "schur_riesz_residual", "lp_norm_search",
    "duality_probe", "amplified_multiplier_norm", "epsilon_free_conditions",
    "sphere_directions", "multi_indices", "partial_derivative",
]
