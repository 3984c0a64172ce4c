"""Length functions, Gromov forms and the cocycles they induce."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.spatial.distance import pdist

from .errors import (DegenerateActionError, NotApplicableError, ValidationError)
from .groups import is_closed

RANK_TOL = 1e-10
CN_TOL = 1e-9
PSD_TOL = 1e-8
SIDES = ("left", "right")


def zero_tol(psi_values) -> float:
    """Threshold under which a length value counts as zero."""
    return 1e-9 * (1.0 + float(np.max(psi_values, initial=0.0)))


@dataclass(frozen=True, eq=False)
class LengthFunction:
    group: object
    values: np.ndarray
    tol: float = 1e-10

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.float64)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        self.validate()

    def validate(self) -> None:
        v, g = self.values, self.group
        if v.shape != (g.order,):
            raise ValidationError(f"length function has {v.size} values for order {g.order}")
        scale = self.tol * (1.0 + np.abs(v).max(initial=0.0))
        if abs(v[0]) > scale:
            raise ValidationError(f"psi(e) = {v[0]} is not zero")
        if v.min(initial=0.0) < -scale:
            raise ValidationError("psi takes negative values")
        if np.abs(v - v[g.inv]).max(initial=0.0) > scale:
            raise ValidationError("psi is not symmetric under inversion")

    def __getitem__(self, g):
        return self.values[g]

    def to_json(self) -> dict:
        return {"group": getattr(self.group, "name", "group"), "values": self.values.tolist()}


def _require_closed(group, what):
    if not is_closed(group):
        raise NotApplicableError(f"{what} needs a closed finite group, got {group.name}")


def _relative_psi(psi: LengthFunction, side: str) -> np.ndarray:
    """``M[g,h] = psi(g^-1 h)`` (left) or ``psi(g h^-1)`` (right)."""
    g = psi.group
    if side == "left":
        return psi.values[g.mul[g.inv[:, None], np.arange(g.order)[None, :]]]
    if side == "right":
        return psi.values[g.mul[np.arange(g.order)[:, None], g.inv[None, :]]]
    raise ValidationError(f"side must be one of {SIDES}, got {side!r}")


def gromov_form(psi: LengthFunction, side: str = "left") -> np.ndarray:
    _require_closed(psi.group, "gromov_form")
    v = psi.values
    return 0.5 * (v[:, None] + v[None, :] - _relative_psi(psi, side))


@dataclass(frozen=True)
class NegativityCertificate:
    passed: bool
    min_eig: float  # smallest eigenvalue of -PMP; negative means a violation

    def __bool__(self):
        return self.passed


def is_conditionally_negative(psi: LengthFunction, tol: float = CN_TOL) -> NegativityCertificate:
    """Test ``psi`` on mean-zero vectors via the compression ``P M P``.

    ``tol`` is relative to ``max(1, max psi)``.
    """
    _require_closed(psi.group, "is_conditionally_negative")
    m = _relative_psi(psi, "left")
    n = m.shape[0]
    p = np.eye(n) - np.full((n, n), 1.0 / n)
    comp = p @ (0.5 * (m + m.T)) @ p
    top = float(np.linalg.eigvalsh(comp)[-1])
    scale = max(1.0, float(psi.values.max(initial=0.0)))
    return NegativityCertificate(top <= tol * scale, -top)


def schoenberg_check(psi: LengthFunction, t_list, tol: float = PSD_TOL):
    """For each t, is ``exp(-t psi(g^-1 h))`` positive semidefinite (up to -tol)?

    Returns a list of ``(t, passed, min_eig)`` tuples.
    """
    _require_closed(psi.group, "schoenberg_check")
    m = _relative_psi(psi, "left")
    out = []
    for t in t_list:
        if t < 0:
            raise ValidationError("schoenberg_check needs t >= 0")
        k = np.exp(-t * m)
        lo = float(np.linalg.eigvalsh(0.5 * (k + k.T))[0])
        out.append((float(t), lo >= -tol, lo))
    return out


SCHOENBERG_GRID = np.logspace(-3, 3, 13)


@dataclass(frozen=True, eq=False)
class Cocycle:
    """Finite-dimensional cocycle on a finite carrier.

    ``b`` is ``N x d``; ``alpha`` is ``N x d x d``.  For partial carriers
    ``psi_outside`` gives the length of a reduced word/lattice point that
    falls outside the carrier, so lengths of products can still be checked.
    """

    group: object
    side: str
    b: np.ndarray
    alpha: np.ndarray
    tol: float = RANK_TOL
    kind: str = "gromov"
    params: dict = field(default_factory=dict)
    psi_outside: Optional[Callable] = None
    partial_alpha: bool = False

    def __post_init__(self):
        if self.side not in SIDES:
            raise ValidationError(f"side must be one of {SIDES}")
        b = np.array(self.b, dtype=np.float64).reshape(self.group.order, -1)
        a = np.array(self.alpha, dtype=np.float64).reshape(self.group.order, b.shape[1], b.shape[1])
        b.setflags(write=False)
        a.setflags(write=False)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "alpha", a)

    @property
    def dim(self) -> int:
        return self.b.shape[1]

    @property
    def gram(self) -> np.ndarray:
        return self.b @ self.b.T

    @property
    def psi(self) -> np.ndarray:
        return np.einsum("gd,gd->g", self.b, self.b)

    def length_function(self) -> LengthFunction:
        return LengthFunction(self.group, self.psi, tol=1e-8)

    def to_json(self) -> dict:
        return {
            "group": getattr(self.group, "name", "group"),
            "side": self.side,
            "kind": self.kind,
            "dim": self.dim,
            "tol": self.tol,
            "b": self.b.tolist(),
            "alpha": self.alpha.tolist(),
            "gram": self.gram.ravel().tolist(),
        }


def _sign_fix(vecs):
    # deterministic orientation: largest-magnitude entry of each column positive
    idx = np.argmax(np.abs(vecs), axis=0)
    signs = np.sign(vecs[idx, np.arange(vecs.shape[1])])
    signs[signs == 0] = 1.0
    return vecs * signs


def _law_targets(group, b, side):
    """``T[g, h]``: what ``alpha_g b(h)`` must equal under the cocycle law."""
    n = group.order
    ar = np.arange(n)
    if side == "left":
        prod = group.mul[ar[:, None], ar[None, :]]  # gh
        base = b[:, None, :]
    else:
        prod = group.mul[ar[None, :], group.inv[:, None]]  # h g^-1
        base = b[group.inv][:, None, :]
    return prod, b[np.where(prod < 0, 0, prod)] - base


def build_cocycle(psi: LengthFunction, side: str = "left", tol: float = RANK_TOL,
                  cn_tol: float = CN_TOL, action_tol: float = 1e-8) -> Cocycle:
    """Realise the Gromov form as a Gram matrix and solve for the action."""
    cert = is_conditionally_negative(psi, cn_tol)
    if not cert.passed:
        raise ValidationError(f"psi is not conditionally negative (min eig {cert.min_eig:.3e})",
                              operation="build_cocycle")
    group = psi.group
    k = gromov_form(psi, side)
    lam, vec = np.linalg.eigh(0.5 * (k + k.T))
    top = lam[-1] if lam.size else 0.0
    keep = lam > tol * top if top > 0 else np.zeros_like(lam, dtype=bool)
    lam, vec = lam[keep][::-1], vec[:, keep][:, ::-1]
    b = _sign_fix(vec) * np.sqrt(lam)
    d = b.shape[1]
    n = group.order
    if d == 0:
        return Cocycle(group, side, np.zeros((n, 0)), np.zeros((n, 0, 0)), tol)
    _, targets = _law_targets(group, b, side)
    pinv = np.linalg.pinv(b)  # d x N
    alpha = np.einsum("dn,gnk->gkd", pinv, targets)
    resid = np.abs(np.einsum("gkd,nd->gnk", alpha, b) - targets).max()
    if resid > action_tol * max(1.0, np.abs(b).max()):
        raise DegenerateActionError(f"least-squares action residual {resid:.3e}",
                                    operation="build_cocycle")
    return Cocycle(group, side, b, alpha, tol)


def cocycle_residuals(c: Cocycle) -> dict:
    """Worst-case violations of every cocycle invariant.

    Keys: ``gram`` (vs Gromov form; closed groups only), ``length``, ``law``,
    ``orthogonality``, ``representation`` (None for partial actions) and
    ``coverage`` (fraction of pairs whose product lies in the carrier).
    """
    g, b, a = c.group, c.b, c.alpha
    n, d = g.order, c.dim
    ar = np.arange(n)
    psi = c.psi
    out = {"gram": 0.0, "length": 0.0, "law": 0.0, "orthogonality": 0.0,
           "representation": 0.0, "coverage": 1.0}
    if d == 0:
        return out

    # lengths of relative positions
    if c.side == "left":
        rel = g.mul[g.inv[:, None], ar[None, :]]
    else:
        rel = g.mul[ar[:, None], g.inv[None, :]]
    dist2 = (np.einsum("gd,gd->g", b, b)[:, None] + np.einsum("gd,gd->g", b, b)[None, :]
             - 2 * b @ b.T)
    inside = rel >= 0
    target = np.zeros((n, n))
    target[inside] = psi[rel[inside]]
    if not inside.all():
        if c.psi_outside is None:
            target[~inside] = dist2[~inside]
        else:
            for i, j in zip(*np.nonzero(~inside)):
                target[i, j] = c.psi_outside(_relative_word(g, c.side, i, j))
    out["length"] = float(np.abs(dist2 - target).max())
    if is_closed(g):
        out["gram"] = float(np.abs(b @ b.T - gromov_form(LengthFunction(g, psi, 1e-6), c.side)).max())

    prod, targets = _law_targets(g, b, c.side)
    lhs = np.einsum("gkd,hd->ghk", a, b)
    ok = prod >= 0
    out["law"] = float(np.linalg.norm(lhs - targets, axis=2)[ok].max())
    out["coverage"] = float(ok.mean())

    ata = np.einsum("gki,gkj->gij", a, a)
    if c.partial_alpha:
        out["orthogonality"] = float(np.abs(np.einsum("gij,gjk->gik", ata, ata) - ata).max())
        out["representation"] = None
    else:
        out["orthogonality"] = float(np.abs(ata - np.eye(d)).max())
        out["representation"] = _representation_residual(g, a)
    return out


def _representation_residual(g, a, probes: int = 4) -> float:
    """``max ||alpha_g alpha_h - alpha_gh||`` tested on probe vectors.

    Uses the standard basis when that is affordable, otherwise a few fixed
    random unit vectors.
    """
    n, d = a.shape[0], a.shape[1]
    ar = np.arange(n)
    pairs = g.mul[ar[:, None], ar[None, :]]
    good = pairs >= 0
    if n * n * d ** 3 <= 2e8:
        x = np.eye(d)
    else:
        x = np.random.default_rng(0).standard_normal((d, probes))
        x /= np.linalg.norm(x, axis=0)
    worst = 0.0
    ax = a @ x  # N x d x P
    for i in range(n):
        lhs = np.einsum("ij,hjp->hip", a[i], ax)
        rows = np.where(good[i], pairs[i], 0)
        diff = np.abs(lhs - ax[rows]).max(axis=(1, 2))
        if good[i].any():
            worst = max(worst, float(diff[good[i]].max()))
    return worst


def _relative_word(group, side, i, j):
    # only partial carriers reach this; they know how to form reduced products
    if hasattr(group, "words"):
        from .groups import invert_word, reduce_word
        u, v = group.words[i], group.words[j]
        return reduce_word(invert_word(u) + v) if side == "left" else reduce_word(u + invert_word(v))
    p, q = group.points[i], group.points[j]
    return q - p if side == "left" else p - q


def left_right_isometry_residual(c1: Cocycle, c2: Cocycle) -> float:
    """``max |<b1(g), b1(h)> - <b2(g^-1), b2(h^-1)>|``."""
    if c1.group is not c2.group and c1.group.order != c2.group.order:
        raise ValidationError("cocycles live on different groups")
    if c1.side != "left" or c2.side != "right":
        raise ValidationError("expected a left and a right cocycle")
    inv = c1.group.inv
    k1 = c1.b @ c1.b.T
    b2 = c2.b[inv]
    return float(np.abs(k1 - b2 @ b2.T).max(initial=0.0))


@dataclass(frozen=True)
class SeparationReport:
    delta: float
    injective: bool
    well_separated: bool
    standard: bool


def separation_report(c: Cocycle) -> SeparationReport:
    """Smallest nonzero length, injectivity and the derived standardness flags.

    Uses ``inf { psi(g) : b(g) != 0 }``; for left cocycles this equals the
    infimum of squared distances between distinct cocycle vectors.
    """
    psi = c.psi
    zt = zero_tol(psi)
    nonzero = psi > zt
    delta = float(psi[nonzero].min()) if nonzero.any() else 0.0
    if c.group.order < 2:
        injective = True
    else:
        injective = bool(pdist(c.b).min() ** 2 > zt) if c.dim else False
    ws = delta > 0
    return SeparationReport(delta, injective, ws, injective and ws)


def distinct_vectors(b: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Rows of ``b`` with near-duplicates removed (greedy, order preserving)."""
    if b.shape[1] == 0:
        return b[:1]
    keys = np.round(b / tol).astype(np.int64)
    _, first = np.unique(keys, axis=0, return_index=True)
    return b[np.sort(first)]


def ball_count_check(c: Cocycle, radii) -> list:
    """Count distinct cocycle vectors in balls against the packing bound.

    ``bound`` uses ``(1 + 2R/delta)^d`` with constant 1.  ``bound_packing``
    uses the minimal separation ``sqrt(delta)`` as packing diameter, which is
    what the ball-disjointness argument actually yields.
    """
    rep = separation_report(c)
    if rep.delta <= 0:
        raise NotApplicableError("ball counting needs delta > 0", operation="ball_count_check")
    pts = distinct_vectors(c.b)
    norms = np.linalg.norm(pts, axis=1)
    d = c.dim
    out = []
    for r in radii:
        count = int((norms <= r + 1e-12).sum())
        bound = (1.0 + 2.0 * r / rep.delta) ** d
        packing = (1.0 + 2.0 * r / np.sqrt(rep.delta)) ** d
        out.append({"R": float(r), "count": count, "bound": float(bound),
                    "bound_packing": float(packing), "pass": count <= bound * (1 + 1e-12),
                    "pass_packing": count <= packing * (1 + 1e-12)})
    return out


def random_length_function(group, rng, rank: int = 1, scale: float = 1.0) -> LengthFunction:
    """A certified length function: ``sum_r ||pi(g) v_r - v_r||^2``, pi left-regular.

    Every cocycle of a finite group is a coboundary of this kind, so the
    family is generic.
    """
    _require_closed(group, "random_length_function")
    n = group.order
    v = rng.standard_normal((rank, n)) * scale
    # (pi(g) v)[k] = v[g^-1 k]
    moved = v[:, group.mul[group.inv[:, None], np.arange(n)[None, :]]]  # rank x N x N
    psi = ((moved - v[:, None, :]) ** 2).sum(axis=(0, 2))
    psi = 0.5 * (psi + psi[group.inv])
    psi[0] = 0.0
    return LengthFunction(group, psi)
