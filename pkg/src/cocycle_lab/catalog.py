"""Explicit cocycles: roots of unity, helices, directional, free-group and pullbacks."""
from __future__ import annotations

import warnings

import numpy as np

from .cocycles import Cocycle
from .errors import InvalidParameter, ValidationError
from .groups import (FiniteGroup, LatticeBox, WordBall, build_cyclic, build_dihedral,
                     build_heisenberg_mod, direct_product, heisenberg_quotient)

DEFAULT_THETA = float(np.arccos(1.0 / 3.0))


def _rot(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.stack([np.stack([c, -s], -1), np.stack([s, c], -1)], -2)


def _block_diag(*blocks):
    """Batched block diagonal of ``(N, d_i, d_i)`` stacks."""
    n = blocks[0].shape[0]
    d = sum(b.shape[1] for b in blocks)
    out = np.zeros((n, d, d))
    at = 0
    for b in blocks:
        k = b.shape[1]
        out[:, at:at + k, at:at + k] = b
        at += k
    return out


def to_right(c: Cocycle) -> Cocycle:
    """Right cocycle with the same length: ``b_r(g) = b(g^-1)``, same action."""
    if c.side != "left":
        raise ValidationError("to_right expects a left cocycle")
    return Cocycle(c.group, "right", c.b[c.group.inv], c.alpha, c.tol, c.kind + "/right",
                   dict(c.params), c.psi_outside, c.partial_alpha)


def zn_roots(n: int, group: FiniteGroup = None) -> Cocycle:
    """``b(k) = (cos(2 pi k/n) - 1, sin(2 pi k/n))`` with the rotation action."""
    group = group or build_cyclic(n)
    if group.order != n:
        raise InvalidParameter("group order does not match n")
    ang = 2 * np.pi * np.arange(n) / n
    b = np.stack([np.cos(ang) - 1.0, np.sin(ang)], axis=1)
    return Cocycle(group, "left", b, _rot(ang), kind="zn_roots", params={"n": n})


def helix(alpha: float, beta: float, step: float = 0.25, radius: int = 8) -> Cocycle:
    """Donut helix on the sample points ``k * step`` (|k| <= radius) of the real line."""
    box = LatticeBox(1, radius)
    xi = box.points[:, 0] * step
    a, bb = 2 * np.pi * alpha * xi, 2 * np.pi * beta * xi
    b = np.stack([np.cos(a) - 1, np.sin(a), np.cos(bb) - 1, np.sin(bb)], axis=1)

    def psi_outside(k):
        x = float(np.asarray(k).ravel()[0]) * step
        return (2 - 2 * np.cos(2 * np.pi * alpha * x)) + (2 - 2 * np.cos(2 * np.pi * beta * x))

    return Cocycle(box, "left", b, _block_diag(_rot(a), _rot(bb)), kind="helix",
                   params={"alpha": alpha, "beta": beta, "step": step, "radius": radius},
                   psi_outside=psi_outside)


def directional(gamma, radius: int = 3) -> Cocycle:
    """``b(k) = sum_j k_j gamma_j`` with trivial action on a box of Z^n.

    ``gamma`` of shape ``(n,)`` gives a scalar cocycle; ``(n, d)`` a d-dimensional one.
    """
    gamma = np.asarray(gamma, dtype=np.float64)
    if gamma.ndim == 1:
        gamma = gamma[:, None]
    n, d = gamma.shape
    box = LatticeBox(n, radius)
    b = box.points @ gamma
    alpha = np.broadcast_to(np.eye(d), (box.order, d, d))

    def psi_outside(k):
        v = np.asarray(k, dtype=np.float64) @ gamma
        return float(v @ v)

    return Cocycle(box, "left", b, alpha, kind="directional",
                   params={"gamma": gamma.tolist(), "radius": radius}, psi_outside=psi_outside)


def so3_generators(theta: float):
    c, s = np.cos(theta), np.sin(theta)
    a1 = np.array([[c, -s, 0], [s, c, 0], [0, 0, 1.0]])
    a2 = np.array([[1.0, 0, 0], [0, c, -s], [0, s, c]])
    return a1, a2


def word_matrix(word, theta: float) -> np.ndarray:
    gens = so3_generators(theta)
    out = np.eye(3)
    for x in word:
        m = gens[abs(x) - 1]
        out = out @ (m if x > 0 else m.T)
    return out


def free_so3(theta: float = DEFAULT_THETA, radius: int = 2) -> Cocycle:
    """Nine-dimensional cocycle of F_2 through the rotations A_1, A_2.

    ``b(w) = (W e_1 - e_1) + (W e_2 - e_2) + (W e_3 - e_3)`` (direct sum),
    ``alpha(w) = W + W + W``.
    """
    if abs(np.sin(theta)) < 1e-12:
        warnings.warn("sin(theta) = 0: the rotations do not generate a free group")
    ball = WordBall(2, radius)
    ws = np.array([word_matrix(w, theta) for w in ball.words])
    b = (ws - np.eye(3)).transpose(0, 2, 1).reshape(ball.order, 9)
    alpha = np.einsum("ij,gkl->gikjl", np.eye(3), ws).reshape(ball.order, 9, 9)

    def psi_outside(word):
        m = word_matrix(word, theta) - np.eye(3)
        return float((m * m).sum())

    return Cocycle(ball, "left", b, alpha, kind="free_so3",
                   params={"theta": theta, "radius": radius}, psi_outside=psi_outside)


def haagerup(k: int = 2, radius: int = 2) -> Cocycle:
    """Tree cocycle of F_k: ``b(g)`` is the sum of the edges on the path e -> g.

    Coordinates are the edges of the ball, labelled by their far endpoint,
    so ``<b(g), b(h)>`` is the length of the common prefix and ``psi(g) = |g|``.
    The action is the signed edge translation, a partial isometry on the ball.
    """
    ball = WordBall(k, radius)
    n = ball.order
    edge = {w: i - 1 for i, w in enumerate(ball.words) if w}
    b = np.zeros((n, n - 1))
    for i, w in enumerate(ball.words):
        for j in range(1, len(w) + 1):
            b[i, edge[w[:j]]] = 1.0
    alpha = np.zeros((n, n - 1, n - 1))
    for gi, g in enumerate(ball.words):
        for w, col in edge.items():
            u = ball.position.get(_reduced(g + w[:-1]))
            v = ball.position.get(_reduced(g + w))
            if u is None or v is None:
                continue
            uw, vw = ball.words[u], ball.words[v]
            if len(vw) == len(uw) + 1:
                alpha[gi, edge[vw], col] = 1.0
            else:
                alpha[gi, edge[uw], col] = -1.0
    return Cocycle(ball, "left", b, alpha, kind="haagerup", params={"k": k, "radius": radius},
                   psi_outside=len, partial_alpha=True)


def _reduced(word):
    from .groups import reduce_word
    return reduce_word(word)


def direct_sum(c1: Cocycle, c2: Cocycle, group: FiniteGroup = None) -> Cocycle:
    """Cocycle ``b1 + b2`` on the direct product of the two carriers."""
    group = group or direct_product(c1.group, c2.group)
    n2 = c2.group.order
    x, y = np.divmod(np.arange(c1.group.order * n2), n2)
    b = np.concatenate([c1.b[x], c2.b[y]], axis=1)
    return Cocycle(group, "left", b, _block_diag(c1.alpha[x], c2.alpha[y]),
                   kind=f"{c1.kind}+{c2.kind}")


def pullback(hom, c: Cocycle, group) -> Cocycle:
    """``b o hom`` with the pulled-back action; ``hom`` is an index map G -> H."""
    hom = np.asarray(hom, dtype=np.int64)
    h = c.group
    if hom.shape != (group.order,):
        raise InvalidParameter("homomorphism must map every element of G")
    ar = np.arange(group.order)
    lhs = hom[group.mul[ar[:, None], ar[None, :]]]
    rhs = h.mul[hom[:, None], hom[None, :]]
    if not (lhs == rhs).all():
        raise ValidationError("map is not a homomorphism")
    return Cocycle(group, c.side, c.b[hom], c.alpha[hom], c.tol, kind=f"pullback({c.kind})")


def heisenberg_pullback(n: int) -> Cocycle:
    """``psi(a,b,c) = psi_roots(b) + psi_roots(c)`` via ``(a,b,c) -> (b,c)``.

    The centre ``{(a,0,0)}`` is the kernel, so the cocycle is not injective.
    """
    zn = build_cyclic(n)
    base = direct_sum(zn_roots(n, zn), zn_roots(n, zn))
    c = pullback(heisenberg_quotient(n), base, build_heisenberg_mod(n))
    return Cocycle(c.group, "left", c.b, c.alpha, kind="heisenberg_pullback", params={"n": n})


def dihedral_plane(n: int, v=(1.0, 0.0)) -> Cocycle:
    """Coboundary ``pi(g) v - v`` of the defining action of D_n on the plane."""
    group = build_dihedral(n)
    k, e = np.arange(2 * n) % n, np.arange(2 * n) // n
    refl = np.where(e[:, None, None] == 1, np.diag([1.0, -1.0]), np.eye(2))
    reps = _rot(2 * np.pi * k / n) @ refl
    v = np.asarray(v, dtype=np.float64)
    b = reps @ v - v
    return Cocycle(group, "left", b, reps, kind="dihedral_plane", params={"n": n, "v": v.tolist()})


KINDS = {
    "zn_roots": zn_roots,
    "helix": helix,
    "directional": directional,
    "free_so3": free_so3,
    "haagerup": haagerup,
    "heisenberg_pullback": heisenberg_pullback,
    "dihedral_plane": dihedral_plane,
}


def catalog(kind: str, **params) -> Cocycle:
    try:
        factory = KINDS[kind]
    except KeyError:
        raise InvalidParameter(f"unknown catalog kind {kind!r}; choose from {sorted(KINDS)}",
                               operation="catalog") from None
    side = params.pop("side", "left")
    c = factory(**params)
    return to_right(c) if side == "right" else c
