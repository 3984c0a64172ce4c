"""Finite groups as Cayley tables, plus partial carriers (word balls, lattice boxes).

Every carrier exposes the same surface: ``order``, ``mul`` (an ``order x order``
int64 table, ``-1`` where a product is undefined), ``inv``, ``labels`` and a
``closed`` flag.  Index 0 is always the identity.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels
from .errors import InvalidParameter, ResourceLimitError, ValidationError

DEFAULT_CAP = 5040
WORD_BALL_CAP = 4096
ASSOC_EXHAUSTIVE_MAX = 64
ASSOC_SAMPLES = 100_000
ASSOC_SEED = 20130801


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    mul: np.ndarray
    inv: np.ndarray
    labels: tuple = ()
    name: str = "group"
    closed: bool = field(default=True, init=False)

    def __post_init__(self):
        mul = np.ascontiguousarray(self.mul, dtype=np.int64)
        inv = np.ascontiguousarray(self.inv, dtype=np.int64)
        mul.setflags(write=False)
        inv.setflags(write=False)
        object.__setattr__(self, "mul", mul)
        object.__setattr__(self, "inv", inv)
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(i) for i in range(len(inv))))
        else:
            object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def order(self) -> int:
        return self.mul.shape[0]

    @property
    def identity(self) -> int:
        return 0

    def is_abelian(self) -> bool:
        return bool((self.mul == self.mul.T).all())

    def index(self, label) -> int:
        return self.labels.index(str(label))

    def validate(self) -> None:
        validate_group(self)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "order": self.order,
            "mul": self.mul.ravel().tolist(),
            "inv": self.inv.tolist(),
            "labels": list(self.labels),
        }

    @classmethod
    def from_json(cls, doc: dict) -> FiniteGroup:
        n = int(doc["order"])
        mul = np.asarray(doc["mul"], dtype=np.int64)
        if mul.size != n * n:
            raise ValidationError(f"mul has {mul.size} entries, expected {n * n}")
        g = cls(mul.reshape(n, n), np.asarray(doc["inv"]), tuple(doc.get("labels", ())),
                doc.get("name", "group"))
        validate_group(g)
        return g

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json()))

    @classmethod
    def load(cls, path) -> FiniteGroup:
        return cls.from_json(json.loads(Path(path).read_text()))


def validate_group(g: FiniteGroup) -> None:
    """Raise ValidationError unless the table is a group with identity 0."""
    mul, inv, n = g.mul, g.inv, g.order
    if mul.shape != (n, n) or inv.shape != (n,):
        raise ValidationError("table shapes are inconsistent")
    if not kernels.is_latin(mul):
        raise ValidationError("multiplication table is not a Latin square")
    ar = np.arange(n)
    if not ((mul[0] == ar).all() and (mul[:, 0] == ar).all()):
        raise ValidationError("index 0 is not the identity")
    if not ((mul[ar, inv] == 0).all() and (mul[inv, ar] == 0).all()):
        raise ValidationError("inverse table is wrong")
    if n <= ASSOC_EXHAUSTIVE_MAX:
        bad = kernels.associativity_exhaustive(mul)
    else:
        rng = np.random.default_rng(ASSOC_SEED)
        bad = kernels.associativity_sampled(mul, rng.integers(0, n, size=(ASSOC_SAMPLES, 3)))
    if bad is not None:
        raise ValidationError(f"associativity fails at {bad}")


def from_table(mul, labels=None, name="group", cap=DEFAULT_CAP) -> FiniteGroup:
    """Build a group from any Cayley table, relabelling so the identity is 0."""
    mul = np.asarray(mul, dtype=np.int64)
    n = mul.shape[0]
    if n > cap:
        raise ResourceLimitError(f"order {n} exceeds cap {cap}")
    ar = np.arange(n)
    ids = [e for e in range(n) if (mul[e] == ar).all() and (mul[:, e] == ar).all()]
    if not ids:
        raise ValidationError("table has no identity")
    e = ids[0]
    labels = list(labels) if labels is not None else [str(i) for i in range(n)]
    if e != 0:
        perm = np.arange(n)
        perm[[0, e]] = perm[[e, 0]]  # perm is an involution
        mul = perm[mul[np.ix_(perm, perm)]]
        labels = [labels[i] for i in perm]
    inv = np.argmax(mul == 0, axis=1)
    g = FiniteGroup(mul, inv, tuple(labels), name)
    validate_group(g)
    return g


def build_cyclic(n: int) -> FiniteGroup:
    if n < 1:
        raise InvalidParameter("cyclic group needs n >= 1", operation="build_cyclic")
    ar = np.arange(n)
    g = FiniteGroup((ar[:, None] + ar[None, :]) % n, (-ar) % n, name=f"Z{n}")
    validate_group(g)
    return g


def _check_cap(size, cap):
    if size > cap:
        raise ResourceLimitError(f"group of order {size} exceeds cap {cap}",
                                 operation="build_named")


def build_dihedral(n: int, cap=DEFAULT_CAP) -> FiniteGroup:
    """Symmetries of the regular n-gon; index ``e*n + k`` is ``r^k s^e``."""
    if n < 1:
        raise InvalidParameter("dihedral group needs n >= 1")
    _check_cap(2 * n, cap)
    k, e = np.divmod(np.arange(2 * n), n)[::-1]
    sign = np.where(e == 1, -1, 1)
    rot = (k[:, None] + sign[:, None] * k[None, :]) % n
    ref = (e[:, None] + e[None, :]) % 2
    labels = [("r^%d" % kk) + ("s" if ee else "") for kk, ee in zip(k, e)]
    return from_table(ref * n + rot, labels, name=f"D{n}", cap=cap)


def build_symmetric(n: int, cap=DEFAULT_CAP) -> FiniteGroup:
    """S_n with ``(s t)(i) = s(t(i))``; permutations in lexicographic order."""
    if n < 1:
        raise InvalidParameter("symmetric group needs n >= 1")
    size = 1
    for i in range(2, n + 1):
        size *= i
    _check_cap(size, cap)
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64).reshape(size, n)
    weights = n ** np.arange(n - 1, -1, -1, dtype=np.int64)
    codes = perms @ weights
    order = np.argsort(codes)
    mul = np.empty((size, size), dtype=np.int64)
    for g in range(size):
        composed = perms[g][perms] @ weights
        mul[g] = order[np.searchsorted(codes[order], composed)]
    labels = ["".join(map(str, p)) for p in perms]
    return from_table(mul, labels, name=f"S{n}", cap=cap)


def direct_product(g1: FiniteGroup, g2: FiniteGroup, cap=DEFAULT_CAP) -> FiniteGroup:
    n1, n2 = g1.order, g2.order
    _check_cap(n1 * n2, cap)
    a, b = np.divmod(np.arange(n1 * n2), n2)
    mul = g1.mul[a[:, None], a[None, :]] * n2 + g2.mul[b[:, None], b[None, :]]
    inv = g1.inv[a] * n2 + g2.inv[b]
    labels = [f"({g1.labels[x]},{g2.labels[y]})" for x, y in zip(a, b)]
    g = FiniteGroup(mul, inv, tuple(labels), f"{g1.name}x{g2.name}")
    validate_group(g)
    return g


def build_heisenberg_mod(n: int, cap=DEFAULT_CAP) -> FiniteGroup:
    """Triples over Z_n with ``(a,b,c)(a',b',c') = (a+a'+b c', b+b', c+c')``.

    Index ``a n^2 + b n + c``; the centre is ``{(a,0,0)}``.
    """
    if n < 1:
        raise InvalidParameter("heisenberg_mod needs n >= 1")
    _check_cap(n ** 3, cap)
    idx = np.arange(n ** 3)
    a, b, c = idx // (n * n), (idx // n) % n, idx % n
    na = (a[:, None] + a[None, :] + b[:, None] * c[None, :]) % n
    nb = (b[:, None] + b[None, :]) % n
    nc = (c[:, None] + c[None, :]) % n
    mul = na * n * n + nb * n + nc
    inv = ((-a + b * c) % n) * n * n + ((-b) % n) * n + (-c) % n
    labels = [f"({x},{y},{z})" for x, y, z in zip(a, b, c)]
    g = FiniteGroup(mul, inv, tuple(labels), f"Heis{n}")
    validate_group(g)
    return g


def heisenberg_quotient(n: int) -> np.ndarray:
    """Homomorphism ``(a,b,c) -> (b,c)`` into ``Z_n x Z_n`` (as built by direct_product)."""
    idx = np.arange(n ** 3)
    return idx % (n * n)


def build_named(kind: str, cap=DEFAULT_CAP, **params) -> FiniteGroup:
    """Dispatch on ``kind``: cyclic, dihedral, symmetric, heisenberg_mod, product.

    ``product`` takes ``factors``: a list of ``{"kind": ..., **params}`` dicts.
    """
    if kind == "cyclic":
        g = build_cyclic(int(params["n"]))
        _check_cap(g.order, cap)
        return g
    if kind == "dihedral":
        return build_dihedral(int(params["n"]), cap)
    if kind == "symmetric":
        return build_symmetric(int(params["n"]), cap)
    if kind == "heisenberg_mod":
        return build_heisenberg_mod(int(params["n"]), cap)
    if kind == "product":
        factors = params.get("factors")
        if not factors:
            raise InvalidParameter("product needs a non-empty 'factors' list")
        size = 1
        groups = []
        for factor in factors:
            factor = dict(factor)
            sub = build_named(factor.pop("kind"), cap=cap, **factor)
            size *= sub.order
            _check_cap(size, cap)
            groups.append(sub)
        out = groups[0]
        for sub in groups[1:]:
            out = direct_product(out, sub, cap)
        return out
    raise InvalidParameter(f"unknown group kind {kind!r}", operation="build_named")


# -- free groups -----------------------------------------------------------

def reduce_word(word) -> tuple:
    """Free reduction of a word of signed generator letters (``+i``/``-i``, i >= 1)."""
    out = []
    for x in word:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def invert_word(word) -> tuple:
    return tuple(-x for x in reversed(word))


def word_label(word) -> str:
    if not word:
        return "e"
    letters = "abcdefghijklmnopqrstuvwxyz"
    return "".join(letters[x - 1] if x > 0 else letters[-x - 1].upper() for x in word)


def word_ball_size(k: int, radius: int) -> int:
    return 1 + sum(2 * k * (2 * k - 1) ** (j - 1) for j in range(1, radius + 1))


class WordBall:
    """All reduced words of length <= R in the free group on k generators.

    Words are tuples of signed letters; index order is by length, then
    lexicographic in the letter order ``1, -1, 2, -2, ...``.  Products that
    leave the ball are ``-1`` in ``mul``.
    """

    closed = False

    def __init__(self, k: int, radius: int, cap: int = WORD_BALL_CAP):
        if k < 1 or radius < 0:
            raise InvalidParameter("word ball needs k >= 1 and R >= 0",
                                   operation="build_word_ball")
        size = word_ball_size(k, radius)
        if size > cap:
            raise ResourceLimitError(f"word ball has {size} words, cap {cap}",
                                     operation="build_word_ball")
        self.k, self.radius = k, radius
        letters = [s * i for i in range(1, k + 1) for s in (1, -1)]
        words = [()]
        frontier = [()]
        for _ in range(radius):
            nxt = [w + (x,) for w in frontier for x in letters if not w or w[-1] != -x]
            words.extend(nxt)
            frontier = nxt
        self.words = words
        self.position = {w: i for i, w in enumerate(words)}
        n = len(words)
        self.inv = np.array([self.position[invert_word(w)] for w in words], dtype=np.int64)
        mul = np.full((n, n), -1, dtype=np.int64)
        for i, u in enumerate(words):
            for j, v in enumerate(words):
                mul[i, j] = self.position.get(reduce_word(u + v), -1)
        self.mul = mul
        self.labels = tuple(word_label(w) for w in words)
        self.name = f"F{k}[R={radius}]"

    @property
    def order(self) -> int:
        return len(self.words)

    def lengths(self) -> np.ndarray:
        return np.array([len(w) for w in self.words], dtype=np.int64)

    def product_word(self, g: int, h: int) -> tuple:
        return reduce_word(self.words[g] + self.words[h])

    def inner(self, radius: int) -> np.ndarray:
        """Indices of the words of length <= radius (a prefix of the index range)."""
        return np.nonzero(self.lengths() <= radius)[0]


def build_word_ball(k: int, radius: int, cap: int = WORD_BALL_CAP) -> WordBall:
    return WordBall(k, radius, cap)


class LatticeBox:
    """Points of Z^n with sup-norm <= radius; addition is partial.

    Used as the finite carrier of cocycles on R or Z^n (helix, directional).
    Index 0 is the origin.
    """

    closed = False

    def __init__(self, n: int, radius: int, cap: int = WORD_BALL_CAP):
        if n < 1 or radius < 0:
            raise InvalidParameter("lattice box needs n >= 1 and radius >= 0")
        size = (2 * radius + 1) ** n
        if size > cap:
            raise ResourceLimitError(f"lattice box has {size} points, cap {cap}")
        rng = range(-radius, radius + 1)
        pts = sorted(itertools.product(rng, repeat=n),
                     key=lambda p: (max(abs(x) for x in p), sum(abs(x) for x in p), p))
        self.n, self.radius = n, radius
        self.points = np.array(pts, dtype=np.int64).reshape(size, n)
        self.position = {tuple(p): i for i, p in enumerate(pts)}
        self.inv = np.array([self.position[tuple(-p)] for p in self.points], dtype=np.int64)
        sums = self.points[:, None, :] + self.points[None, :, :]
        inside = (np.abs(sums) <= radius).all(axis=2)
        mul = np.full((size, size), -1, dtype=np.int64)
        strides = (2 * radius + 1) ** np.arange(n - 1, -1, -1)
        code_of = np.full((2 * radius + 1) ** n, -1, dtype=np.int64)
        code_of[(self.points + radius) @ strides] = np.arange(size)
        mul[inside] = code_of[(sums[inside] + radius) @ strides]
        self.mul = mul
        self.labels = tuple(str(tuple(int(x) for x in p)) for p in self.points)
        self.name = f"Z{n}box[{radius}]"

    @property
    def order(self) -> int:
        return self.points.shape[0]

    def inner(self, radius: int) -> np.ndarray:
        return np.nonzero(np.abs(self.points).max(axis=1) <= radius)[0]


def is_closed(carrier) -> bool:
    return bool(getattr(carrier, "closed", False))
