"""Numpy fallback for the compiled Cayley-table kernels (same signatures)."""
import numpy as np


def convolve(mul, a, b):
    g, h = np.nonzero(np.outer(a != 0, b != 0))
    k = mul[g, h]
    escaped = int(np.any(k < 0))
    ok = k >= 0
    out = np.zeros(mul.shape[0], dtype=np.complex128)
    np.add.at(out, k[ok], a[g[ok]] * b[h[ok]])
    return out, escaped


def gram_convolve(mul, inv, a, b, weight):
    mask = np.outer(a != 0, b != 0) & (weight != 0)
    g, h = np.nonzero(mask)
    k = mul[inv[g], h]
    escaped = int(np.any(k < 0))
    ok = k >= 0
    g, h, k = g[ok], h[ok], k[ok]
    out = np.zeros(mul.shape[0], dtype=np.complex128)
    np.add.at(out, k, np.conj(a[g]) * b[h] * weight[g, h])
    return out, escaped


def regular_matrix(mul, a):
    n = mul.shape[0]
    out = np.zeros((n, n), dtype=np.complex128)
    cols = np.broadcast_to(np.arange(n), (n, n))
    np.add.at(out, (mul, cols), np.broadcast_to(a[:, None], (n, n)))
    return out


def is_latin(mul):
    n = mul.shape[0]
    if mul.min() < 0 or mul.max() >= n:
        return False
    target = np.arange(n)
    rows = np.sort(mul, axis=1)
    cols = np.sort(mul, axis=0)
    return bool((rows == target).all() and (cols == target[:, None]).all())


def associativity_exhaustive(mul):
    n = mul.shape[0]
    left = mul[mul[:, :, None], np.arange(n)[None, None, :]]
    right = mul[np.arange(n)[:, None, None], mul[None, :, :]]
    bad = np.argwhere(left != right)
    return tuple(int(x) for x in bad[0]) if len(bad) else None


def associativity_sampled(mul, triples):
    g, h, k = triples.T
    bad = np.nonzero(mul[mul[g, h], k] != mul[g, mul[h, k]])[0]
    return tuple(int(x) for x in triples[bad[0]]) if len(bad) else None
