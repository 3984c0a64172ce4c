"""Deliberately naive reference implementations used as test oracles.

Nothing here shares code with the package beyond reading a Cayley table.
"""
import itertools

import numpy as np
from scipy.linalg import fractional_matrix_power, sqrtm


def permutation_matrix(mul, g):
    n = len(mul)
    m = np.zeros((n, n))
    for h in range(n):
        m[mul[g][h], h] = 1.0
    return m


def dense(mul, coeffs):
    return sum(c * permutation_matrix(mul, g) for g, c in enumerate(coeffs))


def coeffs_of(matrix):
    """Coefficients of an element of L(G) from its matrix: the column at e."""
    return matrix[:, 0].copy()


def convolve(mul, a, b):
    n = len(a)
    out = np.zeros(n, dtype=complex)
    for g in range(n):
        for h in range(n):
            out[mul[g][h]] += a[g] * b[h]
    return out


def lp_norm(matrix, p):
    n = matrix.shape[0]
    h = matrix.conj().T @ matrix
    if np.isinf(p):
        return float(np.sqrt(np.linalg.eigvalsh(h).max()))
    return float((np.trace(fractional_matrix_power(h, p / 2)).real / n) ** (1 / p))


def psd_root_norm(h, p):
    """``||h^(1/2)||_p`` via a matrix square root."""
    r = sqrtm((h + h.conj().T) / 2)
    return lp_norm(r, p)


def cyclic_dft_convolve(a, b):
    return np.fft.ifft(np.fft.fft(a) * np.fft.fft(b))


def permutations_compose(n):
    perms = list(itertools.permutations(range(n)))
    pos = {p: i for i, p in enumerate(perms)}
    table = [[pos[tuple(s[t[i]] for i in range(n))] for t in perms] for s in perms]
    return perms, table


def free_reduce(word):
    """String rewriting: delete adjacent ``xX`` / ``Xx`` until none remain."""
    s = word
    while True:
        for i in range(len(s) - 1):
            if s[i] != s[i + 1] and s[i].lower() == s[i + 1].lower():
                s = s[:i] + s[i + 2:]
                break
        else:
            return s


def gamma_dense(mul, inv, psi, f):
    """Gradient form through dense matrices: 1/2 (A(f*) f + f* A(f) - A(f* f))."""
    n = len(f)
    fs = np.array([np.conj(f[inv[g]]) for g in range(n)])
    F, Fs = dense(mul, f), dense(mul, fs)
    AF, AFs = dense(mul, psi * f), dense(mul, psi * fs)
    prod = coeffs_of(Fs @ F)
    return 0.5 * (AFs @ F + Fs @ AF - dense(mul, psi * prod))


def meyer_ratio_dense(mul, inv, psi, f, p):
    n = len(f)
    fs = np.array([np.conj(f[inv[g]]) for g in range(n)])
    num = lp_norm(dense(mul, np.sqrt(psi) * f), p)
    col = psd_root_norm(gamma_dense(mul, inv, psi, f), p)
    row = psd_root_norm(gamma_dense(mul, inv, psi, fs), p)
    return num / max(col, row)


def brute_cn(psi_rel):
    """Conditional negativity by testing random zero-sum vectors."""
    rng = np.random.default_rng(0)
    n = psi_rel.shape[0]
    worst = -np.inf
    for _ in range(2000):
        c = rng.standard_normal(n)
        c -= c.mean()
        worst = max(worst, c @ psi_rel @ c / (c @ c))
    return worst
