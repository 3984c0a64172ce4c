"""FFT multipliers on the cyclic grid Z_N as a stand-in for symbols on the line."""
from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameter
from .seeding import child_rng


def _check_pow2(n):
    if n < 1 or n & (n - 1):
        raise InvalidParameter(f"grid length must be a power of two, got {n}")


@dataclass(frozen=True, eq=False)
class GridSignal:
    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        x = np.array(self.samples, dtype=np.complex128).ravel()
        _check_pow2(x.size)
        x.setflags(write=False)
        object.__setattr__(self, "samples", x)

    @property
    def n(self) -> int:
        return self.samples.size

    @property
    def spacing(self) -> float:
        return 1.0 / self.n

    def coefficients(self) -> np.ndarray:
        """DFT normalized so that ``sum |c|^2 = mean |x|^2``."""
        return np.fft.fft(self.samples) / self.n

    def lp_norm(self, p: float) -> float:
        return discrete_lp(self.samples, p)


def discrete_lp(x, p: float) -> float:
    """L_p norm for the normalized counting measure."""
    a = np.abs(np.asarray(x))
    if np.isinf(p):
        return float(a.max(initial=0.0))
    top = a.max(initial=0.0)
    if top == 0:
        return 0.0
    return float(top * np.mean((a / top) ** p) ** (1.0 / p))


def signed_frequencies(n: int) -> np.ndarray:
    """Integer frequencies in ``(-N/2, N/2]`` in FFT order."""
    k = np.fft.fftfreq(n, 1.0 / n)
    if n % 2 == 0:
        k[n // 2] = n // 2
    return k


def donut_symbol(alpha: float, beta: float, gamma: float):
    """``xi -> (sin^2(alpha xi) + sin^2(beta xi))^gamma``."""
    if not (alpha > 0 and beta > 0):
        raise InvalidParameter("alpha and beta must be positive", operation="donut_symbol")
    if not 0 < gamma < 1:
        warnings.warn(f"gamma = {gamma} lies outside (0, 1)")

    def symbol(xi):
        xi = np.asarray(xi, dtype=np.float64)
        return (np.sin(alpha * xi) ** 2 + np.sin(beta * xi) ** 2) ** gamma

    symbol.source = f"donut(alpha={alpha!r}, beta={beta!r}, gamma={gamma!r})"
    symbol.params = {"alpha": alpha, "beta": beta, "gamma": gamma}
    return symbol


def symbol_table(symbol, n: int, scale: float = None) -> np.ndarray:
    """Symbol at the signed frequencies times ``scale`` (default ``1/N``), FFT order."""
    _check_pow2(n)
    scale = 1.0 / n if scale is None else scale
    return np.asarray(symbol(signed_frequencies(n) * scale), dtype=np.complex128)


def fft_apply(symbol, signal: GridSignal, scale: float = None) -> GridSignal:
    table = symbol_table(symbol, signal.n, scale)
    return GridSignal(np.fft.ifft(np.fft.fft(signal.samples) * table))


def exact_l2_norm(symbol, n: int, scale: float = None) -> float:
    return float(np.abs(symbol_table(symbol, n, scale)).max())


def _ratio_from_coeffs(c, table, p):
    x = np.fft.ifft(c)
    den = discrete_lp(x, p)
    return discrete_lp(np.fft.ifft(c * table), p) / den if den > 0 else 0.0


def norm_lower_bound(table: np.ndarray, p: float, trials: int = 4, steps: int = 100,
                     seed: int = 0, label: str = "sweep") -> dict:
    """Randomized lower bound for the L_p operator norm of a diagonal DFT multiplier.

    Pure frequencies give ``max |s|`` at every p.  Each trial starts from
    the best pure frequency (trial 0) or random gaussian coefficients and
    adds random single-frequency perturbations, keeping improvements only.
    """
    if not p >= 1:
        raise InvalidParameter(f"p must be >= 1, got {p}", operation="empirical_norm_sweep")
    n = table.size
    mags = np.abs(table)
    top = int(np.argmax(mags))
    best = float(mags[top])
    for trial in range(trials):
        rng = child_rng(seed, label, trial)
        if trial == 0:
            c = np.zeros(n, dtype=np.complex128)
            c[top] = 1.0
        else:
            c = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        cur = _ratio_from_coeffs(c, table, p)
        scale = np.abs(c).max()
        for _ in range(steps):
            j = int(rng.integers(n))
            cand = c.copy()
            cand[j] += scale * 10.0 ** rng.uniform(-2, 0) * \
                (rng.standard_normal() + 1j * rng.standard_normal())
            val = _ratio_from_coeffs(cand, table, p)
            if val > cur:
                c, cur = cand, val
        best = max(best, cur)
    return {"lower_bound": best, "sup_symbol": float(mags.max()), "trials": trials,
            "steps": steps}


def empirical_norm_sweep(symbol, p: float, n_list, trials: int = 4, steps: int = 100,
                         seed: int = 0, scale: float = None) -> list:
    """Per-N lower bounds on the L_p norm; at ``p = 2`` the exact norm."""
    rows = []
    for n in n_list:
        table = symbol_table(symbol, n, scale)
        if p == 2:
            val = float(np.abs(table).max())
        else:
            val = norm_lower_bound(table, p, trials, steps, seed, f"N={n}")["lower_bound"]
        rows.append({"N": int(n), "p": float(p), "lower_bound": val, "trials": trials})
    return rows


def restriction_compare(symbol, h: float, p: float, n: int = 1024, trials: int = 4,
                        steps: int = 100, seed: int = 0) -> dict:
    """Norms of the symbol sampled on ``h Z`` and on ``(h/2) Z`` over the same window."""
    coarse = symbol_table(symbol, n, h)
    fine = symbol_table(symbol, 2 * n, h / 2)
    if p == 2:
        a, b = float(np.abs(coarse).max()), float(np.abs(fine).max())
    else:
        a = norm_lower_bound(coarse, p, trials, steps, seed, "coarse")["lower_bound"]
        b = norm_lower_bound(fine, p, trials, steps, seed, "fine")["lower_bound"]
    top = max(a, b)
    return {"grid": a, "refined": b, "drift": abs(a - b) / top if top > 0 else 0.0,
            "h": h, "p": float(p)}


def write_signal_binary(path, signal: GridSignal) -> None:
    """Little-endian float64 (re, im) pairs."""
    pairs = np.stack([signal.samples.real, signal.samples.imag], axis=1)
    pairs.astype("<f8").tofile(path)


def read_signal_binary(path) -> GridSignal:
    raw = np.fromfile(path, dtype="<f8").reshape(-1, 2)
    return GridSignal(raw[:, 0] + 1j * raw[:, 1])


def write_signal_csv(path, signal: GridSignal) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["re", "im"])
        for z in signal.samples:
            w.writerow([repr(float(z.real)), repr(float(z.imag))])


def read_signal_csv(path) -> GridSignal:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return GridSignal([float(r["re"]) + 1j * float(r["im"]) for r in rows])


def write_sweep_csv(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=["N", "p", "lower_bound", "trials"])
        w.writeheader()
        for r in rows:
            w.writerow(r)
