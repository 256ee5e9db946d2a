"""Schatten norms, the Fourier-Wigner transform and Weyl symbols."""
from __future__ import annotations

import numpy as np

from .exponents import as_float
from .objects import Operator, Signal
from .phase_space import (
    DIRECT_THRESHOLD,
    CellSet,
    GridSpec,
    PhaseFunction,
    _same_n,
    sdft_array,
)
from .weyl_rep import shift_matrix

__all__ = [
    "Operator",
    "rank_one",
    "schatten_norm",
    "singular_values",
    "fourier_wigner",
    "inverse_fourier_wigner",
    "weyl_symbol",
    "inverse_weyl_symbol",
    "op_bandlimit",
]


def rank_one(g: Signal, h: Signal) -> Operator:
    """(g (x) h) u = <u, h> g."""
    _same_n(g.grid.n, h.grid.n)
    return Operator(g.grid, np.outer(g.values, np.conj(h.values)))


def singular_values(T: Operator) -> np.ndarray:
    return np.linalg.svd(T.matrix, compute_uv=False)


def schatten_from_singular(s: np.ndarray, p: float) -> float:
    if np.isinf(p):
        return float(s.max(initial=0.0))
    if p == 1:
        return float(s.sum())
    m = s.max(initial=0.0)
    if m == 0:
        return 0.0
    return float(m * np.sum((s / m) ** p) ** (1.0 / p))


def schatten_norm(T: Operator, p) -> float:
    return schatten_from_singular(singular_values(T), as_float(p))


def _fw_fast(m: np.ndarray, grid: GridSpec) -> np.ndarray:
    # F_W(T)(x, xi) = omega^{h x xi} sum_t T[t, t - x] omega^{-xi t}
    n, h = grid.n, grid.half_inv
    x = np.arange(n)
    diag = m[..., x[None, :], (x[None, :] - x[:, None]) % n]
    phase = grid.roots[(h * np.outer(x, x)) % n]
    return np.fft.fft(diag, axis=-1) * phase


def _ifw_fast(a: np.ndarray, grid: GridSpec) -> np.ndarray:
    n, h = grid.n, grid.half_inv
    x = np.arange(n)
    phase = grid.roots[(-h * np.outer(x, x)) % n]
    diag = np.fft.ifft(a * phase, axis=-1)
    m = np.empty(a.shape, dtype=complex)
    m[..., x[None, :], (x[None, :] - x[:, None]) % n] = diag
    return m


def _fw_direct(m: np.ndarray, grid: GridSpec) -> np.ndarray:
    n = grid.n
    out = np.empty((n, n), dtype=complex)
    for x in range(n):
        for xi in range(n):
            out[x, xi] = np.trace(m @ shift_matrix(grid, -x, -xi))
    return out


def _ifw_direct(a: np.ndarray, grid: GridSpec) -> np.ndarray:
    n = grid.n
    m = np.zeros((n, n), dtype=complex)
    for x in range(n):
        for xi in range(n):
            if a[x, xi] != 0:
                m += a[x, xi] * shift_matrix(grid, x, xi)
    return m / n


def fw_array(m: np.ndarray, grid: GridSpec, method: str = "fourier") -> np.ndarray:
    if method == "auto":
        method = "direct" if grid.n < DIRECT_THRESHOLD else "fourier"
    if method == "direct":
        return _fw_direct(m, grid)
    return _fw_fast(m, grid)


def ifw_array(a: np.ndarray, grid: GridSpec, method: str = "fourier") -> np.ndarray:
    if method == "auto":
        method = "direct" if grid.n < DIRECT_THRESHOLD else "fourier"
    if method == "direct":
        return _ifw_direct(a, grid)
    return _ifw_fast(a, grid)


def fourier_wigner(T: Operator, method: str = "fourier") -> PhaseFunction:
    """Spreading function z -> tr(T rho(-z)).

    ``method="direct"`` evaluates every trace against a materialized shift
    matrix and exists as an independent check of the diagonal-FFT path.
    """
    return PhaseFunction(T.grid, fw_array(T.matrix, T.grid, method))


def inverse_fourier_wigner(F: PhaseFunction, method: str = "fourier") -> Operator:
    """T = (1/n) sum_z F(z) rho(z)."""
    return Operator(F.grid, ifw_array(F.values, F.grid, method))


def weyl_symbol(T: Operator) -> PhaseFunction:
    return PhaseFunction(T.grid, sdft_array(_fw_fast(T.matrix, T.grid)))


def inverse_weyl_symbol(a: PhaseFunction) -> Operator:
    return Operator(a.grid, _ifw_fast(sdft_array(a.values), a.grid))


def op_bandlimit(T: Operator, cell: CellSet) -> Operator:
    """Keep only the part of T whose spreading function lies in ``cell``."""
    _same_n(T.grid.n, cell.grid.n)
    spread = _fw_fast(T.matrix, T.grid)
    return Operator(T.grid, _ifw_fast(np.where(cell.mask, spread, 0), T.grid))
