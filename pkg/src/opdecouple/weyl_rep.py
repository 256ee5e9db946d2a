"""Symmetric time-frequency shifts on C^n, parity and the ambiguity function.

The half phase e^{-pi i x xi} of the continuous representation becomes
omega^{-h x xi} with h = 2^{-1} mod n, which keeps rho(z) exactly
n-periodic in both coordinates.  The resulting composition law is

    rho(z) rho(w) = omega^{h sigma(z, w)} rho(z + w).
"""
from __future__ import annotations

import numpy as np

from .objects import Operator, Signal
from .phase_space import (
    GridSpec,
    PhaseFunction,
    _same_n,
    as_point,
)


def shift_matrix(grid: GridSpec, x: int, xi: int) -> np.ndarray:
    n, h = grid.n, grid.half_inv
    t = np.arange(n)
    m = np.zeros((n, n), dtype=complex)
    m[t, (t - x) % n] = grid.roots[(-h * x * xi + xi * t) % n]
    return m


def shift_operator(grid: GridSpec, z) -> Operator:
    """rho(x, xi) f(t) = omega^{-h x xi} omega^{xi t} f(t - x)."""
    z = as_point(grid, z)
    return Operator(grid, shift_matrix(grid, z.x, z.xi))


def parity(grid: GridSpec) -> Operator:
    """(P f)(t) = f(-t)."""
    n = grid.n
    m = np.zeros((n, n))
    t = np.arange(n)
    m[t, (-t) % n] = 1.0
    return Operator(grid, m)


def conjugate(T: Operator, z) -> Operator:
    """alpha_z(T) = rho(z) T rho(-z)."""
    z = as_point(T.grid, z)
    r = shift_matrix(T.grid, z.x, z.xi)
    return Operator(T.grid, r @ T.matrix @ r.conj().T)


def shift_phase(grid: GridSpec, z, w) -> complex:
    """The scalar c with rho(z) rho(w) = c rho(z + w)."""
    z, w = as_point(grid, z), as_point(grid, w)
    sigma = (w.x * z.xi - z.x * w.xi) % grid.n
    return complex(grid.roots[(grid.half_inv * sigma) % grid.n])


def ambiguity_array(f: np.ndarray, g: np.ndarray, grid: GridSpec) -> np.ndarray:
    n, h = grid.n, grid.half_inv
    x = np.arange(n)
    t = np.arange(n)
    # prod[x, t] = f(t) conj(g(t - x))
    prod = f[None, :] * np.conj(g[(t[None, :] - x[:, None]) % n])
    phase = grid.roots[(h * np.outer(x, x)) % n]
    return np.fft.fft(prod, axis=1) * phase


def ambiguity(f: Signal, g: Signal) -> PhaseFunction:
    """Cross-ambiguity function z -> <f, rho(z) g>."""
    _same_n(f.grid.n, g.grid.n)
    return PhaseFunction(f.grid, ambiguity_array(f.values, g.values, f.grid))
