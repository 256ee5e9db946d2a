"""The finite phase space Z_n x Z_n for odd n.

Signals live in C^n with the counting measure; functions on phase space
carry the measure ``mu = counting / n``. With this pairing the symplectic
DFT is an involution and the Fourier-Wigner transform is unitary, so the
continuous identities hold exactly rather than up to discretization error.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import numpy as np

from .exponents import as_float

#: below this grid size transforms are evaluated by direct summation
DIRECT_THRESHOLD = 16


class GridMismatchError(ValueError):
    """Objects defined on grids of different size were combined."""


@dataclass(frozen=True)
class GridSpec:
    n: int

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)):
            raise TypeError(f"grid size must be an int, got {self.n!r}")
        if self.n < 3 or self.n % 2 == 0:
            raise ValueError(f"grid size n must be odd and >= 3, got {self.n}")
        object.__setattr__(self, "n", int(self.n))

    @property
    def omega(self) -> complex:
        return complex(np.exp(2j * np.pi / self.n))

    @property
    def half_inv(self) -> int:
        """2^{-1} mod n."""
        return (self.n + 1) // 2

    @cached_property
    def roots(self) -> np.ndarray:
        """Table of omega**k, k = 0..n-1; index with exponents reduced mod n."""
        r = np.exp(2j * np.pi * np.arange(self.n) / self.n)
        r.setflags(write=False)
        return r

    def point(self, x: int, xi: int) -> "PhasePoint":
        return PhasePoint(x, xi, self.n)

    def points(self) -> Iterable["PhasePoint"]:
        for x in range(self.n):
            for xi in range(self.n):
                yield PhasePoint(x, xi, self.n)

    def centered(self, k):
        """Representative of k mod n in [-(n-1)/2, (n-1)/2]."""
        k = np.mod(k, self.n)
        return np.where(k > self.n // 2, k - self.n, k)


@dataclass(frozen=True)
class PhasePoint:
    x: int
    xi: int
    n: int

    def __post_init__(self):
        object.__setattr__(self, "x", int(self.x) % self.n)
        object.__setattr__(self, "xi", int(self.xi) % self.n)

    def __neg__(self) -> "PhasePoint":
        return PhasePoint(-self.x, -self.xi, self.n)

    def __add__(self, other: "PhasePoint") -> "PhasePoint":
        _same_n(self.n, other.n)
        return PhasePoint(self.x + other.x, self.xi + other.xi, self.n)

    def __sub__(self, other: "PhasePoint") -> "PhasePoint":
        return self + (-other)

    def as_tuple(self) -> tuple[int, int]:
        return (self.x, self.xi)


def _same_n(a: int, b: int) -> None:
    if a != b:
        raise GridMismatchError(f"grid size mismatch: {a} != {b}")


def as_point(grid: GridSpec, z) -> PhasePoint:
    """Accept a PhasePoint or an (x, xi) pair."""
    if isinstance(z, PhasePoint):
        _same_n(grid.n, z.n)
        return z
    x, xi = z
    return PhasePoint(x, xi, grid.n)


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PhaseFunction:
    """Complex function on the phase grid; ``values[x, xi]``."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        n = self.grid.n
        if v.shape != (n, n):
            if v.size == n * n:
                v = v.reshape(n, n)
            else:
                raise ValueError(f"expected {n * n} values, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("phase function has non-finite entries")
        object.__setattr__(self, "values", _readonly(v))

    @classmethod
    def zeros(cls, grid: GridSpec) -> "PhaseFunction":
        return cls(grid, np.zeros((grid.n, grid.n)))

    @classmethod
    def constant(cls, grid: GridSpec, c: complex) -> "PhaseFunction":
        return cls(grid, np.full((grid.n, grid.n), c, dtype=complex))

    @classmethod
    def delta(cls, grid: GridSpec, z=(0, 0), weight: complex = 1.0) -> "PhaseFunction":
        z = as_point(grid, z)
        v = np.zeros((grid.n, grid.n), dtype=complex)
        v[z.x, z.xi] = weight
        return cls(grid, v)

    @classmethod
    def random(cls, grid: GridSpec, rng: np.random.Generator) -> "PhaseFunction":
        shape = (grid.n, grid.n)
        return cls(grid, rng.standard_normal(shape) + 1j * rng.standard_normal(shape))

    def __call__(self, z) -> complex:
        z = as_point(self.grid, z)
        return complex(self.values[z.x, z.xi])

    def _check(self, other: "PhaseFunction") -> None:
        _same_n(self.grid.n, other.grid.n)

    def __add__(self, other: "PhaseFunction") -> "PhaseFunction":
        self._check(other)
        return PhaseFunction(self.grid, self.values + other.values)

    def __sub__(self, other: "PhaseFunction") -> "PhaseFunction":
        self._check(other)
        return PhaseFunction(self.grid, self.values - other.values)

    def __mul__(self, c) -> "PhaseFunction":
        if isinstance(c, PhaseFunction):
            self._check(c)
            return PhaseFunction(self.grid, self.values * c.values)
        return PhaseFunction(self.grid, self.values * c)

    __rmul__ = __mul__

    def __neg__(self) -> "PhaseFunction":
        return PhaseFunction(self.grid, -self.values)

    def inner(self, other: "PhaseFunction") -> complex:
        """mu-weighted inner product, linear in the first slot."""
        self._check(other)
        return complex(np.vdot(other.values, self.values)) / self.grid.n

    def to_json(self) -> dict:
        flat = self.values.reshape(-1)
        return {"n": self.grid.n, "values": complex_pairs(flat)}

    @classmethod
    def from_json(cls, data: dict) -> "PhaseFunction":
        grid = GridSpec(int(data["n"]))
        return cls(grid, from_pairs(data["values"]).reshape(grid.n, grid.n))


@dataclass(frozen=True, eq=False)
class CellSet:
    """A subset of the phase grid; points are kept in lexicographic order."""

    grid: GridSpec
    points: tuple

    def __post_init__(self):
        n = self.grid.n
        pts = []
        for p in self.points:
            if isinstance(p, PhasePoint):
                _same_n(n, p.n)
                x, xi = p.x, p.xi
            else:
                x, xi = (int(c) for c in p)
            if not (0 <= x < n and 0 <= xi < n):
                raise ValueError(f"point {(x, xi)} outside the {n}x{n} grid")
            pts.append((x, xi))
        if len(set(pts)) != len(pts):
            raise ValueError("duplicate points in cell")
        object.__setattr__(self, "points", tuple(sorted(pts)))

    @classmethod
    def from_mask(cls, grid: GridSpec, mask: np.ndarray) -> "CellSet":
        xs, xis = np.nonzero(np.asarray(mask, dtype=bool))
        return cls(grid, tuple(zip(xs.tolist(), xis.tolist())))

    @classmethod
    def full(cls, grid: GridSpec) -> "CellSet":
        return cls.from_mask(grid, np.ones((grid.n, grid.n), dtype=bool))

    @classmethod
    def empty(cls, grid: GridSpec) -> "CellSet":
        return cls(grid, ())

    @classmethod
    def disk(cls, grid: GridSpec, center, radius: int) -> "CellSet":
        """Periodic l-infinity ball (a square) around ``center``."""
        c = as_point(grid, center)
        d = linf_distance_to_point(grid, c)
        return cls.from_mask(grid, d <= radius)

    @classmethod
    def rect(cls, grid: GridSpec, x0: int, xi0: int, w: int, h: int) -> "CellSet":
        if w < 1 or h < 1 or w > grid.n or h > grid.n:
            raise ValueError(f"bad rectangle size {w}x{h} on n={grid.n}")
        pts = [((x0 + i) % grid.n, (xi0 + j) % grid.n) for i in range(w) for j in range(h)]
        return cls(grid, tuple(pts))

    @cached_property
    def mask(self) -> np.ndarray:
        m = np.zeros((self.grid.n, self.grid.n), dtype=bool)
        if self.points:
            idx = np.array(self.points)
            m[idx[:, 0], idx[:, 1]] = True
        m.setflags(write=False)
        return m

    @cached_property
    def index(self) -> tuple[np.ndarray, np.ndarray]:
        idx = np.array(self.points, dtype=int).reshape(-1, 2)
        return idx[:, 0], idx[:, 1]

    def __len__(self) -> int:
        return len(self.points)

    def __contains__(self, z) -> bool:
        z = as_point(self.grid, z)
        return bool(self.mask[z.x, z.xi])

    def union(self, other: "CellSet") -> "CellSet":
        _same_n(self.grid.n, other.grid.n)
        return CellSet.from_mask(self.grid, self.mask | other.mask)

    def issubset(self, other: "CellSet") -> bool:
        _same_n(self.grid.n, other.grid.n)
        return bool(np.all(other.mask[self.mask]))

    def isdisjoint(self, other: "CellSet") -> bool:
        _same_n(self.grid.n, other.grid.n)
        return not np.any(self.mask & other.mask)

    def to_json(self) -> dict:
        return {"n": self.grid.n, "points": [list(p) for p in self.points]}

    @classmethod
    def from_json(cls, data: dict) -> "CellSet":
        return cls(GridSpec(int(data["n"])), tuple(tuple(p) for p in data["points"]))


def complex_pairs(a) -> list:
    a = np.asarray(a, dtype=complex).reshape(-1)
    return [[float(v.real), float(v.imag)] for v in a]


def from_pairs(pairs) -> np.ndarray:
    arr = np.asarray(pairs, dtype=float).reshape(-1, 2)
    return arr[:, 0] + 1j * arr[:, 1]


def linf_distance_to_point(grid: GridSpec, c: PhasePoint) -> np.ndarray:
    """Periodic l-infinity distance from ``c`` to every grid point."""
    k = np.arange(grid.n)
    dx = np.abs(grid.centered(k - c.x))
    dxi = np.abs(grid.centered(k - c.xi))
    return np.maximum(dx[:, None], dxi[None, :])


def linf_distance_to_set(cell: CellSet, limit: int) -> np.ndarray:
    """Periodic l-infinity distance to ``cell``, capped at ``limit + 1``."""
    n = cell.grid.n
    dist = np.full((n, n), limit + 1, dtype=int)
    reached = cell.mask.copy()
    dist[reached] = 0
    for k in range(1, limit + 1):
        grown = reached.copy()
        for dx in (-1, 0, 1):
            for dxi in (-1, 0, 1):
                grown |= np.roll(reached, (dx, dxi), axis=(0, 1))
        dist[grown & ~reached] = k
        reached = grown
    return dist


def symplectic_form(w: PhasePoint, z: PhasePoint) -> int:
    """sigma(w, z) = z.x * w.xi - w.x * z.xi mod n."""
    _same_n(w.n, z.n)
    return (z.x * w.xi - w.x * z.xi) % w.n


def _sdft_direct(a: np.ndarray) -> np.ndarray:
    n = a.shape[-1]
    x, xi, xp, xip = np.ix_(*(np.arange(n),) * 4)
    # kernel[x, xi, x', xi'] = omega^{-sigma((x, xi), (x', xi'))} / n
    e = (xp * xi - x * xip) % n
    kernel = (np.exp(-2j * np.pi * e / n) / n).reshape(n * n, n * n)
    return (a.reshape(*a.shape[:-2], n * n) @ kernel.T).reshape(a.shape)


def _sdft_fast(a: np.ndarray) -> np.ndarray:
    out = np.fft.ifft(np.fft.fft(a, axis=-2), axis=-1)
    return np.swapaxes(out, -1, -2)


def sdft_array(a: np.ndarray, method: str = "auto") -> np.ndarray:
    """Symplectic DFT on raw arrays of shape (..., n, n)."""
    n = a.shape[-1]
    if method == "auto":
        method = "direct" if n < DIRECT_THRESHOLD else "fourier"
    if method == "direct":
        return _sdft_direct(a)
    if method == "fourier":
        return _sdft_fast(a)
    raise ValueError(f"unknown method {method!r}")


def symplectic_dft(f: PhaseFunction, method: str = "auto") -> PhaseFunction:
    """(1/n) sum_z omega^{-sigma(zeta, z)} f(z); an involution."""
    return PhaseFunction(f.grid, sdft_array(f.values, method))


def lp_array(a: np.ndarray, p: float, axes=(-2, -1)) -> np.ndarray:
    """mu-weighted L^p norm over the last two axes of a raw array."""
    n = a.shape[-1]
    mag = np.abs(a)
    if np.isinf(p):
        return mag.max(axis=axes)
    m = mag.max(axis=axes, keepdims=True)
    safe = np.where(m > 0, m, 1.0)
    s = ((mag / safe) ** p).sum(axis=axes) / n
    return np.squeeze(safe, axis=axes) * s ** (1.0 / p)


def lp_norm(f: PhaseFunction, p) -> float:
    """((1/n) sum |f|^p)^{1/p}; max |f| for p = inf."""
    return float(lp_array(f.values, as_float(p)))


def bandlimit(f: PhaseFunction, cell: CellSet) -> PhaseFunction:
    """Keep only the part of f whose symplectic spectrum lies in ``cell``."""
    _same_n(f.grid.n, cell.grid.n)
    spec = sdft_array(f.values)
    return PhaseFunction(f.grid, sdft_array(np.where(cell.mask, spec, 0)))
