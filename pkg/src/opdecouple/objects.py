"""Signals in C^n and dense operators on C^n."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .phase_space import GridSpec, _readonly, _same_n, complex_pairs, from_pairs


@dataclass(frozen=True, eq=False)
class Signal:
    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape != (self.grid.n,):
            raise ValueError(f"expected {self.grid.n} entries, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("signal has non-finite entries")
        object.__setattr__(self, "values", _readonly(v))

    @classmethod
    def basis(cls, grid: GridSpec, k: int) -> "Signal":
        v = np.zeros(grid.n, dtype=complex)
        v[k % grid.n] = 1.0
        return cls(grid, v)

    @classmethod
    def random(cls, grid: GridSpec, rng: np.random.Generator) -> "Signal":
        return cls(grid, rng.standard_normal(grid.n) + 1j * rng.standard_normal(grid.n))

    def norm(self) -> float:
        return float(np.linalg.norm(self.values))

    def normalized(self) -> "Signal":
        return Signal(self.grid, self.values / self.norm())

    def inner(self, other: "Signal") -> complex:
        """Counting-measure inner product, conjugate-linear in ``other``."""
        _same_n(self.grid.n, other.grid.n)
        return complex(np.vdot(other.values, self.values))

    def to_json(self) -> dict:
        return {"n": self.grid.n, "values": complex_pairs(self.values)}

    @classmethod
    def from_json(cls, data: dict) -> "Signal":
        return cls(GridSpec(int(data["n"])), from_pairs(data["values"]))


@dataclass(frozen=True, eq=False)
class Operator:
    grid: GridSpec
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix)
        n = self.grid.n
        if m.shape != (n, n):
            raise ValueError(f"expected a {n}x{n} matrix, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("operator has non-finite entries")
        object.__setattr__(self, "matrix", _readonly(m))

    @classmethod
    def identity(cls, grid: GridSpec) -> "Operator":
        return cls(grid, np.eye(grid.n))

    @classmethod
    def zeros(cls, grid: GridSpec) -> "Operator":
        return cls(grid, np.zeros((grid.n, grid.n)))

    @classmethod
    def random(cls, grid: GridSpec, rng: np.random.Generator) -> "Operator":
        shape = (grid.n, grid.n)
        return cls(grid, rng.standard_normal(shape) + 1j * rng.standard_normal(shape))

    def _check(self, other) -> None:
        _same_n(self.grid.n, other.grid.n)

    def __matmul__(self, other):
        if isinstance(other, Operator):
            self._check(other)
            return Operator(self.grid, self.matrix @ other.matrix)
        if isinstance(other, Signal):
            self._check(other)
            return Signal(self.grid, self.matrix @ other.values)
        return NotImplemented

    def __add__(self, other: "Operator") -> "Operator":
        self._check(other)
        return Operator(self.grid, self.matrix + other.matrix)

    def __sub__(self, other: "Operator") -> "Operator":
        self._check(other)
        return Operator(self.grid, self.matrix - other.matrix)

    def __mul__(self, c) -> "Operator":
        return Operator(self.grid, self.matrix * c)

    __rmul__ = __mul__

    def __neg__(self) -> "Operator":
        return Operator(self.grid, -self.matrix)

    @property
    def adjoint(self) -> "Operator":
        return Operator(self.grid, self.matrix.conj().T)

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def to_json(self) -> dict:
        return {"n": self.grid.n, "rows": [complex_pairs(row) for row in self.matrix]}

    @classmethod
    def from_json(cls, data: dict) -> "Operator":
        grid = GridSpec(int(data["n"]))
        return cls(grid, np.array([from_pairs(r) for r in data["rows"]]))
