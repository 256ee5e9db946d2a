"""Werner's convolutions between functions and operators on the finite model.

Each convolution has a direct evaluation (a sum over phase space, used below
``DIRECT_THRESHOLD`` and as an oracle) and a Fourier-side evaluation that
multiplies transforms and inverts.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .exponents import format_exponent, young_target
from .objects import Operator
from .operators import _fw_fast, _ifw_fast, schatten_norm
from .phase_space import (
    DIRECT_THRESHOLD,
    GridSpec,
    PhaseFunction,
    _same_n,
    lp_norm,
    sdft_array,
)
from .weyl_rep import shift_matrix


def _method(grid: GridSpec, method: str) -> str:
    if method == "auto":
        return "direct" if grid.n < DIRECT_THRESHOLD else "fourier"
    if method not in ("direct", "fourier"):
        raise ValueError(f"unknown method {method!r}")
    return method


def conv_fn_fn(f: PhaseFunction, g: PhaseFunction, method: str = "auto") -> PhaseFunction:
    """(f * g)(w) = (1/n) sum_z f(z) g(w - z)."""
    _same_n(f.grid.n, g.grid.n)
    n = f.grid.n
    if _method(f.grid, method) == "direct":
        out = np.zeros((n, n), dtype=complex)
        for x in range(n):
            for xi in range(n):
                out += f.values[x, xi] * np.roll(g.values, (x, xi), axis=(0, 1))
        return PhaseFunction(f.grid, out / n)
    prod = sdft_array(f.values, "fourier") * sdft_array(g.values, "fourier")
    return PhaseFunction(f.grid, sdft_array(prod, "fourier"))


def conv_fn_op(f: PhaseFunction, S: Operator, method: str = "auto") -> Operator:
    """f * S = (1/n) sum_z f(z) rho(z) S rho(-z)."""
    _same_n(f.grid.n, S.grid.n)
    grid = f.grid
    if _method(grid, method) == "direct":
        out = np.zeros((grid.n, grid.n), dtype=complex)
        for x in range(grid.n):
            for xi in range(grid.n):
                c = f.values[x, xi]
                if c != 0:
                    r = shift_matrix(grid, x, xi)
                    out += c * (r @ S.matrix @ r.conj().T)
        return Operator(grid, out / grid.n)
    spread = sdft_array(f.values, "fourier") * _fw_fast(S.matrix, grid)
    return Operator(grid, _ifw_fast(spread, grid))


def conv_op_op(T: Operator, S: Operator, method: str = "auto") -> PhaseFunction:
    """(T * S)(z) = tr(T alpha_z(P S P))."""
    _same_n(T.grid.n, S.grid.n)
    grid = T.grid
    if _method(grid, method) == "direct":
        n = grid.n
        idx = (-np.arange(n)) % n
        pspp = S.matrix[np.ix_(idx, idx)]
        out = np.empty((n, n), dtype=complex)
        for x in range(n):
            for xi in range(n):
                r = shift_matrix(grid, x, xi)
                # tr(T r A r^*) = sum (T^T * (r A r^*))
                out[x, xi] = np.sum(T.matrix.T * (r @ pspp @ r.conj().T))
        return PhaseFunction(grid, out)
    prod = _fw_fast(T.matrix, grid) * _fw_fast(S.matrix, grid)
    return PhaseFunction(grid, sdft_array(prod, "fourier"))


@dataclass(frozen=True)
class WernerYoungReport:
    kind: str
    p: str
    q: str
    r: str
    lhs: float
    rhs: float
    margin: float
    seed: Optional[int] = None

    @property
    def relative_margin(self) -> float:
        return self.margin / self.rhs if self.rhs > 0 else self.margin

    def to_json(self) -> dict:
        return asdict(self)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def werner_young_margin(kind: str, a, b, p, q, seed: Optional[int] = None) -> WernerYoungReport:
    """Evaluate both sides of the Werner-Young bound.

    ``kind="fn_op"``: a is a PhaseFunction in L^p, b an operator in S^q and
    the left side is ||a * b||_{S^r}.  ``kind="op_op"``: both are operators
    and the left side is ||a * b||_{L^r}.  The exponent r is derived exactly
    from 1 + 1/r = 1/p + 1/q.
    """
    r = young_target(p, q)
    if kind == "fn_op":
        lhs = schatten_norm(conv_fn_op(a, b), r)
        rhs = lp_norm(a, p) * schatten_norm(b, q)
    elif kind == "op_op":
        lhs = lp_norm(conv_op_op(a, b), r)
        rhs = schatten_norm(a, p) * schatten_norm(b, q)
    else:
        raise ValueError(f"kind must be 'fn_op' or 'op_op', got {kind!r}")
    return WernerYoungReport(
        kind=kind,
        p=format_exponent(p),
        q=format_exponent(q),
        r=format_exponent(r),
        lhs=float(lhs),
        rhs=float(rhs),
        margin=float(rhs - lhs),
        seed=seed,
    )

