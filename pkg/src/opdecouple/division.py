"""Quantum Wiener division on a bounded phase-space region.

Given a region Omega, build unit windows g, h and an operator B whose
spreading function is Psi / A(g, h), with Psi a bump equal to one on Omega.
Every operator T band-limited to Omega then satisfies

    T = (T * (g (x) h)) * B,

and the same holds for functions.  Werner-Young turns this into the norm
equivalence with constant C(Omega) = ||B||_{S^1}.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .convolutions import conv_fn_op, conv_op_op
from .exponents import format_exponent
from .objects import Operator, Signal
from .operators import _ifw_fast, op_bandlimit, rank_one, schatten_norm
from .phase_space import (
    CellSet,
    GridSpec,
    PhaseFunction,
    PhasePoint,
    _same_n,
    as_point,
    bandlimit,
    linf_distance_to_set,
    lp_norm,
)
from .weyl_rep import ambiguity, shift_operator

DEFAULT_FLOOR = 1e-6
PROFILES = ("indicator", "smooth")


class OmegaTooLargeError(ValueError):
    """The region does not fit the torus well enough to build a kit."""


class ModulusFloorError(OmegaTooLargeError):
    def __init__(self, floor: float, achieved: float):
        self.floor = floor
        self.achieved = achieved
        super().__init__(
            f"min |A(g,h)| on supp Psi is {achieved:.3e}, below the floor {floor:.3e}; "
            "the region is too large for Gaussian windows at this grid size"
        )


def gaussian_window(grid: GridSpec, center=(0, 0)) -> Signal:
    """rho(center) phi0 for the unit periodized Gaussian phi0(t) ~ exp(-pi t^2 / n)."""
    n = grid.n
    t = grid.centered(np.arange(n))
    k = np.arange(-3, 4)
    phi = np.exp(-np.pi * (t[:, None] + k[None, :] * n) ** 2 / n).sum(axis=1)
    phi = phi / np.linalg.norm(phi)
    c = as_point(grid, center)
    if (c.x, c.xi) == (0, 0):
        return Signal(grid, phi.astype(complex))
    return shift_operator(grid, c) @ Signal(grid, phi.astype(complex))


def chebyshev_center(omega: CellSet) -> tuple[PhasePoint, int]:
    """Grid point minimizing the max periodic l-infinity distance to omega.

    Ties go to the lexicographically smallest (x, xi).  Returns the center
    and the attained radius.
    """
    if len(omega) == 0:
        raise ValueError("omega is empty")
    grid = omega.grid
    n = grid.n
    xs, xis = omega.index
    c = np.arange(n)

    def radius(vals):
        vals = np.unique(vals)
        return np.abs(grid.centered(c[:, None] - vals[None, :])).max(axis=1)

    r = np.maximum(radius(xs)[:, None], radius(xis)[None, :])
    flat = int(np.argmin(r))
    x, xi = divmod(flat, n)
    return PhasePoint(x, xi, n), int(r[x, xi])


def _support_radius(omega: CellSet, profile: str, margin: int) -> tuple[PhasePoint, int]:
    center, radius = chebyshev_center(omega)
    collar = margin if profile == "smooth" else 0
    reach = radius + collar
    if 2 * reach + 1 > omega.grid.n:
        raise OmegaTooLargeError(
            f"support ball of radius {reach} (Chebyshev radius {radius} + collar {collar}) "
            f"wraps around the n={omega.grid.n} torus"
        )
    return center, reach


def build_bump(omega: CellSet, profile: str = "smooth", margin: int = 2) -> PhaseFunction:
    """Psi equal to one on omega.

    ``indicator`` gives 1_omega.  ``smooth`` decays as exp(1 - 1/(1 - s^2))
    with s = d / (margin + 1), d the periodic l-infinity distance to omega,
    so the support is the collar of width ``margin``.
    """
    if profile not in PROFILES:
        raise ValueError(f"profile must be one of {PROFILES}, got {profile!r}")
    if len(omega) == 0:
        raise ValueError("omega is empty")
    if profile == "smooth" and margin < 1:
        raise ValueError("smooth profile needs margin >= 1")
    _support_radius(omega, profile, margin)
    if profile == "indicator":
        return PhaseFunction(omega.grid, omega.mask.astype(float))
    d = linf_distance_to_set(omega, margin)
    s = d / (margin + 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        psi = np.where(s < 1, np.exp(1.0 - 1.0 / (1.0 - np.minimum(s, 0.999) ** 2)), 0.0)
    psi[omega.mask] = 1.0
    return PhaseFunction(omega.grid, psi)


@dataclass(frozen=True, eq=False)
class DivisionKit:
    grid: GridSpec
    omega: CellSet
    center: PhasePoint
    g: Signal
    h: Signal
    psi: PhaseFunction
    b: Operator
    c_omega: float
    min_modulus: float
    profile: str
    margin: int
    min_modulus_floor: float
    support_radius: int

    @property
    def window_operator(self) -> Operator:
        """g (x) h."""
        return rank_one(self.g, self.h)

    def to_json(self) -> dict:
        return {
            "n": self.grid.n,
            "omega": self.omega.to_json(),
            "center": [self.center.x, self.center.xi],
            "profile": self.profile,
            "margin": self.margin,
            "min_modulus_floor": self.min_modulus_floor,
            "support_radius": self.support_radius,
            "g": self.g.to_json(),
            "h": self.h.to_json(),
            "psi": self.psi.to_json(),
            "b": self.b.to_json(),
            "c_omega": self.c_omega,
            "min_modulus": self.min_modulus,
        }

    @classmethod
    def from_json(cls, data: dict) -> "DivisionKit":
        grid = GridSpec(int(data["n"]))
        return cls(
            grid=grid,
            omega=CellSet.from_json(data["omega"]),
            center=PhasePoint(*data["center"], grid.n),
            g=Signal.from_json(data["g"]),
            h=Signal.from_json(data["h"]),
            psi=PhaseFunction.from_json(data["psi"]),
            b=Operator.from_json(data["b"]),
            c_omega=float(data["c_omega"]),
            min_modulus=float(data["min_modulus"]),
            profile=data["profile"],
            margin=int(data["margin"]),
            min_modulus_floor=float(data["min_modulus_floor"]),
            support_radius=int(data["support_radius"]),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def build_division_kit(
    omega: CellSet,
    profile: str = "smooth",
    margin: int = 2,
    min_modulus_floor: float = DEFAULT_FLOOR,
) -> DivisionKit:
    grid = omega.grid
    psi = build_bump(omega, profile, margin)
    center, reach = _support_radius(omega, profile, margin)
    g = gaussian_window(grid, center)
    h = gaussian_window(grid, (0, 0))
    amb = ambiguity(g, h).values
    support = psi.values != 0
    min_modulus = float(np.abs(amb[support]).min())
    if min_modulus < min_modulus_floor:
        raise ModulusFloorError(min_modulus_floor, min_modulus)
    spread = np.zeros_like(amb)
    spread[support] = psi.values[support] / amb[support]
    b = Operator(grid, _ifw_fast(spread, grid))
    return DivisionKit(
        grid=grid,
        omega=omega,
        center=center,
        g=g,
        h=h,
        psi=psi,
        b=b,
        c_omega=schatten_norm(b, 1),
        min_modulus=min_modulus,
        profile=profile,
        margin=margin if profile == "smooth" else 0,
        min_modulus_floor=min_modulus_floor,
        support_radius=reach,
    )


def reconstruct_operator(T: Operator, kit: DivisionKit) -> Operator:
    """(T * (g (x) h)) * B; equals T when T is band-limited to omega."""
    _same_n(T.grid.n, kit.grid.n)
    return conv_fn_op(conv_op_op(T, kit.window_operator), kit.b)


def reconstruct_function(f: PhaseFunction, kit: DivisionKit) -> PhaseFunction:
    """(f * (g (x) h)) * B; equals f when f is band-limited to omega."""
    _same_n(f.grid.n, kit.grid.n)
    return conv_op_op(conv_fn_op(f, kit.window_operator), kit.b)


@dataclass(frozen=True)
class NormEquivalenceReport:
    kind: str
    p: str
    norm: float
    smoothed: float
    c_omega: float
    lower_ok: bool
    upper_ok: bool

    @property
    def holds(self) -> bool:
        return self.lower_ok and self.upper_ok

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "p": self.p,
            "norm": self.norm,
            "smoothed": self.smoothed,
            "c_omega": self.c_omega,
            "lower_ok": self.lower_ok,
            "upper_ok": self.upper_ok,
        }


def norm_equivalence_check(x, kit: DivisionKit, p, rtol: float = 1e-9) -> NormEquivalenceReport:
    """Check ||x * (g (x) h)|| <= ||x|| <= C(Omega) ||x * (g (x) h)||.

    ``x`` is an operator (Schatten norm on the left, L^p on the smoothed
    side) or a phase function (the other way round).  It is first projected
    onto omega.
    """
    window = kit.window_operator
    if isinstance(x, Operator):
        x = op_bandlimit(x, kit.omega)
        norm = schatten_norm(x, p)
        smoothed = lp_norm(conv_op_op(x, window), p)
        kind = "operator"
    elif isinstance(x, PhaseFunction):
        x = bandlimit(x, kit.omega)
        norm = lp_norm(x, p)
        smoothed = schatten_norm(conv_fn_op(x, window), p)
        kind = "function"
    else:
        raise TypeError(f"expected Operator or PhaseFunction, got {type(x).__name__}")
    scale = max(norm, smoothed, np.finfo(float).tiny)
    return NormEquivalenceReport(
        kind=kind,
        p=format_exponent(p),
        norm=norm,
        smoothed=smoothed,
        c_omega=kit.c_omega,
        lower_ok=smoothed <= norm + rtol * scale,
        upper_ok=norm <= kit.c_omega * smoothed + rtol * kit.c_omega * scale,
    )


def random_bandlimited_operator(
    kit_or_omega, rng: np.random.Generator
) -> Operator:
    omega = kit_or_omega.omega if isinstance(kit_or_omega, DivisionKit) else kit_or_omega
    return op_bandlimit(Operator.random(omega.grid, rng), omega)


def random_bandlimited_function(
    kit_or_omega, rng: np.random.Generator
) -> PhaseFunction:
    omega = kit_or_omega.omega if isinstance(kit_or_omega, DivisionKit) else kit_or_omega
    return bandlimit(PhaseFunction.random(omega.grid, rng), omega)


def relative_residual(a, b) -> float:
    """||a - b|| / ||b|| in Frobenius norm; 0 when both vanish."""
    va = a.matrix if isinstance(a, Operator) else a.values
    vb = b.matrix if isinstance(b, Operator) else b.values
    den = np.linalg.norm(vb)
    num = np.linalg.norm(va - vb)
    if den == 0:
        return float(num)
    return float(num / den)

