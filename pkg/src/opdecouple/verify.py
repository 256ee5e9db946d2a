"""Identity and inequality suite for the finite model.

Every check draws fresh random inputs per trial and returns a relative
error (identities) or a relative violation (inequalities, zero when the
bound holds).  Convolutions are checked against entrywise oracles that use
(rho(z) A rho(z)^*)[a, b] = omega^{xi (a - b)} A[a - x, b - x] and an
explicit root-of-unity matrix, so they share no code with the FFT paths.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .convolutions import conv_fn_fn, conv_fn_op, conv_op_op, werner_young_margin
from .decoupling import ClassicalFamily, OperatorFamily, Partition, ratio_classical, ratio_quantum
from .division import (
    build_division_kit,
    random_bandlimited_function,
    random_bandlimited_operator,
    reconstruct_function,
    reconstruct_operator,
    relative_residual,
)
from .exponents import INF, conjugate
from .objects import Operator, Signal
from .operators import (
    fourier_wigner,
    inverse_fourier_wigner,
    inverse_weyl_symbol,
    op_bandlimit,
    rank_one,
    schatten_norm,
    weyl_symbol,
)
from .phase_space import CellSet, GridSpec, PhaseFunction, bandlimit, lp_norm, symplectic_dft
from .weyl_rep import ambiguity, conjugate as alpha, parity, shift_matrix, shift_phase

TOL = 1e-10
_TINY = np.finfo(float).tiny


def rel_err(a, b) -> float:
    a = np.asarray(a)
    b = np.asarray(b)
    return float(np.abs(a - b).max() / max(np.abs(b).max(), _TINY))


def violation(lhs: float, rhs: float) -> float:
    """Relative amount by which lhs <= rhs fails; 0 when it holds."""
    return max(0.0, (lhs - rhs) / max(abs(rhs), _TINY))


def _signal(grid: GridSpec, rng: np.random.Generator) -> Signal:
    return Signal.random(grid, rng)


def _rand_point(grid: GridSpec, rng: np.random.Generator):
    return grid.point(*map(int, rng.integers(0, grid.n, size=2)))


def _roots_matrix(n: int) -> np.ndarray:
    k = np.arange(n)
    return np.exp(2j * np.pi * np.outer(k, k) / n)


def oracle_fn_op(f: PhaseFunction, S: Operator) -> np.ndarray:
    """(1/n) sum_z f(z) rho(z) S rho(z)^*, entry by entry."""
    n = f.grid.n
    w = f.values @ _roots_matrix(n)  # w[x, d] = sum_xi f(x, xi) omega^{xi d}
    a = np.arange(n)
    diff = (a[:, None] - a[None, :]) % n
    out = np.zeros((n, n), dtype=complex)
    for x in range(n):
        out += w[x][diff] * np.roll(S.matrix, (x, x), axis=(0, 1))
    return out / n


def oracle_op_op(T: Operator, S: Operator) -> np.ndarray:
    """z -> tr(T rho(z) P S P rho(z)^*), entry by entry."""
    n = T.grid.n
    idx = (-np.arange(n)) % n
    pspp = S.matrix[np.ix_(idx, idx)]
    a = np.arange(n)
    diff = (a[:, None] - a[None, :]) % n
    diag = np.zeros((n, n), dtype=complex)  # diag[x, d] = sum_{a - b = d} T[b, a] A[a - x, b - x]
    for x in range(n):
        k = T.matrix.T * np.roll(pspp, (x, x), axis=(0, 1))
        diag[x] = np.bincount(diff.ravel(), weights=k.real.ravel(), minlength=n) + 1j * np.bincount(
            diff.ravel(), weights=k.imag.ravel(), minlength=n
        )
    return diag @ _roots_matrix(n)


# -- individual checks -----------------------------------------------------------
# Each takes (grid, rng) and returns the error for one trial.


def _involution(grid, rng):
    f = PhaseFunction.random(grid, rng)
    return rel_err(symplectic_dft(symplectic_dft(f)).values, f.values)


def _plancherel(grid, rng):
    f, g = PhaseFunction.random(grid, rng), PhaseFunction.random(grid, rng)
    return rel_err(symplectic_dft(f).inner(symplectic_dft(g)), f.inner(g))


def _unitarity(grid, rng):
    r = shift_matrix(grid, *_rand_point(grid, rng).as_tuple())
    return rel_err(r @ r.conj().T, np.eye(grid.n))


def _composition(grid, rng):
    z, w = _rand_point(grid, rng), _rand_point(grid, rng)
    lhs = shift_matrix(grid, z.x, z.xi) @ shift_matrix(grid, w.x, w.xi)
    s = z + w
    return rel_err(lhs, shift_phase(grid, z, w) * shift_matrix(grid, s.x, s.xi))


def _covariance(grid, rng):
    f, g = _signal(grid, rng), _signal(grid, rng)
    zeta = _rand_point(grid, rng)
    moved = Signal(grid, shift_matrix(grid, zeta.x, zeta.xi) @ f.values)
    lhs = ambiguity(moved, g).values
    x, xi = np.meshgrid(np.arange(grid.n), np.arange(grid.n), indexing="ij")
    sigma = (x * zeta.xi - zeta.x * xi) % grid.n
    phase = grid.roots[(grid.half_inv * sigma) % grid.n]
    shifted = np.roll(ambiguity(f, g).values, (zeta.x, zeta.xi), axis=(0, 1))
    return rel_err(lhs, phase * shifted)


def _moyal(grid, rng):
    f1, g1, f2, g2 = (_signal(grid, rng) for _ in range(4))
    lhs = ambiguity(f1, g1).inner(ambiguity(f2, g2))
    return rel_err(lhs, f1.inner(f2) * np.conj(g1.inner(g2)))


def _pool(grid, rng):
    T, S = Operator.random(grid, rng), Operator.random(grid, rng)
    lhs = fourier_wigner(T).inner(fourier_wigner(S))
    return rel_err(lhs, np.trace(T.matrix @ S.matrix.conj().T))


def _fw_round_trip(grid, rng):
    T = Operator.random(grid, rng)
    F = PhaseFunction.random(grid, rng)
    return max(
        rel_err(inverse_fourier_wigner(fourier_wigner(T)).matrix, T.matrix),
        rel_err(fourier_wigner(inverse_fourier_wigner(F)).values, F.values),
    )


def _weyl_round_trip(grid, rng):
    T = Operator.random(grid, rng)
    return rel_err(inverse_weyl_symbol(weyl_symbol(T)).matrix, T.matrix)


def _rank_one_spreading(grid, rng):
    g, h = _signal(grid, rng), _signal(grid, rng)
    return rel_err(fourier_wigner(rank_one(g, h)).values, ambiguity(g, h).values)


def _conv_op_op_identity(grid, rng):
    T, S = Operator.random(grid, rng), Operator.random(grid, rng)
    lhs = symplectic_dft(PhaseFunction(grid, oracle_op_op(T, S))).values
    return rel_err(lhs, fourier_wigner(T).values * fourier_wigner(S).values)


def _conv_fn_op_identity(grid, rng):
    f, S = PhaseFunction.random(grid, rng), Operator.random(grid, rng)
    lhs = fourier_wigner(Operator(grid, oracle_fn_op(f, S))).values
    return rel_err(lhs, symplectic_dft(f).values * fourier_wigner(S).values)


def _conv_fn_fn_identity(grid, rng):
    f, g = PhaseFunction.random(grid, rng), PhaseFunction.random(grid, rng)
    lhs = symplectic_dft(conv_fn_fn(f, g, method="direct")).values
    return rel_err(lhs, symplectic_dft(f).values * symplectic_dft(g).values)


def _conv_op_fn_identity(grid, rng):
    # S * tau with the operator as the left argument; same weak integral
    S, tau = Operator.random(grid, rng), PhaseFunction.random(grid, rng)
    lhs = fourier_wigner(Operator(grid, oracle_fn_op(tau, S))).values
    return rel_err(lhs, fourier_wigner(S).values * symplectic_dft(tau).values)


def _fast_conv_matches_oracle(grid, rng):
    f = PhaseFunction.random(grid, rng)
    T, S = Operator.random(grid, rng), Operator.random(grid, rng)
    return max(
        rel_err(conv_fn_op(f, S, method="fourier").matrix, oracle_fn_op(f, S)),
        rel_err(conv_op_op(T, S, method="fourier").values, oracle_op_op(T, S)),
    )


def _commutativity(grid, rng):
    T, S = Operator.random(grid, rng), Operator.random(grid, rng)
    return rel_err(conv_op_op(T, S).values, conv_op_op(S, T).values)


def _parity(grid, rng):
    P = parity(grid).matrix
    z = _rand_point(grid, rng)
    r = shift_matrix(grid, z.x, z.xi)
    mz = -z
    return max(rel_err(P @ P, np.eye(grid.n)), rel_err(P @ r @ P, shift_matrix(grid, mz.x, mz.xi)))


def _alpha_group(grid, rng):
    T = Operator.random(grid, rng)
    z, w = _rand_point(grid, rng), _rand_point(grid, rng)
    return rel_err(alpha(alpha(T, w), z).matrix, alpha(T, z + w).matrix)


def _bandlimit_projection(grid, rng):
    cell = CellSet.from_mask(grid, rng.random((grid.n, grid.n)) < 0.5)
    rest = CellSet.from_mask(grid, ~cell.mask)
    T = Operator.random(grid, rng)
    f = PhaseFunction.random(grid, rng)
    a, b = op_bandlimit(T, cell), op_bandlimit(T, rest)
    fa, fb = bandlimit(f, cell), bandlimit(f, rest)
    scale = np.linalg.norm(T.matrix) ** 2
    return max(
        rel_err(op_bandlimit(a, cell).matrix, a.matrix),
        rel_err((a + b).matrix, T.matrix),
        abs(np.trace(a.matrix @ b.matrix.conj().T)) / scale,
        rel_err(bandlimit(fa, cell).values, fa.values),
        abs(fa.inner(fb)) / f.inner(f).real,
    )


_HY_EXPONENTS = (Fraction(1), Fraction(4, 3), Fraction(3, 2), Fraction(2))
_WY_EXPONENTS = (Fraction(1), Fraction(4, 3), Fraction(2), Fraction(3), INF)


def _hausdorff_young(grid, rng):
    T = Operator.random(grid, rng)
    F = fourier_wigner(T)
    return max(violation(lp_norm(F, conjugate(p)), schatten_norm(T, p)) for p in _HY_EXPONENTS)


def _werner_young(grid, rng):
    worst = 0.0
    for p in _WY_EXPONENTS:
        for q in _WY_EXPONENTS:
            try:
                rep = werner_young_margin("fn_op", PhaseFunction.random(grid, rng), Operator.random(grid, rng), p, q)
            except ValueError:
                continue
            worst = max(worst, violation(rep.lhs, rep.rhs))
            rep = werner_young_margin("op_op", Operator.random(grid, rng), Operator.random(grid, rng), p, q)
            worst = max(worst, violation(rep.lhs, rep.rhs))
    return worst


def _trace_class_equality(grid, rng):
    a, b = Operator.random(grid, rng), Operator.random(grid, rng)
    T = Operator(grid, a.matrix @ a.matrix.conj().T)
    S = Operator(grid, b.matrix @ b.matrix.conj().T)
    rep = werner_young_margin("op_op", T, S, 1, 1)
    return abs(rep.margin) / rep.rhs


def _schatten_monotone(grid, rng):
    T = Operator.random(grid, rng)
    ps = (1, Fraction(4, 3), 2, 3, INF)
    norms = [schatten_norm(T, p) for p in ps]
    return max(violation(b, a) for a, b in zip(norms, norms[1:]))


def _duality(grid, rng):
    T, S = Operator.random(grid, rng), Operator.random(grid, rng)
    lhs = abs(np.trace(T.matrix @ S.matrix.conj().T))
    return max(violation(lhs, schatten_norm(T, p) * schatten_norm(S, conjugate(p))) for p in (1, Fraction(3, 2), 2, 3))


def _two_cell(grid):
    mask = np.zeros((grid.n, grid.n), dtype=bool)
    mask[: grid.n // 2] = True
    return Partition.from_cells([CellSet.from_mask(grid, mask), CellSet.from_mask(grid, ~mask)], ["a", "b"])


def _decoupling_exact(grid, rng):
    part = _two_cell(grid)
    cf = ClassicalFamily.random(part, rng)
    of = OperatorFamily.random(part, rng)
    errs = [abs(ratio_classical(cf, 2, 2) - 1), abs(ratio_quantum(of, 2, 2) - 1)]
    for p in (1, 2, 3, INF):
        errs.append(violation(ratio_classical(cf, p, 1), 1.0))
        errs.append(violation(ratio_quantum(of, p, 1), 1.0))
    return max(errs)


_KITS: dict = {}


def _kit(grid):
    if grid.n not in _KITS:
        radius = min(3, (grid.n - 7) // 2)
        _KITS[grid.n] = build_division_kit(CellSet.disk(grid, (0, 0), radius), "smooth", 2)
    return _KITS[grid.n]


def _division(grid, rng):
    if grid.n < 9:
        return 0.0
    kit = _kit(grid)
    T = random_bandlimited_operator(kit, rng)
    f = random_bandlimited_function(kit, rng)
    return max(
        relative_residual(reconstruct_operator(T, kit), T),
        relative_residual(reconstruct_function(f, kit), f),
    )


@dataclass(frozen=True)
class Check:
    name: str
    anchor: str
    run: Callable[[GridSpec, np.random.Generator], float]


CHECKS: tuple[Check, ...] = (
    Check("sdft_involution", "F_sigma F_sigma f = f", _involution),
    Check("plancherel", "<F_sigma f, F_sigma g> = <f, g>", _plancherel),
    Check("shift_unitarity", "rho(z) rho(z)^* = I", _unitarity),
    Check("shift_composition", "rho(z) rho(w) = omega^{h sigma(z,w)} rho(z+w)", _composition),
    Check("ambiguity_covariance", "A(rho(zeta) f, g)(z) = omega^{h sigma(zeta,z)} A(f,g)(z - zeta)", _covariance),
    Check("moyal", "<A(f1,g1), A(f2,g2)> = <f1,f2> conj<g1,g2>", _moyal),
    Check("pool_unitarity", "<F_W T, F_W S> = tr(T S^*)", _pool),
    Check("fourier_wigner_round_trip", "F_W^-1 F_W T = T and F_W F_W^-1 F = F", _fw_round_trip),
    Check("weyl_symbol_round_trip", "op(a_T) = T", _weyl_round_trip),
    Check("rank_one_spreading", "F_W(g (x) h) = A(g, h)", _rank_one_spreading),
    Check("conv_op_op_fourier", "F_sigma(S * A) = F_W(S) F_W(A)", _conv_op_op_identity),
    Check("conv_fn_op_fourier", "F_W(psi * A) = F_sigma(psi) F_W(A)", _conv_fn_op_identity),
    Check("conv_fn_fn_fourier", "F_sigma(psi * tau) = F_sigma(psi) F_sigma(tau)", _conv_fn_fn_identity),
    Check("conv_op_fn_fourier", "F_W(S * tau) = F_W(S) F_sigma(tau)", _conv_op_fn_identity),
    Check("fast_convolutions", "Fourier-side convolutions equal entrywise sums", _fast_conv_matches_oracle),
    Check("conv_commutativity", "T * S = S * T", _commutativity),
    Check("parity", "P^2 = I, P rho(z) P = rho(-z)", _parity),
    Check("conjugation_group", "alpha_z alpha_w = alpha_{z+w}", _alpha_group),
    Check("bandlimit_projection", "band-limiting is an orthogonal projection", _bandlimit_projection),
    Check("hausdorff_young", "||F_W T||_{p'} <= ||T||_{S^p}, 1 <= p <= 2", _hausdorff_young),
    Check("werner_young", "||f * S||_{S^r} <= ||f||_p ||S||_{S^q}, ||T * S||_r <= ||T||_{S^p} ||S||_{S^q}", _werner_young),
    Check("werner_young_trace_class_equality", "||T * S||_1 = tr T tr S for T, S >= 0", _trace_class_equality),
    Check("schatten_monotonicity", "||T||_{S^q} <= ||T||_{S^p} for q > p", _schatten_monotone),
    Check("schatten_duality", "|tr(T S^*)| <= ||T||_{S^p} ||S||_{S^p'}", _duality),
    Check("decoupling_exact_cases", "ratio = 1 at p=q=2, ratio <= 1 at q=1", _decoupling_exact),
    Check("division_reconstruction", "(T * (g (x) h)) * B = T on Omega-band-limited T", _division),
)


def run_suite(n: int, seed: int = 0, trials: int = 20, tol: float = TOL) -> dict:
    grid = GridSpec(n)
    entries = []
    for i, check in enumerate(CHECKS):
        worst = 0.0
        for t in range(trials):
            rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(i, t)))
            worst = max(worst, float(check.run(grid, rng)))
        entries.append(
            {"name": check.name, "anchor": check.anchor, "max_err": worst, "tol": tol, "pass": bool(worst <= tol)}
        )
    return {
        "n": n,
        "seed": seed,
        "trials": trials,
        "identities": entries,
        "all_pass": all(e["pass"] for e in entries),
    }
