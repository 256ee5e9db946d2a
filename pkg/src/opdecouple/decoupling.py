"""Classical and quantum decoupling ratios, lower-bound estimation and the
instance-wise transfer between the two sides.

A family is parameterized by its Fourier coefficients: one complex number
per phase point of each cell, put through the symplectic DFT (classical
side) or the inverse Fourier-Wigner transform (quantum side).  The support
constraint therefore holds by construction.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .convolutions import conv_fn_op, conv_op_op
from .division import DivisionKit
from .exponents import as_float, format_exponent, parse_exponent
from .objects import Operator
from .operators import _fw_fast, _ifw_fast, schatten_from_singular, schatten_norm
from .phase_space import (
    CellSet,
    GridSpec,
    PhaseFunction,
    _same_n,
    complex_pairs,
    from_pairs,
    lp_array,
    lp_norm,
    sdft_array,
)

SIDES = ("classical", "quantum")
SUPPORT_TOL = 1e-10


class PartitionError(ValueError):
    """Cells overlap, are empty, or are otherwise malformed."""


@dataclass(frozen=True, eq=False)
class Partition:
    grid: GridSpec
    cells: tuple
    notes: dict = field(default_factory=dict)

    def __post_init__(self):
        cells = tuple((str(cid), cell) for cid, cell in self.cells)
        ids = [cid for cid, _ in cells]
        if len(set(ids)) != len(ids):
            raise PartitionError("duplicate cell ids")
        seen = np.zeros((self.grid.n, self.grid.n), dtype=bool)
        for cid, cell in cells:
            _same_n(self.grid.n, cell.grid.n)
            if len(cell) == 0:
                raise PartitionError(f"cell {cid!r} is empty")
            if np.any(seen & cell.mask):
                raise PartitionError(f"cell {cid!r} overlaps an earlier cell")
            seen |= cell.mask
        object.__setattr__(self, "cells", cells)

    @classmethod
    def from_cells(cls, cells: Sequence[CellSet], ids: Optional[Sequence[str]] = None, **notes):
        if not cells:
            raise PartitionError("partition has no cells")
        ids = ids or [f"c{k}" for k in range(len(cells))]
        return cls(cells[0].grid, tuple(zip(ids, cells)), dict(notes))

    @property
    def ids(self) -> list[str]:
        return [cid for cid, _ in self.cells]

    @property
    def cell_sets(self) -> list[CellSet]:
        return [c for _, c in self.cells]

    @property
    def omega(self) -> CellSet:
        mask = np.zeros((self.grid.n, self.grid.n), dtype=bool)
        for _, c in self.cells:
            mask |= c.mask
        return CellSet.from_mask(self.grid, mask)

    def __len__(self) -> int:
        return len(self.cells)

    def to_json(self) -> dict:
        out = {
            "n": self.grid.n,
            "cells": [{"id": cid, "points": [list(p) for p in c.points]} for cid, c in self.cells],
        }
        if self.notes:
            out["notes"] = self.notes
        return out

    @classmethod
    def from_json(cls, data: dict) -> "Partition":
        grid = GridSpec(int(data["n"]))
        cells = []
        for entry in data["cells"]:
            try:
                cell = CellSet(grid, tuple(tuple(p) for p in entry["points"]))
            except ValueError as exc:
                raise PartitionError(f"cell {entry.get('id')!r}: {exc}") from exc
            cells.append((entry["id"], cell))
        if not cells:
            raise PartitionError("partition has no cells")
        return cls(grid, tuple(cells), dict(data.get("notes", {})))


def _check_coefficients(partition: Partition, coeffs) -> list[np.ndarray]:
    if len(coeffs) != len(partition):
        raise ValueError(f"expected {len(partition)} coefficient blocks, got {len(coeffs)}")
    out = []
    for (cid, cell), c in zip(partition.cells, coeffs):
        c = np.asarray(c, dtype=complex).reshape(-1)
        if c.shape != (len(cell),):
            raise ValueError(f"cell {cid!r} needs {len(cell)} coefficients, got {c.size}")
        out.append(c)
    return out


def _embed(partition: Partition, coeffs: Sequence[np.ndarray]) -> np.ndarray:
    n = partition.grid.n
    out = np.zeros((len(partition), n, n), dtype=complex)
    for k, (cell, c) in enumerate(zip(partition.cell_sets, coeffs)):
        xs, xis = cell.index
        out[k, xs, xis] = c
    return out


def _off_support(spectrum: np.ndarray, cell: CellSet) -> float:
    scale = np.abs(spectrum).max()
    if scale == 0:
        return 0.0
    return float(np.abs(spectrum[~cell.mask]).max(initial=0.0) / scale)


@dataclass(frozen=True, eq=False)
class ClassicalFamily:
    partition: Partition
    functions: tuple

    def __post_init__(self):
        fs = tuple(self.functions)
        if len(fs) != len(self.partition):
            raise ValueError("one function per cell required")
        for (cid, cell), f in zip(self.partition.cells, fs):
            _same_n(cell.grid.n, f.grid.n)
            if _off_support(sdft_array(f.values), cell) > SUPPORT_TOL:
                raise ValueError(f"spectrum of the function for cell {cid!r} leaves the cell")
        object.__setattr__(self, "functions", fs)

    @classmethod
    def from_coefficients(cls, partition: Partition, coeffs) -> "ClassicalFamily":
        spectra = _embed(partition, _check_coefficients(partition, coeffs))
        fs = sdft_array(spectra)
        return cls(partition, tuple(PhaseFunction(partition.grid, f) for f in fs))

    @classmethod
    def random(cls, partition: Partition, rng: np.random.Generator) -> "ClassicalFamily":
        return cls.from_coefficients(partition, _random_coefficients(partition, rng))

    def total(self) -> PhaseFunction:
        return PhaseFunction(self.partition.grid, sum(f.values for f in self.functions))


@dataclass(frozen=True, eq=False)
class OperatorFamily:
    partition: Partition
    operators: tuple

    def __post_init__(self):
        ts = tuple(self.operators)
        if len(ts) != len(self.partition):
            raise ValueError("one operator per cell required")
        for (cid, cell), t in zip(self.partition.cells, ts):
            _same_n(cell.grid.n, t.grid.n)
            if _off_support(_fw_fast(t.matrix, t.grid), cell) > SUPPORT_TOL:
                raise ValueError(f"spreading function for cell {cid!r} leaves the cell")
        object.__setattr__(self, "operators", ts)

    @classmethod
    def from_coefficients(cls, partition: Partition, coeffs) -> "OperatorFamily":
        spreads = _embed(partition, _check_coefficients(partition, coeffs))
        ms = _ifw_fast(spreads, partition.grid)
        return cls(partition, tuple(Operator(partition.grid, m) for m in ms))

    @classmethod
    def random(cls, partition: Partition, rng: np.random.Generator) -> "OperatorFamily":
        return cls.from_coefficients(partition, _random_coefficients(partition, rng))

    def total(self) -> Operator:
        return Operator(self.partition.grid, sum(t.matrix for t in self.operators))


def _random_coefficients(partition: Partition, rng: np.random.Generator) -> list[np.ndarray]:
    out = []
    for cell in partition.cell_sets:
        m = len(cell)
        scale = math.exp(rng.normal())
        out.append(scale * (rng.standard_normal(m) + 1j * rng.standard_normal(m)))
    return out


def _lq(values: np.ndarray, q: float) -> float:
    values = np.asarray(values, dtype=float)
    if np.isinf(q):
        return float(values.max())
    m = values.max()
    if m == 0:
        return 0.0
    return float(m * np.sum((values / m) ** q) ** (1.0 / q))


def _ratio(num: float, parts: Sequence[float], q) -> float:
    den = _lq(np.array(parts), as_float(q))
    if den == 0:
        raise ValueError("family is identically zero")
    return num / den


def ratio_classical(fam: ClassicalFamily, p, q) -> float:
    """||sum f_theta||_p / (sum ||f_theta||_p^q)^{1/q}."""
    parse_exponent(q)
    return _ratio(lp_norm(fam.total(), p), [lp_norm(f, p) for f in fam.functions], q)


def ratio_quantum(fam: OperatorFamily, p, q) -> float:
    """||sum T_theta||_{S^p} / (sum ||T_theta||_{S^p}^q)^{1/q}."""
    parse_exponent(q)
    return _ratio(schatten_norm(fam.total(), p), [schatten_norm(t, p) for t in fam.operators], q)


# -- estimator -----------------------------------------------------------------


class _Objective:
    """log ratio and its gradient in the flat coefficient vector."""

    def __init__(self, partition: Partition, side: str, p: float, q: float):
        self.partition = partition
        self.grid = partition.grid
        self.side = side
        self.p = p
        self.q = q
        self.n = partition.grid.n
        self.sizes = [len(c) for c in partition.cell_sets]
        self.offsets = np.concatenate([[0], np.cumsum(self.sizes)])
        self.index = [c.index for c in partition.cell_sets]
        self.k = len(partition)

    def split(self, c: np.ndarray) -> list[np.ndarray]:
        return [c[a:b] for a, b in zip(self.offsets[:-1], self.offsets[1:])]

    def _objects(self, c: np.ndarray) -> np.ndarray:
        spectra = np.zeros((self.k + 1, self.n, self.n), dtype=complex)
        for j, ((xs, xis), blk) in enumerate(zip(self.index, self.split(c))):
            spectra[j, xs, xis] = blk
        spectra[-1] = spectra[:-1].sum(axis=0)
        if self.side == "classical":
            return sdft_array(spectra, "fourier")
        return _ifw_fast(spectra, self.grid)

    def _norms_and_grads(self, objs: np.ndarray, want_grad: bool):
        p, n = self.p, self.n
        if self.side == "classical":
            norms = lp_array(objs, p)
            if not want_grad:
                return norms, None
            mag = np.abs(objs)
            unit = np.where(mag > 0, objs / np.where(mag > 0, mag, 1.0), 0)
            if np.isinf(p):
                grads = np.zeros_like(objs)
                flat = mag.reshape(len(objs), -1).argmax(axis=1)
                for j, f in enumerate(flat):
                    grads[j].flat[f] = unit[j].flat[f]
            else:
                safe = np.where(norms > 0, norms, 1.0)[:, None, None]
                grads = (mag / safe) ** (p - 1) * unit / n
            pulled = sdft_array(grads, "fourier")
            return norms, pulled
        if not want_grad:
            s = np.linalg.svd(objs, compute_uv=False)
            return np.array([schatten_from_singular(si, p) for si in s]), None
        u, s, vh = np.linalg.svd(objs)
        norms = np.array([schatten_from_singular(si, p) for si in s])
        if np.isinf(p):
            w = np.zeros_like(s)
            w[:, 0] = 1.0
        else:
            safe = np.where(norms > 0, norms, 1.0)[:, None]
            w = (s / safe) ** (p - 1)
        grads = (u * w[:, None, :]) @ vh
        pulled = _fw_fast(grads, self.grid) / n
        return norms, pulled

    def _den(self, cell_norms: np.ndarray) -> float:
        return _lq(cell_norms, self.q)

    def value(self, c: np.ndarray) -> tuple[float, float]:
        """(ratio, denominator)."""
        norms, _ = self._norms_and_grads(self._objects(c), False)
        den = self._den(norms[:-1])
        return norms[-1] / den, den

    def value_and_grad(self, c: np.ndarray):
        norms, pulled = self._norms_and_grads(self._objects(c), True)
        cell_norms, total = norms[:-1], norms[-1]
        den = self._den(cell_norms)
        if total == 0 or den == 0:
            return -np.inf, np.zeros_like(c), den
        q = self.q
        if np.isinf(q):
            weights = np.zeros(self.k)
            weights[int(np.argmax(cell_norms))] = 1.0
        else:
            rel = cell_norms / cell_norms.max()
            weights = rel**q / np.sum(rel**q)
        grad = np.empty_like(c)
        for j, ((xs, xis), (a, b)) in enumerate(zip(self.index, zip(self.offsets[:-1], self.offsets[1:]))):
            g = pulled[-1][xs, xis] / total
            if weights[j] > 0 and cell_norms[j] > 0:
                g = g - weights[j] * pulled[j][xs, xis] / cell_norms[j]
            grad[a:b] = g
        return math.log(total / den), grad, den


@dataclass
class RestartResult:
    index: int
    best_ratio: float
    best_coeffs: np.ndarray
    trace: list
    accepted: int


def _run_restart(obj: _Objective, index: int, c0: np.ndarray, iters: int,
                 schedule: str, step: float) -> RestartResult:
    c = c0 / obj.value(c0)[1]
    val, grad, _ = obj.value_and_grad(c)
    best, best_c = val, c.copy()
    eta = step
    trace = []
    accepted = 0
    for k in range(iters):
        gnorm = np.linalg.norm(grad)
        cnorm = np.linalg.norm(c)
        if gnorm <= 1e-14 * max(cnorm, 1e-300) or not np.isfinite(val):
            trace.append(math.exp(best))
            continue
        direction = grad * (cnorm / gnorm)
        if schedule == "backtracking":
            for _ in range(40):
                trial = c + eta * direction
                v, g, d = obj.value_and_grad(trial)
                if d > 0 and v >= val:
                    c, val, grad = trial / d, v, g * d
                    eta = min(eta * 1.5, 1.0)
                    accepted += 1
                    break
                eta *= 0.5
        else:
            trial = c + (step / math.sqrt(k + 1)) * direction
            v, g, d = obj.value_and_grad(trial)
            if d > 0:
                c, val, grad = trial / d, v, g * d
                accepted += 1
        if val > best:
            best, best_c = val, c.copy()
        trace.append(math.exp(best))
    return RestartResult(index, math.exp(best), best_c, trace, accepted)


@dataclass(frozen=True, eq=False)
class DecouplingEstimate:
    side: str
    p: str
    q: str
    lower_bound: float
    partition: Partition
    certificate: tuple
    seed: int
    restarts: int
    iters: int
    schedule: str
    step: float
    trace: tuple
    restart_best: tuple
    best_restart: int

    def family(self):
        if self.side == "classical":
            return ClassicalFamily.from_coefficients(self.partition, self.certificate)
        return OperatorFamily.from_coefficients(self.partition, self.certificate)

    def reevaluate(self) -> float:
        fam = self.family()
        if self.side == "classical":
            return ratio_classical(fam, self.p, self.q)
        return ratio_quantum(fam, self.p, self.q)

    def to_json(self) -> dict:
        return {
            "side": self.side,
            "p": self.p,
            "q": self.q,
            "lower_bound": self.lower_bound,
            "seed": self.seed,
            "restarts": self.restarts,
            "iters": self.iters,
            "schedule": self.schedule,
            "step": self.step,
            "best_restart": self.best_restart,
            "restart_best": list(self.restart_best),
            "certificate": {
                "n": self.partition.grid.n,
                "cells": [
                    {"id": cid, "coefficients": complex_pairs(c)}
                    for cid, c in zip(self.partition.ids, self.certificate)
                ],
            },
            "trace": list(self.trace),
        }

    @classmethod
    def from_json(cls, data: dict, partition: Partition) -> "DecouplingEstimate":
        cert = tuple(from_pairs(c["coefficients"]) for c in data["certificate"]["cells"])
        return cls(
            side=data["side"], p=data["p"], q=data["q"],
            lower_bound=float(data["lower_bound"]), partition=partition,
            certificate=cert, seed=int(data["seed"]), restarts=int(data["restarts"]),
            iters=int(data["iters"]), schedule=data["schedule"], step=float(data["step"]),
            trace=tuple(data["trace"]), restart_best=tuple(data["restart_best"]),
            best_restart=int(data["best_restart"]),
        )


def _stream(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def estimate_decoupling(
    partition: Partition,
    side: str,
    p,
    q,
    restarts: int = 8,
    iters: int = 200,
    schedule: str = "auto",
    step: float = 0.1,
    seed: int = 0,
    threads: Optional[int] = None,
) -> DecouplingEstimate:
    """Lower bound on the decoupling constant by multi-start ascent.

    The baseline candidate is a family supported on the first cell alone
    (ratio exactly one); each restart then runs projected ascent on the log
    ratio from a random start.  Restart r draws from its own stream
    (seed, r), and the winner is the first index attaining the maximum, so
    the result does not depend on ``threads``.

    ``schedule="auto"`` uses backtracking line search when both exponents
    are strictly between 1 and inf, and diminishing subgradient steps
    otherwise.
    """
    if side not in SIDES:
        raise ValueError(f"side must be one of {SIDES}, got {side!r}")
    if len(partition) == 0:
        raise PartitionError("partition has no cells")
    pe, qe = parse_exponent(p), parse_exponent(q)
    if restarts < 0 or iters < 0 or step <= 0:
        raise ValueError("restarts and iters must be >= 0 and step > 0")
    pf, qf = as_float(pe), as_float(qe)
    if schedule == "auto":
        smooth = 1 < pf < math.inf and 1 < qf < math.inf
        schedule = "backtracking" if smooth else "diminishing"
    if schedule not in ("backtracking", "diminishing"):
        raise ValueError(f"unknown schedule {schedule!r}")

    obj = _Objective(partition, side, pf, qf)
    total = int(obj.offsets[-1])

    rng = _stream(seed, 0)
    base = np.zeros(total, dtype=complex)
    m = obj.sizes[0]
    base[:m] = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    base_ratio, _ = obj.value(base)

    def run(r: int) -> RestartResult:
        rr = _stream(seed, 1, r)
        c0 = rr.standard_normal(total) + 1j * rr.standard_normal(total)
        return _run_restart(obj, r, c0, iters, schedule, step)

    if threads is not None and threads > 1 and restarts > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, range(restarts)))
    else:
        results = [run(r) for r in range(restarts)]

    best_ratio, best_c, best_idx = base_ratio, base, -1
    for res in results:
        if res.best_ratio > best_ratio:
            best_ratio, best_c, best_idx = res.best_ratio, res.best_coeffs, res.index

    trace = []
    for k in range(iters):
        trace.append(max([base_ratio] + [res.trace[k] for res in results]))

    est = DecouplingEstimate(
        side=side,
        p=format_exponent(pe),
        q=format_exponent(qe),
        lower_bound=float("nan"),
        partition=partition,
        certificate=tuple(np.array(b) for b in obj.split(best_c)),
        seed=seed,
        restarts=restarts,
        iters=iters,
        schedule=schedule,
        step=step,
        trace=tuple(float(t) for t in trace),
        restart_best=tuple(float(r.best_ratio) for r in results),
        best_restart=best_idx,
    )
    # report the value the certificate reproduces through the public path
    return replace(est, lower_bound=est.reevaluate())


# -- transfer between the two sides -------------------------------------------


def _check_kit(partition: Partition, kit: DivisionKit) -> None:
    _same_n(partition.grid.n, kit.grid.n)
    if not partition.omega.issubset(kit.omega):
        raise ValueError("the kit's region does not contain the partition's region")


def lift_family(fam: ClassicalFamily, kit: DivisionKit) -> OperatorFamily:
    """T_theta = f_theta * (g (x) h)."""
    _check_kit(fam.partition, kit)
    w = kit.window_operator
    ops = tuple(conv_fn_op(f, w, method="fourier") for f in fam.functions)
    return OperatorFamily(fam.partition, ops)


def lower_family(fam: OperatorFamily, kit: DivisionKit) -> ClassicalFamily:
    """F_theta = T_theta * (g (x) h)."""
    _check_kit(fam.partition, kit)
    w = kit.window_operator
    fns = tuple(conv_op_op(t, w, method="fourier") for t in fam.operators)
    return ClassicalFamily(fam.partition, fns)


@dataclass
class ChainSide:
    trials: int = 0
    violations: int = 0
    transfer_min_slack: float = math.inf
    contraction_min_slack: float = math.inf
    ratio_min_slack: float = math.inf
    ratio_max_slack: float = -math.inf

    def record(self, transfer: float, contraction: float, ratio: float, tol: float) -> None:
        self.trials += 1
        if min(transfer, contraction, ratio) < -tol:
            self.violations += 1
        self.transfer_min_slack = min(self.transfer_min_slack, transfer)
        self.contraction_min_slack = min(self.contraction_min_slack, contraction)
        self.ratio_min_slack = min(self.ratio_min_slack, ratio)
        self.ratio_max_slack = max(self.ratio_max_slack, ratio)

    def to_json(self) -> dict:
        return dict(self.__dict__)


@dataclass
class ChainReport:
    p: str
    q: str
    trials: int
    seed: int
    c_omega: float
    tol: float
    classical: ChainSide
    quantum: ChainSide

    @property
    def violations(self) -> int:
        return self.classical.violations + self.quantum.violations

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "q": self.q,
            "trials": self.trials,
            "seed": self.seed,
            "c_omega": self.c_omega,
            "tol": self.tol,
            "violations": self.violations,
            "classical_to_quantum": self.classical.to_json(),
            "quantum_to_classical": self.quantum.to_json(),
        }


def _slack(lhs: float, rhs: float) -> float:
    scale = max(abs(rhs), abs(lhs), np.finfo(float).tiny)
    return (rhs - lhs) / scale


def equivalence_chain_check(
    partition: Partition,
    kit: DivisionKit,
    p,
    q,
    trials: int = 20,
    seed: int = 0,
    tol: float = 1e-8,
) -> ChainReport:
    """Check both transfer chains on random families.

    Classical to quantum: ||sum f|| <= C ||sum lift(f)||, each lifted piece
    contracts, hence ratio_classical <= C ratio_quantum(lift).  The quantum
    to classical direction is the mirror image through ``lower_family``.
    Slacks are relative; a violation is a slack below ``-tol``.
    """
    _check_kit(partition, kit)
    pe, qe = parse_exponent(p), parse_exponent(q)
    c = kit.c_omega
    cl, qu = ChainSide(), ChainSide()
    for t in range(trials):
        fam = ClassicalFamily.random(partition, _stream(seed, 2, t))
        lifted = lift_family(fam, kit)
        transfer = _slack(lp_norm(fam.total(), pe), c * schatten_norm(lifted.total(), pe))
        contraction = min(
            _slack(schatten_norm(T, pe), lp_norm(f, pe))
            for f, T in zip(fam.functions, lifted.operators)
        )
        ratio = _slack(ratio_classical(fam, pe, qe), c * ratio_quantum(lifted, pe, qe))
        cl.record(transfer, contraction, ratio, tol)

        ofam = OperatorFamily.random(partition, _stream(seed, 3, t))
        lowered = lower_family(ofam, kit)
        transfer = _slack(schatten_norm(ofam.total(), pe), c * lp_norm(lowered.total(), pe))
        contraction = min(
            _slack(lp_norm(F, pe), schatten_norm(T, pe))
            for T, F in zip(ofam.operators, lowered.functions)
        )
        ratio = _slack(ratio_quantum(ofam, pe, qe), c * ratio_classical(lowered, pe, qe))
        qu.record(transfer, contraction, ratio, tol)
    return ChainReport(
        p=format_exponent(pe), q=format_exponent(qe), trials=trials, seed=seed,
        c_omega=c, tol=tol, classical=cl, quantum=qu,
    )


# -- parabola caps --------------------------------------------------------------


def parabola_partition(grid: GridSpec, delta: float, thickness_cells: int = 1) -> Partition:
    """Caps of a discretized parabola neighbourhood.

    The parameter s in [-1, 1] runs along the xi axis (column j = s * scale,
    scale = n // 4) and the height s^2 along the x axis (row round(scale s^2)).
    Caps are the columns whose s falls in consecutive intervals of length
    sqrt(delta); each column is thickened to the rows within
    max(thickness_cells, ceil(delta * scale)) - 1 of the curve.  delta = 1
    is the degenerate one-cap case.
    """
    if not 0 < delta <= 1:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    if thickness_cells < 1:
        raise ValueError("thickness_cells must be >= 1")
    n = grid.n
    scale = n // 4
    if scale < 1:
        raise PartitionError(f"grid n={n} too small for a parabola")
    width = math.sqrt(delta)
    if delta < 1 and width * scale < 1:
        raise PartitionError(
            f"delta={delta} too small for n={n}: caps would be {width * scale:.2f} columns wide"
        )
    ncaps = 1 if delta == 1 else math.ceil(2 / width - 1e-12)
    thick = max(thickness_cells, math.ceil(delta * scale - 1e-12))
    if scale + 2 * (thick - 1) + 1 > n:
        raise PartitionError("parabola neighbourhood wraps around the torus")

    masks = [np.zeros((n, n), dtype=bool) for _ in range(ncaps)]
    owner = np.full((n, n), -1, dtype=int)
    reassigned = 0
    for j in range(-scale, scale + 1):
        s = j / scale
        cap = 0 if ncaps == 1 else min(int(math.floor((s + 1) / width + 1e-12)), ncaps - 1)
        row = round(scale * s * s)
        for k in range(-(thick - 1), thick):
            x, xi = (row + k) % n, j % n
            if owner[x, xi] >= 0:
                reassigned += owner[x, xi] != cap
                continue
            owner[x, xi] = cap
            masks[cap][x, xi] = True
    cells = [CellSet.from_mask(grid, m) for m in masks]
    empty = [k for k, c in enumerate(cells) if len(c) == 0]
    if empty:
        raise PartitionError(f"delta={delta} leaves caps {empty} empty at n={n}")
    return Partition.from_cells(
        cells,
        [f"cap{k}" for k in range(ncaps)],
        delta=delta,
        scale=scale,
        thickness=thick,
        cover_resolution="overlapping cover points assigned to the lowest-indexed cap",
        reassigned_points=int(reassigned),
    )


def dumps(obj) -> str:
    return json.dumps(obj.to_json(), sort_keys=True)
