import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import seeds
from opdecouple.decoupling import (
    ClassicalFamily,
    DecouplingEstimate,
    OperatorFamily,
    Partition,
    PartitionError,
    equivalence_chain_check,
    estimate_decoupling,
    lift_family,
    lower_family,
    parabola_partition,
    ratio_classical,
    ratio_quantum,
)
from opdecouple.division import build_division_kit
from opdecouple.objects import Operator
from opdecouple.operators import fourier_wigner, schatten_norm
from opdecouple.phase_space import CellSet, GridSpec, PhaseFunction, lp_norm, sdft_array

EXPONENTS = [1, 2, 3, math.inf]


def two_cells(n=5, split=3):
    g = GridSpec(n)
    mask = np.zeros((n, n), dtype=bool)
    mask[:split] = True
    return Partition.from_cells([CellSet.from_mask(g, mask), CellSet.from_mask(g, ~mask)])


def quadrants(n=31, side=3):
    g = GridSpec(n)
    cells = [CellSet.rect(g, x, xi, side, side) for x, xi in [(0, 0), (0, side), (side, 0), (side, side)]]
    return Partition.from_cells(cells)


@pytest.fixture(scope="module")
def quad_kit():
    part = quadrants()
    return part, build_division_kit(part.omega, "smooth", 2)


# -- partitions -------------------------------------------------------------------


def test_partition_validation():
    g = GridSpec(5)
    a = CellSet.rect(g, 0, 0, 2, 2)
    with pytest.raises(PartitionError, match="overlaps"):
        Partition.from_cells([a, CellSet.rect(g, 1, 1, 2, 2)])
    with pytest.raises(PartitionError, match="empty"):
        Partition.from_cells([a, CellSet.empty(g)])
    with pytest.raises(PartitionError, match="duplicate"):
        Partition.from_cells([a, CellSet.rect(g, 3, 3, 1, 1)], ["x", "x"])
    with pytest.raises(PartitionError):
        Partition.from_cells([])


def test_partition_omega_and_json():
    part = two_cells()
    assert len(part) == 2 and part.ids == ["c0", "c1"]
    assert len(part.omega) == 25
    back = Partition.from_json(json.loads(json.dumps(part.to_json())))
    assert back.ids == part.ids
    assert all(a.points == b.points for a, b in zip(back.cell_sets, part.cell_sets))


def test_partition_from_json_rejects_bad_points():
    with pytest.raises(PartitionError):
        Partition.from_json({"n": 5, "cells": [{"id": "a", "points": [[9, 0]]}]})
    with pytest.raises(PartitionError):
        Partition.from_json({"n": 5, "cells": []})


# -- families and ratios ----------------------------------------------------------


def test_family_supports(rng):
    part = quadrants(15, 2)
    fam = ClassicalFamily.random(part, rng)
    ofam = OperatorFamily.random(part, rng)
    for cell, f, T in zip(part.cell_sets, fam.functions, ofam.operators):
        spec = sdft_array(f.values)
        assert np.abs(spec[~cell.mask]).max() <= 1e-10 * np.abs(spec).max()
        spread = fourier_wigner(T).values
        assert np.abs(spread[~cell.mask]).max() <= 1e-10 * np.abs(spread).max()


def test_family_rejects_unsupported(rng):
    part = quadrants(15, 2)
    g = part.grid
    with pytest.raises(ValueError, match="leaves"):
        ClassicalFamily(part, tuple(PhaseFunction.random(g, rng) for _ in range(4)))
    with pytest.raises(ValueError, match="leaves"):
        OperatorFamily(part, tuple(Operator.random(g, rng) for _ in range(4)))
    with pytest.raises(ValueError):
        ClassicalFamily.from_coefficients(part, [np.ones(4)] * 3)


@pytest.mark.parametrize("p", EXPONENTS)
def test_single_nonzero_cell_ratio_is_one(p, rng):
    part = two_cells()
    coeffs = [rng.standard_normal(15) + 1j * rng.standard_normal(15), np.zeros(10)]
    assert ratio_classical(ClassicalFamily.from_coefficients(part, coeffs), p, 2) == pytest.approx(1, abs=1e-12)
    assert ratio_quantum(OperatorFamily.from_coefficients(part, coeffs), p, 2) == pytest.approx(1, abs=1e-12)


def test_zero_family_rejected():
    part = two_cells()
    zero = [np.zeros(15), np.zeros(10)]
    with pytest.raises(ValueError, match="zero"):
        ratio_classical(ClassicalFamily.from_coefficients(part, zero), 2, 2)
    with pytest.raises(ValueError, match="zero"):
        ratio_quantum(OperatorFamily.from_coefficients(part, zero), 2, 2)


@given(seeds, st.sampled_from(EXPONENTS))
def test_ratio_exact_cases(seed, p):
    rng = np.random.default_rng(seed)
    part = quadrants(15, 2)
    fam = ClassicalFamily.random(part, rng)
    ofam = OperatorFamily.random(part, rng)
    assert ratio_classical(fam, p, 1) <= 1 + 1e-12
    assert ratio_quantum(ofam, p, 1) <= 1 + 1e-12
    assert abs(ratio_classical(fam, 2, 2) - 1) <= 1e-10
    assert abs(ratio_quantum(ofam, 2, 2) - 1) <= 1e-10


@given(seeds)
def test_ratio_monotone_in_q(seed):
    rng = np.random.default_rng(seed)
    part = quadrants(15, 2)
    fam = ClassicalFamily.random(part, rng)
    ofam = OperatorFamily.random(part, rng)
    qs = [1, Fraction(4, 3), 2, 3, math.inf]
    for p in (1, 3):
        c = [ratio_classical(fam, p, q) for q in qs]
        o = [ratio_quantum(ofam, p, q) for q in qs]
        assert all(b >= a * (1 - 1e-12) for a, b in zip(c, c[1:]))
        assert all(b >= a * (1 - 1e-12) for a, b in zip(o, o[1:]))


# -- estimator --------------------------------------------------------------------


@pytest.mark.parametrize("side", ["classical", "quantum"])
def test_estimator_exact_values(side):
    part = quadrants(15, 2)
    est = estimate_decoupling(part, side, 2, 2, restarts=3, iters=20, seed=1)
    assert abs(est.lower_bound - 1) <= 1e-9
    for p in EXPONENTS:
        est = estimate_decoupling(part, side, p, 1, restarts=3, iters=20, seed=1)
        assert abs(est.lower_bound - 1) <= 1e-6


@pytest.mark.parametrize("side", ["classical", "quantum"])
def test_estimate_invariants(side):
    part = two_cells()
    est = estimate_decoupling(part, side, 4, 2, restarts=4, iters=30, seed=3)
    assert est.lower_bound >= 1 - 1e-9
    assert abs(est.reevaluate() - est.lower_bound) <= 1e-9
    assert all(b >= a for a, b in zip(est.trace, est.trace[1:]))
    assert len(est.trace) == 30 and len(est.restart_best) == 4
    assert est.trace[-1] == pytest.approx(est.lower_bound, rel=1e-9)


def test_estimate_deterministic_across_threads():
    part = quadrants(15, 2)
    a = estimate_decoupling(part, "quantum", 3, 2, restarts=4, iters=15, seed=9, threads=1)
    b = estimate_decoupling(part, "quantum", 3, 2, restarts=4, iters=15, seed=9, threads=4)
    assert json.dumps(a.to_json(), sort_keys=True) == json.dumps(b.to_json(), sort_keys=True)
    c = estimate_decoupling(part, "quantum", 3, 2, restarts=4, iters=15, seed=10)
    assert c.to_json() != a.to_json()


def test_estimate_json_round_trip():
    part = two_cells()
    est = estimate_decoupling(part, "classical", 3, 2, restarts=2, iters=5, seed=0)
    back = DecouplingEstimate.from_json(json.loads(json.dumps(est.to_json())), part)
    assert back.reevaluate() == pytest.approx(est.lower_bound, abs=1e-12)
    assert back.to_json() == est.to_json()


@pytest.mark.parametrize("schedule", ["backtracking", "diminishing"])
def test_estimate_schedules_improve_on_baseline(schedule):
    part = two_cells()
    est = estimate_decoupling(part, "classical", 4, 2, restarts=4, iters=40, seed=0, schedule=schedule)
    assert est.lower_bound > 1.05 and est.schedule == schedule


def test_estimate_auto_schedule():
    part = two_cells()
    assert estimate_decoupling(part, "classical", 4, 2, restarts=1, iters=2).schedule == "backtracking"
    assert estimate_decoupling(part, "classical", math.inf, 2, restarts=1, iters=2).schedule == "diminishing"


def test_estimate_rejects_bad_options():
    part = two_cells()
    with pytest.raises(ValueError):
        estimate_decoupling(part, "both", 2, 2)
    with pytest.raises(ValueError):
        estimate_decoupling(part, "classical", "1/2", 2)
    with pytest.raises(ValueError):
        estimate_decoupling(part, "classical", 2, 2, restarts=-1)
    with pytest.raises(ValueError):
        estimate_decoupling(part, "classical", 2, 2, schedule="newton")


def test_zero_restarts_returns_baseline():
    est = estimate_decoupling(two_cells(), "quantum", 3, 2, restarts=0, iters=3)
    assert est.best_restart == -1 and est.lower_bound == pytest.approx(1, abs=1e-12)


# -- lift / lower -----------------------------------------------------------------


def test_lift_and_lower_of_zero(quad_kit):
    part, kit = quad_kit
    zeros = [np.zeros(len(c)) for c in part.cell_sets]
    lifted = lift_family(ClassicalFamily.from_coefficients(part, zeros), kit)
    lowered = lower_family(OperatorFamily.from_coefficients(part, zeros), kit)
    assert all(np.abs(T.matrix).max() == 0 for T in lifted.operators)
    assert all(np.abs(F.values).max() == 0 for F in lowered.functions)


@pytest.mark.parametrize("p", EXPONENTS)
def test_lift_and_lower_contract(quad_kit, p):
    part, kit = quad_kit
    rng = np.random.default_rng(4)
    fam = ClassicalFamily.random(part, rng)
    for f, T in zip(fam.functions, lift_family(fam, kit).operators):
        assert schatten_norm(T, p) <= lp_norm(f, p) * (1 + 1e-10)
    ofam = OperatorFamily.random(part, rng)
    for T, F in zip(ofam.operators, lower_family(ofam, kit).functions):
        assert lp_norm(F, p) <= schatten_norm(T, p) * (1 + 1e-10)


def test_lift_rejects_mismatched_kit(quad_kit):
    part, _ = quad_kit
    small = build_division_kit(CellSet.rect(part.grid, 0, 0, 2, 2), "smooth", 2)
    fam = ClassicalFamily.random(part, np.random.default_rng(0))
    with pytest.raises(ValueError, match="region"):
        lift_family(fam, small)


# -- chain check ------------------------------------------------------------------


@pytest.mark.parametrize("p", [1, 2, 3, math.inf])
def test_chain_check_no_violations(quad_kit, p):
    part, kit = quad_kit
    rep = equivalence_chain_check(part, kit, p, 2, trials=5, seed=1)
    assert rep.ok and rep.classical.trials == 5 and rep.quantum.trials == 5
    d = rep.to_json()
    assert d["violations"] == 0 and d["p"] == ("inf" if p == math.inf else str(p))


def test_chain_check_two_two_slack(quad_kit):
    part, kit = quad_kit
    rep = equivalence_chain_check(part, kit, 2, 2, trials=3)
    expect = (kit.c_omega - 1) / kit.c_omega
    assert rep.classical.ratio_min_slack == pytest.approx(expect, abs=1e-9)
    assert rep.quantum.ratio_max_slack == pytest.approx(expect, abs=1e-9)


# -- parabola partitions ----------------------------------------------------------


def test_parabola_quarter_at_63():
    part = parabola_partition(GridSpec(63), 0.25)
    assert len(part) == 4 and part.ids == ["cap0", "cap1", "cap2", "cap3"]
    total = sum(len(c) for c in part.cell_sets)
    assert total == len(part.omega)
    # every column of the arc carries the curve point
    scale = 15
    for j in range(-scale, scale + 1):
        assert (round(scale * (j / scale) ** 2), j % 63) in part.omega


def test_parabola_single_cap():
    part = parabola_partition(GridSpec(63), 1.0)
    assert len(part) == 1 and len(part.omega) == 31 * (2 * part.notes["thickness"] - 1)


@pytest.mark.parametrize("delta", [1 / 4, 1 / 16, 1 / 64])
def test_parabola_255(delta):
    part = parabola_partition(GridSpec(255), delta)
    assert len(part) == math.ceil(2 / math.sqrt(delta))
    assert all(len(c) > 0 for c in part.cell_sets)
    assert sum(len(c) for c in part.cell_sets) == len(part.omega)


def test_parabola_thickness():
    thin = parabola_partition(GridSpec(63), 0.25, 1)
    thick = parabola_partition(GridSpec(63), 0.25, 6)
    assert thin.omega.issubset(thick.omega) and len(thick.omega) > len(thin.omega)


@pytest.mark.parametrize("delta", [0, -0.5, 1.5])
def test_parabola_rejects_bad_delta(delta):
    with pytest.raises(ValueError):
        parabola_partition(GridSpec(63), delta)


def test_parabola_rejects_collapsed_caps():
    with pytest.raises(PartitionError, match="too small"):
        parabola_partition(GridSpec(15), 1 / 64)
    with pytest.raises(PartitionError, match="wraps"):
        parabola_partition(GridSpec(15), 1.0, 7)
