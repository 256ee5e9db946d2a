#!/usr/bin/env python3
"""Random-search lower bound for the classical decoupling ratio at n = 5.

Draws coefficient vectors on a two-cell partition of the full 5x5 grid,
builds the functions with an explicitly assembled symplectic DFT kernel
(no package transform code involved) and keeps the largest ratio.  The
result is frozen into tests/fixtures/n5_two_cell_oracle.json and used as a
regression floor for the ascent estimator.
"""
from __future__ import annotations

import argparse
import json
from pathlib import Path

import numpy as np

N = 5
# cell "low": x in {0, 1, 2}; cell "high": x in {3, 4}
SPLIT = 3


def kernel(n: int) -> np.ndarray:
    pts = [(x, xi) for x in range(n) for xi in range(n)]
    k = np.empty((n * n, n * n), dtype=complex)
    for a, (x, xi) in enumerate(pts):
        for b, (xp, xip) in enumerate(pts):
            sigma = xp * xi - x * xip
            k[a, b] = np.exp(-2j * np.pi * sigma / n) / n
    return k


def lp(v: np.ndarray, p: float, n: int) -> np.ndarray:
    return (np.sum(np.abs(v) ** p, axis=-1) / n) ** (1.0 / p)


def search(draws: int, p: float, q: float, seed: int, batch: int = 10_000) -> float:
    n = N
    K = kernel(n)
    low = np.array([x < SPLIT for x in range(n) for _ in range(n)])
    rng = np.random.default_rng(seed)
    best = 0.0
    done = 0
    while done < draws:
        m = min(batch, draws - done)
        c = rng.standard_normal((m, n * n)) + 1j * rng.standard_normal((m, n * n))
        amp = np.exp(rng.standard_normal((m, 2)))
        c_low = np.where(low, c, 0) * amp[:, :1]
        c_high = np.where(~low, c, 0) * amp[:, 1:]
        f_low = c_low @ K.T
        f_high = c_high @ K.T
        num = lp(f_low + f_high, p, n)
        den = (lp(f_low, p, n) ** q + lp(f_high, p, n) ** q) ** (1.0 / q)
        best = max(best, float(np.max(num / den)))
        done += m
    return best


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--draws", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=20240611)
    ap.add_argument("--out", type=Path, default=None)
    args = ap.parse_args(argv)
    value = search(args.draws, p=4.0, q=2.0, seed=args.seed)
    record = {
        "n": N,
        "cells": {"low": f"x < {SPLIT}", "high": f"x >= {SPLIT}"},
        "side": "classical",
        "p": "4",
        "q": "2",
        "draws": args.draws,
        "seed": args.seed,
        "oracle_max_ratio": value,
    }
    text = json.dumps(record, indent=2, sort_keys=True)
    if args.out:
        args.out.write_text(text + "\n")
    print(text)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
