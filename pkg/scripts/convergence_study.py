"""Grid-refinement study for the k = 1 solver and node-refinement study for the radial solver.

Writes CSV tables to the output directory (default: ./results).
"""

import argparse
import csv
import time
from pathlib import Path

import numpy as np

from sasakian import GridField, solve_liouville_k1, solve_radial, verify_solution
from sasakian.solver import radial_exact, sphere_k1


def grid_study(sizes):
    rows = []
    for n in sizes:
        exact = GridField.from_function(sphere_k1, n + 1)
        guess = GridField(np.zeros_like(exact.values)).with_boundary_of(exact)
        t0 = time.perf_counter()
        sol, rep = solve_liouville_k1(guess, 1.0)
        err = float(np.max(np.abs(sol.values - exact.values)))
        ver = verify_solution(sol, 1, tol=1e-3).max_abs
        rows.append({"cells": n, "h": sol.h, "newton_iters": rep.iterations, "error": err, "verify": ver, "seconds": time.perf_counter() - t0})
    for a, b in zip(rows, rows[1:]):
        b["order"] = float(np.log2(a["error"] / b["error"]))
    return rows


def radial_study(k, nodes):
    rows = []
    u0 = k * np.log(2) / (2 * (k + 1))
    for n in nodes:
        prof = solve_radial(k, 1.0, 3.0, n, u0)
        err = float(np.max(np.abs(prof.u - radial_exact(k, 1.0, u0, prof.s))))
        rows.append({"k": k, "nodes": n, "error": err})
    for a, b in zip(rows, rows[1:]):
        b["order"] = float(np.log2(a["error"] / b["error"]))
    return rows


def write(path, rows):
    keys = sorted({key for r in rows for key in r}, key=lambda s: list(rows[-1]).index(s) if s in rows[-1] else 99)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=keys)
        w.writeheader()
        w.writerows(rows)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results")
    ap.add_argument("--sizes", type=int, nargs="+", default=[16, 32, 64, 128])
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    grid = grid_study(args.sizes)
    write(out / "grid_convergence.csv", grid)
    for r in grid:
        print(f"grid {r['cells']:4d}  err {r['error']:.3e}  order {r.get('order', float('nan')):.3f}  verify {r['verify']:.2e}")
    radial = [r for k in (1, 2, 3) for r in radial_study(k, (251, 501, 1001, 2001))]
    write(out / "radial_convergence.csv", radial)
    for r in radial:
        print(f"radial k={r['k']} nodes {r['nodes']:5d}  err {r['error']:.3e}  order {r.get('order', float('nan')):.3f}")


if __name__ == "__main__":
    main()
