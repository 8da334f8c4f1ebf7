"""Einstein classification and curvature summary over the builtin potentials and seeded random polynomials."""

import argparse
import csv
from pathlib import Path

import numpy as np

from sasakian import PotentialSpec, SamplePlan, build_structure, classify, evaluate_jet, random_polynomial, ricci_closed
from sasakian.curvature import curvature_closed


def catalogue(n_random):
    specs = {
        "sphere1": PotentialSpec.sphere(1),
        "sphere2": PotentialSpec.sphere(2),
        "sphere3": PotentialSpec.sphere(3),
        "product11": PotentialSpec.product(1, 1),
        "product12": PotentialSpec.product(1, 2),
        "product21": PotentialSpec.product(2, 1),
        "quadratic1": PotentialSpec.quadratic(1),
        "quadratic2": PotentialSpec.quadratic(2),
    }
    for i in range(n_random):
        specs[f"poly2_seed{i}"] = random_polynomial(2, i)
    return specs


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results")
    ap.add_argument("--points", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--random", type=int, default=5)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    plan = SamplePlan(args.points, 1.0, args.seed)
    rows = []
    for name, spec in catalogue(args.random).items():
        rep = classify(spec, plan)
        weyl, scal = [], []
        for p in plan.points(spec.k):
            jet = evaluate_jet(spec, p)
            tens = curvature_closed(jet, build_structure(jet))
            weyl.append(float(np.max(np.abs(tens.weyl))))
            scal.append(tens.scalar)
        rows.append(
            {
                "potential": name,
                "k": spec.k,
                "lambda": rep.lam,
                "einstein_max_abs": rep.max_abs,
                "verdict": rep.verdict,
                "weyl_max": max(weyl),
                "scalar_min": min(scal),
                "scalar_max": max(scal),
            }
        )
        print(f"{name:12s} k={spec.k} {rep.verdict:11s} max_abs {rep.max_abs:.2e}  max|W| {max(weyl):.2e}  scalar [{min(scal):.3f}, {max(scal):.3f}]")
    with open(out / "einstein_campaign.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)


if __name__ == "__main__":
    main()
