"""Acceptance criteria at their stated tolerances.

Each test records one PASS/FAIL line; ``conftest.py`` prints them in the
terminal summary.  Run directly with ``python3 tests/test_acceptance.py``.
"""

import math
import time

import numpy as np
import pytest

from sasakian import (
    GridField,
    PotentialSpec,
    axiom_residuals,
    build_structure,
    christoffel_closed,
    christoffel_numeric,
    einstein_residual,
    evaluate_jet,
    integrated_ma_residual,
    logdet_trace_identity,
    metricity_residual,
    nijenhuis_residual,
    random_polynomial,
    ricci_closed,
    ricci_from_riemann,
    riemann_closed,
    solve_liouville_k1,
    solve_radial,
    verify_solution,
    weyl_tensor,
    weyl_traces,
)
from sasakian.einstein import gauge_defects, sample_points, seeded_gauge
from sasakian.solver import sphere_k1

RESULTS: list[str] = []
N_POINTS = 50
RADIUS = 1.0
SEED = 2024


def record(number: int, name: str, ok: bool, detail: str) -> None:
    RESULTS.append(f"criterion {number} [{name}]: {'PASS' if ok else 'FAIL'}  {detail}")


def potential_matrix():
    specs = [
        PotentialSpec.sphere(1),
        PotentialSpec.sphere(2),
        PotentialSpec.sphere(3),
        PotentialSpec.product(1, 1),
        PotentialSpec.product(2, 1),
        PotentialSpec.quadratic(1),
        PotentialSpec.quadratic(2),
    ]
    specs += [random_polynomial(k, 100 + i) for i, k in enumerate((1, 2, 2, 3, 3))]
    return specs


SPECS = potential_matrix()


def point_matrix(spec, n=N_POINTS):
    return sample_points(spec.k, n, RADIUS, SEED)


def test_criterion_1_axioms():
    t0 = time.perf_counter()
    worst_axiom = worst_nij = 0.0
    for spec in SPECS:
        for p in point_matrix(spec):
            jet = evaluate_jet(spec, p)
            worst_axiom = max(worst_axiom, axiom_residuals(build_structure(jet), jet).max())
            worst_nij = max(worst_nij, nijenhuis_residual(spec, p))
    elapsed = time.perf_counter() - t0
    ok = worst_axiom < 1e-10 and worst_nij < 1e-8 and elapsed < 30
    record(1, "axiom suite", ok, f"max axiom {worst_axiom:.2e} (<1e-10), Nijenhuis {worst_nij:.2e} (<1e-8), {elapsed:.1f}s (<30s)")
    assert ok


def test_criterion_2_transcription():
    worst = dict(gamma=0.0, ricci=0.0, metricity=0.0, trace=0.0)
    for spec in SPECS:
        for p in point_matrix(spec):
            jet = evaluate_jet(spec, p)
            G = christoffel_closed(jet)
            worst["gamma"] = max(worst["gamma"], float(np.max(np.abs(G - christoffel_numeric(spec, p)))))
            worst["metricity"] = max(worst["metricity"], metricity_residual(spec, p, G))
            worst["ricci"] = max(
                worst["ricci"], float(np.max(np.abs(ricci_from_riemann(riemann_closed(jet)) - ricci_closed(jet))))
            )
            worst["trace"] = max(worst["trace"], logdet_trace_identity(jet))
    ok = worst["gamma"] < 1e-5 and worst["ricci"] < 1e-9 and worst["metricity"] < 1e-5 and worst["trace"] < 1e-10
    record(
        2,
        "closed-form cross-checks",
        ok,
        f"Gamma {worst['gamma']:.2e} (<1e-5), Ricci {worst['ricci']:.2e} (<1e-9), "
        f"metricity {worst['metricity']:.2e} (<1e-5), trace identity {worst['trace']:.2e} (<1e-10)",
    )
    assert ok


def test_criterion_3_constants():
    rxx = rxj = rij = 0.0
    lam_ok = True
    for spec in SPECS:
        k = spec.k
        for p in point_matrix(spec):
            jet = evaluate_jet(spec, p)
            g = build_structure(jet).g
            # contraction of the curvature 2-forms, independent of the Ricci closed form
            Ric = ricci_from_riemann(riemann_closed(jet))
            rxx = max(rxx, abs(Ric[0, 0] - 2 * k))
            rxj = max(rxj, float(np.max(np.abs(Ric[0, 1:] - 2 * k * g[0, 1:]))))
            rij = max(rij, float(np.max(np.abs(Ric[1 : k + 1, 1 : k + 1] - 2 * k * g[1 : k + 1, 1 : k + 1]))))
            lam_ok &= einstein_residual(jet).lam == 2 * k
    ok = rxx < 1e-12 and rxj < 1e-10 and rij < 1e-10 and lam_ok
    record(3, "constants", ok, f"|R_xx-2k| {rxx:.2e} (<1e-12), R_xj {rxj:.2e}, R_ij {rij:.2e} (<1e-10), lambda=2k {lam_ok}")
    assert ok


def test_criterion_4_einstein_examples():
    einstein = [PotentialSpec.sphere(1), PotentialSpec.sphere(2), PotentialSpec.product(1, 1), PotentialSpec.product(1, 2), PotentialSpec.product(2, 1)]
    worst = 0.0
    for spec in einstein:
        for p in point_matrix(spec):
            worst = max(worst, einstein_residual(evaluate_jet(spec, p)).max_abs)
    quad = 0.0
    for p in point_matrix(PotentialSpec.quadratic(1)):
        M = einstein_residual(evaluate_jet(PotentialSpec.quadratic(1), p)).residual
        quad = max(quad, abs(M[0, 0] + 2))
    ok = worst < 1e-9 and quad < 1e-12
    record(4, "Einstein examples", ok, f"Einstein families {worst:.2e} (<1e-9), quadratic |res+2| {quad:.2e} (<1e-12)")
    assert ok


def test_criterion_5_integrated_forms():
    worst = {}
    for k, a in ((1, 0.25 * math.log(2)), (2, math.log(2) / 3)):
        spec = PotentialSpec.sphere(k).with_shift(a)
        worst[k] = max(integrated_ma_residual(evaluate_jet(spec, p, 2), k, 1.0) for p in point_matrix(spec))
    ok = max(worst.values()) < 1e-12
    record(5, "integrated Monge-Ampere", ok, f"k=1 {worst[1]:.2e}, k=2 {worst[2]:.2e} (<1e-12)")
    assert ok


def test_criterion_6_weyl():
    sphere = PotentialSpec.sphere(2)
    flat = 0.0
    for p in sample_points(2, 20, RADIUS, SEED):
        jet = evaluate_jet(sphere, p)
        pack = build_structure(jet)
        flat = max(flat, weyl_tensor(riemann_closed(jet), ricci_closed(jet), pack.g, pack.g_inv)[1])
    traces = 0.0
    for spec in SPECS:
        for p in point_matrix(spec, 10):
            jet = evaluate_jet(spec, p)
            pack = build_structure(jet)
            W, _ = weyl_tensor(riemann_closed(jet), ricci_closed(jet), pack.g, pack.g_inv)
            traces = max(traces, weyl_traces(W, pack.g_inv))
    ok = flat < 1e-6 and traces < 1e-9
    record(6, "Weyl", ok, f"sphere k=2 max|W| {flat:.2e} (<1e-6), traces {traces:.2e} (<1e-9)")
    assert ok


def test_criterion_7_gauge():
    worst = 0.0
    shift_err = 0.0
    for i, spec in enumerate(SPECS):
        gauge = seeded_gauge(spec.k, SEED + i)
        for p in point_matrix(spec, 10):
            d = gauge_defects(spec, gauge, p)
            worst = max(worst, *(v for key, v in d.items() if key != "x_shift"))
            fz = gauge.f(p.z)
            rule = (1j * fz.conjugate() - 1j * fz).real
            shift_err = max(shift_err, abs(d["x_shift"] - rule))
    ok = worst < 1e-12 and shift_err < 1e-12
    record(7, "gauge invariance", ok, f"max defect (jets, g, phi, eta, Einstein) {worst:.2e} (<1e-12), x-shift rule {shift_err:.2e}")
    assert ok


def test_criterion_8_solver():
    t0 = time.perf_counter()
    errs = []
    sol = None
    for n in (32, 64, 128):
        exact = GridField.from_function(sphere_k1, n + 1)
        guess = GridField(np.zeros_like(exact.values)).with_boundary_of(exact)
        sol, rep = solve_liouville_k1(guess, 1.0)
        errs.append(float(np.max(np.abs(sol.values - exact.values))))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    verify = verify_solution(sol, 1, tol=1e-3).max_abs
    radial = {}
    for k in (1, 2):
        prof = solve_radial(k, 1.0, 3.0)
        radial[k] = float(np.max(np.abs(prof.u - (0.5 * np.log1p(prof.s) + prof.u[0]))))
    elapsed = time.perf_counter() - t0
    ok = bool(np.all(np.abs(orders - 2) < 0.3)) and max(radial.values()) < 1e-6 and verify < 1e-3 and elapsed < 120
    record(
        8,
        "solver",
        ok,
        f"orders {orders[0]:.3f}, {orders[1]:.3f} (2+-0.3), radial k=1 {radial[1]:.1e} k=2 {radial[2]:.1e} (<1e-6), "
        f"verify@128 {verify:.2e} (<1e-3), {elapsed:.1f}s (<120s)",
    )
    assert ok


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
