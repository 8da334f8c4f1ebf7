import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sasakian import (
    ChartPoint,
    PotentialSpec,
    build_structure,
    christoffel_closed,
    christoffel_numeric,
    curvature_closed,
    evaluate_jet,
    logdet_trace_identity,
    metricity_residual,
    random_polynomial,
    ricci_closed,
    ricci_from_riemann,
    riemann_closed,
    riemann_numeric,
    weyl_tensor,
    weyl_traces,
)
from sasakian.curvature import riemann_from_closed_christoffel
from sasakian.einstein import sample_points

GOLDEN = json.loads((Path(__file__).parent / "golden" / "weyl_product11.json").read_text())
coord = st.floats(-0.7, 0.7, allow_nan=False)


def test_christoffel_against_metric_oracle(spec):
    for p in sample_points(spec.k, 2, 0.8, 9):
        jet = evaluate_jet(spec, p)
        G = christoffel_closed(jet)
        assert np.max(np.abs(G - christoffel_numeric(spec, p))) < 1e-5
        assert metricity_residual(spec, p, G) < 1e-5


def test_riemann_against_oracle():
    spec = PotentialSpec.product(1, 1)
    p = ChartPoint(0.0, (0.3 + 0.1j, -0.2 + 0.25j))
    assert np.max(np.abs(riemann_numeric(spec, p) - riemann_closed(evaluate_jet(spec, p)))) < 1e-7


def test_riemann_from_closed_connection(spec):
    p = sample_points(spec.k, 1, 0.7, 2)[0]
    assert np.max(np.abs(riemann_from_closed_christoffel(spec, p) - riemann_closed(evaluate_jet(spec, p)))) < 1e-7


def test_ricci_constants(spec):
    for p in sample_points(spec.k, 3, 0.8, 5):
        jet = evaluate_jet(spec, p)
        pack = build_structure(jet)
        Ric = ricci_closed(jet)
        k = spec.k
        assert abs(Ric[0, 0] - 2 * k) < 1e-12
        assert np.max(np.abs(Ric[0, :] - 2 * k * pack.g[0, :])) < 1e-10
        assert np.max(np.abs(Ric[1 : k + 1, 1 : k + 1] - 2 * k * pack.g[1 : k + 1, 1 : k + 1])) < 1e-10
        assert np.max(np.abs(ricci_from_riemann(riemann_closed(jet)) - Ric)) < 1e-9


def test_sphere_k2_weyl_flat():
    spec = PotentialSpec.sphere(2)
    for p in sample_points(2, 5, 1.0, 1):
        jet = evaluate_jet(spec, p)
        tens = curvature_closed(jet)
        assert np.max(np.abs(tens.weyl)) < 1e-6


def test_product_weyl_golden():
    spec = PotentialSpec.product(1, 1)
    p = ChartPoint(GOLDEN["x"], tuple(complex(*z) for z in GOLDEN["z"]))
    jet = evaluate_jet(spec, p)
    pack = build_structure(jet)
    _, wmax = weyl_tensor(riemann_closed(jet), ricci_closed(jet), pack.g, pack.g_inv)
    assert wmax == pytest.approx(GOLDEN["weyl_max"], abs=1e-5)


def test_weyl_vanishes_in_dimension_three():
    jet = evaluate_jet(PotentialSpec.quadratic(1), ChartPoint(0.0, (0.2j,)))
    assert np.max(np.abs(curvature_closed(jet).weyl)) == 0


@given(st.lists(coord, min_size=4, max_size=4), st.integers(0, 3))
def test_trace_identity_and_weyl_traces(coords, seed):
    spec = random_polynomial(2, seed)
    jet = evaluate_jet(spec, ChartPoint.from_real(0.0, coords))
    assert logdet_trace_identity(jet) < 1e-10
    pack = build_structure(jet)
    W, _ = weyl_tensor(riemann_closed(jet), ricci_closed(jet), pack.g, pack.g_inv)
    assert weyl_traces(W, pack.g_inv) < 1e-9


@given(st.lists(coord, min_size=4, max_size=4))
def test_riemann_symmetries(coords):
    jet = evaluate_jet(random_polynomial(2, 1), ChartPoint.from_real(0.0, coords))
    pack = build_structure(jet)
    R = np.einsum("ae,ebcd->abcd", pack.g, riemann_closed(jet))
    assert np.max(np.abs(R + R.transpose(0, 1, 3, 2))) < 1e-12
    assert np.max(np.abs(R + R.transpose(1, 0, 2, 3))) < 1e-12
    assert np.max(np.abs(R - R.transpose(2, 3, 0, 1))) < 1e-12
    bianchi = R + R.transpose(0, 2, 3, 1) + R.transpose(0, 3, 1, 2)
    assert np.max(np.abs(bianchi)) < 1e-12
