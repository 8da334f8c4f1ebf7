import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sasakian import (
    ChartPoint,
    GaugeMap,
    InvalidPotential,
    PotentialSpec,
    StepUnderflow,
    apply_gauge,
    evaluate_jet,
    fd_jet,
    random_polynomial,
)
from sasakian.structure import conj_perm

coord = st.floats(-0.7, 0.7, allow_nan=False)


def test_sphere_origin_jet():
    jet = evaluate_jet(PotentialSpec.sphere(1), ChartPoint(0.0, (0j,)))
    assert jet.value == pytest.approx(0.0, abs=1e-15)
    assert abs(jet.entry((0,), ())) < 1e-15
    assert jet.entry((0,), (0,)) == pytest.approx(0.5)
    assert abs(jet.entry((0, 0), ())) < 1e-15
    assert abs(jet.entry((0, 0), (0,))) < 1e-15
    assert jet.entry((0, 0), (0, 0)) == pytest.approx(-1.0)


def test_quadratic_has_constant_hessian():
    for z in (0.3 + 0.2j, -1.0 + 0.5j):
        jet = evaluate_jet(PotentialSpec.quadratic(1, 0.5), ChartPoint(0.0, (z,)))
        assert jet.hess[0, 0] == pytest.approx(0.5)
        assert np.max(np.abs(jet.derivs[3])) == 0
        assert np.max(np.abs(jet.derivs[4])) == 0


def test_product_origin_hessian():
    jet = evaluate_jet(PotentialSpec.product(1, 1), ChartPoint(0.0, (0j, 0j)))
    assert np.allclose(jet.hess, np.diag([1 / 3, 1 / 3]), atol=1e-15)


def test_order_bounds():
    spec = PotentialSpec.sphere(1)
    with pytest.raises(ValueError):
        evaluate_jet(spec, ChartPoint(0.0, (0j,)), 5)
    with pytest.raises(InvalidPotential):
        evaluate_jet(PotentialSpec.blackbox(1, lambda p: 0.0), ChartPoint(0.0, (0j,)))


def test_fd_matches_sphere_origin():
    jet = fd_jet(PotentialSpec.sphere(1), ChartPoint(0.0, (0j,)), 4, 1e-2)
    assert abs(jet.hess[0, 0] - 0.5) < 1e-5


def test_fd_exact_on_quadratic():
    spec = PotentialSpec.quadratic(1, 0.5)
    p = ChartPoint(0.0, (0.4 - 0.3j,))
    a, b = evaluate_jet(spec, p), fd_jet(spec, p, 2, 1e-1, richardson=False)
    assert np.max(np.abs(a.derivs[2] - b.derivs[2])) < 1e-12


def test_fd_sphere_k2_order2_block():
    spec = PotentialSpec.sphere(2)
    p = ChartPoint(0.0, (0.3, 0.1j))
    a, b = evaluate_jet(spec, p), fd_jet(spec, p, 4, 1e-2)
    assert np.max(np.abs(a.derivs[2] - b.derivs[2])) < 1e-5


def test_fd_converges_at_second_order():
    spec = PotentialSpec.sphere(1)
    p = ChartPoint(0.0, (0.3 + 0.2j,))
    exact = evaluate_jet(spec, p)
    errs = []
    for h in (1e-1, 5e-2, 2.5e-2):
        jet = fd_jet(spec, p, 4, h, richardson=False)
        errs.append(max(np.max(np.abs(jet.derivs[r] - exact.derivs[r])) for r in range(1, 5)))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(np.abs(orders - 2) < 0.3), orders


def test_fd_step_underflow_is_signalled():
    with pytest.raises(StepUnderflow):
        fd_jet(PotentialSpec.sphere(1), ChartPoint(0.0, (0j,)), 4, 1e-4)
    with pytest.raises(StepUnderflow):
        fd_jet(PotentialSpec.sphere(1), ChartPoint(0.0, (0j,)), 2, -1.0)


def test_polynomial_must_be_hermitian():
    with pytest.raises(InvalidPotential):
        PotentialSpec.polynomial(1, [((2,), (1,), 0.3j)])
    PotentialSpec.polynomial(1, [((2,), (1,), 0.3j), ((1,), (2,), -0.3j)])


def test_polynomial_degree_limit():
    with pytest.raises(InvalidPotential):
        PotentialSpec.polynomial(1, [((4,), (3,), 1.0), ((3,), (4,), 1.0)])


@pytest.mark.parametrize(
    "text",
    [
        '{"kind": "sphere", "k": 2}',
        '{"kind": "product", "q": 1, "n": 1}',
        '{"kind": "polynomial", "k": 1, "terms": [{"a": [1], "b": [1], "re": 0.5, "im": 0.0}]}',
    ],
)
def test_json_round_trip(text):
    spec = PotentialSpec.from_json(text)
    assert PotentialSpec.from_json(spec.to_json()) == spec


def test_identity_gauge():
    spec = PotentialSpec.sphere(1)
    new, mapping = apply_gauge(spec, GaugeMap(1, ()))
    assert new == spec
    p = ChartPoint(0.3, (0.1 + 0.2j,))
    assert mapping(p) == p


def test_gauge_linear_on_sphere():
    spec = PotentialSpec.sphere(1)
    new, _ = apply_gauge(spec, GaugeMap(1, (((1,), 1.0),)))
    p = ChartPoint(0.0, (0.4 + 0.2j,))
    assert new(p) == pytest.approx(0.5 * math.log(1 + 0.2) + 0.8, abs=1e-14)
    assert evaluate_jet(new, p).hess[0, 0] == pytest.approx(evaluate_jet(spec, p).hess[0, 0], abs=1e-15)


def test_gauge_x_shift_is_real_and_matches_rule():
    gauge = GaugeMap(1, (((2,), 1j),))
    z = (1.0 + 0j,)
    fz = gauge.f(z)
    rule = 1j * fz.conjugate() - 1j * fz
    assert abs(rule.imag) < 1e-15
    assert gauge.x_shift(z) == pytest.approx(2.0)
    assert gauge.x_shift(z) == pytest.approx(rule.real)


@given(st.lists(coord, min_size=4, max_size=4), st.integers(0, 4))
def test_jet_conjugation_symmetry(coords, seed):
    spec = random_polynomial(2, seed)
    jet = evaluate_jet(spec, ChartPoint.from_real(0.0, coords))
    perm = conj_perm(2)[1:] - 1
    for r in range(1, 5):
        D = jet.derivs[r]
        assert np.array_equal(D.conj(), D[np.ix_(*([perm] * r))])
    assert np.array_equal(jet.hess, jet.hess.conj().T)


@given(st.lists(coord, min_size=2, max_size=2), st.complex_numbers(max_magnitude=2), st.complex_numbers(max_magnitude=2))
def test_gauge_leaves_mixed_blocks(coords, alpha, beta):
    spec = PotentialSpec.sphere(1)
    new, _ = apply_gauge(spec, GaugeMap(1, (((1,), alpha), ((2,), beta))))
    p = ChartPoint.from_real(0.0, coords)
    a, b = evaluate_jet(spec, p), evaluate_jet(new, p)
    for (al, be), v in a.entries().items():
        if al and be:
            assert abs(v - b.entry(al, be)) < 1e-12


@given(st.floats(-5, 5), st.lists(coord, min_size=4, max_size=4))
def test_value_independent_of_x(x, coords):
    spec = PotentialSpec.product(1, 1)
    p = ChartPoint.from_real(x, coords)
    assert spec(p) == spec(p.shifted(dx=1.7))
