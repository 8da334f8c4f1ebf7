import math

import numpy as np
import pytest

from sasakian import GridField, NewtonConfig, NonConvergence, solve_liouville_k1, solve_radial, verify_solution
from sasakian.solver import InadmissibleProfile, radial_exact, sphere_k1, sphere_shift


def sphere_problem(n, shift=0.25 * math.log(2)):
    exact = GridField.from_function(lambda Z: sphere_k1(Z, shift), n + 1)
    guess = GridField(np.zeros_like(exact.values)).with_boundary_of(exact)
    return exact, guess


def test_gridfield_invariants():
    with pytest.raises(ValueError):
        GridField(np.zeros((7, 9)))
    with pytest.raises(ValueError):
        GridField(np.full((9, 9), np.nan))


def test_manufactured_convergence():
    errs = []
    for n in (32, 64, 128):
        exact, guess = sphere_problem(n)
        sol, rep = solve_liouville_k1(guess, 1.0)
        assert rep.converged and rep.final_residual < 1e-10
        errs.append(np.max(np.abs(sol.values - exact.values)))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(np.abs(orders - 2) < 0.3), orders


def test_boundary_untouched_and_monotone():
    exact, guess = sphere_problem(32)
    sol, rep = solve_liouville_k1(guess, 1.0)
    for a, b in ((sol.values[0], exact.values[0]), (sol.values[-1], exact.values[-1])):
        assert np.array_equal(a, b)
    assert np.array_equal(sol.values[:, 0], exact.values[:, 0])
    assert all(b < a for a, b in zip(rep.history, rep.history[1:]))


def test_constant_data_laplace_mode():
    g = GridField(np.full((17, 17), 0.7))
    sol, rep = solve_liouville_k1(g.with_boundary_of(g), 0.0)
    assert np.max(np.abs(sol.values - 0.7)) < 1e-14


def test_two_starts_agree():
    exact, zero_guess = sphere_problem(32)
    warm = exact.copy()
    a, _ = solve_liouville_k1(zero_guess, 1.0)
    b, _ = solve_liouville_k1(warm, 1.0)
    assert np.max(np.abs(a.values - b.values)) < 1e-9


def test_constant_gauge_maps_c():
    # K -> K + a with c -> c exp(4a); boundary and initial guess both shifted
    shift, a = 0.25 * math.log(2), 0.3
    _, guess = sphere_problem(32, shift)
    base, _ = solve_liouville_k1(guess, 1.0)
    moved, rep = solve_liouville_k1(GridField(guess.values + a), math.exp(4 * a))
    assert rep.converged
    assert np.max(np.abs(moved.values - (base.values + a))) < 1e-9


def test_cold_start_can_reach_other_branch():
    # the discrete equation is of Bratu type and has more than one solution
    shift, a = 0.25 * math.log(2), 0.3
    exact, _ = sphere_problem(32, shift + a)
    cold = GridField(np.zeros_like(exact.values)).with_boundary_of(exact)
    sol, rep = solve_liouville_k1(cold, math.exp(4 * a))
    assert rep.converged
    assert np.max(np.abs(sol.values - exact.values)) > 0.1


def test_nonconvergence():
    _, guess = sphere_problem(32)
    sol, rep = solve_liouville_k1(guess, 1.0, NewtonConfig(max_iters=1))
    assert not rep.converged
    with pytest.raises(NonConvergence):
        solve_liouville_k1(guess, 1.0, NewtonConfig(max_iters=1), raise_on_failure=True)
    assert verify_solution(sol, 1, tol=1e-3).verdict == "NotEinstein"


def test_verify_converged_grid():
    _, guess = sphere_problem(64)
    sol, _ = solve_liouville_k1(guess, 1.0)
    assert verify_solution(sol, 1, tol=1e-3).max_abs < 2e-3
    with pytest.raises(ValueError):
        verify_solution(GridField(np.zeros((8, 8))), 1)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_radial_matches_closed_form(k):
    prof = solve_radial(k, 1.0, 3.0)
    assert prof.u[0] == sphere_shift(k)
    assert np.max(np.abs(prof.u - (0.5 * np.log1p(prof.s) + sphere_shift(k)))) < 1e-6
    assert np.all(prof.du > 0)


def test_radial_profile_verified():
    prof = solve_radial(2, 1.0, 3.0)
    summary = verify_solution(prof, 2)
    assert summary.max_abs < 1e-5


def test_radial_u0_zero_golden():
    # recorded after post-solve verification; agrees with the closed-form family
    prof = solve_radial(1, 1.0, 3.0, 4001, 0.0)
    assert verify_solution(prof, 1).max_abs < 1e-5
    golden = {0.5: 0.3465734704483076, 1.0: 0.5493060211448673, 2.0: 0.8047188548597801, 3.0: 0.9729549943979559}
    for s, v in golden.items():
        assert float(prof(s)) == pytest.approx(v, abs=1e-10)
        assert abs(v - radial_exact(1, 1.0, 0.0, s)) < 1e-6


def test_radial_errors():
    with pytest.raises(ValueError):
        solve_radial(0)
    with pytest.raises(ValueError):
        solve_radial(1, -1.0)
    assert issubclass(InadmissibleProfile, RuntimeError)
