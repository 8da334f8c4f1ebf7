import numpy as np
import pytest
from hypothesis import settings

from sasakian import ChartPoint, PotentialSpec, random_polynomial
from sasakian.einstein import sample_points

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


def builtin_specs():
    return [
        PotentialSpec.sphere(1),
        PotentialSpec.sphere(2),
        PotentialSpec.sphere(3),
        PotentialSpec.product(1, 1),
        PotentialSpec.product(2, 1),
        PotentialSpec.quadratic(1),
        PotentialSpec.quadratic(2),
        random_polynomial(1, 11),
        random_polynomial(2, 12),
    ]


def spec_id(spec):
    if spec.kind == "product":
        return f"product{spec.q}{spec.n}"
    return f"{spec.kind}{spec.k}"


@pytest.fixture(params=builtin_specs(), ids=spec_id)
def spec(request):
    return request.param


@pytest.fixture
def points(spec):
    return sample_points(spec.k, 6, 0.9, 3)


def point_strategy_args(k):
    return dict(min_value=-0.7, max_value=0.7, allow_nan=False, allow_infinity=False)


def make_point(x, coords):
    return ChartPoint.from_real(x, np.asarray(coords, dtype=float))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
