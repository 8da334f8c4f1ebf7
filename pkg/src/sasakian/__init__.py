"""Sasakian structures generated by a potential: construction, curvature, Einstein tests and solvers."""

from .curvature import (
    CurvatureTensors,
    christoffel_closed,
    christoffel_numeric,
    curvature_closed,
    logdet_trace_identity,
    metricity_residual,
    ricci_closed,
    ricci_from_riemann,
    riemann_closed,
    riemann_numeric,
    weyl_tensor,
    weyl_traces,
)
from .einstein import (
    EinsteinReport,
    SamplePlan,
    classify,
    einstein_residual,
    integrated_ma_residual,
    kahler_einstein_residual,
)
from .jets import (
    ChartPoint,
    GaugeMap,
    InvalidPotential,
    PotentialSpec,
    StepUnderflow,
    WirtingerJet,
    apply_gauge,
    evaluate_jet,
    fd_jet,
    jet_of,
    random_polynomial,
)
from .solver import (
    GridField,
    NewtonConfig,
    NewtonReport,
    NonConvergence,
    RadialProfile,
    solve_liouville_k1,
    solve_radial,
    verify_solution,
)
from .structure import (
    BASIS_CONVENTION,
    HessianNotPositiveDefinite,
    HoloFrame,
    SingularHessian,
    StructurePack,
    axiom_residuals,
    build_structure,
    frame_from_hessian,
    frame_residuals,
    killing_residual,
    nijenhuis_residual,
)

__version__ = "0.1.0"
