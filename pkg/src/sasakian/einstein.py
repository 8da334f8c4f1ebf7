"""Sasakian-Einstein condition on the potential and its Kaehler counterpart."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .curvature import logdet_hessian_derivs, ricci_closed
from .jets import ChartPoint, GaugeMap, PotentialSpec, WirtingerJet, apply_gauge, jet_of
from .structure import HessianNotPositiveDefinite, build_structure, check_hessian

ANALYTIC_TOL = 1e-8
FD_TOL = 1e-4


@dataclass
class EinsteinReport:
    lam: float
    residual: np.ndarray  # [i, j] = LHS - RHS of the ibar-j equation
    max_abs: float
    tol: float
    ma_residual: float | None = None

    @property
    def verdict(self) -> str:
        return "Einstein" if self.max_abs < self.tol else "NotEinstein"


def einstein_matrix(jet: WirtingerJet) -> np.ndarray:
    """-(log det K_{,m nbar})_{,ibar j} - 2(k+1) K_{,ibar j} as a matrix [i, j]."""
    jet.require(4)
    k = jet.k
    check_hessian(jet.hess)
    ld = logdet_hessian_derivs(jet)[k:, :k]
    return -ld - 2 * (k + 1) * jet.derivs[2][k:, :k]


def einstein_residual(jet: WirtingerJet, k: int | None = None, tol: float = ANALYTIC_TOL) -> EinsteinReport:
    k = jet.k if k is None else k
    if k != jet.k:
        raise ValueError("dimension mismatch")
    M = einstein_matrix(jet)
    return EinsteinReport(lam=2.0 * k, residual=M, max_abs=float(np.max(np.abs(M))), tol=tol)


def integrated_ma_residual(jet: WirtingerJet, k: int | None = None, c: float = 1.0) -> float:
    """|det K_{,m nbar} - c exp(-2(k+1) K)|."""
    jet.require(2)
    k = jet.k if k is None else k
    if c <= 0:
        raise ValueError("c must be positive")
    det = np.linalg.det(jet.hess).real
    return float(abs(det - c * np.exp(-2 * (k + 1) * jet.value)))


def kahler_ricci(jet: WirtingerJet) -> np.ndarray:
    """Ricci [i, j] = R_{ibar j} of the Kaehler metric with components 2 K_{,ibar j}.

    Uses -(log det h)_{,ibar j} = -tr(h^-1 h_{ibar j}) + tr(h^-1 h_ibar h^-1 h_j).
    """
    jet.require(4)
    k = jet.k
    h = 2.0 * jet.hess  # h[m, n] ~ h_{m nbar}
    hinv = np.linalg.inv(h)
    dh = 2.0 * np.moveaxis(jet.derivs[3][:k, k:, :], 2, 0)  # dh[a, m, n]
    ddh = 2.0 * np.moveaxis(jet.derivs[4][:k, k:, :, :], (2, 3), (0, 1))
    out = np.zeros((k, k), dtype=complex)
    for i in range(k):
        for j in range(k):
            a, b = k + i, j
            out[i, j] = -np.trace(hinv @ ddh[a, b]) + np.trace(hinv @ dh[a] @ hinv @ dh[b])
    return out


def kahler_einstein_matrix(jet: WirtingerJet) -> np.ndarray:
    """Ric(h) - 2(k+1) h in the ibar-j block, h_{ibar j} = K_{,ibar j}.

    The symmetric product in h = 2 K_{,ibar j} dzbar^i dz^j halves the
    coefficient, so the component matrix is the Hessian itself.
    """
    k = jet.k
    return kahler_ricci(jet) - 2 * (k + 1) * jet.derivs[2][k:, :k]


def kahler_einstein_residual(jet: WirtingerJet, k: int | None = None) -> float:
    return float(np.max(np.abs(kahler_einstein_matrix(jet))))


def curvature_einstein_defect(jet: WirtingerJet) -> np.ndarray:
    """Ric(g) - 2k g from the closed-form Ricci tensor."""
    pack = build_structure(jet)
    return ricci_closed(jet) - 2 * jet.k * pack.g


# ---------------------------------------------------------------------------
# gauge invariance
# ---------------------------------------------------------------------------


def gauge_jacobian(gauge: GaugeMap, z) -> np.ndarray:
    """d(x', z, zbar)/d(x, z, zbar) for x' = x + i conj(f) - i f."""
    k = gauge.k
    J = np.eye(2 * k + 1, dtype=complex)
    df = gauge.df(z)
    J[0, 1 : k + 1] = -1j * df
    J[0, k + 1 :] = 1j * df.conj()
    return J


def gauge_defects(spec: PotentialSpec, gauge: GaugeMap, p: ChartPoint, h: float = 1e-2) -> dict:
    """Pointwise change of the structure under K -> K + f + conj(f).

    The structure of K' is evaluated at the mapped point and pulled back
    through the coordinate Jacobian before comparison; the Einstein residual
    and the mixed jet blocks are compared directly.
    """
    new, mapping = apply_gauge(spec, gauge)
    q = mapping(p)
    j0, j1 = jet_of(spec, p, 4, h), jet_of(new, q, 4, h)
    k = spec.k
    mixed = 0.0
    for r in range(2, 5):
        for idx in np.ndindex(*(2 * k,) * r):
            if any(a < k for a in idx) and any(a >= k for a in idx):
                mixed = max(mixed, abs(j0.derivs[r][idx] - j1.derivs[r][idx]))
    s0, s1 = build_structure(j0), build_structure(j1)
    J = gauge_jacobian(gauge, p.z)
    eta_pb = s1.eta @ J
    g_pb = J.T @ s1.g @ J
    phi_pb = np.linalg.solve(J, s1.phi @ J)
    e0 = einstein_matrix(j0)
    e1 = einstein_matrix(j1)
    return {
        "mixed_jet": float(mixed),
        "eta": float(np.max(np.abs(eta_pb - s0.eta))),
        "g": float(np.max(np.abs(g_pb - s0.g))),
        "phi": float(np.max(np.abs(phi_pb - s0.phi))),
        "einstein": float(np.max(np.abs(e1 - e0))),
        "x_shift": float(q.x - p.x),
    }


def seeded_gauge(k: int, seed: int) -> GaugeMap:
    """f(z) = alpha z^1 + beta (z^1)^2 with seeded complex alpha, beta."""
    rng = np.random.default_rng(seed)
    alpha, beta = (complex(*rng.standard_normal(2)) for _ in range(2))
    e1 = tuple(int(i == 0) for i in range(k))
    e2 = tuple(2 * int(i == 0) for i in range(k))
    return GaugeMap(k, ((e1, alpha), (e2, beta)))


# ---------------------------------------------------------------------------
# sampling and batch classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SamplePlan:
    n_points: int = 50
    radius: float = 1.0
    seed: int = 0

    def points(self, k: int) -> list[ChartPoint]:
        if self.n_points < 1:
            raise ValueError("sample plan must contain at least one point")
        return sample_points(k, self.n_points, self.radius, self.seed)


def sample_points(k: int, n_points: int, radius: float, seed: int) -> list[ChartPoint]:
    """Points uniform in the ball |z| < radius of C^k, with x uniform in [-1, 1]."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n_points):
        v = rng.standard_normal(2 * k)
        v /= np.linalg.norm(v)
        r = radius * rng.uniform() ** (1.0 / (2 * k))
        out.append(ChartPoint.from_real(rng.uniform(-1, 1), r * v))
    return out


@dataclass
class ClassifyReport:
    spec: PotentialSpec
    reports: list = field(default_factory=list)
    points: list = field(default_factory=list)
    tol: float = ANALYTIC_TOL

    @property
    def lam(self) -> float:
        return 2.0 * self.spec.k

    @property
    def max_abs(self) -> float:
        return max(r.max_abs for r in self.reports)

    @property
    def verdict(self) -> str:
        return "Einstein" if all(r.verdict == "Einstein" for r in self.reports) else "NotEinstein"


def classify(spec: PotentialSpec, plan: SamplePlan, tol: float | None = None, h: float = 1e-2) -> ClassifyReport:
    """Per-point Einstein reports over the sample plan."""
    if tol is None:
        tol = FD_TOL if spec.kind == "blackbox" else ANALYTIC_TOL
    out = ClassifyReport(spec=spec, tol=tol)
    for p in plan.points(spec.k):
        jet = jet_of(spec, p, 4, h)
        out.reports.append(einstein_residual(jet, spec.k, tol))
        out.points.append(p)
    return out


__all__ = [
    "ANALYTIC_TOL",
    "ClassifyReport",
    "EinsteinReport",
    "FD_TOL",
    "HessianNotPositiveDefinite",
    "SamplePlan",
    "classify",
    "curvature_einstein_defect",
    "einstein_matrix",
    "einstein_residual",
    "gauge_defects",
    "gauge_jacobian",
    "integrated_ma_residual",
    "kahler_einstein_matrix",
    "kahler_einstein_residual",
    "kahler_ricci",
    "sample_points",
    "seeded_gauge",
]
