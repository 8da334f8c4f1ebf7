"""Numerical solutions of det K_{,m nbar} = c exp(-2(k+1) K).

Two solvers:

* :func:`solve_liouville_k1` -- k = 1 on a rectangle with Dirichlet data,
  ``1/4 (K_xx + K_yy) = c exp(-4K)``, 5-point Laplacian, damped Newton.
* :func:`solve_radial` -- K = u(|z|^2) for any k, reducing the equation to
  ``(u')^(k-1) (u' + s u'') = c exp(-2(k+1) u)`` on ``s in [0, s_max]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.interpolate import make_interp_spline

from .einstein import FD_TOL, einstein_residual
from .jets import ChartPoint, PotentialSpec, WirtingerJet, fd_jet, real_to_wirtinger, symmetrize


class NonConvergence(RuntimeError):
    """Newton iteration did not reach the requested tolerance."""


class InadmissibleProfile(RuntimeError):
    """A radial profile with u' <= 0 (Hessian not positive definite)."""


# ---------------------------------------------------------------------------
# grids
# ---------------------------------------------------------------------------


@dataclass
class GridField:
    """K sampled on a uniform (Re z, Im z) grid; values[i, j] at (xs[i], ys[j])."""

    values: np.ndarray
    domain: tuple[float, float, float, float] = (-0.5, 0.5, -0.5, 0.5)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        nx, ny = self.values.shape
        if nx < 8 or ny < 8:
            raise ValueError("grid needs at least 8 nodes per direction")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("grid values must be finite")

    @property
    def nx(self) -> int:
        return self.values.shape[0]

    @property
    def ny(self) -> int:
        return self.values.shape[1]

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(self.domain[0], self.domain[1], self.nx)

    @property
    def ys(self) -> np.ndarray:
        return np.linspace(self.domain[2], self.domain[3], self.ny)

    @property
    def hx(self) -> float:
        return (self.domain[1] - self.domain[0]) / (self.nx - 1)

    @property
    def hy(self) -> float:
        return (self.domain[3] - self.domain[2]) / (self.ny - 1)

    @property
    def h(self) -> float:
        return max(self.hx, self.hy)

    def nodes(self) -> np.ndarray:
        """Complex node coordinates Z[i, j] = xs[i] + i ys[j]."""
        X, Y = np.meshgrid(self.xs, self.ys, indexing="ij")
        return X + 1j * Y

    def copy(self) -> "GridField":
        return GridField(self.values.copy(), self.domain)

    @classmethod
    def from_function(
        cls, func: Callable[[np.ndarray], np.ndarray], n: int, domain=(-0.5, 0.5, -0.5, 0.5)
    ) -> "GridField":
        """Sample ``func(Z)`` (vectorized over complex node arrays) on an n x n grid."""
        xs = np.linspace(domain[0], domain[1], n)
        ys = np.linspace(domain[2], domain[3], n)
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        return cls(np.asarray(func(X + 1j * Y), dtype=float), tuple(domain))

    def with_boundary_of(self, other: "GridField") -> "GridField":
        """Interior of self, rim of other."""
        out = self.values.copy()
        b = other.values
        out[0, :], out[-1, :], out[:, 0], out[:, -1] = b[0, :], b[-1, :], b[:, 0], b[:, -1]
        return GridField(out, self.domain)


def sphere_k1(Z: np.ndarray, shift: float = 0.25 * math.log(2.0)) -> np.ndarray:
    """1/2 log(1 + |z|^2) + shift; solves K_{,z zbar} = exp(-4K) for the default shift."""
    return 0.5 * np.log1p(np.abs(Z) ** 2) + shift


@dataclass
class NewtonConfig:
    tol: float = 1e-10
    max_iters: int = 50
    armijo: float = 1e-4
    min_step: float = 2.0**-20


@dataclass
class NewtonReport:
    iterations: int = 0
    history: list = field(default_factory=list)
    converged: bool = False
    steps: list = field(default_factory=list)

    @property
    def final_residual(self) -> float:
        return self.history[-1] if self.history else float("nan")

    def to_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "converged": bool(self.converged),
            "final_residual": self.final_residual,
            "history": [float(v) for v in self.history],
            "steps": [float(v) for v in self.steps],
        }


def _laplacian(nx: int, ny: int, hx: float, hy: float) -> sp.csr_matrix:
    """5-point Laplacian on interior nodes (Dirichlet rim eliminated)."""
    ix, iy = nx - 2, ny - 2

    def d2(m, h):
        return sp.diags([np.ones(m - 1), -2 * np.ones(m), np.ones(m - 1)], [-1, 0, 1]) / h**2

    return (sp.kron(d2(ix, hx), sp.eye(iy)) + sp.kron(sp.eye(ix), d2(iy, hy))).tocsr()


def liouville_residual(K: np.ndarray, c: float, hx: float, hy: float) -> np.ndarray:
    """1/4 Delta_h K - c exp(-4K) on interior nodes."""
    lap = (K[2:, 1:-1] - 2 * K[1:-1, 1:-1] + K[:-2, 1:-1]) / hx**2 + (
        K[1:-1, 2:] - 2 * K[1:-1, 1:-1] + K[1:-1, :-2]
    ) / hy**2
    return 0.25 * lap - c * np.exp(-4 * K[1:-1, 1:-1])


def solve_liouville_k1(
    grid: GridField, c: float = 1.0, config: NewtonConfig | None = None, raise_on_failure: bool = False
) -> tuple[GridField, NewtonReport]:
    """Damped Newton for the discrete k = 1 equation.

    ``grid`` supplies the Dirichlet rim and the initial interior guess.  The
    rim is never modified.  Each step solves (1/4 Delta_h + 4c e^{-4K}) dK = -F
    by sparse LU; a backtracking line search enforces monotone decrease of the
    sup-norm residual.
    """
    config = config or NewtonConfig()
    if c < 0:
        raise ValueError("c must be non-negative")
    K = grid.values.copy()
    hx, hy = grid.hx, grid.hy
    L = 0.25 * _laplacian(grid.nx, grid.ny, hx, hy)
    report = NewtonReport()
    F = liouville_residual(K, c, hx, hy)
    res = float(np.max(np.abs(F)))
    report.history.append(res)
    while res >= config.tol and report.iterations < config.max_iters:
        J = L + sp.diags(4 * c * np.exp(-4 * K[1:-1, 1:-1]).ravel())
        delta = spla.spsolve(J.tocsc(), -F.ravel()).reshape(F.shape)
        t = 1.0
        while True:
            trial = K.copy()
            trial[1:-1, 1:-1] += t * delta
            Ft = liouville_residual(trial, c, hx, hy)
            rt = float(np.max(np.abs(Ft)))
            if rt <= (1 - config.armijo * t) * res or rt < config.tol:
                break
            t *= 0.5
            if t < config.min_step:
                break
        report.iterations += 1
        if t < config.min_step:
            # no descent possible at this precision
            break
        K, F, res = trial, Ft, rt
        report.history.append(res)
        report.steps.append(t)
    report.converged = bool(res < config.tol)
    if raise_on_failure and not report.converged:
        raise NonConvergence(f"residual {res:.3e} after {report.iterations} iterations")
    return GridField(K, grid.domain), report


def grid_jets(field: GridField, margin: int = 4, richardson: bool = True):
    """Order-4 Wirtinger jets at interior nodes by node-aligned stencils.

    Stencils of spacing ``h`` and ``2h`` are combined by Richardson
    extrapolation, so the outermost ``margin = 4`` nodes are skipped.
    Yields ``(i, j, jet)``.
    """
    reach = 4 if richardson else 2
    if margin < reach:
        raise ValueError(f"margin must be at least {reach}")
    if field.nx <= 2 * margin or field.ny <= 2 * margin:
        raise ValueError("margin exhausts grid")
    V = field.values
    nx, ny = V.shape
    I = np.arange(margin, nx - margin)
    Jn = np.arange(margin, ny - margin)

    stencil = {
        0: {0: 1.0},
        1: {-1: -0.5, 1: 0.5},
        2: {-1: 1.0, 0: -2.0, 1: 1.0},
        3: {-2: -0.5, -1: 1.0, 1: -1.0, 2: 0.5},
        4: {-2: 1.0, -1: -4.0, 0: 6.0, 1: -4.0, 2: 1.0},
    }

    def partial(a, b, step):
        acc = np.zeros((len(I), len(Jn)))
        for oa, wa in stencil[a].items():
            for ob, wb in stencil[b].items():
                acc += wa * wb * V[np.ix_(I + step * oa, Jn + step * ob)]
        return acc / ((step * field.hx) ** a * (step * field.hy) ** b)

    real = {}
    for r in range(5):
        for a in range(r + 1):
            d1 = partial(a, r - a, 1)
            if richardson:
                d2 = partial(a, r - a, 2)
                d1 = (4 * d1 - d2) / 3
            real[(a, r - a)] = d1

    for ii, i in enumerate(I):
        for jj, j in enumerate(Jn):
            tensors = []
            for r in range(5):
                R = np.zeros((2,) * r)
                for idx in np.ndindex(*R.shape):
                    a = sum(1 for t in idx if t == 0)
                    R[idx] = real[(a, r - a)][ii, jj]
                tensors.append(R)
            derivs = tuple(symmetrize(D, 1) for D in real_to_wirtinger(tensors, 1))
            yield i, j, WirtingerJet(1, 4, derivs)


@dataclass
class VerificationSummary:
    max_abs: float
    n_points: int
    tol: float
    worst: tuple | None = None
    samples: list = field(default_factory=list)

    @property
    def verdict(self) -> str:
        return "Einstein" if self.max_abs < self.tol else "NotEinstein"

    def to_dict(self) -> dict:
        return {
            "max_abs": self.max_abs,
            "n_points": self.n_points,
            "tol": self.tol,
            "verdict": self.verdict,
            "worst": list(self.worst) if self.worst is not None else None,
            "samples": self.samples,
        }


# ---------------------------------------------------------------------------
# radial reduction
# ---------------------------------------------------------------------------


@dataclass
class RadialProfile:
    k: int
    c: float
    s: np.ndarray
    u: np.ndarray
    report: NewtonReport | None = None

    def __post_init__(self):
        self._spline = make_interp_spline(self.s, self.u, k=5)

    @property
    def du(self) -> np.ndarray:
        return self._spline(self.s, 1)

    @property
    def ddu(self) -> np.ndarray:
        return self._spline(self.s, 2)

    def __call__(self, s, nu: int = 0):
        return self._spline(s, nu)

    @property
    def s_max(self) -> float:
        return float(self.s[-1])

    def potential(self) -> PotentialSpec:
        """K = u(|z|^2) via the spline as a blackbox field."""
        spline = self._spline

        def field(p: ChartPoint) -> float:
            z = np.asarray(p.z)
            return float(spline(float(np.sum(np.abs(z) ** 2))))

        return PotentialSpec.blackbox(self.k, field)


def radial_exact(k: int, c: float, u0: float, s: np.ndarray) -> np.ndarray:
    """Closed-form regular solution 1/2 log(1 + lam s) + u0.

    Substitution gives lam^k = 2^k c exp(-2(k+1) u0); with u0 = k log2 / (2(k+1))
    and c = 1 this is the shifted sphere potential.
    """
    lam = 2.0 * (c * math.exp(-2 * (k + 1) * u0)) ** (1.0 / k)
    return 0.5 * np.log1p(lam * np.asarray(s)) + u0


def sphere_shift(k: int) -> float:
    """Constant a with det Hess(1/2 log(1+|z|^2) + a) = exp(-2(k+1)(K))."""
    return k * math.log(2.0) / (2 * (k + 1))


def _radial_equations(u, s, k, c, u0, w0, d):
    up = (u[2:] - u[:-2]) / (2 * d)
    upp = (u[2:] - 2 * u[1:-1] + u[:-2]) / d**2
    si = s[1:-1]
    F = np.empty(len(u) - 1)
    F[0] = (-3 * u[0] + 4 * u[1] - u[2]) / (2 * d) - w0
    F[1:] = up ** (k - 1) * (up + si * upp) - c * np.exp(-2 * (k + 1) * u[1:-1])
    return F, up, upp


def _radial_jacobian(u, s, k, c, d, up, upp):
    N = len(u) - 1
    si = s[1:-1]
    dF_dup = (k - 1) * up ** (k - 2) * (up + si * upp) + up ** (k - 1) if k > 1 else np.ones_like(up)
    dF_dupp = up ** (k - 1) * si
    lower = -dF_dup / (2 * d) + dF_dupp / d**2  # coefficient of u_{i-1}
    diag = -2 * dF_dupp / d**2 + 2 * (k + 1) * c * np.exp(-2 * (k + 1) * u[1:-1])
    upper = dF_dup / (2 * d) + dF_dupp / d**2  # coefficient of u_{i+1}
    rows, cols, vals = [0, 0], [0, 1], [4 / (2 * d), -1 / (2 * d)]
    for r in range(1, N):
        # unknown u_m lives in column m - 1
        if r >= 2:
            rows.append(r), cols.append(r - 2), vals.append(lower[r - 1])
        rows.append(r), cols.append(r - 1), vals.append(diag[r - 1])
        rows.append(r), cols.append(r), vals.append(upper[r - 1])
    return sp.csc_matrix((vals, (rows, cols)), shape=(N, N))


def _march(s, k, c, u0, w0, d):
    """Initial guess: solve the scheme node by node on the branch u' > 0."""
    N = len(s) - 1
    u = np.empty(N + 1)
    u[0] = u0
    # nodes 1 and 2 from the derivative condition and the equation at node 1
    a, b = u0 + w0 * d, u0 + 2 * w0 * d
    for _ in range(50):
        F1 = (-3 * u0 + 4 * a - b) / (2 * d) - w0
        up = (b - u0) / (2 * d)
        upp = (b - 2 * a + u0) / d**2
        F2 = up ** (k - 1) * (up + s[1] * upp) - c * math.exp(-2 * (k + 1) * a)
        dF2_dup = (k - 1) * up ** (k - 2) * (up + s[1] * upp) + up ** (k - 1) if k > 1 else 1.0
        dF2_dupp = up ** (k - 1) * s[1]
        Jm = np.array(
            [
                [4 / (2 * d), -1 / (2 * d)],
                [-2 * dF2_dupp / d**2 + 2 * (k + 1) * c * math.exp(-2 * (k + 1) * a), dF2_dup / (2 * d) + dF2_dupp / d**2],
            ]
        )
        da, db = np.linalg.solve(Jm, [-F1, -F2])
        a, b = a + da, b + db
        if abs(da) + abs(db) < 1e-15 * (1 + abs(a)):
            break
    u[1], u[2] = a, b
    for i in range(2, N):
        # equation at node i determines u_{i+1}
        x = 2 * u[i] - u[i - 1]
        for _ in range(60):
            up = (x - u[i - 1]) / (2 * d)
            upp = (x - 2 * u[i] + u[i - 1]) / d**2
            F = up ** (k - 1) * (up + s[i] * upp) - c * math.exp(-2 * (k + 1) * u[i])
            dF_dup = (k - 1) * up ** (k - 2) * (up + s[i] * upp) + up ** (k - 1) if k > 1 else 1.0
            dF = dF_dup / (2 * d) + up ** (k - 1) * s[i] / d**2
            step = -F / dF
            x += step
            if abs(step) < 1e-15 * (1 + abs(x)):
                break
        if x <= u[i - 1]:
            raise InadmissibleProfile(f"u' <= 0 reached at s = {s[i]:.6g}")
        u[i + 1] = x
    return u


def solve_radial(
    k: int,
    c: float = 1.0,
    s_max: float = 3.0,
    n_nodes: int = 4001,
    u0: float | None = None,
    config: NewtonConfig | None = None,
) -> RadialProfile:
    """Solve (u')^(k-1)(u' + s u'') = c exp(-2(k+1)u) with u(0) = u0, u regular at 0.

    Regularity fixes u'(0) through (u'(0))^k = c exp(-2(k+1) u0), imposed with
    a one-sided second-order stencil at s = 0.  The remaining unknowns satisfy
    central-difference collocation at interior nodes; the system is solved by
    Newton from a node-by-node marching guess.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if c <= 0:
        raise ValueError("c must be positive")
    if n_nodes < 8:
        raise ValueError("need at least 8 nodes")
    config = config or NewtonConfig(tol=1e-9)
    u0 = sphere_shift(k) if u0 is None else float(u0)
    s = np.linspace(0.0, s_max, n_nodes)
    d = s[1] - s[0]
    w0 = (c * math.exp(-2 * (k + 1) * u0)) ** (1.0 / k)
    u = _march(s, k, c, u0, w0, d)

    # roundoff floor of the s u'' stencil; finer grids cannot reach a fixed tol
    floor = 16 * np.finfo(float).eps * (1 + float(np.max(np.abs(u)))) * s_max / d**2
    tol = max(config.tol, floor)
    report = NewtonReport()
    F, up, upp = _radial_equations(u, s, k, c, u0, w0, d)
    res = float(np.max(np.abs(F)))
    report.history.append(res)
    while report.iterations < config.max_iters:
        if res < tol:
            break
        J = _radial_jacobian(u, s, k, c, d, up, upp)
        delta = spla.spsolve(J, -F)
        trial = u.copy()
        trial[1:] += delta
        Ft, up_t, upp_t = _radial_equations(trial, s, k, c, u0, w0, d)
        rt = float(np.max(np.abs(Ft)))
        report.iterations += 1
        if not rt < res:
            break
        u, F, up, upp, res = trial, Ft, up_t, upp_t, rt
        report.history.append(res)
        report.steps.append(1.0)
    report.converged = bool(res < tol)
    if np.any(np.diff(u) <= 0):
        raise InadmissibleProfile("u' <= 0 in converged profile")
    if not report.converged:
        raise NonConvergence(f"radial Newton stalled at residual {res:.3e}")
    return RadialProfile(k, c, s, u, report)


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------


def verify_solution(field, k: int = 1, tol: float = FD_TOL, **kw) -> VerificationSummary:
    """Einstein residual of a discrete solution via finite-difference jets.

    For a :class:`GridField` every node outside a 4-node margin is checked; for
    a :class:`RadialProfile` the field is sampled at ``radii`` (values of
    s = |z|^2) along a fixed unit direction in C^k.
    """
    if isinstance(field, GridField):
        if k != 1:
            raise ValueError("grid solutions are k = 1")
        margin = kw.get("margin", 4)
        worst, wval, count = None, 0.0, 0
        for i, j, jet in grid_jets(field, margin=margin):
            try:
                r = einstein_residual(jet, 1, tol).max_abs
            except ValueError:
                r = float("inf")
            count += 1
            if r > wval or worst is None:
                worst, wval = (int(i), int(j)), r
        return VerificationSummary(wval, count, tol, worst)
    if isinstance(field, RadialProfile):
        radii = kw.get("radii", (0.5, 1.0, 2.0))
        h = kw.get("h", 2e-2)
        spec = field.potential()
        direction = np.ones(field.k, dtype=complex) * np.exp(0.3j)
        direction /= np.linalg.norm(direction)
        worst, wval, samples = None, 0.0, []
        for s_val in radii:
            p = ChartPoint(0.0, tuple(direction * math.sqrt(s_val)))
            r = einstein_residual(fd_jet(spec, p, 4, h), field.k, tol).max_abs
            samples.append({"s": s_val, "residual": r})
            if r > wval or worst is None:
                worst, wval = (s_val,), r
        return VerificationSummary(wval, len(radii), tol, worst, samples)
    raise TypeError("field must be a GridField or RadialProfile")
