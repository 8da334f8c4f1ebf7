"""The Sasakian structure (phi, xi, eta, g) generated by a potential.

Components live in the complexified holonomic basis ``(dx, dz^1..dz^k,
dzbar^1..dzbar^k)``: basis index 0 is x, ``1 + m`` is z^m and ``1 + k + m`` is
zbar^m.  Conjugation swaps ``1 + m`` and ``1 + k + m`` and fixes 0; a real
tensor T satisfies ``T[sigma(idx)] == conj(T[idx])``.

Exterior-derivative convention.  ``deta_form`` returns the components
``w_ab = d_a eta_b - d_b eta_a`` of the 2-form deta, so that
``deta(X, Y) = X^a Y^b w_ab`` is the bracket formula
``X eta(Y) - Y eta(X) - eta([X, Y])``.  The normality condition
``N_phi + deta (x) xi = 0`` holds with this value, while the contact condition
``deta(X, Y) = g(phi X, Y)`` holds with half of it (the ``1/2`` wedge
convention).  :func:`axiom_residuals` uses each in its own place.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .jets import ChartPoint, PotentialSpec, WirtingerJet, check_step, jet_of, wirtinger_matrix

BASIS_CONVENTION = "dx,dz^1..dz^k,dzbar^1..dzbar^k;v1"
DEFAULT_PROBE_SEED = 20240117


class HessianNotPositiveDefinite(ValueError):
    """The complex Hessian K_{,m nbar} is not positive definite."""


class SingularHessian(HessianNotPositiveDefinite):
    """The complex Hessian is (numerically) degenerate."""


def dim(k: int) -> int:
    return 2 * k + 1


def conj_perm(k: int) -> np.ndarray:
    """Basis permutation induced by complex conjugation."""
    return np.array([0] + [1 + k + m for m in range(k)] + [1 + m for m in range(k)])


def basis_labels(k: int) -> list[str]:
    return ["x"] + [f"z{m + 1}" for m in range(k)] + [f"zb{m + 1}" for m in range(k)]


def conjugate_tensor(T: np.ndarray, k: int) -> np.ndarray:
    """Complex conjugate with every index swapped holomorphic <-> antiholomorphic."""
    s = conj_perm(k)
    return np.conj(T[np.ix_(*([s] * T.ndim))])


def reality_defect(T: np.ndarray, k: int) -> float:
    return float(np.max(np.abs(conjugate_tensor(T, k) - T))) if T.size else 0.0


def check_hessian(H: np.ndarray) -> np.ndarray:
    """Cholesky factor of H, raising when H is not positive definite."""
    k = H.shape[0]
    if not np.all(np.isfinite(H)):
        raise HessianNotPositiveDefinite("Hessian has non-finite entries")
    evals = np.linalg.eigvalsh(0.5 * (H + H.conj().T))
    scale = max(float(np.trace(H).real) / k, 0.0)
    if evals.min() < -1e-10 * max(scale, 1e-300) or (scale <= 0):
        raise HessianNotPositiveDefinite(f"Hessian eigenvalues {evals} are not all positive")
    try:
        L = np.linalg.cholesky(H)
    except np.linalg.LinAlgError as exc:
        raise SingularHessian("Cholesky factorization of the Hessian failed") from exc
    piv = np.diag(L).real ** 2
    if piv.min() <= 1e-10 * scale:
        raise SingularHessian(f"Hessian pivots {piv} are degenerate")
    return L


@dataclass(frozen=True)
class StructurePack:
    k: int
    eta: np.ndarray
    g: np.ndarray
    g_inv: np.ndarray
    kappa: np.ndarray  # kappa[j, l] = kappa^{j lbar}
    phi: np.ndarray  # phi[mu, nu] = phi^mu_nu
    xi: np.ndarray

    @property
    def n(self) -> int:
        return dim(self.k)


def build_structure(jet: WirtingerJet) -> StructurePack:
    """Build eta, g, g^-1, kappa, phi, xi from an order >= 2 jet."""
    jet.require(2)
    k = jet.k
    n = dim(k)
    H = jet.hess
    check_hessian(H)
    Kz, Kzb = jet.grad, jet.grad_bar
    Z = slice(1, 1 + k)
    ZB = slice(1 + k, n)

    eta = np.zeros(n, dtype=complex)
    eta[0] = 1.0
    eta[Z] = 1j * Kz
    eta[ZB] = -1j * Kzb

    g = np.zeros((n, n), dtype=complex)
    g[0, 0] = 1.0
    g[0, Z] = g[Z, 0] = 1j * Kz
    g[0, ZB] = g[ZB, 0] = -1j * Kzb
    g[Z, Z] = -np.outer(Kz, Kz)
    g[ZB, ZB] = -np.outer(Kzb, Kzb)
    g[Z, ZB] = H + np.outer(Kz, Kzb)
    g[ZB, Z] = g[Z, ZB].T

    # kappa^{j lbar} K_{,i lbar} = delta^j_i
    kappa = np.linalg.inv(H.T)
    g_inv = np.zeros((n, n), dtype=complex)
    g_inv[0, 0] = 1.0 + 2.0 * np.einsum("i,j,ij->", Kz, Kzb, kappa)
    g_inv[0, Z] = g_inv[Z, 0] = 1j * kappa @ Kzb
    g_inv[0, ZB] = g_inv[ZB, 0] = -1j * kappa.T @ Kz
    g_inv[Z, ZB] = kappa
    g_inv[ZB, Z] = kappa.T

    phi = np.zeros((n, n), dtype=complex)
    phi[Z, Z] = -1j * np.eye(k)
    phi[ZB, ZB] = 1j * np.eye(k)
    phi[0, Z] = -Kz
    phi[0, ZB] = -Kzb

    xi = np.zeros(n, dtype=complex)
    xi[0] = 1.0
    return StructurePack(k, eta, g, g_inv, kappa, phi, xi)


def deta_form(jet: WirtingerJet) -> np.ndarray:
    """Components w_ab = d_a eta_b - d_b eta_a of deta."""
    jet.require(2)
    k = jet.k
    n = dim(k)
    D2 = jet.derivs[2]
    E = np.zeros((n, n), dtype=complex)  # E[a, b] = d_a eta_b
    E[1:, 1 : 1 + k] = 1j * D2[:, :k]
    E[1:, 1 + k :] = -1j * D2[:, k:]
    return E - E.T


def phi_derivative(jet: WirtingerJet) -> np.ndarray:
    """dphi[nu, mu, a] = d_nu phi^mu_a."""
    jet.require(2)
    k = jet.k
    n = dim(k)
    out = np.zeros((n, n, n), dtype=complex)
    out[1:, 0, 1:] = -jet.derivs[2]
    return out


def default_probes(k: int, seed: int = DEFAULT_PROBE_SEED, n_random: int = 8) -> np.ndarray:
    """Canonical basis followed by seeded random complex vectors."""
    n = dim(k)
    rng = np.random.default_rng(seed)
    rand = rng.standard_normal((n_random, n)) + 1j * rng.standard_normal((n_random, n))
    return np.vstack([np.eye(n, dtype=complex), rand])


def _form2(omega, X, Y):
    # X^a Y^b w_ab written as a difference so that (X, X) gives exactly 0
    return 0.5 * (X @ omega @ Y - Y @ omega @ X)


def nijenhuis_vectors(pack: StructurePack, jet: WirtingerJet, X, Y) -> np.ndarray:
    """N_phi(X, Y) + deta(X, Y) xi for constant-coefficient fields X, Y."""
    phi = pack.phi
    dphi = phi_derivative(jet)
    U, V = phi @ X, phi @ Y
    dU = np.einsum("nma,a->nm", dphi, X)  # d_nu (phi X)^mu
    dV = np.einsum("nma,a->nm", dphi, Y)
    br_UV = U @ dV - V @ dU
    br_UY = -(Y @ dU)  # [phi X, Y], Y constant
    br_XV = X @ dV  # [X, phi Y], X constant
    N = br_UV - phi @ br_UY - phi @ br_XV  # phi^2 [X, Y] = 0
    return N + _form2(deta_form(jet), X, Y) * pack.xi


def nijenhuis_residual(spec: PotentialSpec, p: ChartPoint, probes=None) -> float:
    """max over probe pairs of |N_phi(X, Y) + deta(X, Y) xi|."""
    jet = jet_of(spec, p, 3)
    pack = build_structure(jet)
    probes = default_probes(spec.k) if probes is None else np.asarray(probes, dtype=complex)
    res = 0.0
    for X, Y in itertools.product(probes, repeat=2):
        res = max(res, float(np.max(np.abs(nijenhuis_vectors(pack, jet, X, Y)))))
    return res


@dataclass(frozen=True)
class AxiomResiduals:
    axiom1: float
    axiom2: float
    axiom3: float
    axiom4: float
    axiom5: float
    axiom6: float

    def as_dict(self) -> dict:
        return {f"axiom{i}": getattr(self, f"axiom{i}") for i in range(1, 7)}

    def max(self) -> float:
        return max(self.as_dict().values())


def axiom_residuals(pack: StructurePack, jet: WirtingerJet, probes=None) -> AxiomResiduals:
    """Residuals of the six defining conditions of a Sasakian manifold."""
    probes = default_probes(pack.k) if probes is None else np.asarray(probes, dtype=complex)
    g, phi, eta, xi = pack.g, pack.phi, pack.eta, pack.xi
    omega = deta_form(jet)
    r1 = r3 = r4 = r5 = r6 = 0.0
    for X in probes:
        r1 = max(r1, float(np.max(np.abs(phi @ (phi @ X) + X - (eta @ X) * xi))))
        r4 = max(r4, float(abs(xi @ g @ X - eta @ X)))
    for X, Y in itertools.product(probes, repeat=2):
        pX, pY = phi @ X, phi @ Y
        r3 = max(r3, float(abs(pX @ g @ pY - X @ g @ Y + (eta @ X) * (eta @ Y))))
        # contact condition uses the 1/2 wedge convention
        r6 = max(r6, float(abs(0.5 * _form2(omega, X, Y) - pX @ g @ Y)))
        r5 = max(r5, float(np.max(np.abs(nijenhuis_vectors(pack, jet, X, Y)))))
    r2 = float(abs(eta @ xi - 1.0))
    return AxiomResiduals(r1, r2, r3, r4, r5, r6)


# ---------------------------------------------------------------------------
# null frame
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HoloFrame:
    """mu^i = f[i, j] dz^j with sum_l f[l, j] conj(f[l, i]) = K_{,j ibar}."""

    f: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return self.f.T @ self.f.conj()


def _frame_matrix(H: np.ndarray) -> np.ndarray:
    check_hessian(H)
    rev = H[::-1, ::-1]
    L = np.linalg.cholesky(rev)
    M = L[::-1, ::-1]  # H = M M^H, M upper triangular
    return M.T


def frame_from_hessian(jet: WirtingerJet) -> HoloFrame:
    """Lower-triangular frame with positive diagonal solving H = f^T conj(f)."""
    return HoloFrame(_frame_matrix(jet.hess))


def _wedge(a: dict, b: dict) -> dict:
    out: dict = {}
    for ia, ca in a.items():
        for ib, cb in b.items():
            if set(ia) & set(ib):
                continue
            idx = ia + ib
            perm = np.argsort(idx, kind="stable")
            sign = _perm_sign(perm)
            key = tuple(sorted(idx))
            out[key] = out.get(key, 0) + sign * ca * cb
    return out


def _perm_sign(perm) -> int:
    perm = list(perm)
    sign = 1
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


def frame_residuals(spec: PotentialSpec, p: ChartPoint, h: float = 1e-3) -> tuple[float, float]:
    """(frobenius, deta) residuals of the null frame at ``p``.

    frobenius: max coefficient of dmu^i ^ mu^1 ^ ... ^ mu^k, with dmu from
    central differences of the frame over (Re z, Im z).
    deta: max |deta + 2i sum_l mu^l ^ conj(mu^l)| over components.
    """
    check_step(h, 1)
    k = spec.k
    jet = jet_of(spec, p, 2)
    f = _frame_matrix(jet.hess)
    u0 = p.real_coords

    def frame_at(u):
        return _frame_matrix(jet_of(spec, ChartPoint.from_real(p.x, u), 2).hess)

    dreal = np.zeros((2 * k, k, k), dtype=complex)
    for j in range(2 * k):
        e = np.zeros(2 * k)
        e[j] = 1.0
        d1 = (frame_at(u0 + h * e) - frame_at(u0 - h * e)) / (2 * h)
        d2 = (frame_at(u0 + 0.5 * h * e) - frame_at(u0 - 0.5 * h * e)) / h
        dreal[j] = (4 * d2 - d1) / 3
    dw = np.tensordot(wirtinger_matrix(k), dreal, axes=([1], [0]))
    # forms use basis indices: 0 = x, 1 + a = w_a
    mus = [{(1 + j,): f[i, j] for j in range(k)} for i in range(k)]
    top: dict = {(): 1.0}
    for mu in mus:
        top = _wedge(top, mu)
    frob = 0.0
    for i in range(k):
        dmu: dict = {}
        for a in range(2 * k):
            for j in range(k):
                for key, c in _wedge({(1 + a,): dw[a, i, j]}, {(1 + j,): 1.0}).items():
                    dmu[key] = dmu.get(key, 0) + c
        form = _wedge(dmu, top)
        if form:
            frob = max(frob, max(abs(v) for v in form.values()))

    n = dim(k)
    omega = deta_form(jet)
    frame_form = np.zeros((n, n), dtype=complex)
    block = np.einsum("lj,li->ji", f, f.conj())  # mu^l ^ conj(mu^l) on dz^j ^ dzbar^i
    frame_form[1 : 1 + k, 1 + k :] = block
    frame_form[1 + k :, 1 : 1 + k] = -block.T
    deta = float(np.max(np.abs(omega + 2j * frame_form)))
    return float(frob), deta


def killing_residual(spec: PotentialSpec, p: ChartPoint, h: float = 1e-3) -> float:
    """|L_xi g| = |d_x g| by central differences in x."""
    gp = build_structure(jet_of(spec, p.shifted(dx=h), 2)).g
    gm = build_structure(jet_of(spec, p.shifted(dx=-h), 2)).g
    return float(np.max(np.abs(gp - gm)) / (2 * h))
