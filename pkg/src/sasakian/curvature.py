"""Closed-form connection, curvature and Ricci tensors of a Sasakian metric.

Index conventions follow :mod:`sasakian.structure`.  The connection 1-forms
are ``Gamma^mu_nu = Gamma[mu, nu, rho] dy^rho`` and the curvature 2-forms
``Omega^mu_nu = 1/2 R[mu, nu, rho, sigma] dy^rho ^ dy^sigma``; a 2-form
written as ``sum_{a,b} X_ab dy^a ^ dy^b`` therefore contributes
``X_ab - X_ba`` to ``R[..., a, b]``.  Ricci is ``R_{nu sigma} = R^mu_{nu mu sigma}``.

Only the blocks with an unbarred (x or z) upper index are written out; the
barred blocks follow from reality.  Oracles (:func:`christoffel_numeric`,
:func:`riemann_numeric`) differentiate the metric itself and share nothing
with the closed forms except :func:`sasakian.structure.build_structure`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .jets import ChartPoint, PotentialSpec, WirtingerJet, check_step, jet_of, wirtinger_matrix
from .structure import StructurePack, build_structure, check_hessian, conjugate_tensor, dim


def _kappa(jet: WirtingerJet) -> np.ndarray:
    check_hessian(jet.hess)
    return np.linalg.inv(jet.hess.T)


def _dkappa(jet: WirtingerJet, kappa: np.ndarray) -> np.ndarray:
    """dk[a, j, l] = d_a kappa^{j lbar} over all 2k Wirtinger variables."""
    k = jet.k
    # d_a (H^T)[l, p] = K_{,p lbar a}
    dHT = np.einsum("pla->alp", jet.derivs[3][:k, k:, :])
    return -np.einsum("jl,alp,pm->ajm", kappa, dHT, kappa)


@dataclass(frozen=True)
class ABCPack:
    """C^i_{jm}, B^i_{jm}, A_{jm} and their first derivatives.

    ``dC[a, i, j, m]`` etc. are derivatives along Wirtinger variable ``a``.
    """

    C: np.ndarray
    B: np.ndarray
    A: np.ndarray
    dC: np.ndarray | None = None
    dB: np.ndarray | None = None
    dA: np.ndarray | None = None


def abc_functions(jet: WirtingerJet) -> ABCPack:
    jet.require(3)
    k = jet.k
    kappa = _kappa(jet)
    D1, D2, D3 = jet.derivs[1], jet.derivs[2], jet.derivs[3]
    Kz = D1[:k]
    delta = np.eye(k)
    # C^i_{jm} = kappa^{i lbar} K_{,lbar j m}
    C = np.einsum("il,ljm->ijm", kappa, D3[k:, :k, :k])
    B = C + np.einsum("im,j->ijm", delta, Kz) + np.einsum("ij,m->ijm", delta, Kz)
    A = np.einsum("ljm,l->jm", C, Kz) + 2 * np.outer(Kz, Kz) - D2[:k, :k]
    if jet.order < 4:
        return ABCPack(C, B, A)
    D4 = jet.derivs[4]
    dk = _dkappa(jet, kappa)
    dC = np.einsum("ail,ljm->aijm", dk, D3[k:, :k, :k]) + np.einsum(
        "il,ljma->aijm", kappa, D4[k:, :k, :k, :]
    )
    dKz = D2[:, :k]  # dKz[a, j] = d_a K_{,j}
    dB = dC + np.einsum("im,aj->aijm", delta, dKz) + np.einsum("ij,am->aijm", delta, dKz)
    dA = (
        np.einsum("aljm,l->ajm", dC, Kz)
        + np.einsum("ljm,al->ajm", C, dKz)
        + 2 * np.einsum("aj,m->ajm", dKz, Kz)
        + 2 * np.einsum("j,am->ajm", Kz, dKz)
        - np.einsum("jma->ajm", D3[:k, :k, :])
    )
    return ABCPack(C, B, A, dC, dB, dA)


def fill_by_reality(T: np.ndarray, k: int, upper_unbarred: bool = True) -> np.ndarray:
    """Fill the blocks with a barred first index from the unbarred ones."""
    out = T.copy()
    conj = conjugate_tensor(T, k)
    bar = slice(1 + k, dim(k))
    out[bar] = conj[bar]
    return out


def christoffel_closed(jet: WirtingerJet) -> np.ndarray:
    """Gamma[mu, nu, rho] transcribed from the closed-form connection 1-forms."""
    jet.require(3)
    k = jet.k
    n = dim(k)
    abc = abc_functions(jet)
    Kz, Kzb = jet.grad, jet.grad_bar
    X = 0
    Z = np.arange(1, 1 + k)
    ZB = np.arange(1 + k, n)
    G = np.zeros((n, n, n), dtype=complex)
    # Gamma^x_x = -dK
    G[X, X, Z] = -Kz
    G[X, X, ZB] = -Kzb
    # Gamma^x_j = -K_j dx - i A_jm dz^m ; Gamma^x_jbar = conj
    G[X, Z, X] = -Kz
    G[X, np.ix_(Z, Z)[0], np.ix_(Z, Z)[1]] = -1j * abc.A
    G[X, ZB, X] = -Kzb
    G[X, np.ix_(ZB, ZB)[0], np.ix_(ZB, ZB)[1]] = 1j * abc.A.conj()
    for i in range(k):
        zi = 1 + i
        # Gamma^i_x = -i dz^i
        G[zi, X, zi] = -1j
        # Gamma^i_j = -i delta dx - delta K_lbar dzbar^l + B^i_jl dz^l
        G[zi, zi, X] += -1j
        G[zi, zi, ZB] += -Kzb
        G[zi, np.ix_(Z, Z)[0], np.ix_(Z, Z)[1]] += abc.B[i]
        # Gamma^i_jbar = -K_jbar dz^i
        G[zi, ZB, zi] += -Kzb
    return fill_by_reality(G, k)


def _add_wedge(R2: np.ndarray, a, b, coef) -> None:
    """Add coef * dy^a ^ dy^b to the antisymmetric component array R2."""
    R2[a, b] += coef
    R2[b, a] -= coef


def riemann_closed(jet: WirtingerJet) -> np.ndarray:
    """R[mu, nu, rho, sigma] transcribed from the closed-form curvature 2-forms."""
    jet.require(4)
    k = jet.k
    n = dim(k)
    abc = abc_functions(jet)
    D2 = jet.derivs[2]
    Kz, Kzb = jet.grad, jet.grad_bar
    H = jet.hess  # H[m, n] = K_{,m nbar}
    A, B = abc.A, abc.B
    dA, dB = abc.dA, abc.dB
    zb = lambda m: 1 + k + m  # noqa: E731
    zz = lambda m: 1 + m  # noqa: E731
    delta = np.eye(k)
    R = np.zeros((n, n, n, n), dtype=complex)

    # Omega^x_x
    for l in range(k):
        _add_wedge(R[0, 0], 0, zz(l), 1j * Kz[l])
        _add_wedge(R[0, 0], 0, zb(l), -1j * Kzb[l])
    for j in range(k):
        # Omega^x_j
        Rxj = R[0, zz(j)]
        for l in range(k):
            _add_wedge(Rxj, 0, zz(l), -Kz[j] * Kz[l])
            _add_wedge(Rxj, 0, zb(l), H[j, l] + Kz[j] * Kzb[l])
            for m in range(k):
                _add_wedge(Rxj, zz(l), zb(m), 1j * dA[k + m, j, l])
    for i in range(k):
        # Omega^i_x
        Rix = R[zz(i), 0]
        for j in range(k):
            _add_wedge(Rix, 0, zz(j), -delta[i, j])
            for l in range(k):
                _add_wedge(Rix, zz(j), zz(l), 1j * delta[i, j] * Kz[l])
        for l in range(k):
            _add_wedge(Rix, zb(l), zz(i), 1j * Kzb[l])
        for j in range(k):
            # Omega^i_j
            Rij = R[zz(i), zz(j)]
            for l in range(k):
                _add_wedge(Rij, 0, zz(l), -1j * delta[i, l] * Kz[j])
            for nn, l in itertools.product(range(k), repeat=2):
                coef = (
                    np.dot(B[i, :, nn], B[:, j, l])
                    - dB[l, i, j, nn]
                    + A[j, nn] * delta[i, l]
                )
                _add_wedge(Rij, zz(nn), zz(l), coef)
                coef = Kz[j] * Kzb[l] * delta[i, nn] - delta[i, j] * D2[nn, k + l] - dB[k + l, i, j, nn]
                _add_wedge(Rij, zz(nn), zb(l), coef)
            # Omega^i_jbar
            Rijb = R[zz(i), zb(j)]
            for l in range(k):
                _add_wedge(Rijb, 0, zz(l), 1j * delta[i, l] * Kzb[j])
            for nn, l in itertools.product(range(k), repeat=2):
                _add_wedge(Rijb, zz(nn), zz(l), (D2[k + j, l] + Kzb[j] * Kz[l]) * delta[i, nn])
                _add_wedge(Rijb, zz(nn), zb(l), -delta[i, nn] * Kzb[j] * Kzb[l])
    # Omega^x_jbar = conj(Omega^x_j) and the barred upper blocks
    conj = conjugate_tensor(R, k)
    R[0, 1 + k :] = conj[0, 1 + k :]
    R[1 + k :] = conj[1 + k :]
    return R


def logdet_hessian_derivs(jet: WirtingerJet) -> np.ndarray:
    """Second derivatives of log det(K_{,m nbar}) over all Wirtinger pairs.

    Expands det by the Leibniz permutation sum so that no matrix inverse
    enters; used as the independent side of the trace identity.
    """
    jet.require(4)
    k = jet.k
    H = jet.hess
    dH = np.moveaxis(jet.derivs[3][:k, k:, :], 2, 0)  # dH[a, p, q]
    ddH = np.moveaxis(jet.derivs[4][:k, k:, :, :], (2, 3), (0, 1))  # ddH[a, b, p, q]
    nw = 2 * k
    det = 0j
    d1 = np.zeros(nw, dtype=complex)
    d2 = np.zeros((nw, nw), dtype=complex)
    for perm in itertools.permutations(range(k)):
        sign = _perm_parity(perm)
        entries = [H[p, perm[p]] for p in range(k)]
        det += sign * np.prod(entries)
        for p in range(k):
            rest_p = np.prod([entries[m] for m in range(k) if m != p])
            d1 += sign * dH[:, p, perm[p]] * rest_p
            d2 += sign * ddH[:, :, p, perm[p]] * rest_p
            for q in range(k):
                if q == p:
                    continue
                rest_pq = np.prod([entries[m] for m in range(k) if m not in (p, q)])
                d2 += sign * np.outer(dH[:, p, perm[p]], dH[:, q, perm[q]]) * rest_pq
    return d2 / det - np.outer(d1, d1) / det**2


def _perm_parity(perm) -> int:
    inv = sum(1 for a, b in itertools.combinations(range(len(perm)), 2) if perm[a] > perm[b])
    return -1 if inv % 2 else 1


def trace_route(jet: WirtingerJet) -> np.ndarray:
    """(kappa^{mbar l} K_{,mbar l ibar})_{,j} as a k x k matrix [i, j]."""
    jet.require(4)
    k = jet.k
    kappa = _kappa(jet)
    dk = _dkappa(jet, kappa)
    D3, D4 = jet.derivs[3], jet.derivs[4]
    # kappa^{mbar l} = kappa^{l mbar} = kappa[l, m]
    T3 = D3[k:, :k, k:]  # [m, l, i] = K_{,mbar l ibar}
    T4 = D4[k:, :k, k:, :k]  # [m, l, i, j]
    return np.einsum("jlm,mli->ij", dk[:k], T3) + np.einsum("lm,mlij->ij", kappa, T4)


def logdet_trace_identity(jet: WirtingerJet) -> float:
    k = jet.k
    right = logdet_hessian_derivs(jet)[k:, :k]  # [i, j] = (log det)_{,ibar j}
    return float(np.max(np.abs(trace_route(jet) - right)))


def ricci_closed(jet: WirtingerJet) -> np.ndarray:
    """Closed-form Ricci tensor R[nu, sigma]."""
    jet.require(4)
    k = jet.k
    n = dim(k)
    Kz, Kzb = jet.grad, jet.grad_bar
    Z = slice(1, 1 + k)
    ZB = slice(1 + k, n)
    ld = logdet_hessian_derivs(jet)[k:, :k]  # C^mbar_{mbar ibar, j}
    Ric = np.zeros((n, n), dtype=complex)
    Ric[0, 0] = 2 * k
    Ric[0, Z] = Ric[Z, 0] = 2j * k * Kz
    Ric[0, ZB] = Ric[ZB, 0] = -2j * k * Kzb
    Ric[Z, Z] = -2 * k * np.outer(Kz, Kz)
    Ric[ZB, ZB] = -2 * k * np.outer(Kzb, Kzb)
    Rbz = 2 * k * np.outer(Kzb, Kz) - 2 * jet.derivs[2][k:, :k] - ld  # [ibar, j]
    Ric[ZB, Z] = Rbz
    Ric[Z, ZB] = Rbz.T
    return Ric


def ricci_from_riemann(R: np.ndarray) -> np.ndarray:
    return np.einsum("mnms->ns", R)


@dataclass(frozen=True)
class CurvatureTensors:
    riemann: np.ndarray
    ricci: np.ndarray
    scalar: float
    weyl: np.ndarray


def weyl_tensor(riemann: np.ndarray, ricci: np.ndarray, g: np.ndarray, g_inv: np.ndarray):
    """Weyl tensor W^a_{bcd} and its max-norm, for dimension n = len(g)."""
    n = g.shape[0]
    if n == 3:
        return np.zeros_like(riemann), 0.0
    if n < 3:
        raise ValueError("Weyl tensor needs dimension >= 3")
    Rl = np.einsum("ae,ebcd->abcd", g, riemann)
    scal = np.einsum("bd,bd->", g_inv, ricci)
    gR = (
        np.einsum("ac,bd->abcd", g, ricci)
        - np.einsum("ad,bc->abcd", g, ricci)
        - np.einsum("bc,ad->abcd", g, ricci)
        + np.einsum("bd,ac->abcd", g, ricci)
    )
    gg = np.einsum("ac,bd->abcd", g, g) - np.einsum("ad,bc->abcd", g, g)
    Wl = Rl - gR / (n - 2) + scal * gg / ((n - 1) * (n - 2))
    W = np.einsum("ae,ebcd->abcd", g_inv, Wl)
    return W, float(np.max(np.abs(W)))


def weyl_traces(W: np.ndarray, g_inv: np.ndarray) -> float:
    """Max over the independent contractions of W^a_{bcd}."""
    t1 = np.einsum("abad->bd", W)
    t2 = np.einsum("abca->bc", W)
    t3 = np.einsum("ae,ebcd,bc->ad", np.eye(len(W)), W, g_inv)  # W^a_b^b_d
    return float(max(np.max(np.abs(t1)), np.max(np.abs(t2)), np.max(np.abs(t3))))


def curvature_closed(jet: WirtingerJet, pack: StructurePack | None = None) -> CurvatureTensors:
    pack = build_structure(jet) if pack is None else pack
    R = riemann_closed(jet)
    Ric = ricci_closed(jet)
    scal = complex(np.einsum("ab,ab->", pack.g_inv, Ric))
    W, _ = weyl_tensor(R, Ric, pack.g, pack.g_inv)
    return CurvatureTensors(R, Ric, float(scal.real), W)


# ---------------------------------------------------------------------------
# finite-difference oracles
# ---------------------------------------------------------------------------


def _complex_gradient(func: Callable[[ChartPoint], np.ndarray], p: ChartPoint, h: float, richardson: bool = True):
    """d_rho func over basis (x, z, zbar) from central differences in (x, Re z, Im z)."""
    check_step(h / 2 if richardson else h, 1)
    k = p.k
    u0 = p.real_coords

    def central(j, step):
        if j == 0:
            plus, minus = p.shifted(dx=step), p.shifted(dx=-step)
        else:
            e = np.zeros(2 * k)
            e[j - 1] = step
            plus = ChartPoint.from_real(p.x, u0 + e)
            minus = ChartPoint.from_real(p.x, u0 - e)
        return (func(plus) - func(minus)) / (2 * step)

    real = []
    for j in range(2 * k + 1):
        d = central(j, h)
        if richardson:
            d = (4 * central(j, h / 2) - d) / 3
        real.append(d)
    real = np.asarray(real)
    T = wirtinger_matrix(k)
    cplx = np.tensordot(T, real[1:], axes=([1], [0]))
    return np.concatenate([real[:1], cplx], axis=0)


def metric_provider(spec: PotentialSpec):
    return lambda q: build_structure(jet_of(spec, q, 2)).g


def metric_gradient(spec: PotentialSpec, p: ChartPoint, h: float = 1e-3) -> np.ndarray:
    """dg[rho, mu, nu] = d_rho g_{mu nu}."""
    return _complex_gradient(metric_provider(spec), p, h)


def levi_civita(g: np.ndarray, dg: np.ndarray, g_inv: np.ndarray | None = None) -> np.ndarray:
    """Gamma^mu_{nu rho} from g and dg[rho, mu, nu]; g^-1 by generic inversion."""
    g_inv = np.linalg.inv(g) if g_inv is None else g_inv
    # Gamma_{l nu rho} = 1/2 (d_rho g_{l nu} + d_nu g_{l rho} - d_l g_{nu rho})
    first = 0.5 * (
        np.einsum("rln->lnr", dg) + np.einsum("nlr->lnr", dg) - np.einsum("lnr->lnr", dg)
    )
    return np.einsum("ml,lnr->mnr", g_inv, first)


def christoffel_numeric(spec: PotentialSpec, p: ChartPoint, h: float = 1e-3) -> np.ndarray:
    """Levi-Civita symbols from finite differences of the metric."""
    g = metric_provider(spec)(p)
    return levi_civita(g, metric_gradient(spec, p, h))


def metricity_residual(spec: PotentialSpec, p: ChartPoint, gamma: np.ndarray, h: float = 1e-3) -> float:
    """max |nabla_rho g_{mu nu}| with numeric dg and the supplied connection."""
    g = metric_provider(spec)(p)
    dg = metric_gradient(spec, p, h)
    nab = dg - np.einsum("lrm,ln->rmn", gamma, g) - np.einsum("lrn,ml->rmn", gamma, g)
    return float(np.max(np.abs(nab)))


def riemann_from_christoffel(gamma: np.ndarray, dgamma: np.ndarray) -> np.ndarray:
    """R^m_{n r s} from Gamma and dgamma[a, m, n, r] = d_a Gamma^m_{n r}."""
    dterm = np.einsum("rmns->mnrs", dgamma) - np.einsum("smnr->mnrs", dgamma)
    quad = np.einsum("mlr,lns->mnrs", gamma, gamma) - np.einsum("mls,lnr->mnrs", gamma, gamma)
    return dterm + quad


def riemann_numeric(spec: PotentialSpec, p: ChartPoint, h: float = 1e-3, h_inner: float = 1e-3) -> np.ndarray:
    """Riemann tensor from finite differences of :func:`christoffel_numeric`."""
    gamma = christoffel_numeric(spec, p, h_inner)
    dgamma = _complex_gradient(lambda q: christoffel_numeric(spec, q, h_inner), p, h)
    return riemann_from_christoffel(gamma, dgamma)


def riemann_from_closed_christoffel(spec: PotentialSpec, p: ChartPoint, h: float = 1e-3) -> np.ndarray:
    """Riemann from differentiating the closed-form connection numerically."""
    gamma = christoffel_closed(jet_of(spec, p, 3))
    dgamma = _complex_gradient(lambda q: christoffel_closed(jet_of(spec, q, 3)), p, h)
    return riemann_from_christoffel(gamma, dgamma)
