"""Sasakian potentials and their Wirtinger-derivative jets.

A potential K is a real function of (z, zbar) on C^k.  Its jet at a point is
stored as a list of dense tensors ``D[r]`` of shape ``(2k,) * r``, where the
2k "Wirtinger variables" are ordered ``z^1..z^k, zbar^1..zbar^k``.  Entry
``D[r][a1, ..., ar]`` is the mixed partial derivative of K with respect to
those variables.  Dense storage keeps all downstream contractions as plain
``einsum`` calls; canonical-key access is provided by :meth:`WirtingerJet.entry`
and :meth:`WirtingerJet.entries`.
"""

from __future__ import annotations

import functools
import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

MAX_ORDER = 4
MAX_POLY_DEGREE = 6


class InvalidPotential(ValueError):
    """The potential specification is malformed or not real-valued."""


class StepUnderflow(ValueError):
    """Finite-difference step is too small for the requested derivative order."""


# ---------------------------------------------------------------------------
# points and specs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChartPoint:
    """A point (x, z^1..z^k) of C^k x R."""

    x: float
    z: tuple[complex, ...]

    def __post_init__(self):
        z = tuple(complex(v) for v in self.z)
        if len(z) < 1:
            raise ValueError("ChartPoint needs k >= 1 complex coordinates")
        if not (math.isfinite(self.x) and all(np.isfinite([v.real for v in z] + [v.imag for v in z]))):
            raise ValueError("ChartPoint coordinates must be finite")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "x", float(self.x))

    @property
    def k(self) -> int:
        return len(self.z)

    @property
    def w(self) -> np.ndarray:
        """Wirtinger variables (z, zbar) as a length-2k complex array."""
        z = np.asarray(self.z, dtype=complex)
        return np.concatenate([z, z.conj()])

    @property
    def real_coords(self) -> np.ndarray:
        """(Re z^1, Im z^1, ..., Re z^k, Im z^k)."""
        z = np.asarray(self.z, dtype=complex)
        return np.column_stack([z.real, z.imag]).ravel()

    @classmethod
    def from_real(cls, x: float, u: Sequence[float]) -> "ChartPoint":
        u = np.asarray(u, dtype=float)
        return cls(x, tuple(u[0::2] + 1j * u[1::2]))

    def shifted(self, dx: float = 0.0, dz: Sequence[complex] | None = None) -> "ChartPoint":
        z = np.asarray(self.z)
        if dz is not None:
            z = z + np.asarray(dz)
        return ChartPoint(self.x + dx, tuple(z))


KINDS = ("sphere", "product", "quadratic", "polynomial", "blackbox", "radial")


@dataclass(frozen=True)
class PotentialSpec:
    """Specification of a Sasakian potential.

    Kinds
    -----
    sphere
        K = 1/2 log(1 + |z|^2).
    product(q, n)
        K = 1/(q+n+1) sum_i log(1+|v^i|^2) + (n+1)/(2(q+n+1)) log(1+|w|^2),
        with z = (v^1..v^q, w^1..w^n).
    quadratic(c)
        K = c |z|^2.
    polynomial(terms)
        K = sum coef * z^a zbar^b; must be Hermitian so that K is real.
    blackbox(evaluator)
        Opaque callable ``ChartPoint -> float``; only usable through
        :func:`fd_jet`.
    radial(u, s_max)
        K = u(|z|^2) for a callable ``u(s, nu)`` returning the nu-th
        derivative.  Produced by the radial solver.

    ``shift`` is an additive constant, ``gauge`` a holomorphic polynomial f
    (coefficients of z-monomials) added as f + conj(f).
    """

    kind: str
    k: int
    q: int = 0
    n: int = 0
    c: float = 0.5
    terms: tuple = ()
    shift: float = 0.0
    gauge: tuple = ()
    evaluator: Callable | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidPotential(f"unknown potential kind {self.kind!r}")
        if self.k < 1:
            raise InvalidPotential("dimension k must be >= 1")
        if self.kind == "product":
            if self.q < 0 or self.n < 0 or self.q + self.n != self.k or self.k < 1:
                raise InvalidPotential("product potential needs q + n = k")
        if self.kind == "polynomial":
            object.__setattr__(self, "terms", _normalize_terms(self.terms, self.k))
        if self.kind in ("blackbox", "radial") and self.evaluator is None:
            raise InvalidPotential(f"{self.kind} potential needs an evaluator")
        object.__setattr__(self, "gauge", _normalize_gauge(self.gauge, self.k))

    # -- construction helpers ------------------------------------------------

    @classmethod
    def sphere(cls, k: int) -> "PotentialSpec":
        return cls("sphere", k)

    @classmethod
    def product(cls, q: int, n: int) -> "PotentialSpec":
        return cls("product", q + n, q=q, n=n)

    @classmethod
    def quadratic(cls, k: int, c: float = 0.5) -> "PotentialSpec":
        return cls("quadratic", k, c=c)

    @classmethod
    def polynomial(cls, k: int, terms) -> "PotentialSpec":
        return cls("polynomial", k, terms=terms)

    @classmethod
    def blackbox(cls, k: int, evaluator: Callable[[ChartPoint], float]) -> "PotentialSpec":
        return cls("blackbox", k, evaluator=evaluator)

    def with_shift(self, a: float) -> "PotentialSpec":
        return _replace(self, shift=self.shift + a)

    # -- evaluation -------------------------------------------------------------

    def __call__(self, p: ChartPoint) -> float:
        """Value of K at ``p`` (never depends on ``p.x``)."""
        if p.k != self.k:
            raise ValueError(f"point has k={p.k}, potential has k={self.k}")
        if self.kind == "blackbox":
            base = float(self.evaluator(p))
        else:
            base = float(_analytic_derivs(self, p.w, 0)[0].real)
        return base + self.shift + _gauge_value(self.gauge, p.w, self.k)

    # -- serialization ----------------------------------------------------------

    def to_dict(self) -> dict:
        if self.kind in ("blackbox", "radial"):
            raise InvalidPotential(f"{self.kind} potentials are not serializable")
        d: dict = {"kind": self.kind, "k": self.k}
        if self.kind == "product":
            d = {"kind": "product", "q": self.q, "n": self.n}
        elif self.kind == "quadratic":
            d["c"] = self.c
        elif self.kind == "polynomial":
            d["terms"] = [
                {"a": list(a), "b": list(b), "re": cf.real, "im": cf.imag}
                for a, b, cf in self.terms
            ]
        if self.shift:
            d["shift"] = self.shift
        if self.gauge:
            d["gauge"] = [{"a": list(a), "re": cf.real, "im": cf.imag} for a, cf in self.gauge]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "PotentialSpec":
        kind = d.get("kind")
        extra = {"shift": float(d.get("shift", 0.0))}
        if "gauge" in d:
            extra["gauge"] = tuple(
                (tuple(t["a"]), complex(t.get("re", 0.0), t.get("im", 0.0))) for t in d["gauge"]
            )
        if kind == "sphere":
            return cls("sphere", int(d["k"]), **extra)
        if kind == "product":
            q, n = int(d["q"]), int(d["n"])
            return cls("product", q + n, q=q, n=n, **extra)
        if kind == "quadratic":
            return cls("quadratic", int(d["k"]), c=float(d.get("c", 0.5)), **extra)
        if kind == "polynomial":
            terms = tuple(
                (tuple(t["a"]), tuple(t["b"]), complex(t.get("re", 0.0), t.get("im", 0.0)))
                for t in d["terms"]
            )
            return cls("polynomial", int(d["k"]), terms=terms, **extra)
        raise InvalidPotential(f"cannot deserialize potential kind {kind!r}")

    @classmethod
    def from_json(cls, s: str) -> "PotentialSpec":
        return cls.from_dict(json.loads(s))


def _replace(spec: PotentialSpec, **changes) -> PotentialSpec:
    import dataclasses

    return dataclasses.replace(spec, **changes)


def _normalize_terms(terms, k: int) -> tuple:
    merged: dict[tuple, complex] = {}
    for t in terms:
        if isinstance(t, dict):
            a, b, cf = tuple(t["a"]), tuple(t["b"]), complex(t.get("re", 0.0), t.get("im", 0.0))
        else:
            a, b, cf = tuple(t[0]), tuple(t[1]), complex(t[2])
        if len(a) != k or len(b) != k:
            raise InvalidPotential(f"exponent vectors must have length k={k}")
        if any(e < 0 for e in a + b):
            raise InvalidPotential("negative exponent")
        if sum(a) + sum(b) > MAX_POLY_DEGREE:
            raise InvalidPotential(f"polynomial degree exceeds {MAX_POLY_DEGREE}")
        key = (tuple(int(e) for e in a), tuple(int(e) for e in b))
        merged[key] = merged.get(key, 0j) + cf
    scale = max([abs(v) for v in merged.values()] + [1.0])
    for (a, b), cf in merged.items():
        partner = merged.get((b, a), 0j)
        if abs(cf - partner.conjugate()) > 1e-12 * scale:
            raise InvalidPotential(
                f"coefficient table is not Hermitian at a={a}, b={b}; K would not be real"
            )
    return tuple((a, b, cf) for (a, b), cf in sorted(merged.items()) if cf != 0)


def _normalize_gauge(gauge, k: int) -> tuple:
    out: dict[tuple, complex] = {}
    for t in gauge:
        if isinstance(t, dict):
            a, cf = tuple(t["a"]), complex(t.get("re", 0.0), t.get("im", 0.0))
        else:
            a, cf = tuple(t[0]), complex(t[1])
        if len(a) != k or any(e < 0 for e in a):
            raise InvalidPotential("gauge exponents must be k non-negative integers")
        if sum(a) > MAX_POLY_DEGREE:
            raise InvalidPotential(f"gauge polynomial degree exceeds {MAX_POLY_DEGREE}")
        key = tuple(int(e) for e in a)
        out[key] = out.get(key, 0j) + cf
    return tuple((a, cf) for a, cf in sorted(out.items()) if cf != 0)


# ---------------------------------------------------------------------------
# jets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WirtingerJet:
    """All mixed Wirtinger derivatives of K at a point up to ``order``."""

    k: int
    order: int
    derivs: tuple  # derivs[r] has shape (2k,)*r

    def __post_init__(self):
        if len(self.derivs) != self.order + 1:
            raise ValueError("derivs must hold one tensor per order")

    def require(self, order: int) -> None:
        if self.order < order:
            raise ValueError(f"jet of order {self.order}, need order {order}")

    @property
    def value(self) -> float:
        return float(self.derivs[0].real)

    @property
    def grad(self) -> np.ndarray:
        """K_{,m} (holomorphic first derivatives), length k."""
        return self.derivs[1][: self.k]

    @property
    def grad_bar(self) -> np.ndarray:
        return self.derivs[1][self.k :]

    @property
    def hess(self) -> np.ndarray:
        """Complex Hessian H[m, n] = K_{,m nbar} (Hermitian)."""
        self.require(2)
        return self.derivs[2][: self.k, self.k :]

    def entry(self, alpha: Sequence[int], beta: Sequence[int]) -> complex:
        """K_{,alpha betabar} for 0-based holomorphic index lists alpha, beta."""
        idx = tuple(alpha) + tuple(self.k + b for b in beta)
        if len(idx) > self.order:
            raise ValueError("requested derivative exceeds jet order")
        return complex(self.derivs[len(idx)][idx]) if idx else complex(self.derivs[0])

    def entries(self) -> dict:
        """Canonical map (alpha, beta) -> value with non-decreasing index tuples."""
        out = {}
        for r in range(self.order + 1):
            for idx in itertools.combinations_with_replacement(range(2 * self.k), r):
                alpha = tuple(i for i in idx if i < self.k)
                beta = tuple(i - self.k for i in idx if i >= self.k)
                out[(alpha, beta)] = complex(self.derivs[r][idx]) if r else complex(self.derivs[0])
        return out


@functools.lru_cache(maxsize=None)
def _orbit_maps(k: int, r: int):
    """Index maps enforcing permutation and conjugation symmetry.

    Returns (rep, conj_flag, real_flag) arrays over the flattened (2k)^r index
    space: every entry is read from the flat position ``rep`` and conjugated
    when ``conj_flag``; self-conjugate orbits are forced real.
    """
    n = 2 * k
    size = n**r
    rep = np.zeros(size, dtype=np.int64)
    conj = np.zeros(size, dtype=bool)
    real = np.zeros(size, dtype=bool)
    if r == 0:
        return rep, conj, np.ones(1, dtype=bool)
    sigma = [(i + k) % n for i in range(n)]
    shape = (n,) * r
    for flat, idx in enumerate(itertools.product(range(n), repeat=r)):
        s = tuple(sorted(idx))
        sc = tuple(sorted(sigma[i] for i in idx))
        if s <= sc:
            rep[flat] = np.ravel_multi_index(s, shape)
        else:
            rep[flat] = np.ravel_multi_index(sc, shape)
            conj[flat] = True
        real[flat] = s == sc
    return rep, conj, real


def symmetrize(D: np.ndarray, k: int) -> np.ndarray:
    """Make a derivative tensor exactly permutation- and conjugation-symmetric."""
    r = D.ndim
    rep, conj, real = _orbit_maps(k, r)
    flat = np.asarray(D, dtype=complex).ravel()
    vals = flat[rep]
    vals = np.where(conj, vals.conj(), vals)
    vals = np.where(real, vals.real + 0j, vals)
    return vals.reshape(D.shape)


def _composite_derivs(f: Sequence[complex], S1: np.ndarray, S2: np.ndarray, order: int):
    """Derivatives of f(S) for a quadratic S with first/second derivatives S1/S2.

    ``f[nu]`` is the nu-th derivative of the outer function at S.
    """
    out = [np.asarray(f[0], dtype=complex)]
    if order >= 1:
        out.append(f[1] * S1)
    if order >= 2:
        out.append(f[2] * np.einsum("a,b->ab", S1, S1) + f[1] * S2)
    if order >= 3:
        t = np.einsum("ab,c->abc", S2, S1)
        out.append(
            f[3] * np.einsum("a,b,c->abc", S1, S1, S1)
            + f[2] * (t + t.transpose(0, 2, 1) + t.transpose(2, 1, 0))
        )
    if order >= 4:
        t = np.einsum("ab,c,d->abcd", S2, S1, S1)
        pairs = (
            t
            + np.einsum("ac,b,d->abcd", S2, S1, S1)
            + np.einsum("ad,b,c->abcd", S2, S1, S1)
            + np.einsum("bc,a,d->abcd", S2, S1, S1)
            + np.einsum("bd,a,c->abcd", S2, S1, S1)
            + np.einsum("cd,a,b->abcd", S2, S1, S1)
        )
        q = np.einsum("ab,cd->abcd", S2, S2)
        out.append(
            f[4] * np.einsum("a,b,c,d->abcd", S1, S1, S1, S1)
            + f[3] * pairs
            + f[2] * (q + q.transpose(0, 2, 1, 3) + q.transpose(0, 3, 2, 1))
        )
    return out


def _log_derivs(S: complex) -> list:
    return [np.log(S), 1 / S, -1 / S**2, 2 / S**3, -6 / S**4]


def _hermitian_norm_parts(w: np.ndarray, k: int, indices: Sequence[int]):
    """S = 1 + sum_{m in indices} z^m zbar^m with its first/second derivatives."""
    n = 2 * k
    S = 1.0 + sum(w[m] * w[k + m] for m in indices)
    S1 = np.zeros(n, dtype=complex)
    S2 = np.zeros((n, n), dtype=complex)
    for m in indices:
        S1[m] = w[k + m]
        S1[k + m] = w[m]
        S2[m, k + m] = S2[k + m, m] = 1.0
    return S, S1, S2


def _log_term(w, k, indices, coef, order):
    S, S1, S2 = _hermitian_norm_parts(w, k, indices)
    return [coef * d for d in _composite_derivs(_log_derivs(S), S1, S2, order)]


def _monomial_tensor(w, expo, coef, r):
    """Order-r derivative tensor of coef * prod w_v^expo_v (dense)."""
    n = len(w)
    D = np.zeros((n,) * r, dtype=complex)
    for idx in itertools.combinations_with_replacement(range(n), r):
        counts = np.bincount(np.asarray(idx, dtype=int), minlength=n) if r else np.zeros(n, int)
        if np.any(counts > expo):
            continue
        val = coef
        for v in range(n):
            e, c = expo[v], counts[v]
            if e == 0:
                continue
            val *= math.perm(e, c) * w[v] ** (e - c)
        D[idx if r else ()] = val
    return D


def _polynomial_derivs(w, k, terms, order):
    n = 2 * k
    out = [np.zeros((n,) * r, dtype=complex) for r in range(order + 1)]
    for a, b, cf in terms:
        expo = np.asarray(tuple(a) + tuple(b), dtype=int)
        for r in range(order + 1):
            out[r] += _monomial_tensor(w, expo, cf, r)
    return out


def _gauge_terms(gauge, k):
    """f + conj(f) as Hermitian polynomial terms."""
    zero = (0,) * k
    terms = []
    for a, cf in gauge:
        terms.append((tuple(a), zero, cf))
        terms.append((zero, tuple(a), cf.conjugate()))
    return terms


def _gauge_value(gauge, w, k) -> float:
    if not gauge:
        return 0.0
    return float(_polynomial_derivs(w, k, _gauge_terms(gauge, k), 0)[0].real)


def _analytic_derivs(spec: PotentialSpec, w: np.ndarray, order: int):
    k = spec.k
    n = 2 * k
    if spec.kind == "sphere":
        out = _log_term(w, k, range(k), 0.5, order)
    elif spec.kind == "product":
        q, nn = spec.q, spec.n
        tot = q + nn + 1
        out = [np.zeros((n,) * r, dtype=complex) for r in range(order + 1)]
        for i in range(q):
            for r, d in enumerate(_log_term(w, k, [i], 1.0 / tot, order)):
                out[r] += d
        if nn:
            for r, d in enumerate(_log_term(w, k, range(q, k), (nn + 1) / (2.0 * tot), order)):
                out[r] += d
    elif spec.kind == "quadratic":
        one = [(tuple(int(i == m) for i in range(k)),) * 2 + (complex(spec.c),) for m in range(k)]
        out = _polynomial_derivs(w, k, one, order)
    elif spec.kind == "polynomial":
        out = _polynomial_derivs(w, k, spec.terms, order)
    elif spec.kind == "radial":
        s = float(np.real(np.sum(w[:k] * w[k:])))
        f = [spec.evaluator(s, nu) for nu in range(order + 1)]
        _, S1, S2 = _hermitian_norm_parts(w, k, range(k))
        out = _composite_derivs(f, S1, S2, order)
    else:
        raise InvalidPotential(f"no analytic jet for kind {spec.kind!r}; use fd_jet")
    return out


def evaluate_jet(spec: PotentialSpec, p: ChartPoint, order: int = 4) -> WirtingerJet:
    """Exact Wirtinger jet of a builtin potential at ``p``."""
    if not 0 <= order <= MAX_ORDER:
        raise ValueError(f"jet order must be in 0..{MAX_ORDER}")
    if spec.kind == "blackbox":
        raise InvalidPotential("blackbox potentials have no analytic jet; use fd_jet")
    if p.k != spec.k:
        raise ValueError(f"point has k={p.k}, potential has k={spec.k}")
    w = p.w
    out = _analytic_derivs(spec, w, order)
    if spec.gauge:
        g = _polynomial_derivs(w, spec.k, _gauge_terms(spec.gauge, spec.k), order)
        out = [a + b for a, b in zip(out, g)]
    out[0] = out[0] + spec.shift
    derivs = tuple(symmetrize(np.asarray(d, dtype=complex), spec.k) for d in out)
    return WirtingerJet(spec.k, order, derivs)


# ---------------------------------------------------------------------------
# finite-difference oracle
# ---------------------------------------------------------------------------

# one-dimensional central stencils, second-order accurate: offsets -> weights
_STENCILS = {
    0: {0: 1.0},
    1: {-1: -0.5, 1: 0.5},
    2: {-1: 1.0, 0: -2.0, 1: 1.0},
    3: {-2: -0.5, -1: 1.0, 1: -1.0, 2: 0.5},
    4: {-2: 1.0, -1: -4.0, 0: 6.0, 1: -4.0, 2: 1.0},
}


def wirtinger_matrix(k: int) -> np.ndarray:
    """T with d/dw_a = sum_j T[a, j] d/du_j, u = (Re z^1, Im z^1, ...)."""
    T = np.zeros((2 * k, 2 * k), dtype=complex)
    for m in range(k):
        T[m, 2 * m], T[m, 2 * m + 1] = 0.5, -0.5j
        T[k + m, 2 * m], T[k + m, 2 * m + 1] = 0.5, 0.5j
    return T


def real_to_wirtinger(real_derivs: Sequence[np.ndarray], k: int) -> list:
    """Convert real-coordinate derivative tensors to Wirtinger tensors."""
    T = wirtinger_matrix(k)
    out = []
    for r, R in enumerate(real_derivs):
        D = np.asarray(R, dtype=complex)
        for ax in range(r):
            D = np.moveaxis(np.tensordot(T, D, axes=([1], [ax])), 0, ax)
        out.append(D)
    return out


def check_step(h: float, order: int) -> None:
    if h <= 0:
        raise StepUnderflow("finite-difference step must be positive")
    # roundoff amplification eps/h^order must stay below ~1e-3
    if order > 0 and h**order < 1e3 * np.finfo(float).eps:
        raise StepUnderflow(
            f"step h={h:g} too small for order-{order} stencils "
            f"(h^{order} < {1e3 * np.finfo(float).eps:.1e})"
        )


def real_fd_derivs(values: Callable[[tuple], float], nvar: int, order: int, h: float) -> list:
    """Real partial derivative tensors from integer-offset samples.

    ``values(offset)`` returns the field at ``u0 + h * offset``.
    """
    cache: dict[tuple, float] = {}

    def sample(off):
        if off not in cache:
            cache[off] = values(off)
        return cache[off]

    out = []
    for r in range(order + 1):
        R = np.zeros((nvar,) * r)
        for idx in itertools.combinations_with_replacement(range(nvar), r):
            counts = np.bincount(np.asarray(idx, dtype=int), minlength=nvar) if r else np.zeros(nvar, int)
            axes = [list(_STENCILS[int(c)].items()) for c in counts]
            acc = 0.0
            for combo in itertools.product(*axes):
                wgt = 1.0
                off = []
                for o, wv in combo:
                    off.append(o)
                    wgt *= wv
                acc += wgt * sample(tuple(off))
            R[idx if r else ()] = acc / h**r
        if r:
            R = _fill_symmetric(R)
        out.append(R)
    return out


def _fill_symmetric(R: np.ndarray) -> np.ndarray:
    """Copy sorted-index entries to all permutations."""
    n, r = R.shape[0], R.ndim
    out = np.empty_like(R)
    for idx in itertools.product(range(n), repeat=r):
        out[idx] = R[tuple(sorted(idx))]
    return out


def fd_jet(
    field: Callable[[ChartPoint], float] | PotentialSpec,
    p: ChartPoint,
    order: int = 4,
    h: float = 1e-2,
    richardson: bool = True,
) -> WirtingerJet:
    """Wirtinger jet of a real field from central differences in (Re z, Im z).

    Each derivative is second-order accurate in ``h``; with ``richardson`` the
    results at ``h`` and ``h/2`` are combined to fourth order.
    """
    if not 0 <= order <= MAX_ORDER:
        raise ValueError(f"jet order must be in 0..{MAX_ORDER}")
    check_step(h / 2 if richardson else h, order)
    k = p.k
    u0 = p.real_coords

    def at_step(step):
        return real_fd_derivs(
            lambda off: float(field(ChartPoint.from_real(p.x, u0 + step * np.asarray(off)))),
            2 * k,
            order,
            step,
        )

    R = at_step(h)
    if richardson:
        R2 = at_step(h / 2)
        R = [(4 * b - a) / 3 for a, b in zip(R, R2)]
    derivs = tuple(symmetrize(D, k) for D in real_to_wirtinger(R, k))
    return WirtingerJet(k, order, derivs)


def jet_of(spec: PotentialSpec, p: ChartPoint, order: int = 4, h: float = 1e-2) -> WirtingerJet:
    """Analytic jet when available, finite-difference jet for blackbox fields."""
    if spec.kind == "blackbox":
        return fd_jet(spec, p, order, h)
    return evaluate_jet(spec, p, order)


# ---------------------------------------------------------------------------
# gauge transformations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GaugeMap:
    """Holomorphic polynomial f(z) = sum coef * z^a inducing K -> K + f + conj(f)."""

    k: int
    terms: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "terms", _normalize_gauge(self.terms, self.k))

    def f(self, z: Sequence[complex]) -> complex:
        z = np.asarray(z, dtype=complex)
        return complex(sum(cf * np.prod(z ** np.asarray(a)) for a, cf in self.terms))

    def df(self, z: Sequence[complex]) -> np.ndarray:
        """Holomorphic gradient f_{,m}."""
        z = np.asarray(z, dtype=complex)
        out = np.zeros(self.k, dtype=complex)
        for a, cf in self.terms:
            a = np.asarray(a)
            for m in range(self.k):
                if a[m] == 0:
                    continue
                b = a.copy()
                b[m] -= 1
                out[m] += cf * a[m] * np.prod(z**b)
        return out

    def x_shift(self, z: Sequence[complex]) -> float:
        """i conj(f) - i f = 2 Im f; real by construction."""
        fz = self.f(z)
        s = 1j * fz.conjugate() - 1j * fz
        return float(s.real)

    def map_point(self, p: ChartPoint) -> ChartPoint:
        return ChartPoint(p.x + self.x_shift(p.z), p.z)


def apply_gauge(spec: PotentialSpec, gauge: GaugeMap):
    """Return (K', coordinate map) for K' = K + f + conj(f).

    The coordinate map sends (z, x) to (z, x + i conj(f) - i f).
    """
    if gauge.k != spec.k:
        raise InvalidPotential("gauge dimension does not match potential")
    new = _replace(spec, gauge=tuple(spec.gauge) + tuple(gauge.terms))
    return new, gauge.map_point


def random_polynomial(
    k: int, seed: int, n_terms: int = 4, scale: float = 0.05, radius: float = 1.0, max_tries: int = 20
) -> PotentialSpec:
    """Seeded Hermitian polynomial 1/2 |z|^2 + small higher-degree terms.

    Terms with |a|, |b| >= 1 and total degree 3..6 are added in conjugate
    pairs.  Draws are repeated until the complex Hessian has smallest
    eigenvalue above 0.1 at 200 seeded points of the ball |z| < radius.
    """
    rng = np.random.default_rng(seed)
    base = [(tuple(int(i == m) for i in range(k)),) * 2 + (0.5,) for m in range(k)]
    for _ in range(max_tries):
        terms = list(base)
        for _ in range(n_terms):
            deg = int(rng.integers(3, MAX_POLY_DEGREE + 1))
            da = int(rng.integers(1, deg))
            a = tuple(int(v) for v in rng.multinomial(da, np.ones(k) / k))
            b = tuple(int(v) for v in rng.multinomial(deg - da, np.ones(k) / k))
            # normalise so the Hessian contribution on the unit ball is O(scale)
            cf = scale / (da * (deg - da)) * complex(rng.standard_normal(), rng.standard_normal())
            if a == b:
                terms.append((a, b, 2 * cf.real))
            else:
                terms.append((a, b, cf))
                terms.append((b, a, cf.conjugate()))
        spec = PotentialSpec.polynomial(k, terms)
        if _min_hessian_eig(spec, radius, seed) > 0.1:
            return spec
    raise InvalidPotential("could not draw an admissible polynomial; lower scale")


def _min_hessian_eig(spec: PotentialSpec, radius: float, seed: int, n: int = 200) -> float:
    rng = np.random.default_rng(seed + 1)
    worst = np.inf
    for _ in range(n):
        v = rng.standard_normal(2 * spec.k)
        v *= radius * rng.uniform() ** (1 / (2 * spec.k)) / np.linalg.norm(v)
        H = evaluate_jet(spec, ChartPoint.from_real(0.0, v), 2).hess
        worst = min(worst, float(np.linalg.eigvalsh(0.5 * (H + H.conj().T)).min()))
    return worst
