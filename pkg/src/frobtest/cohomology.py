"""Local cohomology snapshots, (relative) Frobenius actions and HSL numbers.

Three routes, by cohomological index ``i`` of ``R/K`` with ``d = dim R/K``:

* ``i = 0``: ``H^0_m(R/K) = (K + a : m^∞)/(K + a)``, exact.
* ``i = d``: the direct limit of ``R/(x_1^t, ..., x_d^t)``; a class
  ``[u, t]`` vanishes iff ``u (x_1⋯x_d)^s ∈ (x^(t+s)) + K + a`` for large
  ``s``.  Frobenius sends ``[u, t]`` to ``[u^p, pt]``.
* ``0 < i < d``: graded Koszul cohomology ``H^i(x^t; R/K)`` computed by
  linear algebra degree by degree, mapped along the tower
  ``e_σ ↦ x_σ^(t'-t) e_σ`` (Čech grading, so all maps preserve degree).

The relative Frobenius ``F_R`` of ``R/K`` lands in ``R/K^[p^e]``; with
``K = 0`` it is the natural Frobenius of ``R``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb

import numpy as np

from . import linalg
from .algebra import Polynomial, check_exponents
from .certificates import (
    DEFAULT_CAPS,
    Caps,
    CertifiedValue,
    Status,
    weakest,
)
from .errors import (
    FrobtestError,
    NotParameterSystemError,
    ResourceCapExceeded,
    UnboundedSupportError,
)
from .groebner import Ideal, colon_ideal, saturate
from .rings import PresentedRing, is_m_primary, local_component


class ConsistencyError(FrobtestError):
    """Two independent routes to the same invariant disagreed."""


@dataclass
class CohomologyModule:
    """Finite-length snapshot of a local cohomology (or Koszul) module.

    ``basis`` holds coset representatives: polynomials for ``H^0``, cochains
    ``{σ: Polynomial}`` for Koszul-based modules.  ``degrees`` records the
    (Čech) degree of each representative when the module is graded.
    """

    kind: str
    index: int
    length: int
    basis: tuple = ()
    presentation: tuple | None = None
    stage: dict = field(default_factory=dict)
    degrees: tuple = ()

    def to_dict(self) -> dict:
        def rep(b):
            if isinstance(b, Polynomial):
                return str(b)
            return {",".join(map(str, s)): str(f) for s, f in b.items()}
        return {
            "kind": self.kind,
            "index": self.index,
            "length": self.length,
            "basis": [rep(b) for b in self.basis],
            "degrees": list(self.degrees),
            "stage": self.stage,
        }


@dataclass
class FrobeniusMapData:
    """Matrix of ``F^e`` (or ``F_R^e``) from ``source`` to ``target`` bases."""

    source: CohomologyModule
    target: CohomologyModule
    matrix: np.ndarray
    relative: bool = False
    e: int = 1

    def kernel_length(self, p: int) -> int:
        return self.source.length - linalg.rank(self.matrix, p)


@dataclass
class HSLReport:
    value: CertifiedValue
    kernel_chain: list
    nilpotent: bool | None
    degree: int
    length: int | None = None
    relative: bool = False

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "hsl": self.value.to_dict(),
            "kernel_chain": list(self.kernel_chain),
            "nilpotent": self.nilpotent,
            "length": self.length,
            "relative": self.relative,
        }


def _stable_index(chain: list, window: int):
    """First index from which ``chain`` repeats for ``window`` steps, if any."""
    if len(chain) <= window:
        return None
    tail = chain[-window - 1:]
    if len(set(tail)) != 1:
        return None
    return len(chain) - 1 - window


def _hsl_from_chain(chain: list) -> int:
    final = chain[-1]
    return next(e for e, k in enumerate(chain) if k == final)


def _frob_terms(terms: dict, q: int) -> dict:
    out = {}
    for m, c in terms.items():
        mq = tuple(x * q for x in m)
        check_exponents(mq)
        out[mq] = c
    return out


def _zero_ideal(R: PresentedRing) -> Ideal:
    return Ideal(R.ambient)


# ---------------------------------------------------------------------------
# H^0
# ---------------------------------------------------------------------------

class _TorsionSpace:
    """``(B : m^∞)/B`` for ``B = K + a`` inside ``S/B``, in reduced echelon form.

    Vectors are normal forms modulo ``B``.  When ``B`` is m-primary the whole
    quotient is torsion and every standard monomial is a basis vector.
    """

    def __init__(self, R: PresentedRing, K: Ideal, caps: Caps):
        self.R, self.K, self.caps = R, K, caps
        ring = R.ambient
        self.key = ring.sort_key
        self.p = ring.p
        self.base = R.lift(K).reduced(caps)
        self.gb = self.base.groebner(caps)
        self.rows: dict = {}
        self.full = False
        if self.gb.is_unit():
            self.saturation = self.base
        elif is_m_primary(self.base, caps):
            self.full = True
            self.saturation = Ideal.unit(ring)
        else:
            self.saturation, _ = saturate(self.base, Ideal.maximal(ring), caps)
            self._span([self.gb.reduce_terms(g._terms, caps)
                        for g in self.saturation.generators])

    def _reduce(self, v: dict) -> dict:
        v = dict(v)
        p = self.p
        for piv, row in self.rows.items():
            c = v.get(piv)
            if c:
                for m, rc in row.items():
                    x = (v.get(m, 0) - c * rc) % p
                    if x:
                        v[m] = x
                    else:
                        v.pop(m, None)
        return v

    def _span(self, queue: list):
        p, gens = self.p, self.R.ambient.gens()
        while queue:
            v = self._reduce(queue.pop())
            if not v:
                continue
            piv = max(v, key=self.key)
            inv = pow(v[piv], -1, p)
            v = {m: (c * inv) % p for m, c in v.items()}
            for other_piv, row in self.rows.items():
                c = row.get(piv)
                if c:
                    for m, vc in v.items():
                        x = (row.get(m, 0) - c * vc) % p
                        if x:
                            row[m] = x
                        else:
                            row.pop(m, None)
            self.rows[piv] = v
            for x in gens:
                xv = Polynomial(self.R.ambient, v) * x
                queue.append(self.gb.reduce_terms(xv._terms, self.caps))

    def pivots(self) -> list:
        if self.full:
            return self.base.standard_monomials(caps=self.caps)
        return sorted(self.rows, key=self.key)

    def basis_terms(self) -> list:
        if self.full:
            return [{m: 1} for m in self.pivots()]
        return [self.rows[m] for m in self.pivots()]

    def length(self) -> int:
        if self.full:
            return self.base.length(self.caps)
        return len(self.rows)

    def coordinates(self, v: dict) -> dict:
        """Coordinates of a reduced vector; raises if it lies outside the torsion part."""
        if self.full:
            return dict(v)
        coords = {piv: v[piv] for piv in self.rows if v.get(piv)}
        rest = self._reduce(v)
        if rest:
            raise ConsistencyError("vector is not in the m-torsion submodule")
        return coords

    def module(self) -> CohomologyModule:
        ring = self.R.ambient
        basis = tuple(Polynomial(ring, t) for t in self.basis_terms())
        return CohomologyModule("H0", 0, len(basis), basis,
                                (self.base, self.saturation), {"ideal": str(self.K)})


def h0_module(R: PresentedRing, K: Ideal | None = None, caps: Caps = DEFAULT_CAPS) -> CohomologyModule:
    """``H^0_m(R/K)`` as ``sat(K + a)/(K + a)`` with an echelon coset basis."""
    K = _zero_ideal(R) if K is None else K
    return _TorsionSpace(R, K, caps).module()


def _frobenius_columns(src: _TorsionSpace, tgt: _TorsionSpace, e: int) -> list:
    q = src.p ** e
    cols = []
    for terms in src.basis_terms():
        img = tgt.gb.reduce_terms(_frob_terms(terms, q), src.caps)
        cols.append(tgt.coordinates(img))
    return cols


def _rank_of_columns(cols: list, p: int) -> int:
    rows = {}
    for c in cols:
        for m in c:
            rows.setdefault(m, len(rows))
    if not rows:
        return 0
    mat = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for j, c in enumerate(cols):
        for m, v in c.items():
            mat[rows[m], j] = v
    return linalg.rank(mat, p)


def relative_frobenius_h0(R: PresentedRing, K: Ideal | None, e: int = 1,
                          caps: Caps = DEFAULT_CAPS) -> FrobeniusMapData:
    """``F_R^e : H^0_m(R/K) -> H^0_m(R/K^[p^e])``, coset of ``u`` to coset of ``u^(p^e)``.

    Well-definedness (images land in the saturation of ``K^[p^e] + a``) is
    checked for every basis element.
    """
    if e < 1:
        raise ValueError("e must be at least 1")
    K = _zero_ideal(R) if K is None else K
    src = _TorsionSpace(R, K, caps)
    tgt = _TorsionSpace(R, K.frobenius_power(e), caps)
    cols = _frobenius_columns(src, tgt, e)
    tpiv = tgt.pivots()
    index = {m: i for i, m in enumerate(tpiv)}
    mat = np.zeros((len(tpiv), len(cols)), dtype=np.int64)
    for j, c in enumerate(cols):
        for m, v in c.items():
            mat[index[m], j] = v
    return FrobeniusMapData(src.module(), tgt.module(), mat, relative=not K.is_zero(), e=e)


def _h0_chain(R: PresentedRing, K: Ideal, caps: Caps):
    src = _TorsionSpace(R, K, caps)
    n = src.length()
    chain = [0]
    if n == 0:
        return n, chain, Status.CERTIFIED, None
    for e in range(1, caps.max_e + 1):
        tgt = src if K.is_zero() else _TorsionSpace(R, K.frobenius_power(e), caps)
        cols = _frobenius_columns(src, tgt, e)
        chain.append(n - _rank_of_columns(cols, R.p))
        if chain[-1] < chain[-2]:
            raise ConsistencyError(f"kernel chain decreased: {chain}")
        if _stable_index(chain, caps.window) is not None:
            return n, chain, Status.CERTIFIED, None
    return n, chain, Status.TRUNCATED, "max_e"


def hsl_relative_h0(R: PresentedRing, K: Ideal | None = None, caps: Caps = DEFAULT_CAPS,
                    check: bool = True) -> HSLReport:
    """``HSL_R(H^0_m(R/K))`` from the kernel chain of ``F_R^e``.

    For ``K`` of finite colength this equals ``Fte(K)``; with ``check`` the
    Frobenius-closure route is run too and any disagreement raises
    :class:`ConsistencyError`.
    """
    K = _zero_ideal(R) if K is None else K
    try:
        n, chain, status, cap = _h0_chain(R, K, caps)
    except ResourceCapExceeded as exc:
        return HSLReport(CertifiedValue(None, Status.TRUNCATED, exc.cap), [], None, 0,
                         relative=not K.is_zero())
    value = _hsl_from_chain(chain) if status is Status.CERTIFIED else None
    report = HSLReport(
        CertifiedValue(value, status, cap, {"chain": chain, "length": n}),
        chain, chain[-1] == n, 0, n, relative=not K.is_zero())
    lifted = R.lift(K)
    if check and status is Status.CERTIFIED and not K.is_zero() and (
            lifted.is_unit(caps) or lifted.dimension(caps) == 0):
        from .frobenius import frobenius_test_exponent
        fte = frobenius_test_exponent(K, R, caps)
        if fte.status is Status.CERTIFIED and fte.value != value:
            raise ConsistencyError(
                f"Fte({K}) = {fte.value} but HSL_R(H^0(R/K)) = {value}")
        report.value.evidence["fte_cross_check"] = fte.value
    return report


# ---------------------------------------------------------------------------
# top local cohomology
# ---------------------------------------------------------------------------

def _monomial_product(seq: list, ring) -> Polynomial:
    out = ring.one()
    for f in seq:
        out = out * f
    return out


def _require_sop(R: PresentedRing, K: Ideal, seq: list, caps: Caps):
    lifted = R.lift(K)
    if lifted.is_unit(caps):
        return
    if len(seq) != lifted.dimension(caps) or not (lifted + Ideal(R.ambient, seq)).dimension(caps) <= 0:
        raise NotParameterSystemError(
            f"({', '.join(map(str, seq))}) is not a system of parameters of R/({K})")


def limit_closure(R: PresentedRing, x: list, t: int = 1, caps: Caps = DEFAULT_CAPS,
                  K: Ideal | None = None):
    """Limit closure of ``(x_1^t, ..., x_d^t)`` in ``R/K`` as an ideal of ``S``.

    Ascending chain ``L_s = ((x^(t+s)) + K + a) : (x_1⋯x_d)^s``; returned
    once it has repeated for ``caps.window`` steps (CERTIFIED-WINDOW), or
    TRUNCATED at ``caps.max_s``.
    """
    K = _zero_ideal(R) if K is None else K
    _require_sop(R, K, x, caps)
    base = R.lift(K)
    pi = _monomial_product(x, R.ambient)
    chain, ideals = [], []
    for s in range(caps.max_s + 1):
        I = base + Ideal(R.ambient, [f ** (t + s) for f in x])
        L = colon_ideal(I, pi ** s, caps) if s else I.reduced(caps)
        L = L.reduced(caps)
        ideals.append(L)
        if len(ideals) > 1 and not ideals[-2].same_ideal(L, caps) and not L.contains_ideal(ideals[-2], caps):
            raise ConsistencyError("limit-closure chain is not ascending")
        chain.append(L.groebner(caps).elements)
        if len(chain) > caps.window and all(c == chain[-1] for c in chain[-caps.window - 1:]):
            return L, CertifiedValue(s - caps.window, Status.CERTIFIED_WINDOW, evidence={
                "stationary_from_s": s - caps.window})
    return ideals[-1], CertifiedValue(None, Status.TRUNCATED, "max_s")


class _TopStage:
    """Stage ``t`` of ``H^top_m(R/K)``: classes ``[u, t]`` for ``u`` in ``S/Q_t``."""

    def __init__(self, R, K, seq, t, caps):
        self.R, self.K, self.seq, self.t, self.caps = R, K, seq, t, caps
        ring = R.ambient
        self.pi = _monomial_product(seq, ring)
        self.Q = local_component(R.lift(K) + Ideal(ring, [f ** t for f in seq]), caps).reduced(caps)
        self.basis = self.Q.standard_monomials(caps=caps)
        self._pi_pow = {0: ring.one()}

    def _pi(self, s):
        if s not in self._pi_pow:
            self._pi_pow[s] = self.pi ** s
        return self._pi_pow[s]

    def kernel_at(self, e: int, s: int) -> int:
        """``dim {u : (u π^s)^(p^e) ∈ (x^(t+s))^[p^e] + K^[p^e] + a}`` (locally)."""
        R, ring = self.R, self.R.ambient
        q = R.p ** e
        Ke = self.K.frobenius_power(e)
        tgt = local_component(
            R.lift(Ke) + Ideal(ring, [(f ** (self.t + s)).frobenius(e) for f in self.seq]),
            self.caps)
        gb = tgt.groebner(self.caps)
        pis = self._pi(s)
        cols = []
        for m in self.basis:
            u = pis.mul_monomial(m)
            cols.append(gb.reduce_terms(_frob_terms(u._terms, q), self.caps))
        return len(self.basis) - _rank_of_columns(cols, R.p)

    def kernel(self, e: int):
        """Stable (in ``s``) kernel dimension of ``F^e`` on stage-``t`` classes."""
        dims = []
        for s in range(self.caps.max_s + 1):
            dims.append(self.kernel_at(e, s))
            if len(dims) > 1 and dims[-1] < dims[-2]:
                raise ConsistencyError(f"zero-detection chain decreased: {dims}")
            if _stable_index(dims, self.caps.window) is not None:
                return dims[-1], Status.CERTIFIED_WINDOW
        return dims[-1], Status.TRUNCATED


def hsl_top(R: PresentedRing, x: list, caps: Caps = DEFAULT_CAPS,
            K: Ideal | None = None) -> HSLReport:
    """HSL number of ``H^d_m(R/K)`` (natural Frobenius when ``K = 0``).

    For each sampled stage ``t`` in ``caps.stages`` the kernels of ``F^e``
    on stage-``t`` classes are computed until they repeat for
    ``caps.window`` steps; the reported value is the largest first
    stabilization index over stages.
    """
    K = _zero_ideal(R) if K is None else K
    _require_sop(R, K, x, caps)
    d = len(x)
    relative = not K.is_zero()
    per_stage = {}
    statuses = []
    values = []
    chain_out: list = []
    nilpotent = True
    try:
        for t in caps.stages:
            stage = _TopStage(R, K, x, t, caps)
            k0, st0 = stage.kernel(0)
            statuses.append(st0)
            chain = [0]
            stable = False
            for e in range(1, caps.max_e + 1):
                ke, st = stage.kernel(e)
                statuses.append(st)
                chain.append(ke - k0)
                if chain[-1] < chain[-2]:
                    raise ConsistencyError(f"top kernel chain decreased: {chain}")
                if _stable_index(chain, caps.window) is not None:
                    stable = True
                    break
            image_len = len(stage.basis) - k0
            per_stage[str(t)] = {"image_length": image_len, "kernel_chain": chain,
                                 "limit_closure_colength": len(stage.basis) - k0}
            if not stable:
                statuses.append(Status.TRUNCATED)
                values.append(None)
            else:
                values.append(_hsl_from_chain(chain))
            nilpotent = nilpotent and chain[-1] == image_len
            chain_out = chain
    except ResourceCapExceeded as exc:
        return HSLReport(CertifiedValue(None, Status.TRUNCATED, exc.cap, {"stages": per_stage}),
                         chain_out, None, d, relative=relative)
    status = weakest(Status.CERTIFIED_WINDOW, *statuses)
    value = max(values) if None not in values else None
    cap = "max_e/max_s" if status is Status.TRUNCATED else None
    ev = {"stages": per_stage, "sampled_stages": list(caps.stages)}
    return HSLReport(CertifiedValue(value, status, cap, ev), chain_out, nilpotent, d,
                     relative=relative)


# ---------------------------------------------------------------------------
# graded Koszul cohomology
# ---------------------------------------------------------------------------

class _Koszul:
    """Koszul cochain complex of ``x^t`` over ``S/J`` with Čech grading.

    ``r e_σ`` (``r`` of degree ``k``) has degree ``k - t·deg(x_σ)``; the
    differential is ``e_σ ↦ Σ_{j∉σ} ± x_j^t e_{σ∪j}``.
    """

    def __init__(self, J: Ideal, seq: list, t: int, caps: Caps):
        if not J.is_homogeneous() or not all(f.is_homogeneous() for f in seq):
            raise FrobtestError("graded Koszul computations need homogeneous ideals and sequences")
        self.J, self.seq, self.t, self.caps = J, list(seq), t, caps
        self.ring = J.ring
        self.p = self.ring.p
        self.gb = J.groebner(caps)
        self.d = len(seq)
        self.deg = [f.total_degree() for f in seq]
        self.pows = [f ** t for f in seq]
        self._std: dict = {}
        self._basis: dict = {}
        self._dmat: dict = {}
        self._prod: dict = {}

    def shift(self, sigma) -> int:
        return self.t * sum(self.deg[j] for j in sigma)

    def std(self, k: int) -> list:
        if k not in self._std:
            self._std[k] = self.J.standard_monomials(k, self.caps) if k >= 0 else []
        return self._std[k]

    def comps(self, i: int) -> list:
        return list(itertools.combinations(range(self.d), i))

    def basis(self, i: int, D: int):
        if (i, D) not in self._basis:
            items = []
            if 0 <= i <= self.d:
                for sigma in self.comps(i):
                    for m in self.std(D + self.shift(sigma)):
                        items.append((sigma, m))
            self._basis[(i, D)] = (items, {b: n for n, b in enumerate(items)})
        return self._basis[(i, D)]

    def dim(self, i: int, D: int) -> int:
        return len(self.basis(i, D)[0])

    def lowest_degree(self, i: int) -> int:
        return -self.t * sum(sorted(self.deg, reverse=True)[:i])

    def reduce(self, terms: dict) -> dict:
        return self.gb.reduce_terms(terms, self.caps)

    def dmat(self, i: int, D: int) -> np.ndarray:
        if (i, D) in self._dmat:
            return self._dmat[(i, D)]
        src, _ = self.basis(i, D)
        _, tidx = self.basis(i + 1, D)
        mat = np.zeros((len(tidx), len(src)), dtype=np.int64)
        p = self.p
        for col, (sigma, m) in enumerate(src):
            for j in range(self.d):
                if j in sigma:
                    continue
                sign = -1 if sum(1 for k in sigma if k < j) % 2 else 1
                tau = tuple(sorted(sigma + (j,)))
                img = self.reduce(self.pows[j].mul_monomial(m)._terms)
                for mono, c in img.items():
                    row = tidx[(tau, mono)]
                    mat[row, col] = (mat[row, col] + sign * c) % p
        self._dmat[(i, D)] = mat
        return mat

    def cocycles(self, i: int, D: int) -> np.ndarray:
        n = self.dim(i, D)
        if n == 0:
            return np.zeros((0, 0), dtype=np.int64)
        if i == self.d:
            return np.eye(n, dtype=np.int64)
        return linalg.nullspace(self.dmat(i, D), self.p)

    def coboundaries(self, i: int, D: int) -> np.ndarray:
        n = self.dim(i, D)
        if i == 0 or self.dim(i - 1, D) == 0:
            return np.zeros((n, 0), dtype=np.int64)
        return linalg.column_basis(self.dmat(i - 1, D), self.p)

    def seq_power(self, sigma, k: int) -> Polynomial:
        if (sigma, k) not in self._prod:
            out = self.ring.one()
            for j in sigma:
                out = out * self.seq[j] ** k
            self._prod[(sigma, k)] = out
        return self._prod[(sigma, k)]

    def map_to(self, other: "_Koszul", i: int, D: int, D2: int, image) -> np.ndarray:
        """Matrix of a componentwise map; ``image(σ, m)`` returns unreduced terms."""
        src, _ = self.basis(i, D)
        _, tidx = other.basis(i, D2)
        mat = np.zeros((len(tidx), len(src)), dtype=np.int64)
        for col, (sigma, m) in enumerate(src):
            for mono, c in other.reduce(image(sigma, m)).items():
                mat[tidx[(sigma, mono)], col] = c
        return mat

    def tower(self, other: "_Koszul", i: int, D: int) -> np.ndarray:
        gap = other.t - self.t
        return self.map_to(other, i, D, D,
                           lambda sigma, m: self.seq_power(sigma, gap).mul_monomial(m)._terms)

    def frobenius(self, other: "_Koszul", i: int, D: int, e: int) -> np.ndarray:
        q = self.p ** e
        return self.map_to(other, i, D, q * D,
                           lambda sigma, m: _frob_terms({m: 1}, q))

    def multiply(self, f: Polynomial, i: int, D: int) -> np.ndarray:
        return self.map_to(self, i, D, D + f.total_degree(),
                           lambda sigma, m: f.mul_monomial(m)._terms)

    def cochain(self, i: int, D: int, vec) -> dict:
        src, _ = self.basis(i, D)
        parts: dict = {}
        for (sigma, m), c in zip(src, vec):
            if c:
                parts.setdefault(sigma, {})[m] = int(c)
        return {s: self.ring.from_terms(t) for s, t in sorted(parts.items())}


def _independent_mod(vecs: np.ndarray, sub: np.ndarray, p: int) -> list:
    """Indices of columns of ``vecs`` forming a basis modulo ``colspace(sub)``."""
    rows = vecs.shape[0]
    if sub.shape[1]:
        sub = linalg.column_basis(sub, p)
    nsub = sub.shape[1]
    if vecs.shape[1] == 0 or rows == 0:
        return []
    _, piv = linalg.rref(linalg.hstack(sub, vecs, rows=rows), p)
    return [c - nsub for c in piv if c >= nsub]


def _check_homogeneous_sop(R, K, seq, caps):
    _require_sop(R, K, seq, caps)
    if not R.lift(K).is_homogeneous() or not all(f.is_homogeneous() for f in seq):
        raise FrobtestError("middle cohomology needs homogeneous relations and parameters")


def koszul_cohomology(R: PresentedRing, x: list, t: int, i: int,
                      degree_cap: int | None = None, caps: Caps = DEFAULT_CAPS,
                      K: Ideal | None = None) -> CohomologyModule:
    """``H^i(x_1^t, ..., x_d^t; R/K)`` by graded linear algebra up to ``degree_cap``.

    Raises :class:`UnboundedSupportError` unless the top ``caps.window``
    degrees below the cap are zero.
    """
    K = _zero_ideal(R) if K is None else K
    cap = caps.degree_cap if degree_cap is None else degree_cap
    J = R.lift(K)
    if not J.is_homogeneous() or not all(f.is_homogeneous() for f in x):
        raise FrobtestError("graded Koszul computations need homogeneous data")
    if i < 0 or i > len(x):
        raise ValueError(f"Koszul index {i} out of range for {len(x)} elements")
    kz = _Koszul(J, x, t, caps)
    basis, degrees, dims = [], [], {}
    p = R.p
    for D in range(kz.lowest_degree(i), cap + 1):
        Z = kz.cocycles(i, D)
        B = kz.coboundaries(i, D)
        h = Z.shape[1] - B.shape[1]
        dims[D] = h
        if h:
            for c in _independent_mod(Z, B, p):
                basis.append(kz.cochain(i, D, Z[:, c]))
                degrees.append(D)
    top = [dims.get(D, 0) for D in range(cap - caps.window + 1, cap + 1)]
    if any(top):
        raise UnboundedSupportError(
            f"H^{i}(x^{t}) is nonzero at degrees near the cap {cap}: {dims}")
    return CohomologyModule("koszul", i, len(basis), tuple(basis), None,
                            {"t": t, "degree_dims": {str(k): v for k, v in dims.items() if v}},
                            tuple(degrees))


class _Snapshot:
    """``H^i_m(R/K)`` represented as the image of stage ``t`` in stage ``2t``."""

    def __init__(self, R, K, seq, i, t, caps):
        self.R, self.K, self.seq, self.i, self.t, self.caps = R, K, seq, i, t, caps
        J = R.lift(K)
        self.src = _Koszul(J, seq, t, caps)
        self.dst = _Koszul(J, seq, 2 * t, caps)
        self.p = R.p
        self.parts = {}
        for D in range(self.src.lowest_degree(i), caps.degree_cap + 1):
            Z = self.src.cocycles(i, D)
            if Z.shape[1] == 0:
                continue
            tz = linalg.matmul(self.src.tower(self.dst, i, D), Z, self.p)
            B = self.dst.coboundaries(i, D)
            r = linalg.relative_rank(tz, B, self.p)
            if r:
                self.parts[D] = (Z, tz, B, r)
        top = [D for D in self.parts if D > caps.degree_cap - caps.window]
        if top:
            raise UnboundedSupportError(
                f"H^{i} snapshot has classes at degrees {top} near the cap {caps.degree_cap}")

    @property
    def length(self) -> int:
        return sum(r for *_, r in self.parts.values())

    def module(self) -> CohomologyModule:
        basis, degrees = [], []
        for D in sorted(self.parts):
            Z, tz, B, _ = self.parts[D]
            for c in _independent_mod(tz, B, self.p):
                basis.append(self.src.cochain(self.i, D, Z[:, c]))
                degrees.append(D)
        return CohomologyModule("stable", self.i, len(basis), tuple(basis), None,
                                {"t": self.t, "t_prime": 2 * self.t}, tuple(degrees))

    def frobenius_kernel(self, e: int, targets: dict) -> int:
        """Length of ``ker F^e`` on the snapshot (``F_R^e`` into ``R/K^[p^e]``)."""
        q = self.p ** e
        if e not in targets:
            Je = self.R.lift(self.K.frobenius_power(e))
            targets[e] = _Koszul(Je, self.seq, 2 * self.t * q, self.caps)
        big = targets[e]
        total = 0
        for D, (Z, tz, B, r) in self.parts.items():
            F = self.dst.frobenius(big, self.i, D, e)
            img = linalg.matmul(F, tz, self.p)
            Bq = big.coboundaries(self.i, q * D)
            killed = linalg.preimage_dimension(img, Bq, self.p)
            zero = Z.shape[1] - r
            if killed < zero:
                raise ConsistencyError("Frobenius does not respect the tower (functoriality)")
            total += killed - zero
        return total

    def annihilated_by(self, f: Polynomial) -> bool:
        """Does multiplication by ``f`` kill the snapshot?"""
        df = f.total_degree()
        for D, (Z, tz, B, r) in self.parts.items():
            mz = linalg.matmul(self.src.multiply(f, self.i, D), Z, self.p)
            tmz = linalg.matmul(self.src.tower(self.dst, self.i, D + df), mz, self.p)
            if linalg.relative_rank(tmz, self.dst.coboundaries(self.i, D + df), self.p):
                return False
        return True


def _stable_snapshot(R, K, seq, i, caps):
    """Snapshots for ``t = 1, 2, ...`` until the length repeats ``caps.window`` times."""
    lengths = []
    snaps = []
    for t in range(1, caps.max_stage + 1):
        snap = _Snapshot(R, K, seq, i, t, caps)
        snaps.append(snap)
        lengths.append(snap.length)
        w = caps.window
        if len(lengths) >= w and len(set(lengths[-w:])) == 1:
            first = snaps[-w]
            return first, CertifiedValue(first.length, Status.CERTIFIED_WINDOW, evidence={
                "lengths": lengths, "stage": first.t})
    return snaps[-1], CertifiedValue(lengths[-1], Status.TRUNCATED, "max_stage",
                                     {"lengths": lengths})


def stable_cohomology(R: PresentedRing, x: list, i: int, caps: Caps = DEFAULT_CAPS,
                      K: Ideal | None = None):
    """Snapshot of ``H^i_m(R/K)`` for ``i < d`` and its certified length."""
    K = _zero_ideal(R) if K is None else K
    if i >= len(x):
        raise ValueError("stable_cohomology handles i < d; use hsl_top for the top degree")
    _check_homogeneous_sop(R, K, x, caps)
    snap, cert = _stable_snapshot(R, K, x, i, caps)
    return snap.module(), cert


def hsl_local_cohomology(R: PresentedRing, x: list, i: int, caps: Caps = DEFAULT_CAPS,
                         K: Ideal | None = None) -> HSLReport:
    """HSL number of ``H^i_m(R/K)`` for ``i < d`` with the F-nilpotency flag.

    ``i = 0`` uses the exact saturation route; ``0 < i < d`` uses stable
    Koszul snapshots, so the status is at best CERTIFIED-WINDOW.
    """
    K = _zero_ideal(R) if K is None else K
    relative = not K.is_zero()
    d = len(x)
    if i >= d:
        if i == d:
            return hsl_top(R, x, caps, K)
        raise ValueError(f"index {i} exceeds dimension {d}")
    if i == 0:
        report = hsl_relative_h0(R, K, caps, check=False)
        report.relative = relative
        return report
    try:
        _check_homogeneous_sop(R, K, x, caps)
        snap, cert = _stable_snapshot(R, K, x, i, caps)
        n = snap.length
        chain = [0]
        status = cert.status
        if n:
            targets: dict = {}
            for e in range(1, caps.max_e + 1):
                chain.append(snap.frobenius_kernel(e, targets))
                if chain[-1] < chain[-2]:
                    raise ConsistencyError(f"kernel chain decreased: {chain}")
                if _stable_index(chain, caps.window) is not None:
                    break
            else:
                status = Status.TRUNCATED
    except ResourceCapExceeded as exc:
        return HSLReport(CertifiedValue(None, Status.TRUNCATED, exc.cap), [], None, i,
                         relative=relative)
    value = _hsl_from_chain(chain) if status is not Status.TRUNCATED else None
    ev = {"snapshot": cert.to_dict(), "chain": chain}
    cap = cert.cap if status is Status.TRUNCATED else None
    return HSLReport(CertifiedValue(value, status, cap or ("max_e" if value is None else None), ev),
                     chain, chain[-1] == n, i, n, relative=relative)


@dataclass
class RingHSL:
    reports: list
    value: CertifiedValue
    bound: CertifiedValue

    def per_degree(self) -> list:
        return [r.value.value for r in self.reports]

    def to_dict(self) -> dict:
        return {
            "per_degree": [r.to_dict() for r in self.reports],
            "hsl": self.value.to_dict(),
            "bound": self.bound.to_dict(),
        }


def binomial_bound(values: list) -> int:
    """``Σ_k C(d, k) · v_k`` for ``values = [v_0, ..., v_d]``."""
    d = len(values) - 1
    return sum(comb(d, k) * v for k, v in enumerate(values))


def hsl_ring(R: PresentedRing, x: list, caps: Caps = DEFAULT_CAPS) -> RingHSL:
    """``HSL(R)`` (max over degrees) and the uniform bound ``Σ C(d,k) HSL(H^k)``."""
    d = len(x)
    reports = []
    for i in range(d + 1):
        if i == d and d > 0:
            reports.append(hsl_top(R, x, caps))
        else:
            reports.append(hsl_local_cohomology(R, x, i, caps))
    status = weakest(*(r.value.status for r in reports))
    vals = [r.value.value for r in reports]
    if None in vals:
        hsl = CertifiedValue(None, Status.TRUNCATED, "component")
        bound = CertifiedValue(None, Status.TRUNCATED, "component")
    else:
        hsl = CertifiedValue(max(vals), status, evidence={"per_degree": vals})
        bound = CertifiedValue(binomial_bound(vals), status, evidence={"per_degree": vals})
    return RingHSL(reports, hsl, bound)
