"""Frobenius powers, Frobenius roots, Frobenius closure and test exponents.

For an ideal ``I`` of ``R = S/a`` with ``S/(I + a)`` of finite length, the
set ``J_e = {f : f^(p^e) ∈ I^[p^e] + a}`` is the kernel of the map
``S/(I + a) -> S/(I^[p^e] + a)``, ``f ↦ f^(p^e)``.  That map is additive and
fixes scalars of ``F_p``, hence F_p-linear, so each ``J_e`` is an exact
kernel computation on standard monomials.  The chain ``J_0 ⊆ J_1 ⊆ ...``
ascends to the Frobenius closure.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .algebra import Polynomial, check_exponents
from .certificates import DEFAULT_CAPS, Caps, CertifiedValue, Status
from .errors import NotArtinianError, ResourceCapExceeded
from .groebner import Ideal
from .rings import PresentedRing, local_component


def frobenius_power(I: Ideal, e: int) -> Ideal:
    """``I^[p^e]``, generated by the ``p^e``-th powers of the generators."""
    if e < 0:
        raise ValueError("e must be non-negative")
    return I.frobenius_power(e)


def root_basis(nvars: int, p: int, e: int) -> list:
    """Monomials with every exponent below ``p^e``: a free basis of ``F^e_* S`` over ``S``."""
    q = p ** e
    out = [()]
    for _ in range(nvars):
        out = [m + (k,) for m in out for k in range(q)]
    return out


def frobenius_root(K: Ideal, e: int, caps: Caps = DEFAULT_CAPS) -> Ideal:
    """Smallest ideal ``J`` of the polynomial ring with ``K ⊆ J^[p^e]``.

    Writing each generator as ``g = sum_b u_b^(p^e) * b`` over the basis of
    :func:`root_basis`, the root is generated by all the ``u_b``.  One pass
    is exact because ``F^e_* S`` is free; the containment is re-checked.
    """
    if e < 0:
        raise ValueError("e must be non-negative")
    ring = K.ring
    if e == 0:
        return K
    q = ring.p ** e
    coeffs = []
    for g in K.generators:
        parts: dict = {}
        for m, c in g._terms.items():
            r = tuple(x % q for x in m)
            parts.setdefault(r, {})[tuple(x // q for x in m)] = c
        coeffs.extend(Polynomial(ring, t) for t in parts.values())
    J = Ideal(ring, coeffs).reduced(caps)
    if not J.frobenius_power(e).contains_ideal(K, caps):
        raise AssertionError("Frobenius root failed its containment certificate")
    return J


@dataclass
class Witness:
    """``element^(p^e) ∈ I^[p^e] + a`` (locally at the origin), checked by normal form."""

    element: Polynomial
    e: int
    normal_form_zero: bool = True

    def verify(self, R: PresentedRing, I: Ideal, caps: Caps = DEFAULT_CAPS) -> bool:
        target = local_component(R.lift(I.frobenius_power(self.e)), caps)
        return target.contains(self.element.frobenius(self.e), caps)

    def to_dict(self) -> dict:
        return {"element": str(self.element), "e": self.e,
                "normal_form_zero": self.normal_form_zero}


@dataclass
class ClosureResult:
    closure: Ideal
    fte: CertifiedValue
    witnesses: list = field(default_factory=list)
    chain: list = field(default_factory=list)
    base_length: int = 0

    @property
    def closure_length(self) -> int:
        """``ℓ(I^F / I)`` measured in ``R``."""
        return self.chain[-1] if self.chain else 0

    def to_dict(self) -> dict:
        return {
            "closure": [str(g) for g in self.closure.generators],
            "fte": self.fte.to_dict(),
            "witnesses": [w.to_dict() for w in self.witnesses],
            "chain": list(self.chain),
            "base_length": self.base_length,
        }


class _FrobeniusKernels:
    """Kernels of ``f ↦ f^(p^e)`` from ``S/Q_0`` to ``S/Q_e`` with ``Q_e`` the
    local component of ``I^[p^e] + a``."""

    def __init__(self, R: PresentedRing, I: Ideal, caps: Caps):
        self.R, self.I, self.caps = R, I, caps
        base = R.lift(I)
        if not base.is_unit(caps) and base.dimension(caps) > 0:
            raise NotArtinianError(
                f"R/I has positive dimension for I = {I}; Frobenius closure is "
                "computed for ideals of finite colength")
        self.Q0 = local_component(base, caps).reduced(caps)
        self.basis = [] if self.Q0.is_unit(caps) else self.Q0.standard_monomials(caps=caps)
        self._targets: dict = {}

    def target(self, e: int) -> Ideal:
        if e not in self._targets:
            self._targets[e] = local_component(
                self.R.lift(self.I.frobenius_power(e)), self.caps).reduced(self.caps)
        return self._targets[e]

    def kernel(self, e: int) -> np.ndarray:
        """Columns are coefficient vectors (over ``self.basis``) of the kernel."""
        p = self.R.p
        n = len(self.basis)
        if e == 0 or n == 0:
            return np.zeros((n, 0), dtype=np.int64)
        gb = self.target(e).groebner(self.caps)
        q = p ** e
        images = []
        for m in self.basis:
            mq = tuple(x * q for x in m)
            check_exponents(mq)
            images.append(gb.reduce_terms({mq: 1}, self.caps))
        rows = {}
        for img in images:
            for mono in img:
                rows.setdefault(mono, len(rows))
        mat = np.zeros((len(rows), n), dtype=np.int64)
        for j, img in enumerate(images):
            for mono, c in img.items():
                mat[rows[mono], j] = c
        return linalg.nullspace(mat, p)

    def kernel_ideal(self, vectors: np.ndarray) -> Ideal:
        ring = self.R.ambient
        polys = []
        for k in range(vectors.shape[1]):
            col = vectors[:, k]
            polys.append(ring.from_terms({self.basis[i]: int(c) for i, c in enumerate(col) if c}))
        return (self.Q0 + Ideal(ring, polys)).reduced(self.caps)


def frobenius_closure(I: Ideal, R: PresentedRing, caps: Caps = DEFAULT_CAPS) -> ClosureResult:
    """Frobenius closure ``I^F`` of ``I R`` pulled back to ``S``, with ``Fte(I)``.

    The chain ``J_e`` stops once it has repeated for ``caps.window``
    consecutive steps.  The result is CERTIFIED when additionally
    ``(I^F)^[p^e_stop] ⊆ I^[p^e_stop] + a`` re-verifies by normal form, and
    TRUNCATED when ``caps.max_e`` (or any inner budget) is exhausted first.
    """
    ring = R.ambient
    try:
        kern = _FrobeniusKernels(R, I, caps)
    except ResourceCapExceeded as exc:
        return ClosureResult(R.lift(I), CertifiedValue(None, Status.TRUNCATED, exc.cap))
    if kern.Q0.is_unit(caps):
        return ClosureResult(Ideal.unit(ring), CertifiedValue(0, Status.CERTIFIED, evidence={
            "reason": "unit ideal at the origin", "chain": [0]}), chain=[0])

    chain = [0]
    kernels = {0: np.zeros((len(kern.basis), 0), dtype=np.int64)}
    stop = None
    cap_hit = None
    for e in range(1, caps.max_e + 1):
        try:
            kernels[e] = kern.kernel(e)
        except ResourceCapExceeded as exc:
            cap_hit = exc.cap
            break
        chain.append(kernels[e].shape[1])
        if chain[-1] < chain[-2]:
            raise AssertionError(f"Frobenius kernel chain decreased: {chain}")
        if len(chain) > caps.window and len(set(chain[-caps.window - 1:])) == 1:
            stop = e
            break
    last = max(kernels)
    closure = kern.kernel_ideal(kernels[last])
    evidence = {"chain": chain, "window": caps.window, "base_length": len(kern.basis)}
    if stop is None:
        cap = cap_hit or "max_e"
        return ClosureResult(closure, CertifiedValue(None, Status.TRUNCATED, cap, evidence),
                             chain=chain, base_length=len(kern.basis))

    # Fte: first e with (I^F)^[p^e] ⊆ local(I^[p^e] + a), by normal forms
    new_gens = [g for g in closure.generators if not kern.Q0.contains(g, caps)]
    fte = None
    try:
        for e in range(0, stop + 1):
            target = kern.Q0 if e == 0 else kern.target(e)
            if all(target.contains(g.frobenius(e), caps) for g in new_gens):
                fte = e
                break
        sound = all(kern.target(stop).contains(g.frobenius(stop), caps) for g in new_gens)
        witnesses = []
        for g in new_gens:
            first = next(e for e in range(1, stop + 1)
                         if kern.target(e).contains(g.frobenius(e), caps))
            witnesses.append(Witness(g, first))
    except ResourceCapExceeded as exc:
        return ClosureResult(closure, CertifiedValue(None, Status.TRUNCATED, exc.cap, evidence),
                             chain=chain, base_length=len(kern.basis))
    if fte is None or not sound:
        raise AssertionError("closure failed its soundness certificate")
    if fte > 0:
        prev = kern.Q0 if fte == 1 else kern.target(fte - 1)
        evidence["minimality"] = not all(
            prev.contains(g.frobenius(fte - 1), caps) for g in new_gens)
    evidence["stationary_from"] = stop - caps.window
    evidence["e_stop"] = stop
    return ClosureResult(closure, CertifiedValue(fte, Status.CERTIFIED, None, evidence),
                         witnesses, chain, len(kern.basis))


def frobenius_test_exponent(I: Ideal, R: PresentedRing, caps: Caps = DEFAULT_CAPS) -> CertifiedValue:
    """``Fte(I)``: least ``e`` with ``(I^F)^[p^e] = I^[p^e]`` in ``R``."""
    return frobenius_closure(I, R, caps).fte


def brute_force_closure_members(R: PresentedRing, I: Ideal, candidates, max_e: int,
                                caps: Caps = DEFAULT_CAPS) -> set:
    """Candidates ``x`` with ``x^(p^e) ∈ I^[p^e] + a`` for some ``e ≤ max_e``."""
    found = set()
    for e in range(max_e + 1):
        target = local_component(R.lift(I.frobenius_power(e)), caps)
        for x in candidates:
            if x not in found and target.contains(x.frobenius(e), caps):
                found.add(x)
    return found
