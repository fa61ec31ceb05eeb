"""Reduced Gröbner bases over F_p and the ideal calculus built on them.

The Buchberger loop uses the Gebauer–Möller update (coprime and chain
criteria) with normal pair selection.  Every computation runs under a step
budget; exhausting it raises :class:`ResourceCapExceeded` rather than
returning a partial basis.
"""

from __future__ import annotations

import heapq
import itertools
import threading
from collections import OrderedDict
from dataclasses import dataclass
from typing import Iterable, Sequence

from .algebra import (
    Polynomial,
    PolynomialRing,
    monomial_divides,
    monomial_lcm,
    monomial_quotient,
)
from .certificates import DEFAULT_CAPS, Caps
from .errors import NotArtinianError, ResourceCapExceeded, RingMismatchError


class _Budget:
    __slots__ = ("left", "cap")

    def __init__(self, steps: int, cap: str = "gb_steps"):
        self.left = steps
        self.cap = cap

    def spend(self, n: int = 1):
        self.left -= n
        if self.left < 0:
            raise ResourceCapExceeded(self.cap)


def _negkey(key, m):
    return tuple(-k for k in key(m))


# Monomials packed into one integer, 33 bits per variable.  With a guard bit
# above every field, ``m`` is divisible by ``l`` iff no field borrows in
# ``(pack(m) | guard) - pack(l)``.
_BITS = 33


def _pack(m) -> int:
    v = 0
    for i, e in enumerate(m):
        v |= e << (_BITS * i)
    return v


def _guard(nvars: int) -> int:
    return sum(1 << (_BITS * i + _BITS - 1) for i in range(nvars))


class _Divisors:
    """Leading monomials (with their polynomials) prepared for divisor search."""

    __slots__ = ("items", "guard")

    def __init__(self, items, guard):
        self.items = items
        self.guard = guard

    @classmethod
    def of(cls, pairs):
        pairs = list(pairs)
        nvars = len(pairs[0][0]) if pairs else 0
        return cls([(_pack(lm), lm, g) for lm, g in pairs], _guard(nvars))

    def __bool__(self):
        return bool(self.items)

    def find(self, m):
        G = self.guard
        M = _pack(m) | G
        for P, lm, g in self.items:
            if (M - P) & G == G:
                return lm, g
        return None


def _find_divisor(m, basis):
    if not isinstance(basis, _Divisors):
        basis = _Divisors.of(basis)
    return basis.find(m)


def _normal_form(f: dict, basis: Sequence, key, p: int, budget: _Budget) -> dict:
    """Full reduction of ``f`` by ``basis`` (pairs of leading monomial, monic terms)."""
    if not f or not basis:
        return dict(f)
    if not isinstance(basis, _Divisors):
        basis = _Divisors.of(basis)
    find = basis.find
    work = dict(f)
    heap = [(_negkey(key, m), m) for m in work]
    heapq.heapify(heap)
    rem = {}
    while heap:
        _, m = heapq.heappop(heap)
        c = work.pop(m, None)
        if c is None:
            continue
        hit = find(m)
        if hit is None:
            rem[m] = c
            continue
        budget.spend()
        lm, g = hit
        q = monomial_quotient(m, lm)
        for gm, gc in g.items():
            if gm == lm:
                continue
            mm = tuple(a + b for a, b in zip(gm, q))
            old = work.get(mm)
            v = ((old or 0) - c * gc) % p
            if v:
                if old is None:
                    heapq.heappush(heap, (_negkey(key, mm), mm))
                work[mm] = v
            elif old is not None:
                del work[mm]
    return rem


def _monic(f: dict, key, p: int):
    lm = max(f, key=key)
    inv = pow(f[lm], -1, p)
    if inv == 1:
        return lm, f
    return lm, {m: (c * inv) % p for m, c in f.items()}


def _spoly(lf, f, lg, g, p):
    lcm = monomial_lcm(lf, lg)
    qf = monomial_quotient(lcm, lf)
    qg = monomial_quotient(lcm, lg)
    out = {}
    for m, c in f.items():
        out[tuple(a + b for a, b in zip(m, qf))] = c
    for m, c in g.items():
        mm = tuple(a + b for a, b in zip(m, qg))
        v = (out.get(mm, 0) - c) % p
        if v:
            out[mm] = v
        else:
            out.pop(mm, None)
    return out


def _coprime(a, b):
    return all(x == 0 or y == 0 for x, y in zip(a, b))


def _buchberger(gens: list, key, p: int, caps: Caps) -> list:
    """Return the reduced Gröbner basis of ``gens`` (list of term dicts)."""
    budget = _Budget(caps.gb_steps)
    lms: list = []
    polys: list = []
    packed: list = []
    active: list = []
    pairs: list = []

    def lcm_of(i, j):
        return monomial_lcm(lms[i], lms[j])

    def update(h):
        nonlocal active, pairs
        lh = lms[h]
        cands = [(g, lcm_of(h, g)) for g in active]
        kept = []
        for idx, (g1, l1) in enumerate(cands):
            if _coprime(lh, lms[g1]):
                kept.append((g1, l1))
                continue
            rest = cands[idx + 1:]
            if any(monomial_divides(l2, l1) for _, l2 in rest):
                continue
            if any(monomial_divides(l2, l1) for _, l2 in kept):
                continue
            kept.append((g1, l1))
        new_pairs = [(g, h, l) for g, l in kept if not _coprime(lh, lms[g])]
        survivors = []
        for (g1, g2, l) in pairs:
            if (monomial_divides(lh, l)
                    and lcm_of(g1, h) != l
                    and lcm_of(h, g2) != l):
                continue
            survivors.append((g1, g2, l))
        pairs = survivors + new_pairs
        active = [g for g in active if not monomial_divides(lh, lms[g])] + [h]

    def add(f):
        if caps.max_degree and max(sum(m) for m in f) > caps.max_degree:
            raise ResourceCapExceeded("max_degree")
        lm, f = _monic(f, key, p)
        lms.append(lm)
        polys.append(f)
        packed.append(_pack(lm))
        update(len(polys) - 1)

    guard = None

    def basis():
        nonlocal guard
        if guard is None and lms:
            guard = _guard(len(lms[0]))
        return _Divisors([(packed[g], lms[g], polys[g]) for g in active], guard)

    for f in sorted(gens, key=lambda f: key(max(f, key=key))):
        h = _normal_form(f, basis(), key, p, budget)
        if h:
            add(h)
    while pairs:
        best = min(range(len(pairs)),
                   key=lambda k: (key(pairs[k][2]), pairs[k][0], pairs[k][1]))
        g1, g2, _ = pairs.pop(best)
        s = _spoly(lms[g1], polys[g1], lms[g2], polys[g2], p)
        h = _normal_form(s, basis(), key, p, budget)
        if h:
            add(h)
    # active is minimal; interreduce tails
    final = []
    mins = [(lms[g], polys[g]) for g in active]
    for i, (lm, g) in enumerate(mins):
        others = mins[:i] + mins[i + 1:]
        tail = {m: c for m, c in g.items() if m != lm}
        tail = _normal_form(tail, others, key, p, budget)
        tail[lm] = 1
        final.append((lm, tail))
    final.sort(key=lambda t: key(t[0]))
    return final


@dataclass(frozen=True)
class GroebnerBasis:
    """Reduced Gröbner basis, monic elements sorted by ascending leading monomial."""

    ring: PolynomialRing
    elements: tuple

    @classmethod
    def _from_pairs(cls, ring, pairs):
        obj = cls(ring, tuple(Polynomial(ring, g) for _, g in pairs))
        object.__setattr__(obj, "_pairs", tuple(pairs))
        object.__setattr__(obj, "_divisors", _Divisors.of(pairs))
        return obj

    @property
    def pairs(self) -> tuple:
        return self._pairs

    def leading_monomials(self) -> list:
        return [lm for lm, _ in self._pairs]

    def is_unit(self) -> bool:
        return any(not any(lm) for lm in self.leading_monomials())

    def reduce(self, f: Polynomial, caps: Caps = DEFAULT_CAPS) -> Polynomial:
        if f.ring != self.ring:
            raise RingMismatchError(f"{f.ring} vs {self.ring}")
        rem = _normal_form(f._terms, self._divisors, self.ring.sort_key, self.ring.p,
                           _Budget(caps.gb_steps))
        return Polynomial(self.ring, rem)

    def reduce_terms(self, terms: dict, caps: Caps = DEFAULT_CAPS) -> dict:
        return _normal_form(terms, self._divisors, self.ring.sort_key, self.ring.p,
                            _Budget(caps.gb_steps))

    def is_standard(self, m: tuple) -> bool:
        return self._divisors.find(m) is None

    def check(self) -> bool:
        """Buchberger certificate: every S-polynomial reduces to zero."""
        key, p = self.ring.sort_key, self.ring.p
        budget = _Budget(DEFAULT_CAPS.gb_steps)
        for (l1, g1), (l2, g2) in itertools.combinations(self._pairs, 2):
            s = _spoly(l1, g1, l2, g2, p)
            if _normal_form(s, self._pairs, key, p, budget):
                return False
        return True

    def is_reduced(self) -> bool:
        for i, (lm, g) in enumerate(self._pairs):
            if g.get(lm) != 1:
                return False
            others = [q for j, q in enumerate(self._pairs) if j != i]
            for m in g:
                if _find_divisor(m, others) is not None:
                    return False
        return True


_GB_CACHE: "OrderedDict[tuple, GroebnerBasis]" = OrderedDict()
_GB_LOCK = threading.Lock()
_GB_CACHE_SIZE = 4096


def _cached_gb(ring, gens: tuple, caps: Caps) -> GroebnerBasis:
    key = (ring, frozenset(gens))
    with _GB_LOCK:
        hit = _GB_CACHE.get(key)
        if hit is not None:
            _GB_CACHE.move_to_end(key)
            return hit
    pairs = _buchberger([g._terms for g in gens], ring.sort_key, ring.p, caps)
    gb = GroebnerBasis._from_pairs(ring, pairs)
    with _GB_LOCK:
        _GB_CACHE[key] = gb
        if len(_GB_CACHE) > _GB_CACHE_SIZE:
            _GB_CACHE.popitem(last=False)
    return gb


class Ideal:
    """An ideal of an ambient polynomial ring given by generators.

    Generators are canonical, nonzero and deterministically ordered (by
    leading monomial, then term count).  The reduced Gröbner basis is
    computed lazily and cached by value.
    """

    def __init__(self, ring: PolynomialRing, generators: Iterable = ()):
        gens = []
        for g in generators:
            if isinstance(g, str):
                g = ring.parse(g)
            elif isinstance(g, int):
                g = ring.constant(g)
            if g.ring != ring:
                raise RingMismatchError(f"{g.ring} vs {ring}")
            if g:
                gens.append(g)
        self.ring = ring
        self.generators = tuple(sorted(set(gens), key=Polynomial.sort_tuple))
        self._gb = None

    @classmethod
    def parse(cls, ring, text: str) -> Ideal:
        from .algebra import split_generators
        ring = getattr(ring, "ambient", ring)
        return cls(ring, [ring.parse(s) for s in split_generators(text)])

    @classmethod
    def maximal(cls, ring: PolynomialRing) -> Ideal:
        return cls(ring, ring.gens())

    @classmethod
    def unit(cls, ring: PolynomialRing) -> Ideal:
        return cls(ring, [ring.one()])

    def __repr__(self):
        return f"Ideal({', '.join(map(str, self.generators))})"

    def __str__(self):
        return "(" + ", ".join(map(str, self.generators)) + ")"

    def __iter__(self):
        return iter(self.generators)

    def __len__(self):
        return len(self.generators)

    # -- Gröbner machinery --------------------------------------------
    def groebner(self, caps: Caps = DEFAULT_CAPS) -> GroebnerBasis:
        if self._gb is None:
            self._gb = _cached_gb(self.ring, self.generators, caps)
        return self._gb

    def reduce(self, f: Polynomial, caps: Caps = DEFAULT_CAPS) -> Polynomial:
        return self.groebner(caps).reduce(f, caps)

    def contains(self, f: Polynomial, caps: Caps = DEFAULT_CAPS) -> bool:
        return self.reduce(f, caps).is_zero()

    def __contains__(self, f):
        return self.contains(f)

    def contains_ideal(self, other: Ideal, caps: Caps = DEFAULT_CAPS) -> bool:
        gb = self.groebner(caps)
        return all(gb.reduce(g, caps).is_zero() for g in other.generators)

    def same_ideal(self, other: Ideal, caps: Caps = DEFAULT_CAPS) -> bool:
        return self.groebner(caps).elements == other.groebner(caps).elements

    def is_zero(self) -> bool:
        return not self.generators

    def is_unit(self, caps: Caps = DEFAULT_CAPS) -> bool:
        return self.groebner(caps).is_unit()

    def is_homogeneous(self) -> bool:
        return all(g.is_homogeneous() for g in self.generators)

    def reduced(self, caps: Caps = DEFAULT_CAPS) -> Ideal:
        """Same ideal presented by its reduced Gröbner basis."""
        out = Ideal(self.ring, self.groebner(caps).elements)
        out._gb = self._gb
        return out

    # -- constructions --------------------------------------------------
    def __add__(self, other) -> Ideal:
        if isinstance(other, Polynomial):
            other = Ideal(self.ring, [other])
        return Ideal(self.ring, self.generators + other.generators)

    def __mul__(self, other) -> Ideal:
        if isinstance(other, Polynomial):
            return Ideal(self.ring, [g * other for g in self.generators])
        return Ideal(self.ring, [f * g for f in self.generators for g in other.generators])

    def power(self, n: int) -> Ideal:
        out = Ideal.unit(self.ring)
        for _ in range(n):
            out = out * self
        return out

    def frobenius_power(self, e: int) -> Ideal:
        return Ideal(self.ring, [g.frobenius(e) for g in self.generators])

    def intersect(self, other: Ideal, caps: Caps = DEFAULT_CAPS) -> Ideal:
        return intersect(self, other, caps)

    def colon(self, f, caps: Caps = DEFAULT_CAPS) -> Ideal:
        if isinstance(f, Ideal):
            return colon_by_ideal(self, f, caps)
        return colon_ideal(self, f, caps)

    def saturate(self, J: Ideal, caps: Caps = DEFAULT_CAPS):
        return saturate(self, J, caps)

    def dimension(self, caps: Caps = DEFAULT_CAPS) -> int:
        return dimension(self, caps)

    def length(self, caps: Caps = DEFAULT_CAPS) -> int:
        return length_artinian(self, caps)

    def standard_monomials(self, degree: int | None = None, caps: Caps = DEFAULT_CAPS) -> list:
        return standard_monomials(self, degree, caps)


def groebner_basis(I: Ideal, caps: Caps = DEFAULT_CAPS) -> GroebnerBasis:
    return I.groebner(caps)


def normal_form(f: Polynomial, I: Ideal, caps: Caps = DEFAULT_CAPS) -> Polynomial:
    return I.reduce(f, caps)


def _embed(f: Polynomial, ext: PolynomialRing, k: int) -> Polynomial:
    pad = (0,) * k
    return Polynomial(ext, {pad + m: c for m, c in f._terms.items()})


def _eliminate(ext: PolynomialRing, gens: list, ring: PolynomialRing, k: int,
               caps: Caps) -> Ideal:
    gb = Ideal(ext, gens).groebner(caps)
    kept = []
    for g in gb.elements:
        if all(not any(m[:k]) for m in g._terms):
            kept.append(Polynomial(ring, {m[k:]: c for m, c in g._terms.items()}))
    return Ideal(ring, kept)


def _aux_name(ring: PolynomialRing) -> str:
    name = "_t"
    while name in ring.variables:
        name += "_"
    return name


def intersect(I: Ideal, J: Ideal, caps: Caps = DEFAULT_CAPS) -> Ideal:
    """``I ∩ J`` by eliminating ``t`` from ``t·I + (1 - t)·J``."""
    ring = I.ring
    if I.is_zero() or J.is_zero():
        return Ideal(ring)
    if I.is_unit(caps):
        return J
    if J.is_unit(caps):
        return I
    ext = ring.extend([_aux_name(ring)])
    t = ext.var(0)
    gens = [t * _embed(g, ext, 1) for g in I.generators]
    gens += [(1 - t) * _embed(g, ext, 1) for g in J.generators]
    return _eliminate(ext, gens, ring, 1, caps)


def exact_divide(g: Polynomial, f: Polynomial) -> Polynomial:
    """``g / f`` when ``f`` divides ``g``; raises ValueError otherwise."""
    ring = g.ring
    key, p = ring.sort_key, ring.p
    lf = f.leading_monomial()
    inv = pow(f.leading_coefficient(), -1, p)
    rest = dict(g._terms)
    quot = {}
    while rest:
        m = max(rest, key=key)
        if not monomial_divides(lf, m):
            raise ValueError(f"{f} does not divide {g}")
        q = monomial_quotient(m, lf)
        c = (rest[m] * inv) % p
        quot[q] = c
        for fm, fc in f._terms.items():
            mm = tuple(a + b for a, b in zip(fm, q))
            v = (rest.get(mm, 0) - c * fc) % p
            if v:
                rest[mm] = v
            else:
                rest.pop(mm, None)
    return Polynomial(ring, quot)


def colon_ideal(I: Ideal, f: Polynomial, caps: Caps = DEFAULT_CAPS) -> Ideal:
    """``(I : f) = {g : g f ∈ I}`` via ``(I ∩ (f)) / f``."""
    if f.is_zero():
        raise ValueError("colon by the zero polynomial is undefined")
    ring = I.ring
    if f.is_constant() or I.is_zero():
        return I if f.is_constant() else Ideal(ring)
    if I.contains(f, caps):
        return Ideal.unit(ring)
    meet = intersect(I, Ideal(ring, [f]), caps)
    return Ideal(ring, [exact_divide(g, f) for g in meet.generators]).reduced(caps)


def colon_by_ideal(I: Ideal, J: Ideal, caps: Caps = DEFAULT_CAPS) -> Ideal:
    """``(I : J) = ∩_g (I : g)`` over the generators of ``J``."""
    ring = I.ring
    if J.is_zero():
        return Ideal.unit(ring)
    out = None
    for g in J.generators:
        c = colon_ideal(I, g, caps)
        out = c if out is None else intersect(out, c, caps)
    return out.reduced(caps)


def saturate(I: Ideal, J: Ideal, caps: Caps = DEFAULT_CAPS, max_steps: int = 256):
    """``(I : J^∞)`` and the number of colon steps taken.

    Iterates ``I_k = (I_{k-1} : J)``.  Once ``(I_k : J) = I_k`` the chain is
    constant from there on, so one repeat is a complete stop rule.
    """
    if J.is_zero():
        raise ValueError("saturation by the zero ideal")
    cur = I.reduced(caps)
    for step in range(1, max_steps + 1):
        nxt = colon_by_ideal(cur, J, caps)
        if nxt.same_ideal(cur, caps):
            return cur, step
        cur = nxt
    raise ResourceCapExceeded("saturation_steps")


def dimension(I: Ideal, caps: Caps = DEFAULT_CAPS) -> int:
    """Krull dimension of ``S/I``; ``-1`` for the unit ideal."""
    gb = I.groebner(caps)
    if gb.is_unit():
        return -1
    n = I.ring.nvars
    supports = [frozenset(i for i, e in enumerate(lm) if e) for lm in gb.leading_monomials()]
    for size in range(n, -1, -1):
        for subset in itertools.combinations(range(n), size):
            s = frozenset(subset)
            if not any(sup <= s for sup in supports):
                return size
    return 0


def _monomials_of_degree(n: int, d: int):
    if n == 0:
        if d == 0:
            yield ()
        return
    if n == 1:
        yield (d,)
        return
    for first in range(d, -1, -1):
        for rest in _monomials_of_degree(n - 1, d - first):
            yield (first,) + rest


def monomials_of_degree(n: int, d: int) -> list:
    return list(_monomials_of_degree(n, d))


def standard_monomials(I: Ideal, degree: int | None = None,
                       caps: Caps = DEFAULT_CAPS) -> list:
    """Monomials outside the leading-term ideal, ascending in the ring order.

    With ``degree`` given only that total degree is listed (any ideal);
    otherwise the ideal must be zero-dimensional.
    """
    gb = I.groebner(caps)
    key = I.ring.sort_key
    if degree is not None:
        if degree < 0:
            return []
        out = [m for m in _monomials_of_degree(I.ring.nvars, degree) if gb.is_standard(m)]
        return sorted(out, key=key)
    if dimension(I, caps) > 0:
        raise NotArtinianError(f"{I} has positive dimension")
    if gb.is_unit():
        return []
    n = I.ring.nvars
    seen = {(0,) * n}
    frontier = [(0,) * n]
    while frontier:
        nxt = []
        for m in frontier:
            for i in range(n):
                mm = m[:i] + (m[i] + 1,) + m[i + 1:]
                if mm not in seen and gb.is_standard(mm):
                    seen.add(mm)
                    nxt.append(mm)
        frontier = nxt
    return sorted(seen, key=key)


def length_artinian(I: Ideal, caps: Caps = DEFAULT_CAPS) -> int:
    """``dim_{F_p} S/I`` for a zero-dimensional ideal."""
    return len(standard_monomials(I, None, caps))
