"""Prime-field polynomial arithmetic.

Monomials are plain tuples of non-negative exponents (one slot per ambient
variable).  A :class:`Polynomial` keeps a ``{monomial: residue}`` dictionary
with no zero residues, so two polynomials are equal exactly when their term
sets coincide; the descending term list is derived from it on demand.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import IntEnum
from functools import lru_cache
from typing import Callable, Iterable, Mapping

from .errors import (
    ExponentOverflowError,
    ParseError,
    RingMismatchError,
    UnknownVariableError,
)

MAX_EXPONENT = 2**31 - 1
MAX_CHARACTERISTIC = 2**31
ORDER_KINDS = ("grevlex", "lex", "gradedlex")


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    k = 3
    while k * k <= n:
        if n % k == 0:
            return False
        k += 2
    return True


class Cmp(IntEnum):
    LT = -1
    EQ = 0
    GT = 1


@lru_cache(maxsize=None)
def _key_function(kind: str, priority: tuple, elim: int) -> Callable[[tuple], tuple]:
    perm = priority
    if kind == "lex":
        def base(e):
            return tuple(e[i] for i in perm)
    elif kind == "gradedlex":
        def base(e):
            return (sum(e),) + tuple(e[i] for i in perm)
    elif kind == "grevlex":
        rev = tuple(reversed(perm))

        def base(e):
            return (sum(e),) + tuple(-e[i] for i in rev)
    else:
        raise ValueError(f"unknown monomial order {kind!r}")
    if not elim:
        return base

    def key(e):
        return (sum(e[:elim]),) + base(e)
    return key


@dataclass(frozen=True)
class MonomialOrder:
    """A monomial order on ``n`` variables.

    ``priority`` lists variable indices from most to least significant; it
    defaults to declaration order.  ``elim > 0`` turns the order into an
    elimination order for the first ``elim`` variables (used internally for
    intersections and colons).
    """

    kind: str = "grevlex"
    priority: tuple = ()
    elim: int = 0

    def __post_init__(self):
        kind = self.kind.replace("-", "").replace("_", "").lower()
        if kind == "deglex" or kind == "grlex":
            kind = "gradedlex"
        if kind not in ORDER_KINDS:
            raise ValueError(f"unknown monomial order {self.kind!r}; expected one of {ORDER_KINDS}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "priority", tuple(self.priority))

    def for_size(self, n: int) -> MonomialOrder:
        if self.priority:
            if sorted(self.priority) != list(range(n)):
                raise ValueError(f"priority {self.priority} is not a permutation of {n} variables")
            return self
        return MonomialOrder(self.kind, tuple(range(n)), self.elim)

    def key(self, exps: tuple) -> tuple:
        """Sort key: a larger key means a larger monomial."""
        prio = self.priority or tuple(range(len(exps)))
        return _key_function(self.kind, prio, self.elim)(exps)

    def compare(self, a: tuple, b: tuple) -> Cmp:
        if len(a) != len(b):
            raise RingMismatchError(f"monomials of length {len(a)} and {len(b)} are not comparable")
        ka, kb = self.key(tuple(a)), self.key(tuple(b))
        return Cmp((ka > kb) - (ka < kb))


def compare_monomials(a: tuple, b: tuple, order: MonomialOrder) -> Cmp:
    return order.compare(a, b)


def monomial_divides(a: tuple, b: tuple) -> bool:
    return all(x <= y for x, y in zip(a, b))


def monomial_lcm(a: tuple, b: tuple) -> tuple:
    return tuple(x if x > y else y for x, y in zip(a, b))


def monomial_quotient(b: tuple, a: tuple) -> tuple:
    return tuple(y - x for x, y in zip(a, b))


def check_exponents(exps: Iterable[int]) -> None:
    for e in exps:
        if e > MAX_EXPONENT:
            raise ExponentOverflowError(f"exponent {e} exceeds {MAX_EXPONENT}")


@dataclass(frozen=True)
class PolynomialRing:
    """The ambient ring ``F_p[variables]`` with a fixed monomial order."""

    characteristic: int
    variables: tuple
    order: MonomialOrder = field(default_factory=MonomialOrder)

    def __post_init__(self):
        p = int(self.characteristic)
        if not is_prime(p):
            raise ValueError(f"characteristic {p} is not prime")
        if p >= MAX_CHARACTERISTIC:
            raise ValueError(f"characteristic {p} must be below 2^31")
        names = tuple(self.variables)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        for name in names:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name):
                raise ValueError(f"invalid variable name {name!r}")
        order = self.order
        if isinstance(order, str):
            order = MonomialOrder(order)
        object.__setattr__(self, "characteristic", p)
        object.__setattr__(self, "variables", names)
        object.__setattr__(self, "order", order.for_size(len(names)))

    @property
    def p(self) -> int:
        return self.characteristic

    @property
    def nvars(self) -> int:
        return len(self.variables)

    @property
    def sort_key(self) -> Callable[[tuple], tuple]:
        o = self.order
        return _key_function(o.kind, o.priority, o.elim)

    def zero(self) -> Polynomial:
        return Polynomial(self, {})

    def one(self) -> Polynomial:
        return self.constant(1)

    def constant(self, c: int) -> Polynomial:
        return self.from_terms({(0,) * self.nvars: c})

    def gens(self) -> list:
        return [self.var(i) for i in range(self.nvars)]

    def var(self, which) -> Polynomial:
        i = self.variables.index(which) if isinstance(which, str) else int(which)
        exps = [0] * self.nvars
        exps[i] = 1
        return Polynomial(self, {tuple(exps): 1})

    def monomial(self, exps, coeff: int = 1) -> Polynomial:
        exps = tuple(int(e) for e in exps)
        if len(exps) != self.nvars or min(exps, default=0) < 0:
            raise ValueError(f"bad exponent vector {exps} for {self.nvars} variables")
        check_exponents(exps)
        return self.from_terms({exps: coeff})

    def from_terms(self, terms: Mapping[tuple, int]) -> Polynomial:
        p = self.characteristic
        clean = {}
        for m, c in terms.items():
            c %= p
            if c:
                clean[tuple(m)] = c
        return Polynomial(self, clean)

    def parse(self, source: str) -> Polynomial:
        return parse_polynomial(source, self)

    def extend(self, names: Iterable[str], elim: bool = True) -> PolynomialRing:
        """Prepend new variables; with ``elim`` they are eliminated first."""
        names = tuple(names)
        k = len(names)
        prio = tuple(range(k)) + tuple(i + k for i in self.order.priority)
        order = MonomialOrder(self.order.kind, prio, k if elim else 0)
        return PolynomialRing(self.characteristic, names + self.variables, order)

    def __str__(self):
        return f"F_{self.characteristic}[{','.join(self.variables)}]"


class Polynomial:
    """Immutable polynomial over ``F_p`` in canonical form."""

    __slots__ = ("ring", "_terms", "_lm", "_hash")

    def __init__(self, ring: PolynomialRing, terms: dict):
        # terms must already be reduced mod p with no zero coefficients
        self.ring = ring
        self._terms = terms
        self._lm = None
        self._hash = None

    # -- structure -----------------------------------------------------
    @property
    def term_dict(self) -> dict:
        return dict(self._terms)

    def terms(self) -> list:
        """``(coefficient, monomial)`` pairs, strictly descending."""
        key = self.ring.sort_key
        return [(self._terms[m], m) for m in sorted(self._terms, key=key, reverse=True)]

    def monomials(self) -> list:
        return [m for _, m in self.terms()]

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def leading_monomial(self) -> tuple:
        if not self._terms:
            raise ValueError("the zero polynomial has no leading monomial")
        if self._lm is None:
            self._lm = max(self._terms, key=self.ring.sort_key)
        return self._lm

    def leading_coefficient(self) -> int:
        return self._terms[self.leading_monomial()]

    def total_degree(self) -> int:
        return max((sum(m) for m in self._terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(m) for m in self._terms}) <= 1

    def is_constant(self) -> bool:
        return all(not any(m) for m in self._terms)

    def constant_term(self) -> int:
        return self._terms.get((0,) * self.ring.nvars, 0)

    def monic(self) -> Polynomial:
        if not self._terms:
            return self
        return self.scale(pow(self.leading_coefficient(), -1, self.ring.p))

    # -- arithmetic ----------------------------------------------------
    def _coerce(self, other) -> Polynomial:
        if isinstance(other, Polynomial):
            if other.ring != self.ring:
                raise RingMismatchError(f"{self.ring} vs {other.ring}")
            return other
        if isinstance(other, int):
            return self.ring.constant(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.ring.p
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = (out.get(m, 0) + c) % p
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Polynomial(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        p = self.ring.p
        return Polynomial(self.ring, {m: p - c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: int) -> Polynomial:
        p = self.ring.p
        c %= p
        if not c:
            return self.ring.zero()
        return Polynomial(self.ring, {m: (v * c) % p for m, v in self._terms.items()})

    def mul_monomial(self, mono: tuple, c: int = 1) -> Polynomial:
        p = self.ring.p
        c %= p
        if not c:
            return self.ring.zero()
        out = {}
        for m, v in self._terms.items():
            out[tuple(a + b for a, b in zip(m, mono))] = (v * c) % p
        return Polynomial(self.ring, out)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Polynomial(self.ring, _mul_terms(self._terms, other._terms, self.ring.p))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not polynomials")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def frobenius(self, e: int = 1) -> Polynomial:
        """``self ** (p**e)`` computed termwise."""
        return poly_power_pe(self, e)

    def substitute(self, values: Mapping[int, Polynomial]) -> Polynomial:
        """Replace variable ``i`` by ``values[i]`` (others left alone)."""
        ring = self.ring
        out = ring.zero()
        gens = ring.gens()
        for c, m in self.terms():
            term = ring.constant(c)
            for i, e in enumerate(m):
                if e:
                    term = term * (values.get(i, gens[i]) ** e)
            out = out + term
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring.constant(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ring == other.ring and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        return f"Polynomial({str(self)!r}, {self.ring})"

    def __str__(self):
        return format_polynomial(self)

    def sort_tuple(self) -> tuple:
        """Deterministic ordering key: leading monomial, then term count."""
        if not self._terms:
            return ((), 0)
        return (self.ring.sort_key(self.leading_monomial()), len(self._terms))


def _mul_terms(a: dict, b: dict, p: int) -> dict:
    if len(a) < len(b):
        a, b = b, a
    out = {}
    get = out.get
    for mb, cb in b.items():
        for ma, ca in a.items():
            m = tuple(x + y for x, y in zip(ma, mb))
            out[m] = (get(m, 0) + ca * cb) % p
    return {m: c for m, c in out.items() if c}


def poly_power_pe(f: Polynomial, e: int) -> Polynomial:
    """Return ``f^(p^e)``.

    Frobenius is a ring endomorphism and fixes ``F_p``, so every term maps
    to ``c * m^(p^e)``.
    """
    if e < 0:
        raise ValueError("e must be non-negative")
    if e == 0:
        return f
    q = f.ring.p ** e
    out = {}
    for m, c in f._terms.items():
        mq = tuple(x * q for x in m)
        check_exponents(mq)
        out[mq] = c
    return Polynomial(f.ring, out)


def format_polynomial(f: Polynomial) -> str:
    if f.is_zero():
        return "0"
    names = f.ring.variables
    parts = []
    for c, m in f.terms():
        factors = []
        for name, e in zip(names, m):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f"{name}^{e}")
        if not factors:
            parts.append(str(c))
        elif c == 1:
            parts.append("*".join(factors))
        else:
            parts.append(f"{c}*" + "*".join(factors))
    return " + ".join(parts)


# -- parsing ------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\*\*|[-+*^()]))")


def _tokenize(source: str) -> list:
    tokens = []
    pos = 0
    n = len(source)
    while pos < n:
        if source[pos:].strip() == "":
            break
        m = _TOKEN.match(source, pos)
        if not m:
            raise ParseError(f"unexpected character {source[pos:].lstrip()[:1]!r}",
                             pos + len(source[pos:]) - len(source[pos:].lstrip()), source)
        start = m.start(m.lastindex)
        if m.group(1) is not None:
            tokens.append(("int", int(m.group(1)), start))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2), start))
        else:
            op = m.group(3)
            tokens.append(("op", "^" if op == "**" else op, start))
        pos = m.end()
    tokens.append(("end", None, n))
    return tokens


class _Parser:
    def __init__(self, source: str, ring: PolynomialRing):
        self.source = source
        self.ring = ring
        self.tokens = _tokenize(source)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, message, tok):
        raise ParseError(message, tok[2], self.source)

    def parse(self) -> Polynomial:
        value = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            self.fail(f"unexpected token {tok[1]!r}", tok)
        return value

    def expr(self) -> Polynomial:
        sign = 1
        if self.peek()[:2] == ("op", "-"):
            # leading unary minus: a convenience beyond the strict grammar
            self.take()
            sign = -1
        value = self.term()
        if sign < 0:
            value = -value
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> Polynomial:
        value = self.factor()
        while self.peek()[:2] == ("op", "*"):
            self.take()
            value = value * self.factor()
        return value

    def exponent(self) -> int:
        tok = self.take()
        if tok[0] != "int":
            self.fail("expected a non-negative integer exponent", tok)
        check_exponents([tok[1]])
        return tok[1]

    def factor(self) -> Polynomial:
        tok = self.take()
        kind, val, pos = tok
        if kind == "int":
            return self.ring.constant(val)
        if kind == "name":
            if val not in self.ring.variables:
                raise UnknownVariableError(f"unknown variable {val!r}", pos, self.source)
            base = self.ring.var(val)
            if self.peek()[:2] == ("op", "^"):
                self.take()
                return self.ring.monomial(
                    [self.exponent() if v == val else 0 for v in self.ring.variables])
            return base
        if (kind, val) == ("op", "("):
            inner = self.expr()
            close = self.take()
            if close[:2] != ("op", ")"):
                self.fail("expected ')'", close)
            if self.peek()[:2] == ("op", "^"):
                self.take()
                return inner ** self.exponent()
            return inner
        if kind == "end":
            self.fail("unexpected end of input", tok)
        self.fail(f"unexpected token {val!r}", tok)


def parse_polynomial(source: str, ring) -> Polynomial:
    """Parse ``source`` in the ambient ring of ``ring``.

    ``ring`` may be a :class:`PolynomialRing` or anything with an
    ``ambient`` attribute (a presented quotient ring).  Integer literals are
    reduced modulo the characteristic.
    """
    ring = getattr(ring, "ambient", ring)
    return _Parser(source, ring).parse()


def split_generators(text: str) -> list:
    """Split ``"g1, g2, ..."`` on top-level commas.

    Blank text means no generators; an empty entry between commas is an error.
    """
    if not text.strip():
        return []
    parts, depth, cur, starts = [], 0, [], [0]
    for pos, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            starts.append(pos + 1)
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    for part, start in zip(parts, starts):
        if not part.strip():
            raise ParseError("empty generator", start, text)
    return [x.strip() for x in parts]
