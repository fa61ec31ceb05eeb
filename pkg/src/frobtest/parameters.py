"""Systems of parameters, filter-regularity, standardness probes and sampling."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .algebra import Polynomial, split_generators
from .certificates import DEFAULT_CAPS, Caps, CertifiedValue, Status, weakest
from .cohomology import _stable_snapshot, _TorsionSpace
from .errors import FailedAfterTries, FrobtestError, NotParameterSystemError, SamplingExhausted
from .groebner import Ideal, colon_ideal, monomials_of_degree, saturate
from .rings import PresentedRing


@dataclass
class ParameterSequence:
    """An ordered sequence ``x_1, ..., x_d`` with its validation certificates."""

    ring: PresentedRing
    elements: tuple
    is_sop: CertifiedValue
    is_filter_regular: CertifiedValue
    is_standard_probe: CertifiedValue | None = None

    def ideal(self) -> Ideal:
        return Ideal(self.ring.ambient, list(self.elements))

    def prefix(self, i: int) -> Ideal:
        """``q_i = (x_1, ..., x_i)``."""
        return Ideal(self.ring.ambient, list(self.elements[:i]))

    def powers(self, n: int) -> list:
        return [x ** n for x in self.elements]

    def __str__(self):
        return "(" + ", ".join(map(str, self.elements)) + ")"

    def to_dict(self) -> dict:
        out = {
            "elements": [str(x) for x in self.elements],
            "is_sop": self.is_sop.to_dict(),
            "is_filter_regular": self.is_filter_regular.to_dict(),
        }
        if self.is_standard_probe is not None:
            out["is_standard_probe"] = self.is_standard_probe.to_dict()
        return out


def _as_polys(R: PresentedRing, x) -> list:
    if isinstance(x, str):
        # element by element: an Ideal would reorder the sequence
        return [R.parse(s) for s in split_generators(x)]
    if isinstance(x, Ideal):
        return list(x.generators)
    return [R.parse(f) if isinstance(f, str) else f for f in x]


def is_system_of_parameters(R: PresentedRing, x, caps: Caps = DEFAULT_CAPS) -> CertifiedValue:
    """``len(x) = dim R`` and ``R/(x)`` has dimension zero, with every ``x_i ∈ m``."""
    x = _as_polys(R, x)
    d = R.dim(caps)
    ev = {"dim_R": d, "length": len(x)}
    if len(x) != d:
        return CertifiedValue(False, Status.CERTIFIED, evidence={**ev, "reason": "wrong length"})
    if any(f.constant_term() for f in x):
        return CertifiedValue(False, Status.CERTIFIED,
                              evidence={**ev, "reason": "element outside the maximal ideal"})
    quot = R.lift(Ideal(R.ambient, x)).dimension(caps)
    ev["dim_quotient"] = quot
    return CertifiedValue(quot == 0, Status.CERTIFIED, evidence=ev)


def is_filter_regular(R: PresentedRing, x, caps: Caps = DEFAULT_CAPS) -> CertifiedValue:
    """Every ``((x_1..x_(i-1)) + a) : x_i`` lies in ``((x_1..x_(i-1)) + a) : m^∞``.

    This colon criterion is equivalent to ``x_i`` avoiding every associated
    prime of ``R/(x_1..x_(i-1))`` other than ``m``.
    """
    x = _as_polys(R, x)
    m = R.maximal_ideal()
    for i, f in enumerate(x):
        A = R.lift(Ideal(R.ambient, x[:i]))
        col = colon_ideal(A, f, caps)
        sat, _ = saturate(A, m, caps)
        if not sat.contains_ideal(col, caps):
            bad = next(g for g in col.generators if not sat.contains(g, caps))
            return CertifiedValue(False, Status.CERTIFIED, evidence={
                "failing_index": i + 1, "colon_element": str(bad)})
    return CertifiedValue(True, Status.CERTIFIED)


def _validated(R: PresentedRing, x: list, caps: Caps) -> ParameterSequence:
    return ParameterSequence(R, tuple(x), is_system_of_parameters(R, x, caps),
                             is_filter_regular(R, x, caps))


def _transforms(x: list, p: int, rng: random.Random, ring):
    """Random elementary operations ``x_i += c·u·x_j`` preserving the ideal and homogeneity."""
    d = len(x)
    degs = [f.total_degree() for f in x]
    out = list(x)
    for _ in range(rng.randint(1, max(1, d))):
        i, j = rng.sample(range(d), 2)
        if degs[i] < degs[j]:
            i, j = j, i
        u = rng.choice(monomials_of_degree(ring.nvars, degs[i] - degs[j]))
        c = rng.randrange(1, p)
        out[i] = out[i] + out[j].mul_monomial(u).scale(c)
    return out


def make_filter_regular(R: PresentedRing, q, seed: int = 0, tries: int = 64,
                        caps: Caps = DEFAULT_CAPS) -> ParameterSequence:
    """A filter-regular generating sequence of the parameter ideal ``q``.

    The given generators are tried first; then seeded elementary row
    operations (which generate the same ideal).  Raises
    :class:`FailedAfterTries` listing the sequences that were tried.
    """
    x = _as_polys(R, q)
    sop = is_system_of_parameters(R, x, caps)
    if not sop.value:
        raise NotParameterSystemError(f"({', '.join(map(str, x))}) is not a system of parameters")
    seq = ParameterSequence(R, tuple(x), sop, is_filter_regular(R, x, caps))
    if seq.is_filter_regular.value or len(x) < 2:
        if not seq.is_filter_regular.value:
            raise FailedAfterTries("single element is not filter-regular", [str(seq)])
        return seq
    rng = random.Random(seed)
    tried = [str(seq)]
    for _ in range(tries):
        y = _transforms(x, R.p, rng, R.ambient)
        fr = is_filter_regular(R, y, caps)
        tried.append("(" + ", ".join(map(str, y)) + ")")
        if fr.value:
            return ParameterSequence(R, tuple(y), is_system_of_parameters(R, y, caps), fr)
    raise FailedAfterTries(f"no filter-regular generating sequence after {tries} tries", tried)


def _probe_once(R: PresentedRing, x: list, caps: Caps):
    d = len(x)
    failures, statuses = [], [Status.CERTIFIED]
    for i in range(d):
        K = Ideal(R.ambient, x[:i])
        for j in range(d - i):
            if j == 0:
                space = _TorsionSpace(R, K, caps)
                killed = all(
                    not space.gb.reduce_terms((Polynomial(R.ambient, b) * f)._terms, caps)
                    for b in space.basis_terms() for f in x)
            else:
                snap, cert = _stable_snapshot(R, K, x[i:], j, caps)
                statuses.append(cert.status)
                killed = all(snap.annihilated_by(f) for f in x)
            if not killed:
                failures.append({"i": i, "j": j})
    return failures, weakest(*statuses)


def standardness_probe(R: PresentedRing, seq, caps: Caps = DEFAULT_CAPS,
                       powers=(1, 2, 4)) -> CertifiedValue:
    """Probe ``q · H^j_m(R/q_i) = 0`` for all ``i + j < d``.

    Retries with ``x^n`` for ``n`` in ``powers``; the evidence records the
    first power that passes.  Snapshots of middle cohomology make the result
    at best CERTIFIED-WINDOW.
    """
    x = list(seq.elements) if isinstance(seq, ParameterSequence) else _as_polys(R, seq)
    history = []
    status = Status.CERTIFIED
    for n in powers:
        y = [f ** n for f in x]
        failures, st = _probe_once(R, y, caps)
        status = weakest(status, st)
        history.append({"power": n, "failures": failures})
        if not failures:
            return CertifiedValue(True, status, evidence={"power": n, "history": history})
    cap = "max_stage" if status is Status.TRUNCATED else None
    return CertifiedValue(False, status, cap, evidence={"history": history})


def _random_form(R: PresentedRing, degree: int, rng: random.Random) -> Polynomial:
    monos = monomials_of_degree(R.ambient.nvars, degree)
    terms = {}
    while not terms:
        for m in monos:
            if rng.random() < 0.5:
                c = rng.randrange(1, R.p)
                terms[m] = c
    return R.ambient.from_terms(terms)


def sample_parameter_ideals(R: PresentedRing, count: int, degree: int = 1, seed: int = 0,
                            caps: Caps = DEFAULT_CAPS, max_tries: int = 400) -> list:
    """``count`` distinct filter-regular homogeneous systems of parameters.

    Each element is a random form of degree between 1 and ``degree``; the
    output depends only on the arguments.  Sequences are distinct as
    sequences of elements of ``R``; two of them may generate the same ideal.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    if degree < 1:
        raise ValueError("degree must be at least 1")
    rng = random.Random(seed)
    d = R.dim(caps)
    rel_gb = R.relations.groebner(caps)
    out, seen = [], set()
    for attempt in range(max_tries):
        x = [_random_form(R, rng.randint(1, degree), rng) for _ in range(d)]
        if not is_system_of_parameters(R, x, caps).value:
            continue
        key = tuple(rel_gb.reduce(f, caps) for f in x)
        if key in seen:
            continue
        try:
            seq = make_filter_regular(R, x, seed=rng.randrange(2**31), caps=caps)
        except FailedAfterTries:
            continue
        seen.add(key)
        out.append(seq)
        if len(out) == count:
            return out
    raise SamplingExhausted(
        f"found {len(out)} of {count} parameter ideals after {max_tries} tries")


def default_sop(R: PresentedRing, caps: Caps = DEFAULT_CAPS, seed: int = 0) -> ParameterSequence:
    """A filter-regular homogeneous system of parameters, preferring variables."""
    d = R.dim(caps)
    if d < 0:
        raise FrobtestError("the zero ring has no system of parameters")
    for combo in itertools.combinations(R.ambient.gens(), d):
        seq = _validated(R, list(combo), caps)
        if seq.is_sop.value and seq.is_filter_regular.value:
            return seq
    return sample_parameter_ideals(R, 1, 1, seed, caps)[0]
