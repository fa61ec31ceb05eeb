"""Presented quotient rings ``R = S/a`` and the ring-file format."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .algebra import MonomialOrder, Polynomial, PolynomialRing, split_generators
from .certificates import DEFAULT_CAPS, Caps
from .errors import FrobtestError, ParseError
from .groebner import Ideal, colon_by_ideal, saturate


@dataclass(frozen=True)
class PresentedRing:
    """``S/a`` viewed as a local ring at the origin of ``S = F_p[variables]``.

    All invariants are those of the localization at the homogeneous maximal
    ideal ``m = (variables)``; for homogeneous data this agrees with the
    global graded computation.
    """

    ambient: PolynomialRing
    relations: Ideal
    label: str = ""

    @classmethod
    def build(cls, characteristic: int, variables, relations=(), order="grevlex",
              label: str = "") -> PresentedRing:
        ambient = PolynomialRing(characteristic, tuple(variables), MonomialOrder(order))
        rels = [ambient.parse(r) if isinstance(r, str) else r for r in relations]
        return cls(ambient, Ideal(ambient, rels), label)

    @property
    def p(self) -> int:
        return self.ambient.p

    @property
    def variables(self) -> tuple:
        return self.ambient.variables

    def parse(self, text: str) -> Polynomial:
        return self.ambient.parse(text)

    def ideal(self, generators) -> Ideal:
        """Ideal of ``S`` generated by ``generators`` (text or polynomials)."""
        if isinstance(generators, str):
            return Ideal.parse(self.ambient, generators)
        return Ideal(self.ambient, generators)

    def lift(self, I: Ideal) -> Ideal:
        """``I + a``: the preimage in ``S`` of the ideal ``I R``."""
        return I + self.relations

    def maximal_ideal(self) -> Ideal:
        return Ideal.maximal(self.ambient)

    def dim(self, caps: Caps = DEFAULT_CAPS) -> int:
        return self.relations.dimension(caps)

    def is_homogeneous(self) -> bool:
        return self.relations.is_homogeneous()

    def to_ringfile(self) -> dict:
        o = self.ambient.order
        return {
            "characteristic": self.p,
            "variables": list(self.variables),
            "relations": [str(g) for g in self.relations.generators],
            "order": o.kind,
            "label": self.label,
        }

    def __str__(self):
        rels = ", ".join(map(str, self.relations.generators))
        return f"{self.ambient}/({rels})" if rels else str(self.ambient)


def is_m_primary(J: Ideal, caps: Caps = DEFAULT_CAPS) -> bool:
    """Zero-dimensional with the origin as its only point (or the unit ideal)."""
    if J.is_unit(caps):
        return True
    if J.dimension(caps) != 0:
        return False
    if J.is_homogeneous():
        return True
    gb = J.groebner(caps)
    n = J.length(caps)
    for x in J.ring.gens():
        power = J.ring.one()
        for _ in range(n):
            power = gb.reduce(power * x, caps)
            if power.is_zero():
                break
        if not power.is_zero():
            return False
    return True


def local_component(J: Ideal, caps: Caps = DEFAULT_CAPS) -> Ideal:
    """Contraction of ``J S_m`` for zero-dimensional ``J``.

    For ``J = Q_m ∩ Q'`` with ``Q'`` supported away from the origin,
    ``(J : m^∞) = Q'`` and ``J : Q' = Q_m``.
    """
    if is_m_primary(J, caps):
        return J
    away, _ = saturate(J, Ideal.maximal(J.ring), caps)
    return colon_by_ideal(J, away, caps)


# -- ring files ---------------------------------------------------------

RINGFILE_KEYS = ("characteristic", "variables", "relations", "order", "label")


def ring_from_dict(data: dict) -> PresentedRing:
    if not isinstance(data, dict):
        raise FrobtestError("ring file must hold a JSON object")
    missing = [k for k in ("characteristic", "variables") if k not in data]
    if missing:
        raise FrobtestError(f"ring file is missing keys {missing}")
    unknown = set(data) - set(RINGFILE_KEYS)
    if unknown:
        raise FrobtestError(f"unknown ring file keys {sorted(unknown)}")
    try:
        return PresentedRing.build(
            int(data["characteristic"]),
            list(data["variables"]),
            list(data.get("relations", [])),
            data.get("order", "grevlex"),
            str(data.get("label", "")),
        )
    except ParseError:
        raise
    except ValueError as exc:
        raise FrobtestError(f"invalid ring file: {exc}") from exc


def load_ring(path) -> PresentedRing:
    """Load a ring file, or a built-in ring when ``path`` names one."""
    text = str(path)
    if text in BUILTIN_RINGS:
        return builtin_ring(text)
    if text.startswith("builtin:"):
        return builtin_ring(text.split(":", 1)[1])
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FrobtestError(f"{path}: not valid JSON ({exc})") from exc
    except FileNotFoundError:
        raise FrobtestError(f"{path}: no such ring file or built-in ring "
                            f"(built-ins: {', '.join(sorted(BUILTIN_RINGS))})") from None
    except OSError as exc:
        raise FrobtestError(f"{path}: {exc.strerror}") from exc
    ring = ring_from_dict(data)
    if not ring.label:
        ring = PresentedRing(ring.ambient, ring.relations, Path(path).stem)
    return ring


BUILTIN_RINGS = {
    "poly2": {
        "characteristic": 2, "variables": ["x", "y"], "relations": [],
        "order": "grevlex", "label": "poly2",
    },
    "fermat2": {
        "characteristic": 2, "variables": ["x", "y", "z"], "relations": ["x^3+y^3+z^3"],
        "order": "grevlex", "label": "fermat2",
    },
    "fermat5": {
        "characteristic": 5, "variables": ["x", "y", "z"], "relations": ["x^3+y^3+z^3"],
        "order": "grevlex", "label": "fermat5",
    },
    "nonreduced2": {
        "characteristic": 2, "variables": ["x", "y"], "relations": ["x^2", "x*y"],
        "order": "grevlex", "label": "nonreduced2",
    },
    "sr2": {
        "characteristic": 2, "variables": ["a", "b", "c", "d"],
        "relations": ["a*c", "a*d", "b*c", "b*d"],
        "order": "grevlex", "label": "sr2",
    },
}


def builtin_ring(name: str) -> PresentedRing:
    try:
        return ring_from_dict(BUILTIN_RINGS[name])
    except KeyError:
        raise FrobtestError(f"no built-in ring named {name!r}; "
                            f"choose from {sorted(BUILTIN_RINGS)}") from None
