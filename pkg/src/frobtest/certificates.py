"""Certificate statuses, certified values and resource caps."""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, field, fields, replace
from enum import Enum
from typing import Any


class Status(str, Enum):
    CERTIFIED = "CERTIFIED"
    CERTIFIED_WINDOW = "CERTIFIED-WINDOW"
    UNCERTIFIED = "UNCERTIFIED"
    TRUNCATED = "TRUNCATED"

    def __str__(self):
        return self.value


_STRENGTH = {
    Status.CERTIFIED: 3,
    Status.CERTIFIED_WINDOW: 2,
    Status.UNCERTIFIED: 1,
    Status.TRUNCATED: 0,
}


def weakest(*statuses: Status) -> Status:
    if not statuses:
        return Status.CERTIFIED
    return min(statuses, key=_STRENGTH.__getitem__)


def is_decided(status: Status) -> bool:
    """CERTIFIED and CERTIFIED-WINDOW values are usable as verdict inputs."""
    return _STRENGTH[status] >= _STRENGTH[Status.CERTIFIED_WINDOW]


@dataclass
class CertifiedValue:
    """An integer (or boolean) invariant with its certificate.

    ``cap`` names the exhausted budget when ``status`` is TRUNCATED.
    ``evidence`` holds the trail (chains, windows, witnesses) as plain data.
    """

    value: Any
    status: Status = Status.CERTIFIED
    cap: str | None = None
    evidence: dict = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return self.status is Status.CERTIFIED

    def describe(self) -> str:
        tag = str(self.status)
        if self.status is Status.TRUNCATED and self.cap:
            tag = f"TRUNCATED({self.cap})"
        return f"{self.value} [{tag}]"

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "status": str(self.status),
            "cap": self.cap,
            "evidence": self.evidence,
        }


@dataclass(frozen=True)
class Caps:
    """Resource budgets.  Hitting any of them yields TRUNCATED, never a wrong value."""

    max_e: int = 4
    window: int = 2
    max_stage: int = 4
    max_s: int = 6
    degree_cap: int = 6
    gb_steps: int = 1_000_000
    max_degree: int = 1024
    stages: tuple = (1, 2)

    @classmethod
    def from_env(cls, environ=None, **overrides) -> Caps:
        """Defaults, then ``FROBTEST_*`` environment values, then explicit overrides."""
        environ = os.environ if environ is None else environ
        values = {}
        for f in fields(cls):
            raw = environ.get("FROBTEST_" + f.name.upper())
            if raw is None:
                continue
            if f.name == "stages":
                values[f.name] = tuple(int(s) for s in raw.split(",") if s.strip())
            else:
                values[f.name] = int(raw)
        values.update({k: v for k, v in overrides.items() if v is not None})
        return replace(cls(), **values)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["stages"] = list(self.stages)
        return d


DEFAULT_CAPS = Caps()
