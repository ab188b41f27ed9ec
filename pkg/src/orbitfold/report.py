"""Check reports: a list of ``{check, n, status, witness}`` records."""

from __future__ import annotations

from dataclasses import dataclass, field

from .algebra import MultiPoly, RatFun
from .algebra.scalar import scalar_str
from .algebra.serialize import ratfun_to_json


@dataclass
class Check:
    check: str
    n: int
    passed: bool
    witness: object = None

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def to_json(self) -> dict:
        return {"check": self.check, "n": self.n, "status": self.status,
                "witness": witness_json(self.witness) if not self.passed else None}


def witness_json(w):
    if w is None:
        return None
    if isinstance(w, (RatFun, MultiPoly)):
        return ratfun_to_json(w)
    if isinstance(w, dict):
        return {str(k): witness_json(v) for k, v in w.items()}
    if isinstance(w, (list, tuple)):
        return [witness_json(v) for v in w]
    if isinstance(w, (str, int, bool)):
        return w
    try:
        return scalar_str(w)
    except Exception:
        return str(w)


@dataclass
class Report:
    checks: list = field(default_factory=list)

    def add(self, check: str, n: int, passed: bool, witness=None) -> Check:
        c = Check(check, n, bool(passed), witness)
        self.checks.append(c)
        return c

    def extend(self, other: "Report") -> "Report":
        self.checks.extend(other.checks)
        return self

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def __getitem__(self, name) -> Check:
        for c in self.checks:
            if c.check == name:
                return c
        raise KeyError(name)

    def __contains__(self, name):
        return any(c.check == name for c in self.checks)

    def to_json(self) -> list:
        return [c.to_json() for c in self.checks]

    def to_text(self) -> str:
        return "\n".join(f"[{c.status}] n={c.n} {c.check}" for c in self.checks)


def first_nonzero(items):
    """First ``(key, value)`` with a nonzero value, else ``None``."""
    for k, v in items:
        if v:
            return {"index": list(k) if isinstance(k, tuple) else k, "value": v}
    return None
