"""Verification reports: one Check per identity, JSON-serializable.

Schema per check: {"check": name, "window": n, "status": "pass|fail",
"max_residual": string}.  Exact-mode checks pass iff the residual is literally
zero; float-mode checks compare against the context's relative tolerance (or
an explicit one).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Check:
    check: str
    window: int
    status: str
    max_residual: str

    @staticmethod
    def residual(name: str, window: int, worst, ctx, tol=None, scale=1) -> "Check":
        if ctx.exact:
            ok = worst == 0
        else:
            tol = ctx.eps_rel if tol is None else tol
            ok = abs(worst) <= tol * max(abs(scale if scale else 1), 1)
        return Check(name, window, "pass" if ok else "fail", ctx.format(worst))

    def to_json(self) -> dict:
        return {
            "check": self.check,
            "window": self.window,
            "status": self.status,
            "max_residual": self.max_residual,
        }


@dataclass
class Report:
    checks: list[Check] = field(default_factory=list)

    def add(self, check: Check) -> None:
        self.checks.append(check)

    def extend(self, other: "Report") -> None:
        self.checks.extend(other.checks)

    @property
    def passed(self) -> bool:
        return all(c.status == "pass" for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if c.status != "pass"]

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.check == name:
                return c
        raise KeyError(name)

    def to_json(self) -> list[dict]:
        return [c.to_json() for c in self.checks]

    def dumps(self, **kw) -> str:
        return json.dumps(self.to_json(), **kw)
