"""Result record returned by every verification routine."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

PASS = "pass"
FAIL = "fail"
OUTSIDE = "out-of-hypothesis"

MAX_WITNESSES = 5


@dataclass
class CheckReport:
    name: str
    params: dict
    verdict: str = PASS
    counts: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    millis: float | None = None

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    @property
    def acceptable(self) -> bool:
        """Passed, or explicitly labeled as outside the theorem hypothesis."""
        return self.verdict in (PASS, OUTSIDE)

    def record(self, check: str, ok: bool, witness=None):
        """Fold a named sub-check into the overall verdict."""
        self.checks[check] = self.checks.get(check, True) and bool(ok)
        if not ok:
            if self.verdict == PASS:
                self.verdict = FAIL
            if witness is not None and len(self.witnesses) < MAX_WITNESSES:
                self.witnesses.append({"check": check, "witness": witness})
        return ok

    def mark_outside(self, reason: str):
        self.notes.append(f"outside theorem hypothesis: {reason}")
        self.checks["observed"] = self.verdict == PASS
        self.verdict = OUTSIDE

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "CheckReport":
        return cls(**d)

    def line(self) -> str:
        params = ", ".join(f"{k}={v}" for k, v in self.params.items())
        tag = {PASS: "PASS", FAIL: "FAIL", OUTSIDE: "OUT "}[self.verdict]
        return f"{tag} {self.name}({params})"
