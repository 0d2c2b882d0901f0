"""Verification reports: one record per certified inequality.

Margins are oriented so that a nonnegative value means the inequality
holds at every sampled point.  A strict check whose margin is positive
but below the floating-point trust band is flagged "inconclusive"
instead of passing silently.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable

INCONCLUSIVE_BAND = 1e-9


@dataclass
class VerificationReport:
    lemma_id: str
    domain: str
    worst_margin: float
    worst_location: object = None
    passed: bool = False
    strict: bool = True
    notes: str = ""

    @property
    def status(self) -> str:
        if not self.passed:
            return "fail"
        if self.strict and self.worst_margin < INCONCLUSIVE_BAND:
            return "inconclusive"
        return "pass"

    def to_dict(self) -> dict:
        loc = self.worst_location
        if hasattr(loc, "tolist"):
            loc = loc.tolist()
        elif isinstance(loc, tuple):
            loc = list(loc)
        return {
            "lemma_id": self.lemma_id,
            "domain": self.domain,
            "worst_margin": float(self.worst_margin),
            "worst_location": loc,
            "passed": bool(self.passed),
            "status": self.status,
            "notes": self.notes,
        }

    def to_line(self) -> str:
        loc = self.worst_location
        if isinstance(loc, float):
            loc = f"{loc:.6g}"
        return (
            f"{self.lemma_id:<38s} margin={self.worst_margin:+.6e} "
            f"at {loc} [{self.status}]"
        )


def make_report(
    lemma_id: str,
    domain: str,
    worst_margin: float,
    worst_location=None,
    *,
    strict: bool = True,
    floor: float = 0.0,
    notes: str = "",
) -> VerificationReport:
    return VerificationReport(
        lemma_id=lemma_id,
        domain=domain,
        worst_margin=float(worst_margin),
        worst_location=worst_location,
        passed=bool(worst_margin >= floor),
        strict=strict,
        notes=notes,
    )


def all_passed(reports: Iterable[VerificationReport]) -> bool:
    return all(r.status == "pass" for r in reports)


def write_reports_json(path, reports: Iterable[VerificationReport], meta: dict | None = None) -> None:
    payload = {
        "meta": meta or {},
        "reports": [r.to_dict() for r in reports],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
