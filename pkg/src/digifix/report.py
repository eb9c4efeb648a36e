"""Verdict records shared by the checkers, the theorem engine and the CLI."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class Check:
    label: str
    holds: bool
    witness: Any = None
    detail: str = ""


@dataclass
class VerdictReport:
    """Hypotheses, conclusion and supporting evidence for one theorem on one instance.

    ``applicable`` is True iff every hypothesis holds.  The conclusion is always
    computed, also when the theorem does not apply, for diagnostic value.
    """

    theorem_id: str
    hypotheses: list[Check]
    conclusion: Check
    evidence: list[Check] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    flags: set[str] = field(default_factory=set)

    @property
    def applicable(self) -> bool:
        return all(h.holds for h in self.hypotheses)

    @property
    def violated(self) -> bool:
        """The theorem applies but its conclusion (or a required evidence check) fails."""
        return self.applicable and not (self.conclusion.holds and all(e.holds for e in self.evidence))

    @property
    def all_hold(self) -> bool:
        return self.applicable and self.conclusion.holds and all(e.holds for e in self.evidence)
