"""Three-valued outcome of budgeted decision procedures."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any


class Status(str, Enum):
    HOLDS = "holds"
    FAILS = "fails"
    UNKNOWN = "unknown"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Verdict:
    """Result of a bounded check.

    ``witness`` carries evidence: for ``HOLDS`` of an existential question
    (or ``FAILS`` of a universal one) it is the object that settles it.
    ``UNKNOWN`` means a budget ran out before the answer was determined.
    """

    status: Status
    witness: Any = None
    detail: str = ""
    stats: dict = field(default_factory=dict, compare=False)

    @classmethod
    def holds(cls, witness: Any = None, detail: str = "", **stats) -> "Verdict":
        return cls(Status.HOLDS, witness, detail, stats)

    @classmethod
    def fails(cls, witness: Any = None, detail: str = "", **stats) -> "Verdict":
        return cls(Status.FAILS, witness, detail, stats)

    @classmethod
    def unknown(cls, detail: str = "", **stats) -> "Verdict":
        return cls(Status.UNKNOWN, None, detail, stats)

    @property
    def is_holds(self) -> bool:
        return self.status is Status.HOLDS

    @property
    def is_fails(self) -> bool:
        return self.status is Status.FAILS

    @property
    def is_unknown(self) -> bool:
        return self.status is Status.UNKNOWN

    @property
    def definite(self) -> bool:
        return self.status is not Status.UNKNOWN

    def __str__(self) -> str:
        return self.status.value
