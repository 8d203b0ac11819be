from __future__ import annotations

import enum


class Verdict(str, enum.Enum):
    YES = "YES"
    NO = "NO"
    UNKNOWN = "UNKNOWN"
    INDETERMINATE = "INDETERMINATE"

    @classmethod
    def of(cls, flag: bool) -> "Verdict":
        return cls.YES if flag else cls.NO

    def __str__(self) -> str:
        return self.value


def conjunction(verdicts) -> Verdict:
    """Interval summary: any NO wins, then INDETERMINATE, then UNKNOWN."""
    seen = set(verdicts)
    for v in (Verdict.NO, Verdict.INDETERMINATE, Verdict.UNKNOWN):
        if v in seen:
            return v
    return Verdict.YES
