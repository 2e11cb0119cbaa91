from enum import Enum
from typing import Optional

from pydantic import BaseModel


class AssumptionStatus(str, Enum):
    OK = "ok"
    DEGRADED = "degraded"
    VIOLATED = "violated"

    @property
    def severity(self) -> int:
        return _SEVERITY[self]

    @classmethod
    def worst(cls, statuses) -> "AssumptionStatus":
        return max(statuses, key=lambda s: s.severity, default=cls.OK)


_SEVERITY = {
    AssumptionStatus.OK: 0,
    AssumptionStatus.DEGRADED: 1,
    AssumptionStatus.VIOLATED: 2,
}


class AssumptionCheckComponent(BaseModel):
    status: AssumptionStatus
    detail: str
    value: Optional[float] = None


class AssumptionReport(BaseModel):
    status: AssumptionStatus
    t: float
    components: dict[str, AssumptionCheckComponent]
