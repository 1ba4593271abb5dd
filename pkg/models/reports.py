from typing import Optional

from pydantic import BaseModel, ConfigDict, Field


class ScoreReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    score: float = Field(ge=0.0)
    polygon_area2: int
    hull_area2: int
    simple: bool
    uses_all_points: bool

    @property
    def valid(self) -> bool:
        return self.simple and self.uses_all_points


class BenchRecord(BaseModel):
    """One pipeline run of the benchmark harness."""

    experiment: str
    instance: str
    n: int
    objective: str
    pen: float
    hops: int
    hood: str
    sigma: float
    weight_variant: str
    seed: int
    greedy_seconds: float = Field(0.0, ge=0.0)
    local_search_seconds: float = Field(0.0, ge=0.0)
    total_seconds: float = Field(0.0, ge=0.0)
    greedy_score: Optional[float] = None
    final_score: Optional[float] = None
    error: Optional[str] = None
