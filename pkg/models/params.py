import math
from enum import Enum
from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator

from models.instance import Objective
from utils.helpers import (
    DEFAULT_HOOD,
    DEFAULT_HOPS,
    DEFAULT_PEN,
    LS_EPSILON,
    SMALL_INSTANCE_LIMIT,
    START_TRIANGLE_COUNT,
)


class WeightVariant(str, Enum):
    MINUS = "minus"
    PLUS = "plus"


class SolveParams(BaseModel):
    """
    Solver parameters under their command-line names.

    ``pen`` is 1/alpha (``inf`` switches the edge penalty off), ``hops`` is the
    longest path moved by local search, ``hood`` the candidate neighborhood
    radius in grid cells (``None`` = automatic, ``"inf"`` = every point) and
    ``sigma`` the standard deviation of the multiplicative weight noise.
    """

    model_config = ConfigDict(frozen=True)

    pen: float = Field(DEFAULT_PEN, gt=0)
    hops: int = Field(DEFAULT_HOPS, ge=0)
    hood: Optional[Union[int, Literal["inf"]]] = None
    sigma: float = Field(0.0, ge=0)
    objective: Objective = Objective.MAX
    seed: int = Field(0, ge=0)
    weight_variant: WeightVariant = WeightVariant.MINUS
    ls_epsilon: float = Field(LS_EPSILON, gt=0)
    start_triangle_count: int = Field(START_TRIANGLE_COUNT, ge=1)
    retry: bool = True

    @field_validator("hood")
    @classmethod
    def _check_hood(cls, value):
        if isinstance(value, int) and value < 0:
            raise ValueError("hood must be >= 0 or 'inf'")
        return value

    @field_validator("sigma")
    @classmethod
    def _check_sigma(cls, value: float) -> float:
        if math.isnan(value) or math.isinf(value):
            raise ValueError("sigma must be finite")
        return value

    @property
    def alpha(self) -> float:
        return 0.0 if math.isinf(self.pen) else 1.0 / self.pen

    def kappa_for(self, n: int) -> Optional[int]:
        """Effective neighborhood radius; None means unrestricted."""
        if self.hood == "inf":
            return None
        if self.hood is None:
            return None if n <= SMALL_INSTANCE_LIMIT else DEFAULT_HOOD
        return int(self.hood)

    def with_alpha(self, alpha: float) -> "SolveParams":
        return self.model_copy(update={"pen": math.inf if alpha == 0 else 1.0 / alpha})

    def describe(self) -> dict:
        return {
            "pen": self.pen,
            "hops": self.hops,
            "hood": self.hood if self.hood is not None else "auto",
            "sigma": self.sigma,
            "objective": self.objective.value,
            "seed": self.seed,
            "weight_variant": self.weight_variant.value,
        }
