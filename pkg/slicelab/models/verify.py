"""
Verification models for slicelab
Pydantic schemas for fixtures and suite verdicts
"""

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from slicelab.algebra.idealcalc import LinearIdealFamily
from slicelab.algebra.linalg import Subspace
from slicelab.algebra.polyalg import Polynomial


class FixtureConfig(BaseModel):
    """An immutable configuration with its expected value and where that value comes from."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    id: str = Field(..., description="Fixture id, e.g. c3:1b")
    family: Optional[LinearIdealFamily] = Field(None, description="Family of linear ideals")
    polynomial: Optional[Polynomial] = Field(None, description="Polynomial fixture")
    variable_names: List[str] = Field(default_factory=list, description="Names in index order")
    expected: Any = Field(..., description="Expected dimension, count, rank or verdict")
    provenance: str = Field(..., description="Which statement the expected value comes from")
    containment: Optional[Subspace] = Field(
        None, description="Space whose degree-2 ideal piece must contain all of I_2"
    )
    version: int = Field(default=1, description="Bumped when the fixture changes")


class Falsification(BaseModel):
    """An observed value that contradicts the expected one."""
    fixture_id: str
    expected: Any
    observed: Any


class SuiteVerdict(BaseModel):
    """Outcome of one verification suite."""
    suite_id: str = Field(..., description="Suite id")
    cases_run: int = Field(default=0, ge=0)
    cases_passed: int = Field(default=0, ge=0)
    falsifications: List[Falsification] = Field(default_factory=list)
    skipped: List[str] = Field(default_factory=list, description="Cases left out for budget reasons")
    seed: int = Field(default=0)
    wall_time: float = Field(default=0.0, exclude=True, description="Seconds; reported under search_stats")
    details: List[Dict[str, Any]] = Field(default_factory=list, description="Observed values per case")

    @model_validator(mode="after")
    def check_counts(self):
        if (not self.falsifications) != (self.cases_passed == self.cases_run):
            raise ValueError("falsifications must be empty exactly when every case passed")
        return self

    @property
    def all_passed(self) -> bool:
        return not self.falsifications
