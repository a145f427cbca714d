"""
Slice rank models for slicelab
Pydantic schemas for search budgets, certificates and L_f reports
"""

from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from slicelab.algebra.field import FieldSpec
from slicelab.algebra.linalg import Subspace
from slicelab.algebra.polyalg import Polynomial
from slicelab.utils.config import settings

FIELD_NOTE = (
    "Computed over {field} only. Slice rank and the set of minimal subspaces "
    "may change over a field extension."
)


class _AlgebraModel(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)


# Search configuration
class SearchBudget(BaseModel):
    """Limits and parallelism for a Grassmannian search."""
    max_visits: int = Field(default_factory=lambda: settings.max_visits, ge=0, description="Cap on subspace visits")
    max_seconds: Optional[float] = Field(
        default_factory=lambda: settings.max_seconds, description="Wall-clock cap in seconds"
    )
    workers: int = Field(default_factory=lambda: settings.workers, ge=1, description="Worker processes")
    chunk_size: int = Field(default_factory=lambda: settings.chunk_size, ge=1, description="Matrices per batch")
    unit_size: int = Field(default=1 << 16, ge=1, description="Largest slice of a shard handed to one worker")
    checkpoint_url: Optional[str] = Field(
        default_factory=lambda: settings.checkpoint_url, description="Checkpoint database URL"
    )


class SearchStats(BaseModel):
    """What a search did."""
    visited: int = Field(default=0, description="Subspaces tested")
    units: int = Field(default=0, description="Work units processed")
    units_resumed: int = Field(default=0, description="Work units taken from checkpoints")
    per_rank: Dict[int, int] = Field(default_factory=dict, description="Visits per subspace dimension")
    wall_time: float = Field(default=0.0, description="Seconds")

    def merge(self, other: "SearchStats") -> "SearchStats":
        per_rank = dict(self.per_rank)
        for k, v in other.per_rank.items():
            per_rank[k] = per_rank.get(k, 0) + v
        return SearchStats(
            visited=self.visited + other.visited,
            units=self.units + other.units,
            units_resumed=self.units_resumed + other.units_resumed,
            per_rank=per_rank,
            wall_time=self.wall_time + other.wall_time,
        )


# Results
class SliceCertificate(_AlgebraModel):
    """Slice rank r of f with a witness P, f ∈ (P), and f = Σ ℓ_i q_i."""
    f: Polynomial = Field(..., description="The cubic")
    field: FieldSpec = Field(..., description="Field the search ran over")
    rank: int = Field(..., ge=0, description="Minimal r over this field")
    witness: Subspace = Field(..., description="An r-dimensional P with f in (P)")
    decomposition: List[Tuple[Polynomial, Polynomial]] = Field(
        default_factory=list, description="Pairs (ℓ_i, q_i) with f = Σ ℓ_i q_i"
    )
    ranks_excluded: int = Field(..., description="Largest rank fully searched without a witness")
    stats: SearchStats = Field(default_factory=SearchStats, description="Search statistics")

    @model_validator(mode="after")
    def check_certificate(self):
        if self.witness.dim != self.rank:
            raise ValueError("witness dimension differs from rank")
        if self.ranks_excluded != self.rank - 1:
            raise ValueError("every rank below r must be excluded")
        return self

    @property
    def field_note(self) -> str:
        return FIELD_NOTE.format(field=self.field)


class BoundProfile(_AlgebraModel):
    """Exact values of the rank-r bounds."""
    r: int = Field(..., ge=0, description="Slice rank")
    n_of_r: Fraction = Field(..., description="r^2 + (r+1)^2/4 + r, the upper bound on dim L_f")
    c_lower_intro: int = Field(..., description="C(r+1,2) + r")
    c_lower_fn: int = Field(..., description="C(r+1,2) + r + 1 = dim L_f of the rank-r test cubic")
    estimate_r33: Fraction = Field(..., description="r(r+3)/2")
    disjoint_triple_vars: Fraction = Field(
        ..., description="max(3r, r(r+3)/2): variables of f when three minimal spaces are pairwise disjoint"
    )
    kp36_bound: Fraction = Field(..., description="(r+1)^2/4 + r")


class LfReport(_AlgebraModel):
    """The set of minimal subspaces of f and their span L_f."""
    f: Polynomial
    field: FieldSpec
    rank: int = Field(..., ge=0)
    minimal_spaces: List[Subspace] = Field(..., description="Every r-dimensional P with f in (P)")
    l_space: Subspace = Field(..., description="Sum of the minimal spaces")
    l_dim: int
    bound_nr: Fraction = Field(..., description="n(r)")
    within_bound: bool = Field(..., description="l_dim <= n(r)")
    certificate: SliceCertificate
    search_stats: SearchStats

    @property
    def field_note(self) -> str:
        return FIELD_NOTE.format(field=self.field)


class LfAnalysis(_AlgebraModel):
    """Bound checks derived from an LfReport."""
    rank: int
    common_dim: int = Field(..., description="dim of the intersection of all minimal spaces")
    irredundant: List[Subspace] = Field(..., description="Greedy irredundant subcollection")
    w_dim: int = Field(..., description="dim of the sum W of the subcollection")
    kp36_bound: Fraction
    kp36_ok: Optional[bool] = Field(None, description="dim W <= (r+1)^2/4 + r, when the subcollection meets in zero")
    i2_dim: int = Field(..., description="dim I_2 of the subcollection")
    i2_ok: bool = Field(..., description="dim I_2 <= r^2")
    essential_vars: Optional[int] = Field(None, description="None when the essential-variable search hit its budget")
    qdec_ok: Optional[bool] = Field(None, description="essential vars <= dim W + dim I_2, on a trivial-intersection subcollection")
    disjoint_triple: bool = Field(..., description="Three pairwise disjoint minimal spaces exist")
    lemma41_ok: Optional[bool] = Field(
        None, description="essential vars <= max(3r, r(r+3)/2) when a disjoint triple exists"
    )
