from sqlalchemy import JSON, Column, DateTime, ForeignKey, Index, Integer, String
from sqlalchemy.orm import relationship
from sqlalchemy.sql import func

from slicelab.db.database import Base


class SearchRun(Base):
    """
    One Grassmannian scan: a polynomial, a subspace dimension and a mode.

    Constraints:
    - fingerprint: UNIQUE, NOT NULL (sha256 of field, ambient, polynomial, k, mode)
    - mode: "first" or "all"
    """
    __tablename__ = "search_runs"

    id = Column(Integer, primary_key=True, index=True)
    fingerprint = Column(
        String(64),
        unique=True,
        index=True,
        nullable=False,
        doc="sha256 identifying the scan inputs"
    )
    field = Column(String(32), nullable=False, doc="Field flag, e.g. gf2")
    ambient_dim = Column(Integer, nullable=False, doc="Number of variables n")
    subspace_dim = Column(Integer, nullable=False, doc="Dimension k of scanned subspaces")
    mode = Column(String(8), nullable=False, doc="'first' stops at a witness, 'all' collects every one")
    polynomial = Column(String, nullable=False, doc="Polynomial text in x1..xn names")
    created_at = Column(DateTime(timezone=True), server_default=func.now(), nullable=False)
    completed_at = Column(DateTime(timezone=True), nullable=True, doc="Set once every unit is recorded")

    units = relationship("ShardResult", back_populates="run", cascade="all, delete-orphan")

    def __repr__(self):
        return f"<SearchRun(id={self.id}, n={self.ambient_dim}, k={self.subspace_dim}, mode='{self.mode}')>"


class ShardResult(Base):
    """
    A finished work unit of a scan: pivot set plus a slice of its free entries.

    Constraints:
    - (run_id, unit_key): UNIQUE
    - witnesses: JSON list of RREF row lists
    """
    __tablename__ = "shard_results"

    id = Column(Integer, primary_key=True, index=True)
    run_id = Column(Integer, ForeignKey("search_runs.id", ondelete="CASCADE"), nullable=False)
    unit_key = Column(String(128), nullable=False, doc="'0,1,2:0-65536' style key")
    visits = Column(Integer, nullable=False, doc="Subspaces tested in this unit")
    witnesses = Column(JSON, nullable=False, default=list, doc="RREF bases of witnesses found")
    completed_at = Column(DateTime(timezone=True), server_default=func.now(), nullable=False)

    run = relationship("SearchRun", back_populates="units")

    __table_args__ = (
        Index("idx_shard_run_unit", "run_id", "unit_key", unique=True),
    )

    def __repr__(self):
        return f"<ShardResult(run_id={self.run_id}, unit='{self.unit_key}', visits={self.visits})>"
