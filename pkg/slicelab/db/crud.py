"""
CRUD operations for the slicelab checkpoint store
"""

from datetime import datetime, timezone
from typing import Dict, List, Optional

from sqlalchemy import select, update
from sqlalchemy.ext.asyncio import AsyncSession

from slicelab.db import models


class SearchRunCRUD:
    """CRUD operations for SearchRun."""

    @staticmethod
    async def get_by_fingerprint(db: AsyncSession, fingerprint: str) -> Optional[models.SearchRun]:
        stmt = select(models.SearchRun).where(models.SearchRun.fingerprint == fingerprint)
        result = await db.execute(stmt)
        return result.scalar_one_or_none()

    @staticmethod
    async def get_or_create(
        db: AsyncSession,
        fingerprint: str,
        field: str,
        ambient_dim: int,
        subspace_dim: int,
        mode: str,
        polynomial: str,
    ) -> models.SearchRun:
        """
        Fetch the run with this fingerprint, creating it if absent.

        Args:
            db: Database session
            fingerprint: sha256 of the scan inputs
            field, ambient_dim, subspace_dim, mode, polynomial: descriptive columns

        Returns:
            SearchRun: Existing or newly created run
        """
        run = await SearchRunCRUD.get_by_fingerprint(db, fingerprint)
        if run is not None:
            return run
        run = models.SearchRun(
            fingerprint=fingerprint,
            field=field,
            ambient_dim=ambient_dim,
            subspace_dim=subspace_dim,
            mode=mode,
            polynomial=polynomial,
        )
        db.add(run)
        await db.commit()
        await db.refresh(run)
        return run

    @staticmethod
    async def mark_completed(db: AsyncSession, run_id: int) -> None:
        stmt = (
            update(models.SearchRun)
            .where(models.SearchRun.id == run_id)
            .values(completed_at=datetime.now(timezone.utc))
        )
        await db.execute(stmt)
        await db.commit()


class ShardResultCRUD:
    """CRUD operations for ShardResult."""

    @staticmethod
    async def record(
        db: AsyncSession, run_id: int, unit_key: str, visits: int, witnesses: List[List[List[int]]]
    ) -> models.ShardResult:
        """
        Store a finished unit. Recording the same unit twice keeps the first row.

        Args:
            db: Database session
            run_id: Owning SearchRun id
            unit_key: Work unit key
            visits: Subspaces tested
            witnesses: RREF row lists of witnesses

        Returns:
            ShardResult: The stored row
        """
        stmt = select(models.ShardResult).where(
            models.ShardResult.run_id == run_id, models.ShardResult.unit_key == unit_key
        )
        existing = (await db.execute(stmt)).scalar_one_or_none()
        if existing is not None:
            return existing
        row = models.ShardResult(run_id=run_id, unit_key=unit_key, visits=visits, witnesses=witnesses)
        db.add(row)
        await db.commit()
        await db.refresh(row)
        return row

    @staticmethod
    async def completed_units(db: AsyncSession, run_id: int) -> Dict[str, models.ShardResult]:
        """All recorded units of a run, keyed by unit key."""
        stmt = select(models.ShardResult).where(models.ShardResult.run_id == run_id)
        result = await db.execute(stmt)
        return {row.unit_key: row for row in result.scalars().all()}
