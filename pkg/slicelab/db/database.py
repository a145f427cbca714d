"""
Checkpoint database for slicelab
Async SQLite engine and session handling for resumable searches
"""

from contextlib import asynccontextmanager
from typing import AsyncIterator

from sqlalchemy import text
from sqlalchemy.ext.asyncio import AsyncSession, async_sessionmaker, create_async_engine
from sqlalchemy.orm import declarative_base

from slicelab.utils.config import settings
from slicelab.utils.logging import log_checkpoint_event

# Base class for all database models
Base = declarative_base()


def get_engine(url: str):
    """Create an async engine for a checkpoint URL."""
    return create_async_engine(
        url,
        echo=settings.debug,  # Log SQL queries in debug mode
        future=True,
        pool_pre_ping=True,
    )


@asynccontextmanager
async def session_scope(url: str) -> AsyncIterator[AsyncSession]:
    """
    Yield a session bound to a fresh engine, disposed on exit.

    Engines are not shared between event loops, and every synchronous
    caller runs its own loop.
    """
    engine = get_engine(url)
    session_factory = async_sessionmaker(
        engine,
        class_=AsyncSession,
        expire_on_commit=False,
        autoflush=False,
    )
    try:
        async with engine.begin() as conn:
            await conn.run_sync(Base.metadata.create_all)
        async with session_factory() as session:
            try:
                yield session
            except Exception:
                await session.rollback()
                raise
    finally:
        await engine.dispose()


async def create_tables(url: str):
    """Create all checkpoint tables."""
    engine = get_engine(url)
    try:
        async with engine.begin() as conn:
            await conn.run_sync(Base.metadata.create_all)
        log_checkpoint_event("create_tables", True, url)
    finally:
        await engine.dispose()


async def drop_tables(url: str):
    """Drop all checkpoint tables (for testing)."""
    engine = get_engine(url)
    try:
        async with engine.begin() as conn:
            await conn.run_sync(Base.metadata.drop_all)
    finally:
        await engine.dispose()


async def check_database_connection(url: str) -> bool:
    """
    Check if the checkpoint database is reachable.

    Returns:
        bool: True if connection successful, False otherwise
    """
    engine = get_engine(url)
    try:
        async with engine.begin() as conn:
            await conn.execute(text("SELECT 1"))
        return True
    except Exception as e:
        log_checkpoint_event("connection", False, str(e))
        return False
    finally:
        await engine.dispose()
