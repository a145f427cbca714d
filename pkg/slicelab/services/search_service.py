"""
Grassmannian search service for slicelab

Scans the k-dimensional subspaces P of F_q^n for ideal membership of a
fixed polynomial. Work is cut into units (a pivot set plus a slice of
its free entries), units run on a process pool, and finished units can
be stored in the checkpoint database so an interrupted scan resumes.
"""

import asyncio
import hashlib
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from slicelab.algebra.linalg import (
    Subspace,
    gaussian_binomial,
    grassmannian_shards,
    shard_batches,
    shard_size,
)
from slicelab.algebra.polyalg import Polynomial, substitute_batch
from slicelab.db.crud import SearchRunCRUD, ShardResultCRUD
from slicelab.db.database import session_scope
from slicelab.models.rank import SearchBudget, SearchStats
from slicelab.utils.errors import BudgetExceededError, FieldError
from slicelab.utils.logging import log_checkpoint_event, logger

Unit = Tuple[Tuple[int, ...], int, int]

# Scans this small run in-process
SERIAL_LIMIT = 1 << 15


@dataclass
class UnitOutcome:
    """Result of scanning one work unit."""

    key: str
    visits: int
    witnesses: List[List[List[int]]] = field(default_factory=list)
    complete: bool = True
    resumed: bool = False


@dataclass
class ScanResult:
    """Witnesses of one scan in enumeration order, with statistics."""

    k: int
    witnesses: List[Subspace]
    stats: SearchStats


def unit_key(unit: Unit) -> str:
    pivots, start, stop = unit
    return f"{','.join(map(str, pivots))}:{start}-{stop}"


def work_units(n: int, k: int, q: int, unit_size: int) -> List[Unit]:
    """Pivot shards in lex order, each cut into slices of at most unit_size."""
    units: List[Unit] = []
    for pivots in grassmannian_shards(n, k):
        size = shard_size(n, pivots, q)
        for start in range(0, size, unit_size):
            units.append((pivots, start, min(start + unit_size, size)))
    return units


def batch_chart_images(batch: np.ndarray, pivots: Sequence[int], n: int, q: int) -> np.ndarray:
    """
    Quotient-chart images for a batch of RREF matrices sharing one pivot
    set: shape (b, n, n - k).
    """
    b, k, _ = batch.shape
    pivot_set = set(pivots)
    free = np.array([j for j in range(n) if j not in pivot_set], dtype=np.int64)
    m = free.size
    images = np.zeros((b, n, m), dtype=np.int64)
    if m:
        images[:, free, np.arange(m)] = 1
        if k:
            images[:, list(pivots), :] = np.mod(-batch[:, :, free], q)
    return images


def members_in_batch(f: Polynomial, batch: np.ndarray, pivots: Sequence[int]) -> np.ndarray:
    """Boolean mask: f lies in the ideal of each RREF matrix in the batch."""
    n = f.num_vars
    images = batch_chart_images(batch, pivots, n, f.field.order)
    coeffs = substitute_batch(f, images)
    return ~np.any(coeffs, axis=1)


def scan_unit(
    f: Polynomial,
    unit: Unit,
    mode: str,
    chunk_size: int,
    deadline: Optional[float] = None,
) -> UnitOutcome:
    """
    Test every subspace of one work unit.

    Args:
        f: Polynomial over a finite field
        unit: (pivots, start, stop)
        mode: "first" stops at the first witness, "all" collects every witness
        chunk_size: Matrices per vectorized batch
        deadline: time.monotonic() value after which the unit gives up

    Returns:
        UnitOutcome with visits, witness RREF rows and a completeness flag
    """
    pivots, start, stop = unit
    n, q = f.num_vars, f.field.order
    out = UnitOutcome(key=unit_key(unit), visits=0)
    for batch in shard_batches(n, pivots, q, chunk_size, start=start, stop=stop):
        if deadline is not None and time.monotonic() > deadline:
            out.complete = False
            return out
        mask = members_in_batch(f, batch, pivots)
        hits = np.flatnonzero(mask)
        if mode == "first" and hits.size:
            first = int(hits[0])
            out.visits += first + 1
            out.witnesses.append(batch[first].tolist())
            return out
        out.visits += batch.shape[0]
        out.witnesses.extend(batch[i].tolist() for i in hits)
    return out


def _scan_unit_task(args) -> UnitOutcome:
    return scan_unit(*args)


def scan_fingerprint(f: Polynomial, k: int, mode: str) -> str:
    text = "|".join(
        [
            f.field.flag,
            str(f.num_vars),
            str(f.degree),
            ",".join(str(int(c)) for c in f.coefficient_vector()),
            str(k),
            mode,
        ]
    )
    return hashlib.sha256(text.encode()).hexdigest()


class CheckpointStore:
    """Synchronous facade over the async checkpoint CRUD classes."""

    def __init__(self, url: str, f: Polynomial, k: int, mode: str):
        self.url = url
        self.fingerprint = scan_fingerprint(f, k, mode)
        self._describe = dict(
            field=f.field.flag,
            ambient_dim=f.num_vars,
            subspace_dim=k,
            mode=mode,
            polynomial=f.to_text(),
        )
        self.run_id: Optional[int] = None

    async def _load(self) -> Dict[str, UnitOutcome]:
        async with session_scope(self.url) as db:
            run = await SearchRunCRUD.get_or_create(db, self.fingerprint, **self._describe)
            self.run_id = run.id
            rows = await ShardResultCRUD.completed_units(db, run.id)
        return {
            key: UnitOutcome(key=key, visits=row.visits, witnesses=row.witnesses, resumed=True)
            for key, row in rows.items()
        }

    async def _record(self, outcome: UnitOutcome):
        async with session_scope(self.url) as db:
            await ShardResultCRUD.record(db, self.run_id, outcome.key, outcome.visits, outcome.witnesses)

    async def _complete(self):
        async with session_scope(self.url) as db:
            await SearchRunCRUD.mark_completed(db, self.run_id)

    def load(self) -> Dict[str, UnitOutcome]:
        done = asyncio.run(self._load())
        log_checkpoint_event("load", True, f"{len(done)} units for run {self.run_id}")
        return done

    def record(self, outcome: UnitOutcome):
        try:
            asyncio.run(self._record(outcome))
        except Exception as e:
            log_checkpoint_event("record", False, f"{outcome.key}: {e}")
            raise

    def complete(self):
        asyncio.run(self._complete())
        log_checkpoint_event("complete", True, f"run {self.run_id}")


class SearchService:
    """Service for budgeted Grassmannian scans."""

    @staticmethod
    def scan_dimension(
        f: Polynomial,
        k: int,
        mode: str,
        budget: SearchBudget,
        already_visited: int = 0,
        started: Optional[float] = None,
    ) -> ScanResult:
        """
        Scan every k-dimensional subspace for f ∈ (P).

        In "first" mode the returned witness is the first one in
        enumeration order, whatever order the workers finish in.

        Args:
            f: Polynomial over a finite field
            k: Subspace dimension
            mode: "first" or "all"
            budget: Visit, time and worker limits
            already_visited: Visits spent by earlier ranks of the same search
            started: time.monotonic() at the start of the whole search

        Returns:
            ScanResult with canonical witnesses and statistics

        Raises:
            BudgetExceededError: The Grassmannian does not fit the remaining
                visits, or the deadline passes mid-scan
        """
        if not f.field.is_finite:
            raise FieldError("Slice rank search needs a finite field")
        if mode not in ("first", "all"):
            raise ValueError(f"unknown scan mode {mode!r}")
        n, q = f.num_vars, f.field.order
        count = gaussian_binomial(n, k, q)
        if already_visited + count > budget.max_visits:
            raise BudgetExceededError(
                f"rank {k} needs {count} visits, {budget.max_visits - already_visited} remain",
                requested=already_visited + count,
                cap=budget.max_visits,
                ranks_excluded=k - 1,
            )
        started = time.monotonic() if started is None else started
        deadline = started + budget.max_seconds if budget.max_seconds else None

        units = work_units(n, k, q, budget.unit_size)
        store = CheckpointStore(budget.checkpoint_url, f, k, mode) if budget.checkpoint_url else None
        done = store.load() if store else {}
        logger.log_search_event(
            "scan_started", n, k, str(f.field), mode=mode, subspaces=count, units=len(units), resumed=len(done)
        )

        serial = budget.workers == 1 or count <= SERIAL_LIMIT
        outcomes = SearchService._run_units(f, units, mode, budget, deadline, done, store, serial)

        stats = SearchStats(
            visited=sum(o.visits for o in outcomes if not o.resumed),
            units=len(outcomes),
            units_resumed=sum(1 for o in outcomes if o.resumed),
            per_rank={k: sum(o.visits for o in outcomes)},
            wall_time=time.monotonic() - started,
        )
        if any(not o.complete for o in outcomes):
            raise BudgetExceededError(
                f"time cap of {budget.max_seconds}s reached while scanning rank {k}",
                requested=count,
                cap=budget.max_seconds,
                ranks_excluded=k - 1,
                partial=stats,
            )

        witnesses = [
            Subspace.from_rref(f.field, n, np.array(rows, dtype=np.int64))
            for o in outcomes
            for rows in o.witnesses
        ]
        if mode == "first":
            witnesses = witnesses[:1]
        elif store:
            store.complete()
        logger.log_search_event(
            "scan_finished", n, k, str(f.field), mode=mode, visited=stats.visited, witnesses=len(witnesses)
        )
        return ScanResult(k=k, witnesses=witnesses, stats=stats)

    @staticmethod
    def _run_units(
        f: Polynomial,
        units: List[Unit],
        mode: str,
        budget: SearchBudget,
        deadline: Optional[float],
        done: Dict[str, UnitOutcome],
        store: Optional[CheckpointStore],
        serial: bool,
    ) -> List[UnitOutcome]:
        """Outcomes in unit order; in "first" mode everything after the first witness is dropped."""
        outcomes: List[UnitOutcome] = []

        def accept(outcome: UnitOutcome) -> bool:
            outcomes.append(outcome)
            if store and outcome.complete and not outcome.resumed:
                store.record(outcome)
            return mode == "first" and bool(outcome.witnesses)

        pending = [u for u in units if unit_key(u) not in done]
        if serial or len(pending) <= 1:
            for u in units:
                outcome = done.get(unit_key(u)) or scan_unit(f, u, mode, budget.chunk_size, deadline)
                if accept(outcome) or not outcome.complete:
                    break
            return outcomes

        with ProcessPoolExecutor(max_workers=budget.workers) as pool:
            futures = {
                unit_key(u): pool.submit(_scan_unit_task, (f, u, mode, budget.chunk_size, deadline))
                for u in pending
            }
            try:
                for u in units:
                    key = unit_key(u)
                    outcome = done[key] if key in done else futures[key].result()
                    if accept(outcome) or not outcome.complete:
                        break
            finally:
                for fut in futures.values():
                    fut.cancel()
        return outcomes
