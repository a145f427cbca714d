import os

os.environ.setdefault("SLICERANK_DEBUG", "true")
os.environ.setdefault("SLICERANK_LOG_LEVEL", "WARNING")

import pytest

from slicelab.algebra.field import GF2
from slicelab.algebra.polyalg import Polynomial
from slicelab.models.rank import SearchBudget
from slicelab.services.fixture_service import build_fn


@pytest.fixture
def serial_budget() -> SearchBudget:
    return SearchBudget(workers=1, checkpoint_url=None, max_seconds=None, max_visits=10**7)


@pytest.fixture
def f2_gf2() -> Polynomial:
    return build_fn(2, GF2)


@pytest.fixture
def f3_gf2() -> Polynomial:
    return build_fn(3, GF2)


@pytest.fixture
def x1x2x3() -> Polynomial:
    return Polynomial.monomial(GF2, 3, (1, 1, 1))


@pytest.fixture
def checkpoint_url(tmp_path) -> str:
    return f"sqlite+aiosqlite:///{tmp_path / 'checkpoints.db'}"
