import pytest

from aggthru.report import run_sweep


@pytest.fixture(scope="session")
def default_rows():
    """Optimized default grid (408 points), shared across test modules."""
    return run_sweep()


@pytest.fixture(scope="session")
def default_rows_by_key(default_rows):
    return {(r.flavor, r.mcs, r.ber, r.msdu_len): r for r in default_rows}
