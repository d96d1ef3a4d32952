"""
Shared pytest configuration.
"""
import pytest

from src.utils import metrics
from src.utils.structured_logging import clear_run_id


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: deep developments, deselect with -m 'not slow'")


@pytest.fixture(autouse=True)
def clean_process_state():
    """Metrics and the run id are process-wide; start every test from scratch"""
    metrics.reset_metrics()
    metrics.set_enabled(True)
    yield
    clear_run_id()
