from .structured_logging import (
    setup_logging,
    set_run_id,
    get_run_id,
    clear_run_id,
    ContextLogger,
    StructuredFormatter,
    ColoredConsoleFormatter
)
from .parallel import map_ordered, resolve_threads

__all__ = [
    'setup_logging',
    'set_run_id',
    'get_run_id',
    'clear_run_id',
    'ContextLogger',
    'StructuredFormatter',
    'ColoredConsoleFormatter',
    'map_ordered',
    'resolve_threads',
]
