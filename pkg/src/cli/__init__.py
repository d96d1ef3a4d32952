from .commands import build_parser, run
from .display import ReportDisplay
from .reports import RecordStream, RunManifest

__all__ = ['build_parser', 'run', 'ReportDisplay', 'RecordStream', 'RunManifest']
