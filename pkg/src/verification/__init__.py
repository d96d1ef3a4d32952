from .suites import SUITES, CaseResult, SuiteResult, negative_specs, run_suite

__all__ = ['SUITES', 'CaseResult', 'SuiteResult', 'negative_specs', 'run_suite']
