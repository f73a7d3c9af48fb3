"""Fixture loading, suite orchestration and the ``ncgx`` command line."""
from .fixtures import Fixture, build_fixture, bundled_names, load_fixture
from .suites import emit, exit_status, report_dict, run_suite

__all__ = ["Fixture", "build_fixture", "bundled_names", "load_fixture", "emit", "exit_status", "report_dict",
           "run_suite"]
