import os

from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=500, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


# One PASS/FAIL line per acceptance criterion, from tests named test_criterion_NN_*.
# A criterion passes only when every one of its tests passed; an expected failure counts as FAIL.
_criteria: dict[int, list[str]] = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.rsplit("::", 1)[-1]
    if not name.startswith("test_criterion_"):
        return
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    n = int(name.split("_")[2])
    ok = report.outcome == "passed" and not hasattr(report, "wasxfail")
    _criteria.setdefault(n, []).append("" if ok else name)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        failed = [x for x in _criteria[n] if x]
        line = f"criterion {n:2d}: {'FAIL' if failed else 'PASS'}"
        if failed:
            line += "  (" + ", ".join(failed) + ")"
        terminalreporter.write_line(line)
