import sys

import hypothesis

hypothesis.settings.register_profile(
    "pkg", deadline=None, max_examples=100,
    suppress_health_check=[hypothesis.HealthCheck.too_slow])
hypothesis.settings.load_profile("pkg")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    # echo the acceptance verdict lines collected during the run, if any
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "ACCEPTANCE_LINES", None) if mod else None
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
