"""Shared pytest wiring: the acceptance-criteria result banner.

Criterion tests register their outcome through :func:`criterion`; the
terminal-summary hook prints one PASS/FAIL line per registered criterion
after the normal pytest output, so the gate can be read off directly even
under output capture.
"""

import functools

_ACCEPTANCE_RESULTS = []


def record_acceptance(index: int, name: str, passed: bool) -> None:
    _ACCEPTANCE_RESULTS.append((index, name, passed))


def criterion(index: int, name: str):
    """Wrap a test so its pass/fail status lands in the summary banner."""

    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                result = fn(*args, **kwargs)
            except BaseException:
                record_acceptance(index, name, False)
                raise
            record_acceptance(index, name, True)
            return result

        return wrapper

    return deco


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for index, name, passed in sorted(_ACCEPTANCE_RESULTS):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"ACCEPTANCE #{index} {name}: {status}")
