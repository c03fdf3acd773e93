import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_ACCEPTANCE: dict[int, list[tuple[bool, str]]] = {}


@pytest.fixture
def record():
    """Record one acceptance sub-check: ``record(criterion, ok, detail)``."""

    def _record(criterion: int, ok: bool, detail: str) -> bool:
        _ACCEPTANCE.setdefault(criterion, []).append((bool(ok), detail))
        return bool(ok)

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in range(1, 11):
        parts = _ACCEPTANCE.get(k, [])
        if not parts:
            tr.write_line(f"criterion {k:>2}: NOT RUN")
            continue
        ok = all(p for p, _ in parts)
        detail = "; ".join(d for _, d in parts)
        tr.write_line(f"criterion {k:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
