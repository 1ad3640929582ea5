import pytest
from hypothesis import settings, strategies as st

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

ACCEPTANCE: dict[int, str] = {}


@st.composite
def partitions(draw, max_size=7, max_rows=None):
    """Partitions of at most ``max_size`` cells, optionally row-bounded."""
    size = draw(st.integers(0, max_size))
    rows = []
    left = size
    while left:
        cap = min(left, rows[-1] if rows else left)
        if max_rows is not None and len(rows) == max_rows:
            break
        r = draw(st.integers(1, cap))
        rows.append(r)
        left -= r
    return tuple(rows)


@pytest.fixture
def acceptance():
    def record(number: int, ok: bool, detail: str) -> None:
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE[number] = line
        print(line)
        assert ok, detail
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[number])
