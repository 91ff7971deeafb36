import pytest

from trikernel.bvp import setup
from trikernel.model import preset


@pytest.fixture(scope="session")
def reverse_kreweras():
    return preset("reverse-kreweras")


@pytest.fixture(scope="session")
def rk_problem():
    """Reverse Kreweras at t = 1/10: the Kreweras kernel after phi."""
    return setup("reverse-kreweras", 0.1)


@pytest.fixture(scope="session")
def series_pipeline():
    from trikernel.bvp import theorem2_D0_series

    return theorem2_D0_series(24, details=True)


ACCEPTANCE = pytest.StashKey[dict]()


class Criterion:
    """Collects the checks of one acceptance criterion and records a single verdict line."""

    def __init__(self, store: dict, number: int, title: str):
        self.store, self.number, self.title = store, number, title
        self.failures: list[str] = []

    def check(self, name: str, ok: bool, detail: str = "") -> None:
        if not ok:
            self.failures.append(f"{name} {detail}".strip())

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc_type is not None:
            self.failures.append(f"{exc_type.__name__}: {exc}")
        verdict = "FAIL" if self.failures else "PASS"
        line = f"criterion {self.number}: {verdict}  {self.title}"
        if self.failures:
            line += "  [" + "; ".join(self.failures) + "]"
        self.store[self.number] = line
        print(line)
        if exc_type is None:
            assert not self.failures, line
        return False


@pytest.fixture
def criterion(request):
    store = request.config.stash.setdefault(ACCEPTANCE, {})
    return lambda number, title: Criterion(store, number, title)


def pytest_terminal_summary(terminalreporter, config):
    store = config.stash.get(ACCEPTANCE, None)
    if store:
        terminalreporter.section("acceptance criteria")
        for n in sorted(store):
            terminalreporter.write_line(store[n])
