import pytest
from hypothesis import HealthCheck, settings

from fima_stable.fima import FimaModel
from fima_stable.frac_calc import exp_kernel
from fima_stable.stable_core import StableLaw

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def default_model() -> FimaModel:
    """alpha = 1.5, d = 0.2, g(u) = exp(-u), unit scale."""
    return FimaModel(exp_kernel(1.0), 0.2, StableLaw(1.5, 1.0))


@pytest.fixture
def acceptance_line():
    def record(number: int, passed: bool, detail: str) -> None:
        line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split(":")[0].split()[1])):
            terminalreporter.write_line(line)
