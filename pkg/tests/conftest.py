import math

import pytest

from selberg_bounds.config import load_config
from selberg_bounds.fuchsian import length_spectrum, load_group


@pytest.fixture(scope="session")
def config():
    return load_config(None)


@pytest.fixture(scope="session")
def bolza(config):
    return load_group(config.group("bolza"))


@pytest.fixture(scope="session")
def bolza_spectrum(bolza):
    return length_spectrum(bolza, 8.0, 14)


@pytest.fixture(scope="session")
def bolza_spectrum6(bolza):
    return length_spectrum(bolza, 6.0, 14)


BOLZA_SYSTOLE = 2 * math.acosh(1 + math.sqrt(2))


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for k in sorted(results):
            terminalreporter.write_line(results[k])
