import numpy as np
import pytest

from eitbiphoton.presets import default_spdc, get_preset, rb87_medium

_ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


def record_criterion(number: int, name: str, passed: bool, detail: str = ""):
    _ACCEPTANCE[number] = (name, passed, detail)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        name, ok, detail = _ACCEPTANCE[n]
        status = "PASS" if ok else "FAIL"
        line = f"criterion {n:2d} [{status}] {name}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def spdc():
    return default_spdc()


@pytest.fixture(scope="session")
def rb87():
    return rb87_medium()


@pytest.fixture(scope="session")
def rb87_detuned():
    return get_preset("fig6").medium()


@pytest.fixture(scope="session")
def coincidence_filter():
    return get_preset("fig5b").input_filter()


@pytest.fixture(scope="session")
def fig5b_scan(rb87, spdc, coincidence_filter):
    from eitbiphoton.detection import scan
    p = get_preset("fig5b")
    return scan("coincidence_rate", np.array(p.grid()), rb87, spdc,
                tol=1e-7, input_filter=coincidence_filter)


@pytest.fixture(scope="session")
def fig6_scan(rb87_detuned, spdc, coincidence_filter):
    from eitbiphoton.detection import scan
    p = get_preset("fig6")
    return scan("coincidence_rate", np.array(p.grid()), rb87_detuned, spdc,
                tol=1e-7, input_filter=coincidence_filter)
