import importlib

import pytest

from mcsync import _kernels_py

_REPORT = []


def report(line: str):
    """Queue a line for the end-of-session summary."""
    _REPORT.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _REPORT:
        terminalreporter.section("acceptance criteria")
        for line in _REPORT:
            terminalreporter.write_line(line)


def _backends():
    out = [_kernels_py]
    try:
        out.append(importlib.import_module("mcsync._kernels"))
    except ImportError:
        pass
    return out


BACKENDS = _backends()


@pytest.fixture(params=BACKENDS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def backend(request, monkeypatch):
    """Run the test once per available kernel implementation."""
    from mcsync import kernels
    monkeypatch.setattr(kernels, "ml_scan", request.param.ml_scan)
    monkeypatch.setattr(kernels, "tt_scan", request.param.tt_scan)
    return request.param
