import pytest

from oracles import D1_LAB, D1_TRA, M1_LAB, M1_TRA
from witness.model import parse_model
from witness.reachform import reduce


@pytest.fixture
def d1():
    return parse_model(D1_TRA, D1_LAB)


@pytest.fixture
def m1():
    return parse_model(M1_TRA, M1_LAB)


@pytest.fixture
def d1_rf(d1):
    return reduce(d1)[0]


@pytest.fixture
def m1_rf(m1):
    return reduce(m1)[0]


@pytest.fixture
def model_files(tmp_path):
    paths = {}
    for name, tra, lab in (("d1", D1_TRA, D1_LAB), ("m1", M1_TRA, M1_LAB)):
        (tmp_path / f"{name}.tra").write_text(tra)
        (tmp_path / f"{name}.lab").write_text(lab)
        paths[name] = (tmp_path / f"{name}.tra", tmp_path / f"{name}.lab")
    return paths


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not getattr(mod, "COLLECTED", False):
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.TITLES):
        if n not in mod.RESULTS:
            terminalreporter.write_line(f"criterion {n} [NOT RUN] {mod.TITLES[n]}")
            continue
        ok, detail = mod.RESULTS[n]
        terminalreporter.write_line(
            f"criterion {n} [{'PASS' if ok else 'FAIL'}] {mod.TITLES[n]}: {detail}")
