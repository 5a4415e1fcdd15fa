import pytest

from schottky_weyl.fixtures import four_disk_factor, four_disk_product


@pytest.fixture(scope="session")
def F():
    return four_disk_factor()


@pytest.fixture(scope="session")
def F2():
    return four_disk_product(2)


@pytest.fixture(scope="session")
def F1():
    return four_disk_product(1)


ACCEPTANCE = {}


def record(number, passed, detail):
    ACCEPTANCE[number] = (bool(passed), detail)
    print(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
