import pytest

from speclab.eigensolver import fem_spectrum, orthotope_spectrum
from speclab.geometry import canonical_rectangle, make_orthotope, mesh_domain


@pytest.fixture(scope="session")
def interval():
    return make_orthotope((1.0,))


@pytest.fixture(scope="session")
def square():
    return make_orthotope((1.0, 1.0))


@pytest.fixture(scope="session")
def rect():
    return canonical_rectangle()


@pytest.fixture(scope="session")
def interval_sys(interval):
    return orthotope_spectrum(interval, 16)


@pytest.fixture(scope="session")
def square_sys(square):
    return orthotope_spectrum(square, 8)


@pytest.fixture(scope="session")
def rect_sys(rect):
    return orthotope_spectrum(rect, 8)


@pytest.fixture(scope="session")
def square_mesh(square):
    return mesh_domain(square, 0.1)


@pytest.fixture(scope="session")
def square_fem(square_mesh):
    return fem_spectrum(square_mesh, 6)


@pytest.fixture(scope="session")
def rect_fem(rect):
    return fem_spectrum(mesh_domain(rect, 0.05), 6)



def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k, (ok, detail) in sorted(mod.RESULTS.items()):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {k}: {detail}")
