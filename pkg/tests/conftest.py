import pytest

from defquad.deformation import DeformationSpec

SIX_SPECS = [
    DeformationSpec.harmonic(),
    DeformationSpec.math_q(0.9),
    DeformationSpec.math_q(0.5),
    DeformationSpec.physics_q(1.1),
    DeformationSpec.physics_q(1.9),
    DeformationSpec.pq(1.3, 0.5),
    DeformationSpec.pq(1.9, 0.5),
]

ACCEPTANCE_RESULTS = []


@pytest.fixture(params=SIX_SPECS, ids=lambda s: s.label)
def spec(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, passed, detail in sorted(ACCEPTANCE_RESULTS):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {number:2d} {name}: {detail}")
