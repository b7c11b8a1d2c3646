import pytest

from vehrecover.control import ForceParams, SteeringParams
from vehrecover.dynamics import VehicleParams

# published controller columns; a2 carries the published K1
TABLE2 = {
    ("case1", "generalized"): dict(a1=0.175, a2=-1.91, a_c=900.0, k_dir=-0.2, tau1=3.0),
    ("case1", "reference"): dict(a1=0.175, a2=-1.818, a_c=1500.0, k_dir=-0.2, tau1=3.0),
    ("case2", "generalized"): dict(a1=0.175, a2=-1.4665, a_c=900.0, k_dir=-0.5, tau1=5.195),
    ("case2", "reference"): dict(a1=0.175, a2=-1.353, a_c=1550.0, k_dir=-0.5, tau1=5.195),
}


def table2_controls(case, model, f_initial=441.0):
    c = TABLE2[(case, model)]
    steer = SteeringParams(a1=c["a1"], a2=c["a2"], k_dir=c["k_dir"], tau0=1.0,
                           tau1=c["tau1"], tau2=10.0, tau3=11.0)
    force = ForceParams(f_initial=f_initial, a_c=c["a_c"], tau_c1=5.443, tau_c2=10.0)
    return steer, force


@pytest.fixture
def params():
    return VehicleParams()


@pytest.fixture
def case1_controls():
    return table2_controls("case1", "generalized")


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
