import numpy as np
import pytest

from mia_routing.network import Network, NodeParams, diamond_network


def line_network(c12=1.0, c23=1.0, c13=0.5):
    C = np.array([[0.0, c12, c13], [0.0, 0.0, c23], [0.0, 0.0, 0.0]])
    return Network(tuple(NodeParams(k) for k in (1, 2, 3)), C)


def two_node(c=1.0):
    return Network((NodeParams(1), NodeParams(2)), np.array([[0.0, c], [0.0, 0.0]]))


@pytest.fixture
def diamond():
    return diamond_network()


@pytest.fixture
def line3():
    return line_network()


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import RESULTS
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[k])
