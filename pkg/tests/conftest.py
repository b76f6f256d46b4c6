import pytest

from treequery.newick import parse_newick
from treequery.tree import RootedTree

# n=7, root 1: 2->1, 3->1, 4->2, 5->2, 6->3, 7->6
T_EX_PARENT = {2: 1, 3: 1, 4: 2, 5: 2, 6: 3, 7: 6}

_acceptance_lines: list[str] = []


@pytest.fixture
def t_ex():
    return RootedTree(T_EX_PARENT, 7)


@pytest.fixture
def five():
    """((a,b),((c,d),e)) with a..e = 1..5, internals 6=(a,b) 7=(c,d) 8=((c,d),e) 9=root."""
    return parse_newick("((a,b),((c,d),e));")


@pytest.fixture
def acceptance_report():
    return _acceptance_lines


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
