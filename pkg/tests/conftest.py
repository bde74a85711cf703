import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from treelearn import Leaf, Node, Polynomial, RankedAlphabet, Signature  # noqa: E402
from treelearn.textformat import parse_automaton  # noqa: E402

DATA = Path(__file__).parent / "data"

# filled by the acceptance suite, echoed after the run
ACCEPTANCE_LINES: list[str] = []

UNARY = Signature(Polynomial(RankedAlphabet.of(("a", 1))), ("*",))
EVEN_G = Signature(Polynomial(RankedAlphabet.of(("f", 2), ("g", 1))), ("c",))


def word(n: int):
    """The unary word a^n as the tree a(a(...a(*)...))."""
    t = Leaf("*")
    for _ in range(n):
        t = Node("a", (t,))
    return t


def load(name: str):
    return parse_automaton((DATA / f"{name}.aut").read_text())


@pytest.fixture
def unary_target():
    return load("unary-ne1")


@pytest.fixture
def even_g():
    return load("even-g")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
