import time
from collections import defaultdict
from dataclasses import dataclass

import pytest

from edgepattern.edge_path import EdgePath, canonical_forms, tree_to_path
from edgepattern.enumeration import tier3_tree_enumeration
from edgepattern.geometry import Symmetry, board_spec

_criterion_items: dict[str, int] = {}
_criterion_outcomes: dict[int, list[bool]] = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(k): acceptance criterion number k")


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            _criterion_items[item.nodeid] = m.args[0]


def pytest_runtest_logreport(report):
    k = _criterion_items.get(report.nodeid)
    if k is None:
        return
    if report.when == "call" or report.failed or report.skipped:
        _criterion_outcomes[k].append(report.passed and report.when == "call")


def pytest_terminal_summary(terminalreporter):
    if not _criterion_outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_criterion_outcomes):
        verdict = "PASS" if all(_criterion_outcomes[k]) else "FAIL"
        terminalreporter.write_line(f"CRITERION {k}: {verdict}")


@dataclass
class Corpus:
    n: int
    masks: list[int]
    paths: list[EdgePath]
    keys: list[bytes]
    stabilizers: list[tuple[Symmetry, ...]]
    seconds: float

    def orbit_representatives(self) -> list[EdgePath]:
        """One normalized path per canonical key, decoded from the key."""
        seen = {}
        for k in self.keys:
            seen.setdefault(k, None)
        return [EdgePath.from_key(k, self.n).normalized() for k in seen]


def build_corpus(n: int) -> Corpus:
    spec = board_spec(n)
    t0 = time.perf_counter()
    masks, paths = [], []
    for t in tier3_tree_enumeration(spec):
        masks.append(t.mask)
        paths.append(tree_to_path(t, spec))
    keys, stabs = [], []
    for start in range(0, len(paths), 20000):
        k, s = canonical_forms(paths[start:start + 20000], n)
        keys.extend(k)
        stabs.extend(s)
    return Corpus(n, masks, paths, keys, stabs, time.perf_counter() - t0)


@pytest.fixture(scope="session")
def corpus8() -> Corpus:
    return build_corpus(8)


@pytest.fixture(scope="session")
def corpus6() -> Corpus:
    return build_corpus(6)


@pytest.fixture(scope="session")
def reps8(corpus8) -> list[EdgePath]:
    return corpus8.orbit_representatives()
