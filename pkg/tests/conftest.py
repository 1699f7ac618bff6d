"""
Shared fixtures: catalog towers built once per session.
"""

import pytest

from cantorspectra.exactnum import parse_element
from cantorspectra.operations import build_tower, explicit_spec, lookup


@pytest.fixture(scope="session")
def fibonacci():
    return build_tower(lookup("fibonacci").spec(), 40)


@pytest.fixture(scope="session")
def odometer2():
    return build_tower(lookup("odometer2").spec(), 32)


@pytest.fixture(scope="session")
def inf_demo():
    return build_tower(lookup("inf-demo").spec(), 24)


@pytest.fixture(scope="session")
def small_explicit():
    # 3 levels, 12 edges in total
    spec = explicit_spec([
        [[1, 1], [2, 1]],
        [[1, 2], [1, 1]],
    ], orders=[{"level": 2, "vertex": 1, "sources": [0, 1, 0]}])
    return build_tower(spec, 3)


@pytest.fixture(scope="session")
def golden_angle():
    return parse_element("(-1+sqrt(5))/2")
