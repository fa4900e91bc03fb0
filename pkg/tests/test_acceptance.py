"""Acceptance criteria, one test each; tolerances live in telecluster.acceptance."""
import pytest

from telecluster import acceptance

RESULTS: list = []


@pytest.mark.parametrize(
    "name",
    [
        "teleport",
        "decomposition",
        "transfer",
        "cluster6",
        "block",
        "densecode",
        "bell_baseline",
        "cluster4_search",
        "sampler",
    ],
)
def test_criterion(name):
    (res,) = acceptance.run_all(only=[name])
    RESULTS.append(res)
    print(res.line())
    assert res.passed, res.line()
