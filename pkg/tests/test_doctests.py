import doctest

import higherop.ordinals
import higherop.topology


def test_ordinals_doctests():
    result = doctest.testmod(higherop.ordinals)
    assert result.failed == 0
    assert result.attempted >= 2


def test_topology_doctests():
    result = doctest.testmod(higherop.topology)
    assert result.failed == 0
    assert result.attempted >= 3
