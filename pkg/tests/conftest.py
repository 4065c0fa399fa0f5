import itertools

import pytest

from momentdet import distributions as dist

GRID_VALUES = (0.5, 1.0, 2.0, 3.0)


def full_family_grid():
    """All GG/DGG parameter triples and IG pairs over the standard grid."""
    pts = []
    for a, b, g in itertools.product(GRID_VALUES, GRID_VALUES, GRID_VALUES):
        pts.append(dist.gg(a, b, g))
        pts.append(dist.dgg(a, b, g))
    for m, l in itertools.product(GRID_VALUES, GRID_VALUES):
        pts.append(dist.ig(m, l))
    return pts


def small_family_grid():
    """A fast cross-section: one corner, one center, one heavy point per family."""
    return [
        dist.gg(1, 1, 1),
        dist.gg(0.5, 0.5, 3),
        dist.gg(3, 3, 0.5),
        dist.gg(2, 1, 2),
        dist.dgg(0.5, 2, 1),
        dist.dgg(1, 1, 1),
        dist.dgg(2, 0.5, 2),
        dist.ig(1, 1),
        dist.ig(3, 0.5),
        dist.ig(0.5, 2),
    ]


@pytest.fixture(scope="session")
def family_grid():
    return full_family_grid()


@pytest.fixture(scope="session")
def family_sample():
    return small_family_grid()
