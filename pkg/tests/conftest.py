import os
import sys
import warnings

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from cocycle_lab import catalog as cat  # noqa: E402
from cocycle_lab.groups import (build_cyclic, build_dihedral, build_heisenberg_mod,  # noqa: E402
                                build_symmetric, direct_product)
from cocycle_lab.kernels import backends  # noqa: E402

TESTDATA = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "testdata")


def closed_groups():
    return {
        "Z1": build_cyclic(1), "Z2": build_cyclic(2), "Z6": build_cyclic(6),
        "D4": build_dihedral(4), "S3": build_symmetric(3), "S4": build_symmetric(4),
        "Heis2": build_heisenberg_mod(2), "Heis3": build_heisenberg_mod(3),
        "Z2xZ3": direct_product(build_cyclic(2), build_cyclic(3)),
    }


def catalog_cocycles():
    """One instance of every catalog kind, plus a few parameter variations."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return {
            "zn_roots4": cat.zn_roots(4), "zn_roots8": cat.zn_roots(8),
            "dihedral_plane4": cat.dihedral_plane(4),
            "heisenberg_pullback2": cat.heisenberg_pullback(2),
            "heisenberg_pullback3": cat.heisenberg_pullback(3),
            "helix": cat.helix(1.0, 2 ** 0.5),
            "directional1": cat.directional([1.0]),
            "directional2": cat.directional([1.0, 0.5]),
            "directional_gamma2": cat.directional([2.0]),
            "free_so3": cat.free_so3(radius=2),
            "haagerup": cat.haagerup(2, 2),
        }


@pytest.fixture(params=sorted(backends()))
def backend(request):
    return backends()[request.param]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
