import itertools
from math import comb

import pytest

from conehodge.cotangent import ConeRing, t0, t1, t2
from conehodge.kaehler import (
    DepthBudgetExceeded,
    ExtComputer,
    _wedge,
    exterior_power,
    hodge_from_ext,
    hodge_target,
    kaehler,
)
from conehodge.poly import RingSpec

from conftest import load


@pytest.mark.parametrize("name", ["xy", "cubic", "quintic"])
def test_ext_of_differentials_is_cotangent(name):
    # [DERIVED] Hom(Omega, A) = T0, Ext^1(Omega, A) = T1, and for these
    # hypersurfaces Ext^2(Omega, A) = T2 = 0
    c = ConeRing.from_spec(load(name))
    comp = ExtComputer(c)
    reps = [t0(c, window=(-3, 3)), t1(c), t2(c)]
    for q, k in itertools.product(range(3), range(-3, 4)):
        assert comp.ext_slice(1, q, k).dimension == reps[q].dim(k), (q, k)


def test_ext1_on_a_non_complete_intersection():
    r = RingSpec(97, ("x", "y", "z", "w"))
    x, y, z, w = r.gens()
    c = ConeRing([x * z - y * y, x * w - y * z, y * w - z * z], r)
    comp = ExtComputer(c)
    rep = t1(c)
    assert [comp.ext_slice(1, 1, k).dimension for k in range(-3, 3)] == [rep.dim(k) for k in range(-3, 3)]


def test_wedge_signs():
    assert _wedge(0, (1, 2)) == (1, (0, 1, 2))
    assert _wedge(2, (0, 1)) == (1, (0, 1, 2))
    assert _wedge(1, (0, 2)) == (-1, (0, 1, 2))
    assert _wedge(1, (1,)) == (0, None)


def test_exterior_power_shapes():
    c = ConeRing.from_spec(load("cubic"))
    k1 = kaehler(c)
    assert k1.rank == 4 and k1.relations.source.rank == 1
    for p in range(1, 5):
        kp = exterior_power(k1, p)
        assert kp.rank == comb(4, p)
        # generator dx_I has degree |I| (all weights 1)
        assert set(kp.free.shifts) == {p}
    with pytest.raises(ValueError):
        exterior_power(k1, 5)


def test_hodge_target():
    # p > q reads h^{n-p+1, q}, otherwise h^{n-q, p}
    assert hodge_target(3, 1, 0) == (3, 0)
    assert hodge_target(3, 2, 1) == (2, 1)
    assert hodge_target(3, 1, 1) == (2, 1)
    assert hodge_target(2, 1, 2) == (0, 1)


def test_cubic_surface_from_ext():
    # [DERIVED] cubic surface: h^{1,1}_prim = 6, h^{2,0} = 0
    c = ConeRing.from_spec(load("cubic"))
    tab = hodge_from_ext(c, 2, -1)
    assert not tab.conflicts
    assert tab.entries[(1, 1)] == 6 and tab.entries[(2, 0)] == 0
    assert "ACM" in tab.label
    assert tab.entries[(0, 0)] == 1 and "convention" in tab.flags[(0, 0)]


def test_ext_argument_checks():
    comp = ExtComputer(ConeRing.from_spec(load("xy")))
    with pytest.raises(ValueError):
        comp.ext_slice(0, 0, 0)
    with pytest.raises(ValueError):
        comp.ext_slice(1, -1, 0)


def test_depth_budget():
    r = RingSpec(97, ("x", "y", "z", "w"))
    x, y, z, w = r.gens()
    c = ConeRing([x * z - y * y, x * w - y * z, y * w - z * z], r)
    with pytest.raises(DepthBudgetExceeded):
        ExtComputer(c, budget=1).ext_slice(1, 2, 0)
