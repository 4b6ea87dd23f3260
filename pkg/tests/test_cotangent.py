import pytest
from hypothesis import assume, given, settings, strategies as st

from conehodge.cotangent import (
    ConeRing,
    NonIsolatedSingularity,
    minimize_embedding,
    shifted_report,
    slice_dims,
    t0,
    t1,
    t2,
)
from conehodge.gradmod import QuotientSlices
from conehodge.groebner import ideal_basis
from conehodge.parser import RandomPolySpec, random_homogeneous
from conehodge.poly import RingSpec, jacobian

from conftest import load


def tjurina_dims(f, ring, d, degrees):
    """(T1)_k of a hypersurface is (S/(f, J_f))_{k+d} (oracle)."""
    sl = QuotientSlices(ideal_basis([f] + [g for g in jacobian([f], ring)[0] if not g.is_zero()], ring))
    return {k: sl.dim(k + d) for k in degrees}


def test_xy():
    # [DERIVED] Tjurina algebra of xy is k, sitting in native degree -2
    c = ConeRing.from_spec(load("xy"))
    rep = t1(c, path="both")
    assert rep.total == 1 and rep.dim(-2) == 1 and rep.dim(0) == 0
    assert t2(c, path="both").total == 0
    assert shifted_report(rep)[0] == "T1[-2]: 1"


def test_fermat_cubic_matches_jacobian_ring():
    c = ConeRing.from_spec(load("cubic"))
    rep = t1(c)
    f = c.ideal_gens[0]
    want = tjurina_dims(f, c.ring, 3, range(-3, 4))
    assert {k: rep.dim(k) for k in range(-3, 4)} == want
    assert rep.shifted_list() == "1,4,6,4,1"


def test_rational_normal_curves():
    # [DERIVED] cone over the rational normal curve of degree d: T1 lives in
    # degree -1 with dimension 2d - 4, and dim T2 = (d - 1)(d - 3)
    r = RingSpec(97, ("x", "y", "z", "w"))
    x, y, z, w = r.gens()
    c = ConeRing([x * z - y * y, x * w - y * z, y * w - z * z], r)
    assert c.krull_dim == 2
    assert t1(c, path="both").native_hilb == [(-2, 0), (-1, 2)]
    assert t2(c, path="both").total == 0
    r5 = RingSpec(97, tuple("abcde"))
    a, b, cc, d, e = r5.gens()
    c = ConeRing([a * cc - b * b, a * d - b * cc, a * e - b * d, b * d - cc * cc, b * e - cc * d, cc * e - d * d], r5)
    assert t1(c, path="both").total == 4
    assert t2(c, path="both").total == 3


def test_elliptic_quartic():
    # [DERIVED] two quadrics in P^3: T1 has the j-line in degree 0 and T2 = 0
    r = RingSpec(97, ("x", "y", "z", "w"))
    x, y, z, w = r.gens()
    c = ConeRing([x * x + y * y - z * w, x * y + 3 * z * z - w * w + x * w], r)
    rep = t1(c, path="both")
    assert rep.dim(0) == 1
    assert t2(c, path="both").total == 0


def test_t0_of_quintic_degree_zero():
    # [PAPER] only the Euler derivation in degree 0
    c = ConeRing.from_spec(load("quintic"))
    assert t0(c, window=(-1, 1)).dim(0) == 1
    assert slice_dims(c, 0, [0]) == {0: 1}


def test_non_isolated_rejected():
    r = RingSpec(97, ("x", "y", "z"))
    x, y, z = r.gens()
    with pytest.raises(NonIsolatedSingularity):
        t1(ConeRing([x * x * y], r))
    # T0 falls back to a window
    assert t0(ConeRing([x * x * y], r)).partial


def test_minimize_embedding():
    r = RingSpec(97, ("x", "y", "z", "w"), (1, 1, 1, 2))
    x, y, z, w = r.gens()
    ring, polys, gone = minimize_embedding([x + 2 * y, w - z * z, x * y * z - w * y], r)
    names = [name for name, _ in gone]
    assert len(names) == 2 and "w" in names and "z" not in names
    assert ring.nvars == 2 and ring.weights == (1, 1)
    # one of x, y is eliminated through x + 2y; w through w - z^2
    assert len(polys) == 1 and polys[0].is_homogeneous() == 3
    assert len(list(polys[0].terms())) == 2


def test_krull_dims():
    assert ConeRing.from_spec(load("xy")).krull_dim == 1
    assert ConeRing.from_spec(load("quintic")).krull_dim == 4


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2 ** 31),
       st.sampled_from([((1, 1, 1), 3), ((1, 1, 1), 4), ((1, 1, 2), 4), ((1, 1, 1, 1), 3), ((1, 2, 3), 6),
                        ((1, 1, 1, 2), 4), ((1, 1, 2, 2), 6)]))
def test_random_hypersurfaces(seed, wd):
    # [PROPERTY] T1 equals the shifted Tjurina algebra and T2 = 0
    weights, d = wd
    r = RingSpec(97, tuple(f"v{i}" for i in range(len(weights))), weights)
    f = random_homogeneous(RandomPolySpec(d, 1.0), r, seed, 0)
    c = ConeRing([f], r, minimize=False)
    try:
        rep = t1(c, path="both")
    except NonIsolatedSingularity:
        assume(False)
    degrees = range(-d - 1, 2 * d)
    assert {k: rep.dim(k) for k in degrees} == tjurina_dims(f, r, d, degrees)
    assert t2(c).total == 0
