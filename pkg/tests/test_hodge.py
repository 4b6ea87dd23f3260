import pytest
from hypothesis import given, settings, strategies as st

from conehodge.hodge import (
    CONDITIONAL,
    CONVENTION,
    PROVED,
    USER,
    GeometryContext,
    HodgeDiamond,
    add_lefschetz,
    derive_m_ci,
    diamond_rows,
    milnor_hodge,
    render_diamond,
    theorem_extract,
)


def euler_hypersurface(n, d):
    """Topological Euler number of a smooth degree-d hypersurface in P^{n+1}:
    the coefficient of h^{n} in d h (1+h)^{n+2} / (1+d h) (oracle)."""
    # expand (1+h)^{n+2} * sum_k (-d h)^k and pick degree n, times d
    from math import comb
    return d * sum(comb(n + 2, j) * (-d) ** (n - j) for j in range(n + 1))


def test_known_hypersurfaces():
    # [DERIVED] quintic threefold, cubic surface, plane cubic, quartic K3
    assert milnor_hodge([1] * 5, 5, 3) == [1, 101, 101, 1]
    assert milnor_hodge([1] * 4, 3, 2) == [0, 6, 0]
    assert milnor_hodge([1] * 3, 3, 1) == [1, 1]
    assert milnor_hodge([1] * 4, 4, 2) == [1, 19, 1]


def test_weighted_sextic_k3():
    # [DERIVED] degree 6 in P(1,1,1,3) is a double plane K3
    assert milnor_hodge([1, 1, 1, 3], 6, 2) == [1, 19, 1]


@pytest.mark.parametrize("bad", [([1, 1, 1], 5, 3), ([1, 1, 1, 0, 1], 5, 3), ([1, 1, 1, 5, 1], 5, 3)])
def test_milnor_rejects_bad_input(bad):
    with pytest.raises(ValueError):
        milnor_hodge(*bad)


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.tuples(st.just(n), st.integers(max(n, 2), 7))))
def test_milnor_palindrome_and_euler(nd):
    # [PROPERTY] Hodge symmetry and the Euler number of the hypersurface
    n, d = nd
    h = milnor_hodge([1] * (n + 2), d, n)
    assert h == h[::-1]
    assert sum(h) == (-1) ** n * (euler_hypersurface(n, d) - (n + 1))


def test_derive_m_ci():
    assert derive_m_ci([1] * 5, [5]) == 0
    assert derive_m_ci([1] * 4, [3]) == -1
    assert derive_m_ci([1, 1, 2, 2, 3, 3], [6, 7]) == 1


def test_geometry_context():
    assert GeometryContext(3, 0, acm=True).h2_vanishing
    ctx = GeometryContext(2, 0, acm=True)
    assert ctx.h1_vanishing and not ctx.h2_vanishing
    with pytest.raises(ValueError):
        GeometryContext(-1, 0)


def test_theorem_extract_confidence():
    hd = theorem_extract(GeometryContext(3, 0), 1, 101, 0)
    assert hd.entries[(3, 0)].confidence == PROVED
    assert hd.entries[(2, 1)].confidence == CONDITIONAL
    assert hd.primitive(2, 1) == 101 and hd.primitive(1, 1) == 0
    hd = theorem_extract(GeometryContext(3, 0, acm=True), 1, 101, 0)
    assert all(e.confidence == PROVED for e in hd.entries.values())


def test_gm_like_lower_diamond():
    hd = theorem_extract(GeometryContext(3, -1, acm=True), 0, 10, 0)
    hd.mirror()
    add_lefschetz(hd, h11=1)
    assert diamond_rows(hd) == ["0 10 10 0", "0 1 0", "0 0", "1"]
    assert hd.entries[(1, 1)].confidence == USER
    assert hd.entries[(0, 0)].confidence == CONVENTION
    assert render_diamond(hd).splitlines()[-1].strip() == "1"


def test_lefschetz_adds_hyperplane_class():
    hd = theorem_extract(GeometryContext(3, 0, acm=True), 1, 101, 0)
    hd.mirror()
    add_lefschetz(hd)
    assert hd.value(1, 1) == 1 and hd.primitive(1, 1) == 0
    assert diamond_rows(hd) == ["1 101 101 1", "0 1 0", "0 0", "1"]


def test_mirror_detects_asymmetry():
    hd = HodgeDiamond(3)
    hd.set(2, 1, 5, "x", PROVED)
    hd.set(1, 2, 6, "y", PROVED)
    with pytest.raises(ValueError):
        hd.mirror()


def test_render_unknown_and_styles():
    hd = HodgeDiamond(3)
    assert diamond_rows(hd) == ["? ? ? ?", "? ? ?", "? ?", "?"]
    assert len(render_diamond(HodgeDiamond(2), "full").splitlines()) == 5
    with pytest.raises(ValueError):
        render_diamond(HodgeDiamond(2))
    with pytest.raises(ValueError):
        render_diamond(hd, "sideways")
    with pytest.raises(ValueError):
        hd.set(4, 0, 1, "x", PROVED)
