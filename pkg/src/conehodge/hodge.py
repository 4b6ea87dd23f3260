"""Hodge numbers from graded pieces of T^i, and the hypersurface closed form.

Conventions. X has dimension n and omega_X = O_X(m). Primitive numbers follow
the usual definition H^k_prim = ker(L^{n-k+1}), so h^{0,0}_prim = 1; the
non-primitive diagonal adds 1 to h^{a,a} for 2a <= n when a Lefschetz
hyperplane statement is asserted.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .gradmod import ci_hilbert_series

PROVED = "proved"
CONDITIONAL = "conditional: hypothesis unverified"
CONVENTION = "convention"
USER = "user supplied"


@dataclass
class GeometryContext:
    n: int
    m: int
    h1_vanishing: bool = False
    h2_vanishing: bool = False
    acm: bool = False
    projectively_normal: bool = False
    codim_one: bool = False

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"dimension must be non-negative, got {self.n}")
        if self.acm and self.n >= 2:
            # an ACM variety of dimension >= 2 has H^1(O_X(k)) = 0 for all k,
            # and H^2 as well once n >= 3
            self.h1_vanishing = True
            if self.n >= 3:
                self.h2_vanishing = True


@dataclass
class HodgeEntry:
    value: Optional[int]
    primitive: Optional[int]
    provenance: str
    confidence: str


@dataclass
class HodgeDiamond:
    n: int
    entries: Dict[Tuple[int, int], HodgeEntry] = field(default_factory=dict)

    def set(self, a: int, b: int, primitive: Optional[int], provenance: str, confidence: str,
            value: Optional[int] = None) -> None:
        if not (0 <= a <= self.n and 0 <= b <= self.n):
            raise ValueError(f"h^{a},{b} outside the diamond of a {self.n}-fold")
        self.entries[(a, b)] = HodgeEntry(value if value is not None else primitive, primitive,
                                          provenance, confidence)

    def mirror(self) -> None:
        """Fill h^{b,a} from h^{a,b} (Hodge symmetry); check agreement."""
        for (a, b), e in list(self.entries.items()):
            other = self.entries.get((b, a))
            if other is None:
                self.entries[(b, a)] = HodgeEntry(e.value, e.primitive, f"symmetry of {e.provenance}", e.confidence)
            elif other.value is not None and e.value is not None and other.value != e.value:
                raise ValueError(f"h^{a},{b} = {e.value} but h^{b},{a} = {other.value}")

    def value(self, a: int, b: int) -> Optional[int]:
        e = self.entries.get((a, b))
        return None if e is None else e.value

    def primitive(self, a: int, b: int) -> Optional[int]:
        e = self.entries.get((a, b))
        return None if e is None else e.primitive


def derive_m_ci(weights: Sequence[int], degrees: Sequence[int]) -> int:
    """Adjunction for a complete intersection: omega_X = O_X(sum d - sum w)."""
    return sum(degrees) - sum(weights)


def milnor_hodge(weights: Sequence[int], d: int, n: int) -> List[int]:
    """h^{p-1, n+1-p}_prim for p = 1..n+1 of a quasi-smooth degree-d hypersurface."""
    weights = list(weights)
    if len(weights) != n + 2:
        raise ValueError(f"an n={n} hypersurface needs {n + 2} weights, got {len(weights)}")
    if any(w <= 0 for w in weights):
        raise ValueError(f"weights must be positive, got {weights}")
    if any(d - w <= 0 for w in weights):
        raise ValueError(f"degree {d} gives a nonpositive Jacobian degree for weights {weights}")
    sw = sum(weights)
    top = (n + 1) * d - sw
    series = milnor_series(weights, d, max(top, 0))
    out = []
    for p in range(1, n + 2):
        e = p * d - sw
        out.append(series[e] if 0 <= e < len(series) else 0)
    return out


def milnor_series(weights: Sequence[int], d: int, bound: int) -> List[int]:
    """Hilbert series of the Milnor algebra: prod (1 - t^{d-w}) / (1 - t^w)."""
    return ci_hilbert_series(weights, [d - w for w in weights], bound)


def theorem_extract(ctx: GeometryContext, t0d: Optional[int], t1d: Optional[int],
                    t2d: Optional[int], diamond: Optional[HodgeDiamond] = None) -> HodgeDiamond:
    """Primitive Hodge numbers read off (T^i)_m."""
    n = ctx.n
    hd = diamond or HodgeDiamond(n)
    if t0d is not None:
        hd.set(n, 0, t0d, "T0 at m", PROVED)
    if t1d is not None and n >= 1:
        hd.set(n - 1, 1, t1d, "T1 at m", PROVED if ctx.h1_vanishing else CONDITIONAL)
    if t2d is not None and n >= 2:
        ok = ctx.h1_vanishing and ctx.h2_vanishing
        hd.set(n - 2, 1, t2d, "T2 at m", PROVED if ok else CONDITIONAL)
    return hd


def add_lefschetz(hd: HodgeDiamond, h11: Optional[int] = None) -> None:
    """Fill the entries with a + b < n as for projective space.

    Only meaningful when the Lefschetz hyperplane theorem is asserted for X.
    Off-diagonal entries are 0; h^{a,a} = h^{a,a}_prim + 1 for a >= 1 and
    h^{0,0} = 1. ``h11`` overrides h^{1,1} when given.
    """
    n = hd.n
    for a in range(n + 1):
        for b in range(n + 1 - a):
            if a + b >= n:
                continue
            if a != b:
                hd.set(a, b, 0, "Lefschetz hyperplane", CONDITIONAL, value=0)
            elif a == 0:
                hd.set(0, 0, 1, "connected", CONVENTION, value=1)
            else:
                e = hd.entries.get((a, a))
                prim = e.primitive if e is not None and e.primitive is not None else 0
                src = e.provenance + " + Lefschetz" if e is not None else "Lefschetz hyperplane"
                hd.set(a, a, prim, src, CONDITIONAL, value=prim + 1)
    if h11 is not None and n >= 1:
        e = hd.entries.get((1, 1))
        prim = e.primitive if e is not None else None
        hd.set(1, 1, prim, "--h11", USER, value=h11)


def render_diamond(hd: HodgeDiamond, style: str = "lower") -> str:
    """Text diamond; unknown entries print as '?'.

    ``lower`` draws rows k = n..0 of the threefold diamond, each listing
    h^{0,k} .. h^{k,0}. ``full`` draws all 2n+1 rows for any n.
    """

    def cell(a, b):
        v = hd.value(a, b)
        return "?" if v is None else str(v)

    def row(k):
        lo, hi = max(0, k - hd.n), min(k, hd.n)
        return " ".join(cell(a, k - a) for a in range(lo, hi + 1))

    if style == "lower":
        if hd.n != 3:
            raise ValueError("the lower style is drawn for threefolds")
        rows = [row(k) for k in range(3, -1, -1)]
    elif style == "full":
        rows = [row(k) for k in range(2 * hd.n, -1, -1)]
    else:
        raise ValueError(f"unknown style {style!r}")
    width = max(len(r) for r in rows)
    return "\n".join(r.center(width).rstrip() for r in rows)


def diamond_rows(hd: HodgeDiamond) -> List[str]:
    """The rows of the lower diamond without padding, e.g. '0 10 10 0'."""
    return [line.strip() for line in render_diamond(hd, "lower").splitlines()]
