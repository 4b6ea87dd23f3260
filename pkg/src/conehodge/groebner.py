"""Buchberger's algorithm for homogeneous submodules of graded free modules.

Module elements travel through the engine as ``{key: coeff}`` dicts where
``key = priority << ring.mono_bits | monomial_key`` and component ``c`` of a
rank ``r`` free module has priority ``r - 1 - c`` (position over term,
component 0 largest). Public entry points accept and return vectors of
:class:`~conehodge.poly.Poly`.

Quotient rings A = S/I are handled by appending ``g * e_j`` for every
``g`` in a Groebner basis of I; those blocks are declared as already being a
Groebner basis so their internal S-pairs are skipped.
"""
from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .field import inv_mod
from .poly import Poly, RingSpec

log = logging.getLogger(__name__)

Vector = List[Poly]
Terms = Dict[int, int]


class InhomogeneousError(ValueError):
    pass


@dataclass(frozen=True)
class FreeModuleSpec:
    """Graded free module; generator e_j sits in degree ``shifts[j]``."""

    shifts: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "shifts", tuple(int(s) for s in self.shifts))

    @property
    def rank(self) -> int:
        return len(self.shifts)

    def __add__(self, other: "FreeModuleSpec") -> "FreeModuleSpec":
        return FreeModuleSpec(self.shifts + other.shifts)


# ---------------------------------------------------------------------------
# conversions


def vector_to_terms(vec: Sequence[Poly], ring: RingSpec, rank: Optional[int] = None) -> Terms:
    rank = len(vec) if rank is None else rank
    mb = ring.mono_bits
    out: Terms = {}
    for c, f in enumerate(vec):
        if f is None:
            continue
        off = (rank - 1 - c) << mb
        for k, v in f.key_terms.items():
            out[off | k] = v
    return out


def terms_to_vector(terms: Terms, ring: RingSpec, rank: int) -> Vector:
    mb = ring.mono_bits
    mm = (1 << mb) - 1
    parts: List[Dict[int, int]] = [{} for _ in range(rank)]
    for k, v in terms.items():
        parts[rank - 1 - (k >> mb)][k & mm] = v
    return [Poly._raw(ring, d) for d in parts]


def term_degree(key: int, ring: RingSpec, free: FreeModuleSpec) -> int:
    comp = free.rank - 1 - (key >> ring.mono_bits)
    return ring.key_degree(key) + free.shifts[comp]


def homogeneous_degree(terms: Terms, ring: RingSpec, free: FreeModuleSpec) -> Optional[int]:
    degs = {term_degree(k, ring, free) for k in terms}
    if len(degs) > 1:
        raise InhomogeneousError(f"inhomogeneous module element: term degrees {sorted(degs)}")
    return degs.pop() if degs else None


# ---------------------------------------------------------------------------
# reduction


class Reducer:
    """Reduction of module elements against a growing list of monic elements."""

    def __init__(self, ring: RingSpec):
        self.ring = ring
        self.p = ring.prime
        self.mb = ring.mono_bits
        self.lts: List[int] = []
        self.tails: List[List[Tuple[int, int]]] = []
        self._by_prio: Dict[int, List[Tuple[int, int]]] = {}
        self._cache: Dict[int, int] = {}
        self.steps = 0

    def add(self, terms: Terms) -> int:
        """Add a monic element; returns its index."""
        lt = max(terms)
        idx = len(self.lts)
        self.lts.append(lt)
        self.tails.append([(k, v) for k, v in terms.items() if k != lt])
        self._by_prio.setdefault(lt >> self.mb, []).append((lt, idx))
        self._cache.clear()
        return idx

    def find(self, key: int) -> int:
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        mask, guard = self.ring.mask, self.ring.guard
        kb = key & mask
        found = -1
        for lt, idx in self._by_prio.get(key >> self.mb, ()):
            d = (lt & mask) - kb
            if d >= 0 and not (d & guard):
                found = idx
                break
        self._cache[key] = found
        return found

    def reduce(self, f: Terms, full: bool = True) -> Terms:
        """Normal form of ``f`` (consumed). ``full=False`` stops at an irreducible lead."""
        if not f:
            return f
        p = self.p
        result: Terms = {}
        heap = [-k for k in f]
        heapq.heapify(heap)
        pop, push = heapq.heappop, heapq.heappush
        find = self.find
        tails, lts = self.tails, self.lts
        while heap:
            k = -pop(heap)
            c = f.pop(k, None)
            if c is None:
                continue
            r = find(k)
            if r < 0:
                result[k] = c
                if not full:
                    for k2, c2 in f.items():
                        result[k2] = c2
                    return result
                continue
            self.steps += 1
            delta = k - lts[r]
            for tk, tc in tails[r]:
                nk = tk + delta
                old = f.get(nk)
                if old is None:
                    f[nk] = (-c * tc) % p
                    push(heap, -nk)
                else:
                    v = (old - c * tc) % p
                    if v:
                        f[nk] = v
                    else:
                        del f[nk]
        return result


def _monic(terms: Terms, p: int) -> Terms:
    lc = terms[max(terms)]
    if lc == 1:
        return terms
    inv = inv_mod(lc, p)
    return {k: v * inv % p for k, v in terms.items()}


# ---------------------------------------------------------------------------
# results


@dataclass
class GBasis:
    """Groebner basis of a submodule of a graded free module over S."""

    ring: RingSpec
    free: FreeModuleSpec
    elements: List[Terms]
    modulus: Optional["GBasis"] = None
    is_reduced: bool = True
    complete_through: Optional[int] = None  # None: complete in all degrees
    stats: Dict[str, int] = field(default_factory=dict)
    _reducer: Optional[Reducer] = field(default=None, init=False, repr=False, compare=False)

    def __len__(self):
        return len(self.elements)

    @property
    def reducer(self) -> Reducer:
        if self._reducer is None:
            red = Reducer(self.ring)
            for e in self.elements:
                red.add(e)
            self._reducer = red
        return self._reducer

    def leading_keys(self) -> List[int]:
        return [max(e) for e in self.elements]

    def component(self, key: int) -> int:
        return self.free.rank - 1 - (key >> self.ring.mono_bits)

    def degrees(self) -> List[int]:
        return [term_degree(max(e), self.ring, self.free) for e in self.elements]

    def vectors(self) -> List[Vector]:
        return [terms_to_vector(e, self.ring, self.free.rank) for e in self.elements]

    def polys(self) -> List[Poly]:
        """Elements of an ideal basis (rank 1) as polynomials."""
        if self.free.rank != 1:
            raise ValueError("polys() needs a rank one free module")
        return [Poly._raw(self.ring, dict(e)) for e in self.elements]

    def reduce_terms(self, terms: Terms) -> Terms:
        return self.reducer.reduce(dict(terms))

    def normal_form(self, v: Union[Poly, Sequence[Poly]]) -> Union[Poly, Vector]:
        if isinstance(v, Poly):
            return Poly._raw(self.ring, self.reduce_terms(v.key_terms))
        t = vector_to_terms(v, self.ring, self.free.rank)
        return terms_to_vector(self.reduce_terms(t), self.ring, self.free.rank)

    def contains(self, v) -> bool:
        nf = self.normal_form(v)
        return nf.is_zero() if isinstance(nf, Poly) else all(f.is_zero() for f in nf)

    def leading_monomials(self, comp: int) -> List[int]:
        """Packed leading monomials (priority stripped) in one component."""
        mm = (1 << self.ring.mono_bits) - 1
        prio = self.free.rank - 1 - comp
        return [k & mm for k in self.leading_keys() if k >> self.ring.mono_bits == prio]

    def spair_check(self) -> bool:
        """Post-hoc Buchberger criterion: every S-pair reduces to zero.

        A pair is skipped when some third element in the same component has
        leading monomial dividing the lcm and both of its own lcms with the
        pair are proper divisors of it (the syzygy then factors through
        pairs of strictly smaller lcm); for ideals coprime leading monomials
        are skipped as well.
        """
        ring, mb = self.ring, self.ring.mono_bits
        els = [_monic(e, ring.prime) for e in self.elements]
        lts = [max(e) for e in els]
        groups: Dict[int, List[int]] = {}
        for i, lt in enumerate(lts):
            groups.setdefault(lt >> mb, []).append(i)
        ideal = self.free.rank == 1
        for idx in groups.values():
            E = np.array([ring.unpack(lts[i]) for i in idx], dtype=np.int64).reshape(len(idx), ring.nvars)
            for a in range(len(idx)):
                Ma = np.maximum(E, E[a])
                for b in range(a):
                    i, j = idx[a], idx[b]
                    lcm_e = Ma[b]
                    if ideal and not np.any(np.minimum(E[a], E[b])):
                        continue
                    lcm = (lts[i] >> mb << mb) | ring.lcm_keys(lts[i], lts[j])
                    if self.complete_through is not None:
                        if term_degree(lcm, ring, self.free) > self.complete_through:
                            continue
                    div = np.all(E <= lcm_e, axis=1)
                    div[a] = div[b] = False
                    if div.any():
                        div &= np.any(Ma != lcm_e, axis=1)
                        div &= np.any(np.maximum(E, E[b]) != lcm_e, axis=1)
                        if div.any():
                            continue
                    sp = _spoly(els[i], lts[i], els[j], lts[j], lcm, ring.prime)
                    if self.reducer.reduce(sp):
                        return False
        return True


def _spoly(a: Terms, lta: int, b: Terms, ltb: int, lcm: int, p: int) -> Terms:
    da, db = lcm - lta, lcm - ltb
    s: Terms = {}
    for k, v in a.items():
        s[k + da] = v
    for k, v in b.items():
        nk = k + db
        w = (s.get(nk, 0) - v) % p
        if w:
            s[nk] = w
        else:
            s.pop(nk, None)
    return s


# ---------------------------------------------------------------------------
# the engine


class Buchberger:
    """Homogeneous Buchberger with Gebauer-Moeller pair management.

    Items (input generators and S-pairs) are processed in order of
    (degree, kind, index): generators before pairs of equal degree, pairs
    tie-broken by the smallest index pair. ``run(max_degree)`` may be called
    repeatedly with growing bounds.
    """

    def __init__(
        self,
        ring: RingSpec,
        free: FreeModuleSpec,
        gens: Iterable[Terms] = (),
        known_gb: Iterable[Terms] = (),
        product_criterion: Optional[bool] = None,
        park_below: int = 0,
    ):
        self.ring = ring
        self.free = free
        self.p = ring.prime
        self.mb = ring.mono_bits
        self.product_criterion = free.rank == 1 if product_criterion is None else product_criterion
        self.red = Reducer(ring)
        self.elements: List[Terms] = []
        self.lts: List[int] = []
        self.active: List[int] = []
        self.pairs: Dict[Tuple[int, int], int] = {}
        self.queue: List[Tuple[int, int, int, int]] = []
        self.gens: List[Terms] = []
        self.done_through: Optional[int] = None
        # elements led by a component below park_below are set aside without
        # pairs: they only need to generate, not to form a basis
        self.park_below = park_below
        self.parked: List[Terms] = []
        self.stats = {"pairs": 0, "zero_reductions": 0, "elements": 0, "skipped": 0}
        for t in known_gb:
            if t:
                homogeneous_degree(t, ring, free)
                self._insert(_monic(dict(t), self.p), pairs=False)
        for t in gens:
            if not t:
                continue
            d = homogeneous_degree(t, ring, free)
            self.gens.append(dict(t))
            heapq.heappush(self.queue, (d, 0, len(self.gens) - 1, -1))

    def _degree(self, key: int) -> int:
        return term_degree(key, self.ring, self.free)

    def _lcm(self, a: int, b: int) -> int:
        return (a >> self.mb << self.mb) | self.ring.lcm_keys(a, b)

    def _divides(self, a: int, b: int) -> bool:
        return a >> self.mb == b >> self.mb and self.ring.divides(a, b)

    def _coprime(self, a: int, b: int) -> bool:
        ea, eb = self.ring.unpack(a), self.ring.unpack(b)
        return all(x == 0 or y == 0 for x, y in zip(ea, eb))

    def _insert(self, terms: Terms, pairs: bool = True) -> None:
        idx = len(self.elements)
        lt = max(terms)
        self.elements.append(terms)
        self.lts.append(lt)
        self.red.add(terms)
        self.stats["elements"] += 1
        if pairs:
            self._update(idx)
        else:
            self.active.append(idx)

    def _update(self, h: int) -> None:
        lth = self.lts[h]
        prio = lth >> self.mb
        cands = [g for g in self.active if self.lts[g] >> self.mb == prio]
        lcms = {g: self._lcm(lth, self.lts[g]) for g in cands}
        coprime = {g: self.product_criterion and self._coprime(lth, self.lts[g]) for g in cands}
        # chain criterion among the new pairs
        kept: List[int] = []
        for pos, g in enumerate(cands):
            if coprime[g]:
                kept.append(g)
                continue
            lg = lcms[g]
            others = cands[pos + 1:] + kept
            if any(self._divides(lcms[o], lg) for o in others if o != g):
                self.stats["skipped"] += 1
                continue
            kept.append(g)
        # prune old pairs
        for (i, j), l in list(self.pairs.items()):
            if not self._divides(lth, l):
                continue
            li = self._lcm(self.lts[i], lth) if self.lts[i] >> self.mb == prio else None
            lj = self._lcm(self.lts[j], lth) if self.lts[j] >> self.mb == prio else None
            if li != l and lj != l:
                del self.pairs[(i, j)]
                self.stats["skipped"] += 1
        for g in kept:
            if coprime[g]:
                self.stats["skipped"] += 1
                continue
            i, j = (g, h) if g < h else (h, g)
            self.pairs[(i, j)] = lcms[g]
            heapq.heappush(self.queue, (self._degree(lcms[g]), 1, i, j))
        self.active = [g for g in self.active if not self._divides(lth, self.lts[g])]
        self.active.append(h)

    def run(self, max_degree: Optional[int] = None) -> "Buchberger":
        q = self.queue
        while q:
            d, kind, i, j = q[0]
            if max_degree is not None and d > max_degree:
                break
            heapq.heappop(q)
            if kind == 0:
                f = dict(self.gens[i])
            else:
                if self.pairs.pop((i, j), None) is None:
                    continue
                self.stats["pairs"] += 1
                lcm = self._lcm(self.lts[i], self.lts[j])
                f = _spoly(self.elements[i], self.lts[i], self.elements[j], self.lts[j], lcm, self.p)
            f = self.red.reduce(f)
            if not f:
                self.stats["zero_reductions"] += 1
                continue
            if max(f) >> self.mb < self.park_below:
                self.parked.append(_monic(f, self.p))
                continue
            self._insert(_monic(f, self.p))
        self.done_through = max_degree if q else None
        return self

    def result(self, modulus: Optional[GBasis] = None, reduce: bool = True) -> GBasis:
        els = [self.elements[i] for i in self.active] if reduce else list(self.elements)
        if reduce:
            els = interreduce(els, self.ring)
        stats = dict(self.stats)
        stats["reduction_steps"] = self.red.steps
        return GBasis(self.ring, self.free, els, modulus, reduce, self.done_through, stats)


@dataclass
class ModuleGenerators:
    """A homogeneous generating set (not a Groebner basis) of a submodule."""

    ring: RingSpec
    free: FreeModuleSpec
    elements: List[Terms]
    stats: Dict[str, int] = field(default_factory=dict)

    def __len__(self):
        return len(self.elements)

    def vectors(self) -> List[Vector]:
        return [terms_to_vector(t, self.ring, self.free.rank) for t in self.elements]


def interreduce(elements: List[Terms], ring: RingSpec) -> List[Terms]:
    """Minimal, tail-reduced, monic; sorted by leading key ascending."""
    p, mb = ring.prime, ring.mono_bits
    els = sorted((_monic(dict(e), p) for e in elements if e), key=max)
    lts = [max(e) for e in els]
    minimal = []
    for i, lt in enumerate(lts):
        if any(
            j != i and lts[j] >> mb == lt >> mb and ring.divides(lts[j], lt) and (lts[j] != lt or j < i)
            for j in range(len(els))
        ):
            continue
        minimal.append(els[i])
    red = Reducer(ring)
    for e in minimal:
        red.add(e)
    out = []
    for e in minimal:
        lt = max(e)
        tail = {k: v for k, v in e.items() if k != lt}
        tail = red.reduce(tail)
        tail[lt] = 1
        out.append(tail)
    return out


# ---------------------------------------------------------------------------
# public operations


def _as_terms(g, ring: RingSpec, rank: int) -> Terms:
    if isinstance(g, Poly):
        if rank != 1:
            raise ValueError("bare polynomial given for a module of rank > 1")
        return dict(g.key_terms)
    if isinstance(g, dict):
        return dict(g)
    return vector_to_terms(g, ring, rank)


def _modulus_block(modulus: Optional[GBasis], ring: RingSpec, rank: int, comps: Iterable[int]) -> List[Terms]:
    if modulus is None:
        return []
    if modulus.free.rank != 1:
        raise ValueError("modulus must be an ideal basis")
    mb = ring.mono_bits
    block = []
    for c in comps:
        off = (rank - 1 - c) << mb
        for g in modulus.elements:
            block.append({off | k: v for k, v in g.items()})
    return block


def buchberger(
    gens: Sequence,
    free: Optional[FreeModuleSpec] = None,
    modulus: Optional[GBasis] = None,
    max_degree: Optional[int] = None,
    ring: Optional[RingSpec] = None,
) -> GBasis:
    """Reduced Groebner basis of the submodule generated by ``gens``.

    With ``modulus`` (a basis of an ideal I) the result is a basis of
    ``<gens> + I * F`` over S, i.e. of the submodule over A = S/I.
    ``max_degree`` truncates: the result is complete through that degree.
    """
    if ring is None:
        ring = _infer_ring(gens, modulus)
    free = free or FreeModuleSpec((0,))
    terms = [_as_terms(g, ring, free.rank) for g in gens]
    block = _modulus_block(modulus, ring, free.rank, range(free.rank))
    eng = Buchberger(ring, free, terms, block).run(max_degree)
    return eng.result(modulus)


def _infer_ring(gens, modulus) -> RingSpec:
    if modulus is not None:
        return modulus.ring
    for g in gens:
        if isinstance(g, Poly):
            return g.ring
        for f in g:
            if isinstance(f, Poly):
                return f.ring
    raise ValueError("cannot infer the ring; pass ring=")


def normal_form(v, gb: GBasis):
    return gb.normal_form(v)


def kernel_of_map(
    columns: Sequence[Sequence[Poly]],
    source_shifts: Sequence[int],
    target_shifts: Sequence[int],
    modulus: Optional[GBasis] = None,
    max_degree: Optional[int] = None,
    ring: Optional[RingSpec] = None,
    gb: bool = True,
):
    """Basis of {v in S^r : M v in I * S^s} for M given by its columns.

    Column j is the image of source generator j (degree ``source_shifts[j]``)
    in the target free module. Computed by elimination: a position-over-term
    basis of the graph ``{(M e_j, e_j)}`` plus ``I`` times the target; its
    elements with zero target part span the kernel. With ``gb=False`` pairs
    among those are never formed and a ModuleGenerators is returned: every
    kernel element is a combination of the Schreyer syzygies of the target
    part, so the parked remainders generate.
    """
    if ring is None:
        ring = modulus.ring if modulus is not None else _infer_ring(columns, None)
    r, s = len(source_shifts), len(target_shifts)
    if len(columns) != r:
        raise ValueError(f"{len(columns)} columns for {r} source generators")
    free = FreeModuleSpec(tuple(target_shifts) + tuple(source_shifts))
    mb = ring.mono_bits
    gens = []
    for j, col in enumerate(columns):
        if len(col) != s:
            raise ValueError(f"column {j} has length {len(col)}, target rank is {s}")
        t = vector_to_terms(list(col) + [None] * r, ring, s + r)
        t[((r - 1 - j) << mb) | ring.one_key] = 1
        homogeneous_degree(t, ring, free)
        gens.append(t)
    block = _modulus_block(modulus, ring, s + r, range(s))
    if not gb:
        eng = Buchberger(ring, free, gens, block, park_below=r).run(max_degree)
        return ModuleGenerators(ring, FreeModuleSpec(tuple(source_shifts)), eng.parked, dict(eng.stats))
    eng = Buchberger(ring, free, gens, block).run(max_degree)
    full = eng.result()
    kern = [e for e in full.elements if max(e) >> mb < r]
    stats = dict(full.stats)
    return GBasis(ring, FreeModuleSpec(tuple(source_shifts)), kern, modulus, True, full.complete_through, stats)


def syzygies(
    gens: Sequence,
    free: Optional[FreeModuleSpec] = None,
    modulus: Optional[GBasis] = None,
    max_degree: Optional[int] = None,
    ring: Optional[RingSpec] = None,
    gb: bool = True,
):
    """Syzygy module of ``gens`` (over A = S/I when ``modulus`` is given).

    Source generator j has the degree of ``gens[j]``.
    """
    if ring is None:
        ring = _infer_ring(gens, modulus)
    free = free or FreeModuleSpec((0,))
    cols, degs = [], []
    for g in gens:
        t = _as_terms(g, ring, free.rank)
        d = homogeneous_degree(t, ring, free)
        if d is None:
            raise ValueError("zero generator has no degree; drop it before computing syzygies")
        degs.append(d)
        cols.append(terms_to_vector(t, ring, free.rank))
    return kernel_of_map(cols, degs, free.shifts, modulus, max_degree, ring, gb)


def ideal_basis(polys: Sequence[Poly], ring: Optional[RingSpec] = None, max_degree: Optional[int] = None) -> GBasis:
    polys = [f for f in polys if not f.is_zero()]
    if ring is None:
        if not polys:
            raise ValueError("cannot infer ring of an empty ideal")
        ring = polys[0].ring
    for f in polys:
        if f.is_homogeneous() is None:
            raise InhomogeneousError(f"inhomogeneous generator {f}")
    return buchberger(polys, FreeModuleSpec((0,)), max_degree=max_degree, ring=ring)


def shift_priority(terms: Terms, ring: RingSpec, by: int) -> Terms:
    """Move every component of ``terms`` up by ``by`` priority slots."""
    if not by:
        return dict(terms)
    mb = ring.mono_bits
    low = (1 << mb) - 1
    return {((k >> mb) + by) << mb | (k & low): v for k, v in terms.items()}


def minimal_generators(
    gens: Sequence[Terms],
    ring: RingSpec,
    free: FreeModuleSpec,
    known_gb: Sequence[Terms] = (),
) -> List[Terms]:
    """A minimal homogeneous generating set of <gens> modulo <known_gb>.

    Generators are visited by increasing degree; one is kept when it does not
    lie in the span of the known basis and the ones kept so far (checked
    against a basis complete through its degree).
    """
    items = []
    for g in gens:
        if g:
            items.append((homogeneous_degree(g, ring, free), len(items), dict(g)))
    items.sort(key=lambda t: (t[0], t[1]))
    eng = Buchberger(ring, free, (), known_gb)
    kept: List[Terms] = []
    for d, _, g in items:
        eng.run(d)
        h = eng.red.reduce(dict(g))
        if not h:
            continue
        kept.append(g)
        eng.gens.append(dict(g))
        heapq.heappush(eng.queue, (d, 0, len(eng.gens) - 1, -1))
    return kept


def relations_of(
    gens: Sequence[Terms],
    ring: RingSpec,
    free: FreeModuleSpec,
    submodule: Optional[GBasis] = None,
    max_degree: Optional[int] = None,
    gb: bool = True,
):
    """{a in S^u : sum a_i g_i in submodule}, where g_i live in ``free``.

    ``submodule`` is a Groebner basis of a submodule of ``free`` (typically
    containing I * free); source generator i has the degree of ``gens[i]``.
    """
    u, s = len(gens), free.rank
    mb = ring.mono_bits
    degs = []
    lifted = []
    for i, g in enumerate(gens):
        d = homogeneous_degree(g, ring, free)
        if d is None:
            raise ValueError("zero generator has no degree")
        degs.append(d)
        t = shift_priority(g, ring, u)
        t[((u - 1 - i) << mb) | ring.one_key] = 1
        lifted.append(t)
    src = FreeModuleSpec(tuple(degs))
    known = [shift_priority(b, ring, u) for b in (submodule.elements if submodule else ())]
    if not gb:
        eng = Buchberger(ring, free + src, lifted, known, park_below=u).run(max_degree)
        return ModuleGenerators(ring, src, eng.parked, dict(eng.stats))
    eng = Buchberger(ring, free + src, lifted, known).run(max_degree)
    full = eng.result()
    rel = [e for e in full.elements if max(e) >> mb < u]
    return GBasis(ring, src, rel, None, True, full.complete_through, dict(full.stats))
