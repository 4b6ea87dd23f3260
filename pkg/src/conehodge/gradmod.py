"""Graded modules over A = S/I: presentations, subquotients, Hilbert functions.

Every Hilbert function can be computed two ways:

* path "a": standard monomials of the leading module of a presentation
  Groebner basis (module Groebner bases over S);
* path "b": ranks of the degree-k slices of the defining matrices, assembled
  from normal forms of monomials modulo the ideal basis alone.

The two share only the ideal basis of I, so agreement is a real check.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .groebner import (
    FreeModuleSpec,
    GBasis,
    Reducer,
    Terms,
    buchberger,
    homogeneous_degree,
    kernel_of_map,
    minimal_generators,
    relations_of,
    terms_to_vector,
    vector_to_terms,
)
from .linalg import Echelon, SliceTooLarge, independent_rows, rank_mod
from .poly import Poly, RingSpec

Window = Tuple[int, int]


class PathDisagreement(RuntimeError):
    """The presentation and per-degree routes gave different dimensions."""


class NotFinite(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# standard monomials


class StandardMonomials:
    """Monomials outside a monomial ideal, enumerated degree by degree.

    ``leads`` are packed monomial keys (priority bits cleared). Monomials of
    degree D are obtained by multiplying those of degree D - w_i by x_i, which
    is enough because the complement of a monomial ideal is divisor-closed.
    """

    def __init__(self, ring: RingSpec, leads: Iterable[int] = ()):
        self.ring = ring
        self.red = Reducer(ring)
        for k in sorted(set(leads)):
            self.red.add({k: 1})
        self._cache: Dict[int, List[int]] = {}
        self._vk = [ring.var_key(i) for i in range(ring.nvars)]

    def is_standard(self, key: int) -> bool:
        return self.red.find(key) < 0

    def of_degree(self, d: int) -> List[int]:
        """Standard monomial keys of degree d, largest first."""
        if d < 0:
            return []
        hit = self._cache.get(d)
        if hit is not None:
            return hit
        r = self.ring
        if d == 0:
            out = [r.one_key] if self.is_standard(r.one_key) else []
        else:
            found = set()
            for i, w in enumerate(r.weights):
                if w > d:
                    continue
                vk = self._vk[i]
                for m in self.of_degree(d - w):
                    k = r.mul_keys(m, vk)
                    if k not in found and self.is_standard(k):
                        found.add(k)
            out = sorted(found, reverse=True)
        self._cache[d] = out
        return out

    def count(self, d: int) -> int:
        return len(self.of_degree(d))

    def pure_powers(self) -> Optional[List[int]]:
        """Exponent a_i with x_i^a_i a lead, per variable; None if one is missing."""
        out = []
        for i in range(self.ring.nvars):
            best = None
            for lt in self.red.lts:
                e = self.ring.unpack(lt)
                if e[i] and sum(e) == e[i]:
                    best = e[i] if best is None else min(best, e[i])
            if best is None:
                return None
            out.append(best)
        return out


def _leads_by_component(gb: GBasis) -> Dict[int, List[int]]:
    mb = gb.ring.mono_bits
    low = (1 << mb) - 1
    out: Dict[int, List[int]] = {}
    for e in gb.elements:
        lt = max(e)
        out.setdefault(gb.free.rank - 1 - (lt >> mb), []).append(lt & low)
    return out


# ---------------------------------------------------------------------------
# degree slices of A


# dense slices above this many entries are refused; peak memory is a few
# times 8 bytes per entry
DEFAULT_MAX_ENTRIES = 60_000_000


class QuotientSlices:
    """Graded pieces of A = S/I with standard-monomial bases.

    Normal forms of monomials are memoised as dense vectors over the basis of
    their degree; ``slice_matrix`` assembles the degree-k matrix of a map
    between free A-modules.
    """

    def __init__(self, gb: GBasis, max_entries: int = DEFAULT_MAX_ENTRIES):
        if gb.free.rank != 1:
            raise ValueError("QuotientSlices needs an ideal basis")
        self.gb = gb
        self.ring = gb.ring
        self.p = gb.ring.prime
        self.std = StandardMonomials(gb.ring, [max(e) for e in gb.elements])
        self.red = gb.reducer
        self._index: Dict[int, Dict[int, int]] = {}
        self._nf: Dict[int, Union[int, np.ndarray]] = {}
        # sums of a few products stay below 2^63 only for small primes
        self._big = self.p > (1 << 24)
        self.max_entries = max_entries

    def basis(self, d: int) -> List[int]:
        return self.std.of_degree(d)

    def dim(self, d: int) -> int:
        return self.std.count(d)

    def index(self, d: int) -> Dict[int, int]:
        idx = self._index.get(d)
        if idx is None:
            idx = {k: i for i, k in enumerate(self.basis(d))}
            self._index[d] = idx
        return idx

    def _monomial_nf(self, key: int):
        """int (basis position) for standard monomials, else a dense vector."""
        memo = self._nf
        hit = memo.get(key)
        if hit is not None:
            return hit
        ring, p, red = self.ring, self.p, self.red
        stack = [key]
        while stack:
            u = stack[-1]
            if u in memo:
                stack.pop()
                continue
            r = red.find(u)
            if r < 0:
                memo[u] = self.index(ring.key_degree(u))[u]
                stack.pop()
                continue
            delta = u - red.lts[r]
            kids = [(tk + delta, tc) for tk, tc in red.tails[r]]
            missing = [k for k, _ in kids if k not in memo]
            if missing:
                stack.extend(missing)
                continue
            vec = np.zeros(self.dim(ring.key_degree(u)), dtype=np.int64)
            for k, c in kids:
                v = memo[k]
                if isinstance(v, np.ndarray):
                    vec -= c * v
                    if self._big:
                        np.mod(vec, p, out=vec)
                else:
                    vec[v] -= c
            np.mod(vec, p, out=vec)
            memo[u] = vec
            stack.pop()
        return memo[key]

    def add_into(self, out: np.ndarray, key: int, coeff: int) -> None:
        """out += coeff * NF(monomial key) (no reduction mod p)."""
        v = self._monomial_nf(key)
        if isinstance(v, np.ndarray):
            out += coeff * v
            if self._big:
                np.mod(out, self.p, out=out)
        else:
            out[v] += coeff

    def vector(self, f: Poly, d: Optional[int] = None) -> np.ndarray:
        if d is None:
            d = f.is_homogeneous()
        out = np.zeros(self.dim(d), dtype=np.int64)
        for k, c in f.key_terms.items():
            self.add_into(out, k, c)
        return np.mod(out, self.p, out=out)

    def free_dim(self, free: FreeModuleSpec, k: int) -> int:
        return sum(self.dim(k - s) for s in free.shifts)

    def slice_matrix(self, columns: Sequence[Sequence[Poly]], source: FreeModuleSpec,
                     target: FreeModuleSpec, k: int) -> np.ndarray:
        """Degree-k matrix of the map sending source generator j to columns[j].

        Rows: concatenated bases of A_{k - t_i}; columns: m * e_j for m in the
        basis of A_{k - s_j}.
        """
        nrows = self.free_dim(target, k)
        ncols = self.free_dim(source, k)
        if self.max_entries and ncols * nrows > self.max_entries:
            raise SliceTooLarge(f"degree {k} slice of shape {nrows}x{ncols} exceeds the budget "
                                f"of {self.max_entries} entries")
        return self._fill(columns, source, target, k, range(len(columns)), range(target.rank)).T

    def _fill(self, columns, source, target, k, src, tgt) -> np.ndarray:
        """Transposed block: one row per m * e_j (j in src), columns over the
        target components in tgt."""
        ring, big, p = self.ring, self._big, self.p
        tgt = list(tgt)
        where = {}
        off = 0
        for i in tgt:
            n = self.dim(k - target.shifts[i])
            where[i] = (off, off + n)
            off += n
        nrows = sum(self.dim(k - source.shifts[j]) for j in src)
        mt = np.zeros((nrows, off), dtype=np.int64)
        if off == 0 or nrows == 0:
            return mt
        c = 0
        for j in src:
            col = columns[j]
            mons = self.basis(k - source.shifts[j])
            entries = [(where[i], list(col[i].key_terms.items())) for i in tgt
                       if col[i] is not None and not col[i].is_zero()]
            for m in mons:
                row = mt[c]
                for (a, b), terms in entries:
                    seg = row[a:b]
                    for tk, tc in terms:
                        v = self._monomial_nf(ring.mul_keys(m, tk))
                        if isinstance(v, np.ndarray):
                            seg += tc * v
                            if big:
                                np.mod(seg, p, out=seg)
                        else:
                            seg[v] += tc
                c += 1
        np.mod(mt, p, out=mt)
        return mt

    def slice_rank(self, columns, source, target, k) -> int:
        """Rank of the degree-k slice. Slices over the entry budget are
        eliminated in blocks along their long side, so only the echelon form
        (at most short side squared) is ever held in full."""
        if not columns:
            return 0
        nrows = self.free_dim(target, k)
        ncols = self.free_dim(source, k)
        if not self.max_entries or nrows * ncols <= self.max_entries:
            return rank_mod(self.slice_matrix(columns, source, target, k), self.p)
        short = min(nrows, ncols)
        if short * short > self.max_entries:
            raise SliceTooLarge(f"degree {k} slice of shape {nrows}x{ncols} exceeds the budget "
                                f"of {self.max_entries} entries even in blocks")
        step = max(1, self.max_entries // (4 * short))
        acc = Echelon(short, self.p)
        if ncols <= nrows:
            # blocks of target components; each block contributes rows of M
            groups = _chunks([self.dim(k - t) for t in target.shifts], step)
            for g in groups:
                acc.add(self._fill(columns, source, target, k, range(len(columns)), g).T)
        else:
            groups = _chunks([self.dim(k - s) for s in source.shifts], step)
            for g in groups:
                acc.add(self._fill(columns, source, target, k, g, range(target.rank)))
        return acc.rank


def _chunks(sizes: Sequence[int], step: int) -> List[List[int]]:
    out, cur, tot = [], [], 0
    for i, n in enumerate(sizes):
        if cur and tot + n > step:
            out.append(cur)
            cur, tot = [], 0
        cur.append(i)
        tot += n
    if cur:
        out.append(cur)
    return out


def minimal_generators_mod(cands: Sequence[Terms], free: FreeModuleSpec, slices: QuotientSlices,
                           base: Sequence[Terms] = ()) -> List[Terms]:
    """A minimal generating set over A of <cands> modulo the A-span of ``base``.

    Same answer as a Groebner test modulo I * free, but decided degree by
    degree with linear algebra in the slices of A.
    """
    ring = slices.ring
    rank = free.rank
    items = []
    for g in cands:
        if g:
            items.append((homogeneous_degree(g, ring, free), len(items), g))
    items.sort(key=lambda t: (t[0], t[1]))
    lower = []  # (degree, vector)
    for b in base:
        if b:
            lower.append((homogeneous_degree(b, ring, free), terms_to_vector(b, ring, rank)))
    kept: List[Terms] = []
    i = 0
    while i < len(items):
        d = items[i][0]
        j = i
        while j < len(items) and items[j][0] == d:
            j += 1
        batch = items[i:j]
        i = j
        vecs = [terms_to_vector(g, ring, rank) for _, _, g in batch]
        cmat = slices.slice_matrix(vecs, FreeModuleSpec((d,) * len(vecs)), free, d)
        low = [(e, v) for e, v in lower if e <= d]
        lmat = None
        if low:
            lmat = slices.slice_matrix([v for _, v in low], FreeModuleSpec(tuple(e for e, _ in low)), free, d)
        for pos in independent_rows(cmat.T, slices.p, None if lmat is None else lmat.T):
            kept.append(batch[pos][2])
            lower.append((d, vecs[pos]))
    return kept


# ---------------------------------------------------------------------------
# presentations


@dataclass
class GradedPresentation:
    """coker(relations) = S^u / Rel, a module over A when Rel contains I * S^u."""

    ring: RingSpec
    modulus: Optional[GBasis]
    free: FreeModuleSpec
    relations: GBasis
    images: Optional[List[Terms]] = None  # generator images in an ambient module
    _std: Dict[int, StandardMonomials] = field(default_factory=dict, repr=False)

    def _comp_std(self, c: int) -> StandardMonomials:
        s = self._std.get(c)
        if s is None:
            s = StandardMonomials(self.ring, _leads_by_component(self.relations).get(c, []))
            self._std[c] = s
        return s

    @property
    def complete_through(self) -> Optional[int]:
        return self.relations.complete_through

    def dim(self, k: int) -> int:
        top = self.relations.complete_through
        if top is not None and k > top:
            raise ValueError(f"presentation is only complete through degree {top}, asked for {k}")
        return sum(self._comp_std(c).count(k - s) for c, s in enumerate(self.free.shifts))

    def hilbert_function(self, window: Window) -> List[Tuple[int, int]]:
        return [(k, self.dim(k)) for k in range(window[0], window[1] + 1)]

    def kbase(self, k: int) -> List[Tuple[Tuple[int, ...], int]]:
        out = []
        for c, s in enumerate(self.free.shifts):
            for m in self._comp_std(c).of_degree(k - s):
                out.append((self.ring.unpack(m), c))
        return out

    def certify_finite(self) -> "Finiteness":
        if self.relations.complete_through is not None:
            raise ValueError("finiteness needs a complete presentation")
        if self.free.rank == 0:
            return Finiteness(True, None, None)
        top = None
        low = None
        for c, s in enumerate(self.free.shifts):
            st = self._comp_std(c)
            powers = st.pure_powers()
            if powers is None:
                return Finiteness(False, None, None)
            bound = sum((a - 1) * w for a, w in zip(powers, self.ring.weights))
            for d in range(bound, -1, -1):
                if st.count(d):
                    top = d + s if top is None else max(top, d + s)
                    break
            if st.count(0):
                low = s if low is None else min(low, s)
        return Finiteness(True, top, low)

    def slices_dim(self, k: int, slices: "QuotientSlices") -> int:
        """Path b for a bare presentation: dim A^u_k minus the rank of the
        relation multiples landing in degree k."""
        ring = self.ring
        cols = []
        src = []
        for e in self.relations.elements:
            vec = _terms_to_polys(e, ring, self.free.rank)
            if all(slices.gb.normal_form(x).is_zero() for x in vec if x is not None):
                continue
            cols.append(vec)
            src.append(homogeneous_degree(e, ring, self.free))
        total = slices.free_dim(self.free, k)
        if not cols:
            return total
        return total - slices.slice_rank(cols, FreeModuleSpec(tuple(src)), self.free, k)


@dataclass
class Finiteness:
    finite: bool
    top: Optional[int]  # top nonzero degree; None when zero or not finite
    bottom: Optional[int] = None

    @property
    def zero(self) -> bool:
        return self.finite and self.top is None


def _terms_to_polys(t: Terms, ring: RingSpec, rank: int) -> List[Optional[Poly]]:
    from .groebner import terms_to_vector
    return terms_to_vector(t, ring, rank)


@dataclass
class MatrixMap:
    """A homogeneous map of free modules given by the images of source generators."""

    columns: List[List[Poly]]
    source: FreeModuleSpec
    target: FreeModuleSpec

    def __post_init__(self):
        if len(self.columns) != self.source.rank:
            raise ValueError(f"{len(self.columns)} columns for rank {self.source.rank}")
        for j, col in enumerate(self.columns):
            if len(col) != self.target.rank:
                raise ValueError(f"column {j} has length {len(col)}, expected {self.target.rank}")

    def transpose(self) -> "MatrixMap":
        """The dual map Hom(target, A) -> Hom(source, A); shifts negate."""
        cols = [[self.columns[j][i] for j in range(self.source.rank)] for i in range(self.target.rank)]
        return MatrixMap(cols, FreeModuleSpec(tuple(-s for s in self.target.shifts)),
                         FreeModuleSpec(tuple(-s for s in self.source.shifts)))

    def nonzero_columns(self) -> List[List[Poly]]:
        return [c for c in self.columns if any(x is not None and not x.is_zero() for x in c)]


@dataclass
class Subquotient:
    """K / B inside the free A-module ``ambient``.

    K is the kernel of ``kernel_of`` (a map out of ``ambient``) when given,
    otherwise the span of ``numerator`` (None meaning all of ``ambient``).
    B is spanned by ``denominator``; B is assumed to lie in K.
    """

    ring: RingSpec
    modulus: GBasis
    ambient: FreeModuleSpec
    kernel_of: Optional[MatrixMap] = None
    numerator: Optional[List[List[Poly]]] = None
    denominator: List[List[Poly]] = field(default_factory=list)
    label: str = ""
    truncate: bool = False  # infinite module: build presentations only through the window
    _pres: Optional[GradedPresentation] = field(default=None, repr=False)
    shared_slices: Optional[QuotientSlices] = field(default=None, repr=False)
    stats: Dict[str, float] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.kernel_of is not None and self.kernel_of.source != self.ambient:
            raise ValueError("kernel_of must start at the ambient module")

    @property
    def slices(self) -> QuotientSlices:
        if self.shared_slices is None:
            self.shared_slices = QuotientSlices(self.modulus)
        return self.shared_slices

    def _vectors(self, vs) -> List[Terms]:
        out = []
        for v in vs:
            t = vector_to_terms(v, self.ring, self.ambient.rank)
            if t:
                out.append(t)
        return out

    # path a

    def numerator_basis(self, max_degree: Optional[int] = None):
        ring, mod = self.ring, self.modulus
        if self.kernel_of is not None:
            km = self.kernel_of
            return kernel_of_map(km.columns, km.source.shifts, km.target.shifts, modulus=mod, ring=ring, gb=False)
        if self.numerator is None:
            gens = [{((self.ambient.rank - 1 - c) << ring.mono_bits) | ring.one_key: 1} for c in range(self.ambient.rank)]
        else:
            gens = self._vectors(self.numerator)
        return buchberger(gens, self.ambient, modulus=mod, ring=ring, max_degree=max_degree)

    def denominator_basis(self, max_degree: Optional[int] = None) -> GBasis:
        return buchberger(self._vectors(self.denominator), self.ambient, modulus=self.modulus, ring=self.ring,
                          max_degree=max_degree)

    def presentation(self, max_degree: Optional[int] = None) -> GradedPresentation:
        """Presentation of K / B. ``max_degree`` is honoured only for modules
        marked ``truncate``; the result is then valid through that degree."""
        if not self.truncate:
            max_degree = None
        old = self._pres
        if old is not None:
            top = old.complete_through
            if top is None or (max_degree is not None and max_degree <= top):
                return old
        ring = self.ring
        K = self.numerator_basis(max_degree)
        B = self.denominator_basis(max_degree)
        elements = K.elements
        if max_degree is not None:
            elements = [e for e in elements if homogeneous_degree(e, ring, self.ambient) <= max_degree]
        if self.modulus is not None:
            gens = minimal_generators_mod(elements, self.ambient, self.slices,
                                          self._vectors(self.denominator))
        else:
            red = B.reducer
            cand = [x for x in (red.reduce(dict(e)) for e in elements) if x]
            gens = minimal_generators(cand, ring, self.ambient, B.elements)
        rel = relations_of(gens, ring, self.ambient, B, max_degree=max_degree)
        self.stats.update(numerator=len(K), denominator=len(B), generators=len(gens), relations=len(rel))
        self._pres = GradedPresentation(ring, self.modulus, rel.free, rel, gens)
        return self._pres

    # path b

    def slices_dim(self, k: int, slices: QuotientSlices) -> int:
        amb = slices.free_dim(self.ambient, k)
        if self.kernel_of is not None:
            k_dim = amb - self._kernel_rank(k, slices)
        elif self.numerator is None:
            k_dim = amb
        else:
            k_dim = self._span_rank(self.numerator, k, slices)
        b_dim = self._span_rank(self.denominator, k, slices) if self.denominator else 0
        return k_dim - b_dim

    def _kernel_rank(self, k: int, slices: QuotientSlices) -> int:
        km = self.kernel_of
        return slices.slice_rank(km.columns, km.source, km.target, k)

    def _span_rank(self, vecs, k: int, slices: QuotientSlices) -> int:
        cols, degs = [], []
        for v in vecs:
            t = vector_to_terms(v, self.ring, self.ambient.rank)
            if not t:
                continue
            cols.append(list(v))
            degs.append(homogeneous_degree(t, self.ring, self.ambient))
        if not cols:
            return 0
        return slices.slice_rank(cols, FreeModuleSpec(tuple(degs)), self.ambient, k)

    # common interface

    def hilbert_function(self, window: Window, path: str = "a",
                         slices: Optional[QuotientSlices] = None) -> List[Tuple[int, int]]:
        return hilbert_function(self, window, path, slices)

    def kbase(self, k: int):
        return self.presentation().kbase(k)

    def certify_finite(self) -> Finiteness:
        return self.presentation().certify_finite()


# ---------------------------------------------------------------------------
# operations

Module = Union[GradedPresentation, Subquotient]


def hilbert_function(m: Module, window: Window, path: str = "a",
                     slices: Optional[QuotientSlices] = None) -> List[Tuple[int, int]]:
    """(degree, dimension) pairs over ``window``.

    ``path`` is "a" (presentation), "b" (per-degree ranks) or "both", which
    computes the two and raises PathDisagreement on any mismatch.
    """
    lo, hi = window
    if lo > hi:
        raise ValueError(f"empty window {lo}..{hi}")
    if path not in ("a", "b", "both"):
        raise ValueError(f"unknown path {path!r}")
    out_a = out_b = None
    if path in ("a", "both"):
        pres = m.presentation(hi) if isinstance(m, Subquotient) else m
        out_a = pres.hilbert_function(window)
    if path in ("b", "both"):
        if slices is None:
            if m.modulus is None:
                raise ValueError("path b needs the ideal basis of the base ring")
            slices = QuotientSlices(m.modulus)
        out_b = [(k, m.slices_dim(k, slices)) for k in range(lo, hi + 1)]
    if out_a is not None and out_b is not None and out_a != out_b:
        bad = [(k, a, b) for (k, a), (_, b) in zip(out_a, out_b) if a != b]
        raise PathDisagreement(f"presentation and slice dimensions differ at (degree, a, b) = {bad}")
    return out_a if out_a is not None else out_b


def kbase(m: Module, degree: int) -> List[Tuple[Tuple[int, ...], int]]:
    """Standard monomials (exponents, generator index) of the given degree."""
    return m.kbase(degree)


def certify_finite(m: Module) -> Finiteness:
    return m.certify_finite()


def support_window(m: Module) -> Optional[Window]:
    """Degrees from the lowest generator to the top degree, when finite."""
    fin = m.certify_finite()
    if not fin.finite:
        raise NotFinite("leading module is not cofinite")
    if fin.top is None:
        return None
    pres = m.presentation() if isinstance(m, Subquotient) else m
    lo = min(pres.free.shifts)
    while pres.dim(lo) == 0:
        lo += 1
    return (lo, fin.top)


def ci_hilbert_series(weights: Sequence[int], degrees: Sequence[int], bound: int) -> List[int]:
    """Coefficients 0..bound of prod(1 - t^d_j) / prod(1 - t^w_i)."""
    if bound < 0:
        return []
    if any(w <= 0 for w in weights):
        raise ValueError(f"weights must be positive, got {list(weights)}")
    c = [0] * (bound + 1)
    c[0] = 1
    for d in degrees:
        if d <= 0:
            raise ValueError(f"degrees must be positive, got {list(degrees)}")
        for t in range(bound, d - 1, -1):
            c[t] -= c[t - d]
    for w in weights:
        for t in range(w, bound + 1):
            c[t] += c[t - w]
    return c
