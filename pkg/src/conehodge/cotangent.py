"""T^0, T^1, T^2 of the cone coordinate ring A = S/I as graded subquotients.

All three are cut out of one complex of free A-modules

    A^{N+1} --theta--> A^r --phi--> A^t --psi--> A^u

with theta(d_i) = (df_j/dx_i)_j, phi the transpose of a generating set
s_1..s_t of the syzygies R of f_1..f_r, and psi the transpose of the
relations of R/R0 (R0 the Koszul syzygies). Then T^0 = ker theta,
T^1 = ker phi / im theta and T^2 = ker psi / im phi.

Native grading: d/dx_i has degree -w_i, the dual of f_j has degree -d_j, so
the Euler field sits in degree 0 and for a hypersurface
(T^1)_k = (S/(f, J_f))_{k+d}. Shifted lists are T^i[-dmax].
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

from .field import inv_mod
from .gradmod import (
    Finiteness,
    MatrixMap,
    NotFinite,
    PathDisagreement,
    QuotientSlices,
    Subquotient,
    Window,
    hilbert_function,
    minimal_generators_mod,
)
from .groebner import (
    FreeModuleSpec,
    GBasis,
    InhomogeneousError,
    Terms,
    buchberger,
    ideal_basis,
    minimal_generators,
    relations_of,
    syzygies,
    terms_to_vector,
    vector_to_terms,
)
from .linalg import SliceTooLarge
from .poly import Poly, RingSpec, jacobian


class NonIsolatedSingularity(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# embedding minimisation


def _substitute(f: Poly, i: int, g: Poly, new: RingSpec) -> Poly:
    """f(x_i := g) in the ring without x_i; g already lives in ``new``."""
    groups: Dict[int, Dict[Tuple[int, ...], int]] = {}
    for e, c in f.terms():
        rest = e[:i] + e[i + 1:]
        groups.setdefault(e[i], {})[rest] = c
    out = new.zero()
    for power, terms in sorted(groups.items()):
        h = Poly(new, terms)
        out = out + (h * g ** power if power else h)
    return out


def minimize_embedding(polys: Sequence[Poly], ring: RingSpec):
    """Eliminate variables that occur linearly in a generator of their own degree.

    Returns (ring, polys, eliminated) where ``eliminated`` lists
    (variable name, replacement polynomial as text). The graded quotient ring
    is unchanged up to isomorphism.
    """
    polys = [f for f in polys if not f.is_zero()]
    eliminated = []
    while ring.nvars > 1:
        pick = None
        for idx, f in enumerate(polys):
            d = f.is_homogeneous()
            cands = []
            for e, c in f.terms():
                if sum(e) == 1:
                    i = e.index(1)
                    if ring.weights[i] == d:
                        cands.append((i, c))
            if cands:
                pick = (idx, max(cands))
                break
        if pick is None:
            break
        idx, (i, c) = pick
        f = polys[idx]
        names = ring.var_names[:i] + ring.var_names[i + 1:]
        weights = ring.weights[:i] + ring.weights[i + 1:]
        new = RingSpec(ring.prime, names, weights)
        rest = {e[:i] + e[i + 1:]: v for e, v in f.terms() if e[i] == 0}
        # x_i = -(f - c x_i) / c
        g = Poly(new, rest) * ((-inv_mod(c, ring.prime)) % ring.prime)
        eliminated.append((ring.var_names[i], str(g)))
        polys = [_substitute(h, i, g, new) for j, h in enumerate(polys) if j != idx]
        polys = [h for h in polys if not h.is_zero()]
        ring = new
    return ring, polys, eliminated


# ---------------------------------------------------------------------------
# the cone


class ConeRing:
    """A = S/I for homogeneous f_1..f_r, with cached bases and syzygy data."""

    def __init__(self, polys: Sequence[Poly], ring: Optional[RingSpec] = None, minimize: bool = True):
        polys = list(polys)
        if ring is None:
            if not polys:
                raise ValueError("empty ideal needs an explicit ring")
            ring = polys[0].ring
        degs = []
        for f in polys:
            d = f.is_homogeneous()
            if d is None and not f.is_zero():
                raise InhomogeneousError(f"inhomogeneous generator {f}")
            if d is not None:
                degs.append(d)
        self.original_ring = ring
        self.original_gens = polys
        self.dmax = max(degs) if degs else 0
        self.eliminated: List[Tuple[str, str]] = []
        if minimize:
            ring, polys, self.eliminated = minimize_embedding(polys, ring)
        else:
            polys = [f for f in polys if not f.is_zero()]
        self.ring = ring
        self.ideal_gens = polys
        self.degrees = [f.is_homogeneous() for f in polys]
        self.timings: Dict[str, float] = {}

    @classmethod
    def from_spec(cls, spec, seed: Optional[int] = None, prime: Optional[int] = None, minimize: bool = True):
        ring = spec.ring if prime is None else spec.ring.with_prime(prime)
        return cls(spec.ideal(seed=seed, ring=ring), ring, minimize)

    def _timed(self, name, fn):
        t = time.perf_counter()
        out = fn()
        self.timings[name] = self.timings.get(name, 0.0) + time.perf_counter() - t
        return out

    @property
    def nvars(self) -> int:
        return self.ring.nvars

    @property
    def weights(self) -> Tuple[int, ...]:
        return self.ring.weights

    @cached_property
    def ideal_gb(self) -> GBasis:
        if not self.ideal_gens:
            return GBasis(self.ring, FreeModuleSpec((0,)), [], None, True, None, {})
        return self._timed("ideal_gb", lambda: ideal_basis(self.ideal_gens, self.ring))

    @cached_property
    def slices(self) -> QuotientSlices:
        return QuotientSlices(self.ideal_gb)

    def hilbert(self, k: int) -> int:
        return self.slices.dim(k)

    @cached_property
    def krull_dim(self) -> int:
        """dim A: the largest set of variables carrying no leading monomial."""
        n = self.nvars
        supports = set()
        for g in self.ideal_gb.elements:
            e = self.ring.unpack(max(g))
            supports.add(sum(1 << i for i in range(n) if e[i]))
        best = 0
        for u in range(1 << n):
            size = bin(u).count("1")
            if size > best and not any(s & ~u == 0 for s in supports):
                best = size
        return best

    # free modules of the complex (native shifts)

    @property
    def F0(self) -> FreeModuleSpec:
        return FreeModuleSpec(tuple(-w for w in self.weights))

    @property
    def F1(self) -> FreeModuleSpec:
        return FreeModuleSpec(tuple(-d for d in self.degrees))

    @cached_property
    def syzygy_gens(self) -> List[List[Poly]]:
        """A minimal generating set of the syzygies of f_1..f_r over S."""
        r = len(self.ideal_gens)
        if r <= 1:
            return []
        free = FreeModuleSpec(tuple(self.degrees))

        def run():
            gb = syzygies(self.ideal_gens, ring=self.ring, gb=False)
            gens = minimal_generators(gb.elements, self.ring, gb.free)
            return [terms_to_vector(t, self.ring, r) for t in gens]

        return self._timed("syzygies", run)

    def _syz_degree(self, s: List[Poly]) -> int:
        for j, x in enumerate(s):
            if not x.is_zero():
                return x.is_homogeneous() + self.degrees[j]
        raise ValueError("zero syzygy")

    @cached_property
    def theta(self) -> MatrixMap:
        jac = jacobian(self.ideal_gens, self.ring)
        cols = [[jac[j][i] for j in range(len(self.ideal_gens))] for i in range(self.nvars)]
        return MatrixMap(cols, self.F0, self.F1)

    def phi(self, all_rows: bool) -> MatrixMap:
        """Transpose of the syzygy matrix. Rows with every entry in I are
        dropped unless ``all_rows``: they impose no condition on Hom(I/I^2, A)."""
        rows = self.syzygy_gens
        if not all_rows:
            nf = self.ideal_gb.normal_form
            rows = [s for s in rows if any(not nf(x).is_zero() for x in s)]
        target = FreeModuleSpec(tuple(-self._syz_degree(s) for s in rows))
        cols = [[s[j] for s in rows] for j in range(len(self.ideal_gens))]
        return MatrixMap(cols, self.F1, target)

    @cached_property
    def koszul_relations(self) -> List[List[Poly]]:
        """Generators of {a : sum a_l s_l in R0}, R0 the Koszul syzygies."""
        r = len(self.ideal_gens)
        syz = self.syzygy_gens
        if not syz:
            return []
        ring = self.ring
        free = FreeModuleSpec(tuple(self.degrees))
        kos = []
        for i in range(r):
            for j in range(i + 1, r):
                v = [ring.zero()] * r
                v[i] = self.ideal_gens[j]
                v[j] = -self.ideal_gens[i]
                kos.append(vector_to_terms(v, ring, r))

        def run():
            r0 = buchberger(kos, free, ring=ring)
            gens = [vector_to_terms(s, ring, r) for s in syz]
            rel = relations_of(gens, ring, free, r0, gb=False)
            kept = minimal_generators_mod(rel.elements, rel.free, self.slices)
            return [terms_to_vector(t, ring, len(syz)) for t in kept]

        return self._timed("koszul_relations", run)

    def psi(self) -> MatrixMap:
        phi = self.phi(all_rows=True)
        rels = self.koszul_relations
        degs = []
        for a in rels:
            for l, x in enumerate(a):
                if not x.is_zero():
                    degs.append(x.is_homogeneous() - phi.target.shifts[l])
                    break
        target = FreeModuleSpec(tuple(-c for c in degs))
        cols = [[a[l] for a in rels] for l in range(phi.target.rank)]
        return MatrixMap(cols, phi.target, target)

    # the modules

    def module(self, which: int) -> Subquotient:
        ring, gb = self.ring, self.ideal_gb
        if which == 0:
            th = self.theta
            # the Euler derivation spans a free copy of A inside T0 once dim A > 0
            inf = self.krull_dim > 0
            if th.target.rank == 0:
                return Subquotient(ring, gb, ambient=self.F0, label="T0", shared_slices=self.slices, truncate=inf)
            return Subquotient(ring, gb, ambient=self.F0, kernel_of=th, label="T0", shared_slices=self.slices,
                               truncate=inf)
        if which == 1:
            ph = self.phi(all_rows=False)
            den = self.theta.nonzero_columns()
            if ph.target.rank == 0:
                return Subquotient(ring, gb, ambient=self.F1, denominator=den, label="T1", shared_slices=self.slices)
            return Subquotient(ring, gb, ambient=self.F1, kernel_of=ph, denominator=den, label="T1", shared_slices=self.slices)
        if which == 2:
            ph = self.phi(all_rows=True)
            if ph.target.rank == 0:
                return Subquotient(ring, gb, ambient=ph.target, numerator=[], label="T2", shared_slices=self.slices)
            ps = self.psi()
            den = ph.nonzero_columns()
            if ps.target.rank == 0:
                return Subquotient(ring, gb, ambient=ph.target, denominator=den, label="T2", shared_slices=self.slices)
            return Subquotient(ring, gb, ambient=ph.target, kernel_of=ps, denominator=den, label="T2", shared_slices=self.slices)
        raise ValueError(f"T^{which} is not implemented (only 0, 1, 2)")


# ---------------------------------------------------------------------------
# reports


@dataclass
class CotangentReport:
    which: int
    module: Subquotient
    native_hilb: List[Tuple[int, int]]
    dmax: int
    finite: bool
    partial: bool = False
    kbases: Dict[int, list] = field(default_factory=dict)
    seconds: float = 0.0
    beyond_top: str = "not requested"  # rank check one degree past the support

    @property
    def shifted_hilb(self) -> List[Tuple[int, int]]:
        return [(k + self.dmax, v) for k, v in self.native_hilb]

    def dim(self, k: int) -> int:
        for d, v in self.native_hilb:
            if d == k:
                return v
        if self.finite:
            return 0
        raise KeyError(f"degree {k} outside the computed window")

    @property
    def total(self) -> Optional[int]:
        return sum(v for _, v in self.native_hilb) if self.finite else None

    def shifted_list(self) -> str:
        """Comma list over the shifted support starting at shifted degree 0."""
        if not self.native_hilb or all(v == 0 for _, v in self.native_hilb):
            return "0"
        sh = self.shifted_hilb
        if self.finite:
            while sh and sh[-1][1] == 0:
                sh = sh[:-1]
        return ",".join(str(v) for _, v in sh)


def _report(cone: ConeRing, which: int, window: Optional[Window], path: str,
            kbase_degrees: Sequence[int] = ()) -> CotangentReport:
    t = time.perf_counter()
    mod = cone.module(which)
    finite, partial = False, False
    if window is None and mod.truncate:
        window = (-cone.dmax, cone.dmax)
        partial = True
    elif window is None:
        fin = mod.certify_finite()
        if fin.finite:
            finite = True
            lo = -cone.dmax
            if fin.top is None:
                window = None
            else:
                bottom = min(mod.presentation().free.shifts)
                window = (min(lo, bottom), fin.top)
        else:
            if which != 0:
                raise NonIsolatedSingularity(
                    f"T{which} is not finite-dimensional: non-isolated cone singularity "
                    "(X singular or not quasi-smooth)")
            window = (-cone.dmax, cone.dmax)
            partial = True
    elif which != 0:
        finite = mod.certify_finite().finite
    if window is None:
        hilb = []
    else:
        hilb = hilbert_function(mod, window, path, cone.slices if path != "a" else None)
    beyond = "not requested"
    if path == "both" and finite and not partial:
        # the presentation says nothing lives beyond its support; check one
        # degree past it (or the whole window of a zero module) by ranks alone
        lo = window[1] + 1 if window else -cone.dmax
        hi = window[1] + 1 if window else cone.dmax
        extra = []
        try:
            extra = [k for k in range(lo, hi + 1) if mod.slices_dim(k, cone.slices)]
            beyond = "checked"
        except SliceTooLarge:
            beyond = "skipped: slice over budget"
        if extra:
            raise PathDisagreement(f"T{which}: per-degree ranks are nonzero at {extra} "
                                   "where the presentation is zero")
    rep = CotangentReport(which, mod, hilb, cone.dmax, finite and not partial, partial)
    rep.beyond_top = beyond
    for k in kbase_degrees:
        rep.kbases[k] = mod.kbase(k)
    rep.seconds = time.perf_counter() - t
    return rep


def t0(cone: ConeRing, window: Optional[Window] = None, path: str = "a") -> CotangentReport:
    return _report(cone, 0, window, path)


def t1(cone: ConeRing, window: Optional[Window] = None, path: str = "a",
       kbase_degrees: Sequence[int] = ()) -> CotangentReport:
    return _report(cone, 1, window, path, kbase_degrees)


def t2(cone: ConeRing, window: Optional[Window] = None, path: str = "a") -> CotangentReport:
    return _report(cone, 2, window, path)


def slice_dims(cone: ConeRing, which: int, degrees: Sequence[int]) -> Dict[int, int]:
    """Per-degree dimensions by rank arithmetic only (no module bases)."""
    mod = cone.module(which)
    return {k: mod.slices_dim(k, cone.slices) for k in degrees}


def shifted_report(rep: CotangentReport) -> List[str]:
    name = f"T{rep.which}"
    lines = [f"{name}[-{rep.dmax}]: {rep.shifted_list()}"]
    table = " ".join(f"({name})_{k}={v}" for k, v in rep.native_hilb)
    lines.append(f"native: {table}" if table else "native: zero module")
    if rep.partial:
        lines.append("partial: window only, finiteness not certified")
    return lines
