"""Kaehler differentials of A, their exterior powers, and Ext slices.

Omega^1_A = coker(A^r --J^T--> A^{N+1}) with generators dx_i of degree w_i
and relations df_j of degree d_j. Ext^q(Omega^p, A)_m comes from a finite
piece of a free resolution over A, built by iterated kernels, dualised and
cut down to internal degree m, where it is plain linear algebra.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .cotangent import ConeRing
from .gradmod import MatrixMap, minimal_generators_mod
from .groebner import (
    FreeModuleSpec,
    homogeneous_degree,
    kernel_of_map,
    terms_to_vector,
)
from .poly import Poly, jacobian


class DepthBudgetExceeded(RuntimeError):
    """A resolution step produced more generators than allowed."""

    def __init__(self, message: str, partial: Optional[Dict] = None):
        super().__init__(message)
        self.partial = partial or {}


@dataclass
class KaehlerPresentation:
    """Omega^p_A = coker(relations): generators are wedge monomials dx_I."""

    p: int
    wedges: List[Tuple[int, ...]]
    relations: MatrixMap  # source: relation generators, target: wedge generators

    @property
    def rank(self) -> int:
        return len(self.wedges)

    @property
    def free(self) -> FreeModuleSpec:
        return self.relations.target


def _wedge(i: int, J: Tuple[int, ...]) -> Tuple[int, Optional[Tuple[int, ...]]]:
    """e_i ^ e_J = sign * e_K with K sorted; sign 0 when i is in J."""
    if i in J:
        return 0, None
    pos = sum(1 for j in J if j < i)
    K = tuple(sorted(J + (i,)))
    return (-1) ** pos, K


def kaehler(cone: ConeRing) -> KaehlerPresentation:
    ring = cone.ring
    jac = jacobian(cone.ideal_gens, ring)
    target = FreeModuleSpec(tuple(ring.weights))
    source = FreeModuleSpec(tuple(cone.degrees))
    cols = [list(row) for row in jac]
    return KaehlerPresentation(1, [(i,) for i in range(ring.nvars)], MatrixMap(cols, source, target))


def exterior_power(k1: KaehlerPresentation, p: int) -> KaehlerPresentation:
    """Lambda^p of coker(F1 -> F0) = coker(F1 (x) Lambda^{p-1} F0 -> Lambda^p F0)."""
    if k1.p != 1:
        raise ValueError("exterior_power starts from the p = 1 presentation")
    n = k1.rank
    if not 1 <= p <= n:
        raise ValueError(f"p must lie in [1, {n}], got {p}")
    if p == 1:
        return k1
    rel = k1.relations
    w = rel.target.shifts
    wedges = list(itertools.combinations(range(n), p))
    pos = {K: i for i, K in enumerate(wedges)}
    lower = list(itertools.combinations(range(n), p - 1))
    ring = None
    for col in rel.columns:
        for x in col:
            ring = x.ring
            break
        if ring:
            break
    cols, shifts = [], []
    for j, col in enumerate(rel.columns):
        for J in lower:
            vec = [None] * len(wedges)
            for i, f in enumerate(col):
                if f.is_zero():
                    continue
                sign, K = _wedge(i, J)
                if not sign:
                    continue
                term = f if sign > 0 else -f
                k = pos[K]
                vec[k] = term if vec[k] is None else vec[k] + term
            vec = [ring.zero() if v is None else v for v in vec]
            if all(v.is_zero() for v in vec):
                continue
            cols.append(vec)
            shifts.append(rel.source.shifts[j] + sum(w[i] for i in J))
    target = FreeModuleSpec(tuple(sum(w[i] for i in K) for K in wedges))
    return KaehlerPresentation(p, wedges, MatrixMap(cols, FreeModuleSpec(tuple(shifts)), target))


# ---------------------------------------------------------------------------
# resolutions over A


class Resolution:
    """P_0 <-d_1- P_1 <-d_2- P_2 ... over A, extended on demand."""

    def __init__(self, cone: ConeRing, pres: KaehlerPresentation, budget: Optional[int] = None):
        self.cone = cone
        self.maps: List[MatrixMap] = [pres.relations] if pres.relations.source.rank else []
        self.modules: List[FreeModuleSpec] = [pres.free]
        if self.maps:
            self.modules.append(pres.relations.source)
        self.budget = budget
        self.exact_end = not self.maps  # P_1 = 0: nothing more to resolve

    @property
    def length(self) -> int:
        return len(self.maps)

    def extend(self, depth: int) -> None:
        """Make d_1 .. d_depth available (d_i = 0 beyond a finite resolution)."""
        cone, ring = self.cone, self.cone.ring
        while self.length < depth and not self.exact_end:
            last = self.maps[-1]
            ker = kernel_of_map(last.columns, last.source.shifts, last.target.shifts,
                                modulus=cone.ideal_gb, ring=ring, gb=False)
            gens = minimal_generators_mod(ker.elements, ker.free, cone.slices)
            if self.budget is not None and len(gens) > self.budget:
                raise DepthBudgetExceeded(
                    f"depth budget exceeded: step {self.length + 1} needs {len(gens)} generators "
                    f"(budget {self.budget})",
                    {"ranks": [m.rank for m in self.modules]})
            if not gens:
                self.exact_end = True
                break
            degs = []
            cols = []
            for g in gens:
                vec = terms_to_vector(g, ring, last.source.rank)
                cols.append(vec)
                degs.append(homogeneous_degree(g, ring, ker.free))
            src = FreeModuleSpec(tuple(degs))
            self.maps.append(MatrixMap(cols, src, last.source))
            self.modules.append(src)

    def module(self, i: int) -> FreeModuleSpec:
        return self.modules[i] if i < len(self.modules) else FreeModuleSpec(())

    def dual_map(self, i: int) -> Optional[MatrixMap]:
        """Hom(d_i, A): Hom(P_{i-1}, A) -> Hom(P_i, A), or None if d_i = 0."""
        if i < 1 or i > self.length:
            return None
        return self.maps[i - 1].transpose()


@dataclass
class ExtSlice:
    p: int
    q: int
    internal_degree: int
    dimension: int
    resolution_depth_used: int


class ExtComputer:
    """Caches presentations and resolutions per p for one cone."""

    def __init__(self, cone: ConeRing, budget: Optional[int] = None):
        self.cone = cone
        self.budget = budget
        self._k1: Optional[KaehlerPresentation] = None
        self._res: Dict[int, Resolution] = {}

    def presentation(self, p: int) -> KaehlerPresentation:
        if self._k1 is None:
            self._k1 = kaehler(self.cone)
        return exterior_power(self._k1, p)

    def resolution(self, p: int) -> Resolution:
        res = self._res.get(p)
        if res is None:
            res = Resolution(self.cone, self.presentation(p), self.budget)
            self._res[p] = res
        return res

    def ext_slice(self, p: int, q: int, m: int, depth: Optional[int] = None) -> ExtSlice:
        n1 = self.cone.nvars
        if not 1 <= p <= n1:
            raise ValueError(f"p must lie in [1, {n1}], got {p}")
        if q < 0:
            raise ValueError(f"q must be non-negative, got {q}")
        depth = q + 1 if depth is None else max(depth, q + 1)
        res = self.resolution(p)
        res.extend(depth)
        sl = self.cone.slices
        pq = res.module(q)
        hom = FreeModuleSpec(tuple(-s for s in pq.shifts))
        total = sl.free_dim(hom, m)
        if total == 0:
            return ExtSlice(p, q, m, 0, res.length)
        out_rank = 0
        nxt = res.dual_map(q + 1)
        if nxt is not None:
            out_rank = sl.slice_rank(nxt.columns, nxt.source, nxt.target, m)
        in_rank = 0
        prev = res.dual_map(q)
        if prev is not None:
            in_rank = sl.slice_rank(prev.columns, prev.source, prev.target, m)
        return ExtSlice(p, q, m, total - out_rank - in_rank, res.length)


def ext_slice(cone: ConeRing, p: int, q: int, m: int, budget: Optional[int] = None,
              depth: Optional[int] = None) -> ExtSlice:
    return ExtComputer(cone, budget).ext_slice(p, q, m, depth)


@dataclass
class ExtHodgeTable:
    n: int
    m: int
    entries: Dict[Tuple[int, int], int] = field(default_factory=dict)
    sources: Dict[Tuple[int, int], List[Tuple[int, int]]] = field(default_factory=dict)
    conflicts: List[Tuple[Tuple[int, int], Tuple[int, int], int, int]] = field(default_factory=list)
    flags: Dict[Tuple[int, int], str] = field(default_factory=dict)
    assume_acm: bool = False

    @property
    def label(self) -> str:
        return "assumes X arithmetically Cohen-Macaulay" if self.assume_acm else "valid only if X is ACM"


def hodge_target(n: int, p: int, q: int) -> Tuple[int, int]:
    """Which primitive Hodge number Ext^q(Omega^p, A)_m computes."""
    return (n - p + 1, q) if p > q else (n - q, p)


def hodge_from_ext(cone: ConeRing, n: int, m: int, assume_acm: bool = False,
                   budget: Optional[int] = None, pairs: Optional[Sequence[Tuple[int, int]]] = None,
                   computer: Optional[ExtComputer] = None) -> ExtHodgeTable:
    comp = computer or ExtComputer(cone, budget)
    table = ExtHodgeTable(n, m, assume_acm=assume_acm)
    if pairs is None:
        pairs = [(p, q) for p in range(1, n + 2) for q in range(0, n + 1)]
    for p, q in pairs:
        if p > cone.nvars:
            continue
        val = comp.ext_slice(p, q, m).dimension
        key = hodge_target(n, p, q)
        if key in table.entries and table.entries[key] != val:
            table.conflicts.append((key, (p, q), table.entries[key], val))
            continue
        table.entries.setdefault(key, val)
        table.sources.setdefault(key, []).append((p, q))
        if key == (0, 0):
            # nothing lies above H^0 in degree 2n + 2, so all of H^0 counts as primitive
            table.flags[key] = "convention: H^0_prim = H^0"
    return table
