"""Weighted-graded sparse polynomials over F_p.

Monomials are packed into a single Python int whose natural integer order
is the weighted degree reverse lexicographic order::

    key = wdeg << (16 * n) | (MASK - sum(e_i << 16 * i))

so multiplying monomials is ``a + b - MASK`` and divisibility is a borrow
check on guard bits. Module terms put a component priority above the
degree field (position over term, component 0 highest).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .field import DEFAULT_PRIME, check_prime, inv_mod

FIELD_BITS = 16
MAX_EXPONENT = (1 << (FIELD_BITS - 1)) - 1
DEG_BITS = 24

Monomial = Tuple[int, ...]


@dataclass(frozen=True)
class RingSpec:
    """Ambient ring F_p[x_0..x_N] with positive weights and wdegrevlex."""

    prime: int = DEFAULT_PRIME
    var_names: Tuple[str, ...] = ("x", "y")
    weights: Tuple[int, ...] = ()
    order: str = "wdegrevlex"
    # packing constants, derived
    mask: int = field(init=False, repr=False, compare=False)
    guard: int = field(init=False, repr=False, compare=False)
    mono_bits: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        check_prime(self.prime)
        names = tuple(self.var_names)
        weights = tuple(self.weights) if self.weights else (1,) * len(names)
        if not names:
            raise ValueError("ring needs at least one variable")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        if len(weights) != len(names):
            raise ValueError(f"{len(weights)} weights for {len(names)} variables")
        if any((not isinstance(w, int)) or w < 1 for w in weights):
            raise ValueError(f"weights must be positive integers, got {weights}")
        if self.order != "wdegrevlex":
            raise ValueError(f"unsupported monomial order {self.order!r}")
        object.__setattr__(self, "var_names", names)
        object.__setattr__(self, "weights", weights)
        n = len(names)
        bn = FIELD_BITS * n
        object.__setattr__(self, "mask", (1 << bn) - 1)
        object.__setattr__(
            self, "guard", sum(1 << (FIELD_BITS * i + FIELD_BITS - 1) for i in range(n))
        )
        object.__setattr__(self, "mono_bits", bn + DEG_BITS)

    @property
    def nvars(self) -> int:
        return len(self.var_names)

    def with_prime(self, p: int) -> "RingSpec":
        return RingSpec(p, self.var_names, self.weights, self.order)

    # -- packed monomials -------------------------------------------------

    def pack(self, exps: Sequence[int]) -> int:
        if len(exps) != self.nvars:
            raise ValueError(f"expected {self.nvars} exponents, got {len(exps)}")
        r = 0
        deg = 0
        for i, (e, w) in enumerate(zip(exps, self.weights)):
            if e < 0 or e > MAX_EXPONENT:
                raise OverflowError(f"exponent {e} outside [0, {MAX_EXPONENT}]")
            r |= e << (FIELD_BITS * i)
            deg += e * w
        return (deg << (FIELD_BITS * self.nvars)) | (self.mask - r)

    def unpack(self, key: int) -> Monomial:
        r = self.mask - (key & self.mask)
        fm = (1 << FIELD_BITS) - 1
        return tuple((r >> (FIELD_BITS * i)) & fm for i in range(self.nvars))

    def key_degree(self, key: int) -> int:
        return (key >> (FIELD_BITS * self.nvars)) & ((1 << DEG_BITS) - 1)

    @property
    def one_key(self) -> int:
        return self.mask

    def mul_keys(self, a: int, b: int) -> int:
        return a + b - self.mask

    def divides(self, a: int, b: int) -> bool:
        """True when monomial ``a`` divides monomial ``b`` (priority bits ignored)."""
        d = (a & self.mask) - (b & self.mask)
        return d >= 0 and not (d & self.guard)

    def lcm_keys(self, a: int, b: int) -> int:
        ea, eb = self.unpack(a), self.unpack(b)
        return self.pack([max(x, y) for x, y in zip(ea, eb)])

    def var_key(self, i: int) -> int:
        e = [0] * self.nvars
        e[i] = 1
        return self.pack(e)

    # -- convenience ------------------------------------------------------

    def var(self, name_or_index) -> "Poly":
        i = self.var_names.index(name_or_index) if isinstance(name_or_index, str) else name_or_index
        return Poly(self, {self.var_key(i): 1})

    def gens(self) -> List["Poly"]:
        return [self.var(i) for i in range(self.nvars)]

    def const(self, c: int) -> "Poly":
        return Poly(self, {self.one_key: c})

    def zero(self) -> "Poly":
        return Poly(self, {})

    def monomial_str(self, exps: Monomial) -> str:
        parts = []
        for name, e in zip(self.var_names, exps):
            if e == 1:
                parts.append(name)
            elif e > 1:
                parts.append(f"{name}^{e}")
        return "*".join(parts) if parts else "1"


def weighted_degree(m: Sequence[int], r: RingSpec) -> int:
    if len(m) != r.nvars:
        raise ValueError(f"expected {r.nvars} exponents, got {len(m)}")
    return sum(e * w for e, w in zip(m, r.weights))


def compare(a: Sequence[int], b: Sequence[int], r: RingSpec) -> int:
    """-1, 0 or 1 as a <, =, > b in weighted degrevlex."""
    ka, kb = r.pack(a), r.pack(b)
    return (ka > kb) - (ka < kb)


def monomials_of_degree(r: RingSpec, d: int) -> List[Monomial]:
    """All exponent vectors of weighted degree d, largest first."""
    if d < 0:
        return []
    out: List[Monomial] = []
    n = r.nvars
    w = r.weights

    def rec(i: int, left: int, acc: List[int]):
        if i == n - 1:
            if left % w[i] == 0:
                out.append(tuple(acc + [left // w[i]]))
            return
        for e in range(left // w[i], -1, -1):
            rec(i + 1, left - e * w[i], acc + [e])

    rec(0, d, [])
    out.sort(key=r.pack, reverse=True)
    return out


class Poly:
    """Immutable sparse polynomial; terms keyed by packed monomial."""

    __slots__ = ("ring", "_terms")

    def __init__(self, ring: RingSpec, terms: Optional[Dict] = None):
        self.ring = ring
        p = ring.prime
        clean: Dict[int, int] = {}
        for k, c in (terms or {}).items():
            if isinstance(k, tuple):
                k = ring.pack(k)
            c = int(c) % p
            if c:
                clean[k] = (clean.get(k, 0) + c) % p
                if not clean[k]:
                    del clean[k]
        self._terms = clean

    @classmethod
    def _raw(cls, ring: RingSpec, terms: Dict[int, int]) -> "Poly":
        obj = cls.__new__(cls)
        obj.ring = ring
        obj._terms = terms
        return obj

    # -- access -----------------------------------------------------------

    @property
    def key_terms(self) -> Dict[int, int]:
        return self._terms

    def terms(self) -> List[Tuple[Monomial, int]]:
        """(exponents, coefficient) pairs, leading term first."""
        return [(self.ring.unpack(k), self._terms[k]) for k in sorted(self._terms, reverse=True)]

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def leading_key(self) -> int:
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        return max(self._terms)

    def leading_monomial(self) -> Monomial:
        return self.ring.unpack(self.leading_key())

    def leading_coefficient(self) -> int:
        return self._terms[self.leading_key()]

    def degree(self) -> int:
        """Maximal weighted degree; -1 for the zero polynomial."""
        if not self._terms:
            return -1
        return max(self.ring.key_degree(k) for k in self._terms)

    def is_homogeneous(self) -> Optional[int]:
        return is_homogeneous(self, self.ring)

    def monic(self) -> "Poly":
        if not self._terms:
            return self
        return self * inv_mod(self.leading_coefficient(), self.ring.prime)

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.ring != self.ring:
                raise ValueError("polynomials from different rings")
            return other
        if isinstance(other, int):
            return self.ring.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.ring.prime
        out = dict(self._terms)
        for k, c in other._terms.items():
            v = (out.get(k, 0) + c) % p
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return Poly._raw(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        p = self.ring.prime
        return Poly._raw(self.ring, {k: p - c for k, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, int):
            c = other % self.ring.prime
            if not c:
                return self.ring.zero()
            return Poly._raw(self.ring, {k: v * c % self.ring.prime for k, v in self._terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p, m = self.ring.prime, self.ring.mask
        out: Dict[int, int] = {}
        for ka, ca in self._terms.items():
            for kb, cb in other._terms.items():
                k = ka + kb - m
                out[k] = (out.get(k, 0) + ca * cb) % p
        return Poly._raw(self.ring, {k: c for k, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power")
        result = self.ring.const(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def mul_monomial(self, key: int, c: int = 1) -> "Poly":
        p, m = self.ring.prime, self.ring.mask
        return Poly._raw(self.ring, {k + key - m: v * c % p for k, v in self._terms.items()})

    def diff(self, i: int) -> "Poly":
        """Formal partial derivative with respect to x_i."""
        r = self.ring
        p = r.prime
        out: Dict[int, int] = {}
        for k, c in self._terms.items():
            e = list(r.unpack(k))
            if e[i] == 0:
                continue
            c = c * e[i] % p
            if not c:
                continue
            e[i] -= 1
            out[r.pack(e)] = c
        return Poly._raw(r, out)

    # -- comparison / display ---------------------------------------------

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.ring == other.ring and self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for exps, c in self.terms():
            mono = self.ring.monomial_str(exps)
            if mono == "1":
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts)

    def __repr__(self):
        return f"Poly({self})"


def is_homogeneous(f: Poly, r: RingSpec) -> Optional[int]:
    """Common weighted degree of all terms, or None. The zero poly gives None."""
    degs = {r.key_degree(k) for k in f.key_terms}
    if len(degs) == 1:
        return degs.pop()
    return None


def jacobian(fs: Iterable[Poly], r: RingSpec) -> List[List[Poly]]:
    """Row j holds the partial derivatives of fs[j]."""
    return [[f.diff(i) for i in range(r.nvars)] for f in fs]
