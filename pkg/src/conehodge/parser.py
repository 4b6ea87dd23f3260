"""Problem description language and seeded generic sections.

Grammar (statements end at ``;`` or at a newline that does not follow a
comma, an operator or an open parenthesis; ``#`` starts a comment)::

    ring p=<prime> vars <name>{,<name>} weights <int>{,<int>}
    ideal <polyexpr | random(deg=<d>, density=<q>)>{, ...}
    dim <n>
    canonical <m>
    seed <u64>
    task t0|t1|t2|hilb|kbase(<deg>)|ext(<p>,<q>)|hodge|milnor   (``task`` optional)
    window <lo>..<hi>

``x0..x4`` in a variable list expands to ``x0,x1,x2,x3,x4``.

Random sections use SplitMix64 (Steele, Lea, Flood 2014)::

    state += 0x9E3779B97F4A7C15
    z = (state ^ (state >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    return z ^ (z >> 31)                      (all mod 2^64)

Generator ``index`` of a problem with seed ``s`` draws from
``SplitMix64(t)`` where ``t`` is the ``(index+1)``-th output of
``SplitMix64(s)``. The support is picked by a partial Fisher-Yates shuffle
over the degree-d monomials listed largest first, ``below(n) = next() % n``,
and coefficients are ``1 + below(p - 1)`` in increasing monomial-index order.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from .poly import Poly, RingSpec, is_homogeneous, monomials_of_degree

MASK64 = (1 << 64) - 1
TASK_NAMES = ("t0", "t1", "t2", "hilb", "kbase", "ext", "hodge", "milnor")


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.message, self.line, self.col = message, line, col
        where = f"line {line}, column {col}: " if line else ""
        super().__init__(where + message)


class SplitMix64:
    GAMMA = 0x9E3779B97F4A7C15

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + self.GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        return self.next() % n


@dataclass(frozen=True)
class RandomPolySpec:
    degree: int
    density: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "density", Fraction(self.density))
        if self.degree < 1:
            raise ValueError(f"random degree must be positive, got {self.degree}")
        if not 0 < self.density <= 1:
            raise ValueError(f"density must lie in (0, 1], got {self.density}")

    def __str__(self):
        return f"random(deg={self.degree}, density={self.density})"


@dataclass(frozen=True)
class Task:
    name: str
    args: Tuple[int, ...] = ()

    def __str__(self):
        if self.args:
            return f"{self.name}({','.join(map(str, self.args))})"
        return self.name


@dataclass
class ProblemSpec:
    ring: RingSpec
    generators: List[Union[Poly, RandomPolySpec]] = field(default_factory=list)
    dim_x: Optional[int] = None
    canonical_weight: Optional[int] = None
    tasks: List[Task] = field(default_factory=list)
    seed: int = 0
    window: Optional[Tuple[int, int]] = None
    sources: List[Optional[str]] = field(default_factory=list, compare=False, repr=False)

    def ideal(self, seed: Optional[int] = None, ring: Optional[RingSpec] = None) -> List[Poly]:
        """Explicit generators; random entries are drawn from ``seed``."""
        ring = ring or self.ring
        seed = self.seed if seed is None else seed
        out = []
        for i, g in enumerate(self.generators):
            if isinstance(g, RandomPolySpec):
                out.append(random_homogeneous(g, ring, seed, i))
            elif ring.prime != self.ring.prime and i < len(self.sources) and self.sources[i]:
                out.append(parse_poly(self.sources[i], ring))
            elif ring != self.ring:
                out.append(Poly(ring, dict(g.key_terms)))
            else:
                out.append(g)
        return out

    def degrees(self) -> List[int]:
        return [g.degree if isinstance(g, RandomPolySpec) else g.is_homogeneous() for g in self.generators]

    def pretty(self) -> str:
        r = self.ring
        lines = [f"ring p={r.prime} vars {','.join(r.var_names)} weights {','.join(map(str, r.weights))}"]
        if self.generators:
            srcs = list(self.sources) + [None] * (len(self.generators) - len(self.sources))
            lines.append("ideal " + ", ".join(s or str(g) for g, s in zip(self.generators, srcs)))
        if self.dim_x is not None:
            lines.append(f"dim {self.dim_x}")
        if self.canonical_weight is not None:
            lines.append(f"canonical {self.canonical_weight}")
        lines.append(f"seed {self.seed}")
        for t in self.tasks:
            lines.append(f"task {t}")
        if self.window is not None:
            lines.append(f"window {self.window[0]}..{self.window[1]}")
        return "\n".join(lines) + "\n"


def random_homogeneous(spec: RandomPolySpec, ring: RingSpec, seed: int, index: int) -> Poly:
    mons = monomials_of_degree(ring, spec.degree)
    if not mons:
        raise ValueError(f"no monomials of degree {spec.degree} for weights {ring.weights}")
    base = SplitMix64(seed)
    for _ in range(index + 1):
        sub = base.next()
    rng = SplitMix64(sub)
    count = max(1, math.ceil(spec.density * len(mons)))
    idx = list(range(len(mons)))
    for i in range(count):
        j = i + rng.below(len(mons) - i)
        idx[i], idx[j] = idx[j], idx[i]
    terms = {}
    for i in sorted(idx[:count]):
        terms[mons[i]] = 1 + rng.below(ring.prime - 1)
    return Poly(ring, terms)


# ---------------------------------------------------------------------------
# lexer

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<comment>#[^\n]*)|(?P<nl>\n)|(?P<num>\d+(?:\.\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>\.\.|[-+*^(),;=/])"
)
_CONTINUE = {",", "+", "-", "*", "^", "(", "=", "/"}


@dataclass
class Tok:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> List[Tok]:
    toks: List[Tok] = []
    line, col, pos, depth = 1, 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        s = m.group()
        if kind == "nl":
            if depth == 0 and toks and toks[-1].text not in _CONTINUE and toks[-1].kind != "end":
                toks.append(Tok("end", "\n", line, col))
            line, col = line + 1, 1
        elif kind not in ("ws", "comment"):
            if s == "(":
                depth += 1
            elif s == ")":
                depth -= 1
            if s == ";":
                if toks and toks[-1].kind != "end":
                    toks.append(Tok("end", s, line, col))
            else:
                toks.append(Tok(kind, s, line, col))
        pos = m.end()
        if kind != "nl":
            col += len(s)
    if toks and toks[-1].kind != "end":
        toks.append(Tok("end", "", line, col))
    toks.append(Tok("eof", "", line, col))
    return toks


# ---------------------------------------------------------------------------
# parser


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0
        self.ring: Optional[RingSpec] = None
        self.spec: Optional[ProblemSpec] = None
        self.pending: dict = {"tasks": []}

    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def error(self, msg: str, tok: Optional[Tok] = None):
        tok = tok or self.tok
        raise ParseError(msg, tok.line, tok.col)

    def take(self, text: Optional[str] = None, kind: Optional[str] = None) -> Tok:
        t = self.tok
        if (text is not None and t.text != text) or (kind is not None and t.kind != kind):
            want = repr(text) if text is not None else kind
            self.error(f"expected {want}, found {t.text!r}" if t.text.strip() else f"expected {want}")
        self.i += 1
        return t

    def accept(self, text: str) -> bool:
        if self.tok.text == text:
            self.i += 1
            return True
        return False

    def integer(self, signed: bool = False) -> int:
        neg = signed and self.accept("-")
        t = self.take(kind="num")
        if "." in t.text:
            self.error(f"expected an integer, found {t.text!r}", t)
        return -int(t.text) if neg else int(t.text)

    # statements

    def parse(self) -> ProblemSpec:
        while self.tok.kind != "eof":
            if self.tok.kind == "end":
                self.i += 1
                continue
            self.statement()
            if self.tok.kind not in ("end", "eof"):
                self.error(f"unexpected {self.tok.text!r} after statement")
        if self.spec is None:
            raise ParseError("missing ring declaration")
        return self.spec

    def statement(self):
        t = self.take(kind="name")
        kw = t.text
        if kw == "ring":
            if self.ring is not None:
                self.error("duplicate ring declaration", t)
            self.ring_decl(t)
            return
        if kw in TASK_NAMES:
            self.i -= 1
            kw = "task"
        spec = self.require_ring(t)
        if kw == "ideal":
            self.generator(spec)
            while self.accept(","):
                self.generator(spec)
        elif kw == "dim":
            spec.dim_x = self.integer()
        elif kw == "canonical":
            spec.canonical_weight = self.integer(signed=True)
        elif kw == "seed":
            v = self.integer()
            if v > MASK64:
                self.error("seed does not fit in 64 bits", t)
            spec.seed = v
        elif kw == "task":
            spec.tasks.append(self.task())
            while self.accept(","):
                spec.tasks.append(self.task())
        elif kw == "window":
            lo = self.integer(signed=True)
            self.take("..")
            hi = self.integer(signed=True)
            if lo > hi:
                self.error(f"empty window {lo}..{hi}", t)
            spec.window = (lo, hi)
        else:
            self.error(f"unknown statement {kw!r}", t)

    def require_ring(self, t: Tok) -> ProblemSpec:
        if self.spec is None:
            self.error(f"{t.text!r} before ring declaration", t)
        return self.spec

    def ring_decl(self, t: Tok):
        p = 97
        names: List[str] = []
        weights: Optional[List[int]] = None
        while self.tok.kind == "name":
            key = self.take().text
            if key == "p":
                self.take("=")
                p = self.integer()
            elif key == "vars":
                names = self.var_list()
            elif key == "weights":
                weights = [self.integer()]
                while self.accept(","):
                    weights.append(self.integer())
            else:
                self.error(f"unknown ring attribute {key!r}")
        if not names:
            self.error("ring declaration needs vars", t)
        try:
            self.ring = RingSpec(p, tuple(names), tuple(weights or ()))
        except ValueError as exc:
            self.error(str(exc), t)
        self.spec = ProblemSpec(self.ring)

    def var_list(self) -> List[str]:
        out = self.var_item()
        while self.accept(","):
            out += self.var_item()
        return out

    def var_item(self) -> List[str]:
        a = self.take(kind="name")
        if not self.accept(".."):
            return [a.text]
        b = self.take(kind="name")
        ma, mb = re.fullmatch(r"(.*?)(\d+)", a.text), re.fullmatch(r"(.*?)(\d+)", b.text)
        if not ma or not mb or ma.group(1) != mb.group(1) or int(ma.group(2)) > int(mb.group(2)):
            self.error(f"bad variable range {a.text}..{b.text}", a)
        return [f"{ma.group(1)}{k}" for k in range(int(ma.group(2)), int(mb.group(2)) + 1)]

    def task(self) -> Task:
        t = self.take(kind="name")
        if t.text not in TASK_NAMES:
            self.error(f"unknown task {t.text!r}", t)
        args: Tuple[int, ...] = ()
        if t.text == "kbase":
            self.take("(")
            args = (self.integer(signed=True),)
            self.take(")")
        elif t.text == "ext":
            self.take("(")
            a = self.integer()
            self.take(",")
            b = self.integer()
            self.take(")")
            args = (a, b)
        return Task(t.text, args)

    def generator(self, spec: ProblemSpec):
        i0 = self.i
        g = self.ideal_item()
        spec.generators.append(g)
        # keep the text so the generator can be read again over another prime
        src = None if isinstance(g, RandomPolySpec) else " ".join(t.text for t in self.toks[i0:self.i])
        spec.sources.append(src)

    def ideal_item(self):
        start = self.tok
        if self.tok.text == "random" and self.toks[self.i + 1].text == "(":
            return self.random_item()
        f = self.expr()
        if f.is_zero():
            self.error("zero generator", start)
        degs = sorted({self.ring.key_degree(k) for k in f.key_terms})
        if len(degs) > 1:
            listed = ", ".join(map(str, degs[:-1])) + f" and {degs[-1]}"
            detail = "; ".join(
                f"{self.ring.monomial_str(e)} has degree {sum(a * w for a, w in zip(e, self.ring.weights))}"
                for e, _ in f.terms()
            )
            self.error(f"inhomogeneous generator: terms of degree {listed} ({detail})", start)
        return f

    def random_item(self) -> RandomPolySpec:
        self.take("random")
        self.take("(")
        deg, dens = None, Fraction(1)
        while True:
            key = self.take(kind="name")
            self.take("=")
            if key.text == "deg":
                deg = self.integer()
            elif key.text == "density":
                num = self.take(kind="num").text
                dens = Fraction(num)
                if self.accept("/"):
                    dens /= Fraction(self.integer())
            else:
                self.error(f"unknown random() argument {key.text!r}", key)
            if not self.accept(","):
                break
        self.take(")")
        if deg is None:
            self.error("random() needs deg=")
        try:
            spec = RandomPolySpec(deg, dens)
        except ValueError as exc:
            self.error(str(exc))
        if not monomials_of_degree(self.ring, deg):
            self.error(f"no monomials of degree {deg}")
        return spec

    # polynomial expressions

    def expr(self) -> Poly:
        f = self.term()
        while self.tok.text in ("+", "-"):
            op = self.take().text
            g = self.term()
            f = f + g if op == "+" else f - g
        return f

    def term(self) -> Poly:
        f = self.unary()
        while self.accept("*"):
            f = f * self.unary()
        return f

    def unary(self) -> Poly:
        if self.accept("-"):
            return -self.unary()
        if self.accept("+"):
            return self.unary()
        return self.power()

    def power(self) -> Poly:
        f = self.atom()
        if self.accept("^"):
            f = f ** self.integer()
        return f

    def atom(self) -> Poly:
        t = self.tok
        if self.accept("("):
            f = self.expr()
            self.take(")")
            return f
        if t.kind == "num":
            return self.ring.const(self.integer())
        if t.kind == "name":
            self.i += 1
            if t.text not in self.ring.var_names:
                self.error(f"unknown variable {t.text!r}", t)
            return self.ring.var(t.text)
        self.error(f"unexpected {t.text!r} in polynomial" if t.text.strip() else "unexpected end of polynomial")


def parse(text: Union[str, bytes]) -> ProblemSpec:
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not UTF-8: {exc}") from None
    return _Parser(text).parse()


def parse_poly(text: str, ring: RingSpec) -> Poly:
    """Parse one polynomial expression in ``ring`` (no homogeneity check)."""
    p = _Parser(text)
    p.ring = ring
    f = p.expr()
    if p.tok.kind not in ("end", "eof"):
        p.error(f"unexpected {p.tok.text!r}")
    return f


def parse_polys(texts: Sequence[str], ring: RingSpec) -> List[Poly]:
    return [parse_poly(t, ring) for t in texts]
