"""Command-line front end: ``conehodge run`` and ``conehodge milnor``.

Exit codes: 0 success, 1 parse or validation error, 2 computation error
(budget exceeded, non-isolated singularity), 3 disagreement between primes
or seeds.
"""
from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .cotangent import ConeRing, CotangentReport, NonIsolatedSingularity, t0, t1, t2
from .field import check_prime
from .gradmod import NotFinite, PathDisagreement
from .hodge import (
    GeometryContext,
    HodgeDiamond,
    add_lefschetz,
    derive_m_ci,
    milnor_hodge,
    render_diamond,
    theorem_extract,
)
from .kaehler import DepthBudgetExceeded, ExtComputer, hodge_target
from .linalg import SliceTooLarge
from .parser import ParseError, ProblemSpec, Task, parse

EXIT_OK, EXIT_INPUT, EXIT_COMPUTE, EXIT_DISAGREE = 0, 1, 2, 3


class InputError(ValueError):
    pass


@dataclass
class RunConfig:
    path: str
    tasks: Optional[List[Task]] = None
    primes: List[int] = field(default_factory=lambda: [97])
    seeds: Optional[List[int]] = None
    window: Optional[Tuple[int, int]] = None
    assume_acm: bool = False
    h11: Optional[int] = None
    fmt: str = "text"
    depth_budget: Optional[int] = None
    path_mode: str = "a"
    verbosity: int = 0

    def __post_init__(self):
        for p in self.primes:
            try:
                check_prime(p)
            except ValueError as exc:
                raise InputError(str(exc)) from None
        if self.window is not None and self.window[0] > self.window[1]:
            raise InputError(f"empty window {self.window[0]}..{self.window[1]}")
        if self.fmt not in ("text", "kv"):
            raise InputError(f"unknown format {self.fmt!r}")


# ---------------------------------------------------------------------------
# one run = one (prime, seed)


@dataclass
class Section:
    task: str
    kv: List[Tuple[str, str]] = field(default_factory=list)
    text: List[str] = field(default_factory=list)
    seconds: float = 0.0


def geometry(spec: ProblemSpec, cone: ConeRing) -> Tuple[Optional[int], Optional[int], str]:
    """(n, m, how m was obtained). n comes from the Krull dimension of A;
    m is derived by adjunction for complete intersections."""
    n = cone.krull_dim - 1
    if spec.dim_x is not None and spec.dim_x != n:
        raise InputError(f"declared dim {spec.dim_x} but the cone has dimension {cone.krull_dim} "
                         f"(so dim X = {n})")
    m = spec.canonical_weight
    how = "declared" if m is not None else "unknown"
    if cone.nvars - cone.krull_dim == len(cone.ideal_gens):
        derived = derive_m_ci(cone.weights, cone.degrees)
        if m is not None and m != derived:
            raise InputError(f"canonical {m} contradicts adjunction for a complete intersection "
                             f"(sum of degrees - sum of weights = {derived})")
        m, how = derived, "derived (complete intersection)"
    return n, m, how


class Runner:
    def __init__(self, spec: ProblemSpec, cfg: RunConfig, prime: int, seed: int):
        self.spec, self.cfg = spec, cfg
        self.prime, self.seed = prime, seed
        self.cone = ConeRing.from_spec(spec, seed=seed, prime=prime)
        self.n, self.m, self.m_how = geometry(spec, self.cone)
        self.window = cfg.window or spec.window
        self.reports: Dict[int, CotangentReport] = {}
        self._ext: Optional[ExtComputer] = None

    @property
    def ext(self) -> ExtComputer:
        if self._ext is None:
            self._ext = ExtComputer(self.cone, self.cfg.depth_budget)
        return self._ext

    def report(self, which: int) -> CotangentReport:
        rep = self.reports.get(which)
        if rep is None:
            fn = (t0, t1, t2)[which]
            rep = fn(self.cone, self.window, self.cfg.path_mode)
            self.reports[which] = rep
        return rep

    def need_m(self, task: str) -> int:
        if self.m is None:
            raise InputError(f"task {task} needs the canonical weight m: declare 'canonical' "
                             "or 'dim' for a complete intersection")
        return self.m

    def need_n(self, task: str) -> int:
        if self.n is None:
            raise InputError(f"task {task} needs 'dim'")
        return self.n

    def run(self, task: Task) -> Section:
        t = time.perf_counter()
        name = task.name
        sec = Section(str(task))
        if name in ("t0", "t1", "t2"):
            self._cotangent(int(name[1]), sec)
        elif name == "hilb":
            self._hilb(sec)
        elif name == "kbase":
            self._kbase(task.args[0], sec)
        elif name == "ext":
            self._ext_task(task.args[0], task.args[1], sec)
        elif name == "hodge":
            self._hodge(sec)
        elif name == "milnor":
            self._milnor(sec)
        else:  # the parser rejects anything else
            raise InputError(f"unknown task {name!r}")
        sec.seconds = time.perf_counter() - t
        return sec

    # tasks

    def _cotangent(self, which: int, sec: Section):
        rep = self.report(which)
        name = f"T{which}"
        lo = min([k for k, _ in rep.native_hilb] + [0] + ([self.m] if self.m is not None else []))
        hi = max([k for k, _ in rep.native_hilb] + [0] + ([self.m] if self.m is not None else []))
        shown = []
        for k in range(lo, hi + 1):
            try:
                shown.append((k, rep.dim(k)))
            except KeyError:
                pass
        sec.kv.append(("hilb.native", ",".join(f"{k}:{v}" for k, v in shown)))
        sec.kv.append(("hilb.shifted", rep.shifted_list()))
        sec.kv.append(("shift", str(-rep.dmax)))
        sec.kv.append(("finite", "true" if rep.finite else "false"))
        if rep.total is not None:
            sec.kv.append(("total_dim", str(rep.total)))
        sec.text.append(f"{name}[-{rep.dmax}]: {rep.shifted_list()}")
        sec.text.append("native: " + " ".join(f"({name})_{k}={v}" for k, v in shown))
        if rep.total is not None:
            sec.text.append(f"total_dim={rep.total}")
        else:
            sec.text.append("total_dim=infinite (window shown)")
        for k, v in shown:
            sec.kv.append((f"dim.{k}", str(v)))
        if self.m is not None:
            try:
                sec.text.append(f"at m={self.m}: ({name})_{self.m}={rep.dim(self.m)}")
            except KeyError:
                pass

    def _hilb(self, sec: Section):
        lo, hi = self.window or (0, 2 * max(self.cone.dmax, 1))
        vals = [(k, self.cone.hilbert(k)) for k in range(lo, hi + 1)]
        sec.kv.append(("values", ",".join(f"{k}:{v}" for k, v in vals)))
        sec.text.append("hilbert function of A: " + " ".join(f"H({k})={v}" for k, v in vals))

    def _kbase(self, k: int, sec: Section):
        mod = self.report(1).module
        basis = mod.kbase(k)
        names = []
        for exps, comp in basis:
            mon = self.cone.ring.monomial_str(exps)
            names.append(f"{mon}*e{comp}")
        sec.kv.append((f"T1.{k}", ",".join(names)))
        sec.kv.append((f"T1.{k}.dim", str(len(basis))))
        sec.text.append(f"kbase (T1)_{k}: {len(basis)} elements")
        sec.text.extend("  " + x for x in names)

    def _ext_task(self, p: int, q: int, sec: Section):
        m = self.need_m("ext")
        sl = self.ext.ext_slice(p, q, m)
        sec.kv.append((f"{p}.{q}.{m}", str(sl.dimension)))
        sec.kv.append(("depth_used", str(sl.resolution_depth_used)))
        sec.text.append(f"dim Ext^{q}(Omega^{p}, A)_{m} = {sl.dimension}"
                        f" (resolution depth {sl.resolution_depth_used})")
        if self.n is not None:
            a, b = hodge_target(self.n, p, q)
            label = "assumes X arithmetically Cohen-Macaulay" if self.cfg.assume_acm else "valid only if X is ACM"
            sec.text.append(f"  = h^{{{a},{b}}}_prim ({label})")
            sec.kv.append((f"h{a}{b}_prim", str(sl.dimension)))

    def _hodge(self, sec: Section):
        n, m = self.need_n("hodge"), self.need_m("hodge")
        ctx = GeometryContext(n, m, acm=self.cfg.assume_acm, codim_one=len(self.cone.ideal_gens) == 1)
        dims = []
        for which in (0, 1, 2):
            rep = self.report(which)
            dims.append(_dim_at(rep, m, self.cone))
        hd = theorem_extract(ctx, *dims)
        hd.mirror()
        if self.cfg.assume_acm or self.cfg.h11 is not None:
            add_lefschetz(hd, self.cfg.h11)
        sec.kv.append(("n", str(n)))
        sec.kv.append(("m", str(m)))
        sec.text.append(f"n={n} m={m} ({self.m_how})")
        for (a, b) in sorted(hd.entries, key=lambda ab: (-(ab[0] + ab[1]), -ab[0])):
            e = hd.entries[(a, b)]
            if e.primitive is not None:
                sec.kv.append((f"h{a}{b}_prim", str(e.primitive)))
            if e.value is not None and (e.value != e.primitive or e.primitive is None):
                sec.kv.append((f"h{a}{b}", str(e.value)))
            sec.text.append(f"h{a}{b}_prim={e.primitive} h{a}{b}={e.value} [{e.provenance}; {e.confidence}]")
        if len(self.cone.ideal_gens) == 1 and n + 2 == self.cone.nvars:
            d = self.cone.degrees[0]
            try:
                row = milnor_hodge(self.cone.weights, d, n)
            except ValueError:
                row = None
            if row is not None:
                agree = row[n - 1] == hd.primitive(n - 1, 1) if n >= 1 else True
                sec.kv.append(("milnor.row", ",".join(map(str, row))))
                sec.kv.append(("milnor.agree", "true" if agree else "false"))
                sec.text.append(f"closed-form check: {','.join(map(str, row))} "
                                f"({'agrees' if agree else 'DISAGREES'})")
        if n == 3:
            rows = render_diamond(hd, "lower").splitlines()
            sec.kv.append(("diamond", " / ".join(r.strip() for r in rows)))
            sec.text.append("lower Hodge diamond:")
            sec.text.extend("  " + r for r in rows)
        if not (ctx.h1_vanishing and ctx.h2_vanishing):
            sec.text.append("note: vanishing hypotheses not asserted; pass --assume-acm if X is ACM")

    def _milnor(self, sec: Section):
        cone = self.cone
        if len(cone.ideal_gens) != 1:
            raise InputError("task milnor needs a hypersurface")
        n = cone.nvars - 2
        row = milnor_hodge(cone.weights, cone.degrees[0], n)
        sec.kv.append(("row", ",".join(map(str, row))))
        sec.text.append(f"h^(p-1,n+1-p)_prim, p=1..{n + 1}: {','.join(map(str, row))}")


def _dim_at(rep: CotangentReport, m: int, cone: ConeRing) -> int:
    try:
        return rep.dim(m)
    except KeyError:
        return rep.module.slices_dim(m, cone.slices)


# ---------------------------------------------------------------------------
# output


def _kv_lines(sections: Sequence[Section], verbose: bool) -> List[str]:
    out = []
    for s in sections:
        key = s.task.replace("(", ".").replace(")", "").replace(",", ".")
        for k, v in s.kv:
            out.append(f"task.{key}.{k}={v}")
        if verbose:
            out.append(f"task.{key}.seconds={s.seconds:.3f}")
    return out


def _text_lines(sections: Sequence[Section], header: str) -> List[str]:
    out = [header]
    for s in sections:
        out.append(f"== {s.task} ==")
        out.extend(s.text)
        out.append(f"wall time {s.seconds:.2f}s")
    return out


def run(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    try:
        with open(cfg.path, "rb") as fh:
            spec = parse(fh.read())
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ParseError as exc:
        print(f"error: {cfg.path}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    tasks = cfg.tasks if cfg.tasks is not None else spec.tasks
    if not tasks:
        tasks = [Task("t1")]
    seeds = cfg.seeds if cfg.seeds is not None else [spec.seed]
    runs = []
    try:
        for seed in seeds:
            for prime in cfg.primes:
                runner = Runner(spec, cfg, prime, seed)
                sections = [runner.run(t) for t in tasks]
                runs.append((prime, seed, runner, sections))
    except (InputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NonIsolatedSingularity, NotFinite, DepthBudgetExceeded, SliceTooLarge,
            PathDisagreement, MemoryError) as exc:
        print(f"computation error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE

    prime, seed, runner, sections = runs[0]
    reference = _kv_lines(sections, False)
    bad = [(p, s) for p, s, _, secs in runs[1:] if _kv_lines(secs, False) != reference]
    if cfg.fmt == "kv":
        lines = [f"input={cfg.path}", f"primes={','.join(map(str, cfg.primes))}",
                 f"seeds={','.join(map(str, seeds))}"]
        if runner.cone.eliminated:
            lines.append("eliminated=" + ",".join(v for v, _ in runner.cone.eliminated))
        lines += _kv_lines(sections, cfg.verbosity >= 1)
        lines.append(f"check.agree={'false' if bad else 'true'}")
    else:
        header = f"# {cfg.path}: p={prime} seed={seed}, {runner.cone.nvars} variables"
        if runner.cone.eliminated:
            header += " after eliminating " + ", ".join(v for v, _ in runner.cone.eliminated)
        lines = _text_lines(sections, header)
        if cfg.verbosity >= 1:
            lines.append("timings: " + " ".join(f"{k}={v:.2f}s" for k, v in runner.cone.timings.items()))
        if len(runs) > 1:
            lines.append("check: " + ("all runs agree" if not bad else
                                      "DISAGREEMENT for (prime, seed) " + ", ".join(map(str, bad))))
    out.write("\n".join(lines) + "\n")
    return EXIT_DISAGREE if bad else EXIT_OK


def milnor_cmd(weights: Sequence[int], d: int, n: int, out=None) -> int:
    out = out or sys.stdout
    try:
        row = milnor_hodge(weights, d, n)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    out.write(",".join(map(str, row)) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def _int_list(text: str) -> List[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _window(text: str) -> Tuple[int, int]:
    try:
        lo, hi = text.split("..")
        return int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo..hi, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="conehodge", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True)
    r = sub.add_parser("run", help="run the tasks of a problem file")
    r.add_argument("file")
    r.add_argument("--primes", type=_int_list, default=[97])
    r.add_argument("--seed", type=_int_list, default=None, help="one or more seeds, comma separated")
    r.add_argument("--window", type=_window, default=None)
    r.add_argument("--tasks", default=None, help="override the file's tasks, e.g. t1,hodge")
    r.add_argument("--assume-acm", action="store_true")
    r.add_argument("--h11", type=int, default=None)
    r.add_argument("--format", choices=("text", "kv"), default="text")
    r.add_argument("--depth-budget", type=int, default=None)
    r.add_argument("--path", choices=("a", "b", "both"), default="a",
                   help="presentation (a), per-degree ranks (b) or both, cross-checked")
    r.add_argument("-v", "--verbose", action="count", default=0)
    m = sub.add_parser("milnor", help="primitive Hodge row of a hypersurface from the closed form")
    m.add_argument("--weights", type=_int_list, required=True)
    m.add_argument("--d", type=int, required=True)
    m.add_argument("--n", type=int, required=True)
    return ap


def _tasks_from(text: str) -> List[Task]:
    spec = parse(f"ring vars x\ntask {text}\n")
    return spec.tasks


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if args.cmd == "milnor":
        return milnor_cmd(args.weights, args.d, args.n)
    try:
        tasks = _tasks_from(args.tasks) if args.tasks else None
        cfg = RunConfig(args.file, tasks, args.primes, args.seed, args.window, args.assume_acm,
                        args.h11, args.format, args.depth_budget, args.path, args.verbose)
    except (InputError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
