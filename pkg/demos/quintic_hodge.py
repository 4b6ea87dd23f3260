"""Fermat quintic threefold: h^{2,1} from the cone, checked against the
closed form for hypersurfaces and against Ext of the differentials."""
import pathlib
import time

from conehodge.cotangent import ConeRing, t0, t1, t2
from conehodge.hodge import GeometryContext, add_lefschetz, milnor_hodge, render_diamond, theorem_extract
from conehodge.kaehler import ExtComputer
from conehodge.parser import parse

fixture = pathlib.Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "quintic.cone"
spec = parse(fixture.read_text())
cone = ConeRing.from_spec(spec)

t = time.perf_counter()
r0, r1, r2 = t0(cone, window=(-1, 1)), t1(cone), t2(cone)
print(f"T1[-5]: {r1.shifted_list()}  ({time.perf_counter() - t:.1f}s)")

# omega_X = O_X(0) for a quintic in P^4, so the answers sit in degree 0
ctx = GeometryContext(n=3, m=0, acm=True)
hd = theorem_extract(ctx, r0.dim(0), r1.dim(0), r2.dim(0))
hd.mirror()
add_lefschetz(hd)
print(render_diamond(hd))

print("closed form:", milnor_hodge([1] * 5, 5, 3))
print("Ext^1(Omega^1, A)_0 =", ExtComputer(cone).ext_slice(1, 1, 0).dimension)
