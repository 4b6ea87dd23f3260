"""The pair of lines xy = 0: the smallest cone with a deformation.

T1 is one-dimensional (smoothing xy = t) and lives in native degree -2,
so nothing survives in degree 0.
"""
from conehodge.cotangent import ConeRing, t0, t1, t2, shifted_report
from conehodge.parser import parse

spec = parse("""
ring p=97 vars x,y
ideal x*y
""")
cone = ConeRing.from_spec(spec)
for fn in (t0, t1, t2):
    rep = fn(cone, window=(-3, 3)) if fn is t0 else fn(cone, path="both")
    for line in shifted_report(rep):
        print(line)
