"""
Maps on a small digital image
=============================

Build an image, define two self-maps, and ask which pair properties and
fixed-point statements hold.  Everything is exact.
"""
from fractions import Fraction

from digifix import (
    DigitalImage,
    MapPair,
    Metric,
    SelfMap,
    check_properties,
    common_fixed_points,
    is_continuous,
    jungck_iteration,
    theorem_verdict,
)

# five points on a line, consecutive points adjacent
img = DigitalImage.interval(0, 4)
print(img.points, "connected edges:", img.edges)

# S collapses everything to 3, T is the identity
S = SelfMap.constant(img, img.index((3,)))
T = SelfMap.identity(img)
print("S continuous:", is_continuous(img, S), " T continuous:", is_continuous(img, T))

# every pair property at once; witnesses are indices into img.points
checks, flags = check_properties(MapPair(S, T, Metric.lp(1)))
for c in checks:
    print(f"  {c.label:8} {c.holds}")
print("flags:", sorted(flags))

# the compatible common-fixed-point statement, with a fixed coefficient
report = theorem_verdict("compatible-common-fixed-point", MapPair(S, T, Metric.lp(1)), Fraction(1, 2))
for h in report.hypotheses:
    print("  hypothesis", h.holds, h.label)
print("  conclusion", report.conclusion.holds, report.conclusion.label, report.conclusion.witness)

# the iteration that builds the fixed point: T(x_{n+1}) = S(x_n)
trace = jungck_iteration(MapPair(S, T), 0)
print("iterates:", [img.points[i] for i in trace.steps], "stable from step", trace.stabilized_at)
print("common fixed points:", [img.points[i] for i in common_fixed_points(S, T)])

# a pair that is not weakly compatible: S = 2, T(x) = x + 1 (capped)
S2 = SelfMap.constant(img, img.index((2,)))
T2 = SelfMap.from_function(img, lambda p: (min(p[0] + 1, 4),))
checks, _ = check_properties(MapPair(S2, T2), ["weak", "compat"])
for c in checks:
    print(f"  {c.label:8} {c.holds}  witness={None if c.witness is None else img.points[c.witness]}")
