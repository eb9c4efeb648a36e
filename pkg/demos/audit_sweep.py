"""
Exhaustive counterexample search
================================

Sweep every subset of a small box, every adjacency and every pair of
self-maps, and evaluate a predicate on each instance.  The verdict is
either a first counterexample in sweep order, "confirmed-exhaustive", or
"exhausted-budget" when only a seeded sample fits in the budget.
"""
import json
import time

from digifix import SweepSpace, audit, replay

# all X in {0,1,2}^2 with |X| <= 3, both adjacencies
space = SweepSpace(dims=(2,), sides=(3,), sizes=(1, 3), us=(1, 2))
print(len(space.units()), "(image, metric) units")

for name in ("manyEquivs", "commuteImpliesCompatible", "EA-iff-CLRT", "theorem:compatible-common-fixed-point"):
    start = time.perf_counter()
    finding = audit(name, space)
    print(f"{name:40} {finding.verdict:22} {finding.checked:7} checked, "
          f"{finding.applicable:6} applicable  ({time.perf_counter() - start:.1f}s)")

# a larger size does not fit the budget, so a seeded sample is drawn instead
sample = SweepSpace(dims=(2,), sides=(3,), sizes=(4, 4), us=(1, 2), seed=1, budget=2000)
finding = audit("manyEquivs", sample)
print(json.dumps({k: finding.to_json()[k] for k in ("verdict", "scope", "instances_checked")}))

# assertions without a proof are audited too; the finding says nothing beyond this size
finding = audit("JRwrong3.1.6", SweepSpace(dims=(1,), sides=(5,), sizes=(1, 4), us=(1,)))
print(finding.predicate_id, finding.verdict, "unproven:", finding.unproven, "replays:", replay(finding))
