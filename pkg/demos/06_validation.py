"""Cross-checking the dual solver against a convex-programming oracle.

Random small instances are solved twice: once through the scalar dual and
once as a relative-entropy minimization over joint laws.
"""

from mismatch.validation import cross_validate, random_instances

rows = cross_validate(random_instances(10, seed=0))
for check in sorted({r.check for r in rows}):
    sub = [r for r in rows if r.check == check]
    worst = max(r.diff for r in sub)
    print(f"{check:11s}: {len(sub)} instances, worst |diff| = {worst:.2e} bits, all pass = {all(r.passed for r in sub)}")
