"""Replay one random stream through all three algorithms and compare them.

Recomputing LPT from scratch gives good ratios but may shuffle a lot of
volume.  The two online algorithms trade a little ratio for migration that
stays proportional to the arriving job.
"""
import sys
from fractions import Fraction

from mcover.generators import gen_random
from mcover.oracle import run_stream

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 11
spec = gen_random(seed, 14, m=4, law="heavy-tail-dyadic")
print(f"seed {seed}: {len(spec.arrivals)} arrivals on {spec.m} machines, eps = {spec.epsilon}")
print(f"{'algorithm':15} {'worst ratio':>12} {'max factor':>11} {'total moved':>12}")
for algo in ("jump", "online-lpt", "recompute-lpt"):
    report = run_stream(spec.arrivals, spec.m, spec.epsilon, algo, verify=True, opt_limit=14)
    moved = sum((r.migrated_volume_original for r in report.rows), Fraction(0))
    worst = report.max_ratio
    print(f"{algo:15} {float(worst):12.4f} {float(report.max_factor):11.3f} {float(moved):12.3f}")
    for line in report.violations:
        print("  violation:", line)
