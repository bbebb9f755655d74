"""Why bounded migration costs a constant factor.

Six jobs arrive and the best layout uses them as {80/17, 2}, {3, 2}, {3, 2}.
Then a flood of tiny jobs arrives.  With those six jobs frozen in place the
best reachable minimum is 96/17, while a fresh optimum reaches 6.
"""
from fractions import Fraction

from mcover.core import Schedule
from mcover.generators import gen_17_16
from mcover.oracle import best_without_migration, brute_force_opt, run_stream

spec = gen_17_16(10)
base, smalls = spec.arrivals[:6], spec.arrivals[6:]
print("base sizes:", ", ".join(str(j.size) for j in base))
print("OPT on the base jobs:", brute_force_opt(base, 3))
print(f"{len(smalls)} small jobs of total size {sum(j.size for j in smalls)}")

reference = Schedule(3, [(base[i], m) for m, group in enumerate(((5, 0), (3, 1), (4, 2))) for i in group])
print("reference loads:", [str(x) for x in reference.original_loads()])
frozen = best_without_migration(reference, smalls)
final = brute_force_opt(spec.arrivals, 3)
print(f"frozen best {frozen}, full optimum {final}, ratio {final / frozen}")

report = run_stream(spec.arrivals, 3, Fraction(1, 8), "online-lpt", compute_opt=False)
print("Online LPT final minimum load:", report.final_schedule.min_original_load())
print("largest migration factor along the way:", report.max_factor)
