"""Acceptance gate: one test per criterion, each recording a pass/fail line.

The lines are printed in the terminal summary by ``conftest.py``.
"""
import itertools
import random
import time
from fractions import Fraction

import pytest

from conftest import ACCEPTANCE
from mcover.core import Instance, Job, LoadProfile, load_profile, profile_dominates, profile_hamming
from mcover.core import profile_insert_sorted, profile_remove_entry
from mcover.generators import gen_17_16, gen_appendix_a, gen_jump_mig_lb, gen_random, gen_swap_lb
from mcover.generators import jump_lb_bound, swap_machine_count
from mcover.jump import check_relaxed, is_swap_optimal
from mcover.lpt import lpt_schedule
from mcover.online_lpt import OnlineLPTSession, lpt_reference, verify_big_restriction
from mcover.oracle import best_without_migration, brute_force_opt, run_stream
from mcover.rounding import CensusMode, build_context, census_for_context, compute_ub
from mcover.rounding import distinct_load_census, floor_log2, merge_recurrence, pow2, round_size

LAWS = ("uniform-grid", "heavy-tail-dyadic", "small-flood")

# pinned at the first green run (see the decisions ledger)
JUMP_FACTOR_C = Fraction(1)
ONLINE_LPT_FACTOR_C = Fraction(1, 64)


def record(number, passed, detail, elapsed, limit):
    ok = passed and elapsed < limit
    ACCEPTANCE[number] = (ok, f"{detail} [{elapsed:.2f}s / {limit}s]")
    return ok


def random_streams(count, max_n, max_m, eps, seed0=0):
    for seed in range(seed0, seed0 + count):
        rng = random.Random(seed)
        yield gen_random(seed, rng.randint(1, max_n), rng.randint(1, max_m), LAWS[seed % 3], eps)


def test_c01_rounding_soundness():
    start = time.perf_counter()
    rng = random.Random(2024)
    failures = []
    for t in range(10_000):
        eps = Fraction(1, 2 ** rng.randint(1, 4))
        p = Fraction(rng.randint(1, 10**6), rng.randint(1, 10**4))
        q = p + Fraction(rng.randint(0, 1000), rng.randint(1, 10**4))
        r = round_size(p, eps)
        if not (1 - eps) * p <= r <= p:
            failures.append(("bounds", p, eps))
        if round_size(r, eps) != r:
            failures.append(("idempotence", p, eps))
        if round_size(q, eps) < r:
            failures.append(("monotonicity", p, q, eps))
        # the rounded size is a ladder entry of every context that calls it big
        ub = Fraction(rng.randint(1, 10**6), rng.randint(1, 100))
        ctx = build_context(eps, ub)
        if ctx.small_threshold <= r < ctx.huge_threshold and not ctx.on_ladder(r):
            failures.append(("ub-independence", p, ub, eps))
    elapsed = time.perf_counter() - start
    ok = record(1, not failures, f"10^4 rationals, {len(failures)} failures", elapsed, 1)
    assert ok, failures[:5]


def test_c02_ladder_and_grid():
    start = time.perf_counter()
    rng = random.Random(7)
    bad = []
    for eps in (Fraction(1, 2), Fraction(1, 4), Fraction(1, 8), Fraction(1, 16)):
        limit = (1 / eps) * (floor_log2(1 / eps) + 1)
        for _ in range(200):
            ub = Fraction(rng.randint(1, 10**5), rng.randint(1, 10**3))
            ctx = build_context(eps, ub)
            if any((q / ctx.grid).denominator != 1 for q in ctx.ladder):
                bad.append(("grid", eps, ub))
            if len(ctx.ladder) > limit:
                bad.append(("size", eps, ub, len(ctx.ladder)))
    elapsed = time.perf_counter() - start
    ok = record(2, not bad, "ladder entries are grid multiples, |P~| within bound", elapsed, 1)
    assert ok, bad[:5]


def test_c03_lpt_monotone_and_hamming():
    start = time.perf_counter()
    rng = random.Random(3)
    checked, bad = 0, []
    while checked < 1000:
        # sizes in [1, 4) keep every job big for most draws
        eps = Fraction(1, rng.choice((4, 8)))
        m = rng.randint(1, 8)
        n = rng.randint(m, min(20, 2 * m + 1))
        sizes = [pow2(rng.randint(0, 1)) * (1 + rng.randrange(eps.denominator) * eps) for _ in range(n)]
        jobs = [Job.create(i, p, eps) for i, p in enumerate(sizes)]
        base, arrival = jobs[:-1], jobs[-1]
        ctx = build_context(eps, compute_ub(jobs, m))
        if ctx.degenerate or any(ctx.is_small(j) for j in jobs):
            continue
        checked += 1
        before = load_profile(lpt_schedule(Instance(base, m)))
        after = load_profile(lpt_schedule(Instance(jobs, m)))
        if not profile_dominates(before, after):
            bad.append(("dominance", sizes, m))
        if profile_hamming(before, after) > arrival.rounded_size / ctx.grid:
            bad.append(("hamming", sizes, m))
    elapsed = time.perf_counter() - start
    ok = record(3, not bad, f"{checked} big-job instances", elapsed, 10)
    assert ok, bad[:5]


def test_c04_jump_competitive():
    start = time.perf_counter()
    eps = Fraction(1, 8)
    bound = Fraction(17, 10) / (1 - eps) + Fraction(2, 10) * eps
    worst, bad = Fraction(1), []
    for spec in random_streams(500, 14, 4, eps):
        report = run_stream(spec.arrivals, spec.m, eps, "jump", opt_limit=14)
        for row in report.rows:
            if row.ratio is None:
                if row.opt_original and row.opt_original > 0:
                    bad.append(("empty machine", spec.params))
                continue
            worst = max(worst, row.ratio)
            if row.ratio > bound:
                bad.append((spec.params, row.arrival_id, row.ratio))
    elapsed = time.perf_counter() - start
    ok = record(4, not bad, f"500 streams, worst OPT/l_min = {float(worst):.4f} <= {float(bound):.4f}", elapsed, 60)
    assert ok, bad[:5]


def test_c05_jump_migration():
    start = time.perf_counter()
    eps = Fraction(1, 8)
    worst, bad = Fraction(0), []
    for spec in random_streams(300, 14, 4, eps, seed0=1000):
        report = run_stream(spec.arrivals, spec.m, eps, "jump", compute_opt=False)
        worst = max(worst, report.max_factor)
        if report.max_factor > JUMP_FACTOR_C / eps:
            bad.append((spec.params, report.max_factor))
    lb_detail = []
    for ell in (-2, 0, 3):
        fam = gen_jump_mig_lb(ell, ell + 1, Fraction(1, 4))
        report = run_stream(
            fam.arrivals, fam.m, fam.epsilon, "jump", initial=fam.initial,
            target_rule=fam.rule(), ub_override=fam.ub, compute_opt=False,
        )
        moved = report.rows[-1].migrated_volume_rounded
        target = jump_lb_bound(ell, ell + 1, Fraction(1, 4))
        lb_detail.append(f"{moved}>={target}")
        if moved < target:
            bad.append(("lower bound", ell, moved, target))
    elapsed = time.perf_counter() - start
    detail = f"random max factor {float(worst):.3f} <= {JUMP_FACTOR_C}/eps; cascade {', '.join(lb_detail)}"
    ok = record(5, not bad, detail, elapsed, 30)
    assert ok, bad[:5]


def test_c06_online_lpt_correctness():
    start = time.perf_counter()
    eps = Fraction(1, 8)
    bad, arrivals, worst = [], 0, Fraction(1)
    for spec in random_streams(500, 12, 3, eps):
        m = spec.m
        bound = Fraction(4 * m - 2, 3 * m - 1) * (1 + 2 * eps) / (1 - eps)
        session = OnlineLPTSession(m, eps)
        for job in spec.arrivals:
            session.insert(job)
            arrivals += 1
            s, inst = session.schedule, session.instance
            ctx = build_context(eps, compute_ub(inst.jobs, m))
            if not verify_big_restriction(s, inst, ctx):
                bad.append(("lpt", spec.params, job.id))
            ref = lpt_reference(s, inst, ctx)
            opt_rounded = brute_force_opt([j.rounded_size for j in inst.jobs], m)
            if ref is None or not check_relaxed(s, ref, 4, 4, eps, opt_rounded).witnessed:
                bad.append(("relaxed", spec.params, job.id))
            opt = brute_force_opt(inst.jobs, m)
            low = s.min_original_load()
            if opt > 0:
                if low == 0 or opt / low > bound:
                    bad.append(("ratio", spec.params, job.id, opt, low))
                else:
                    worst = max(worst, opt / low)
    elapsed = time.perf_counter() - start
    ok = record(6, not bad, f"{arrivals} arrivals, worst ratio {float(worst):.4f}", elapsed, 120)
    assert ok, bad[:5]


def test_c07_online_lpt_migration():
    start = time.perf_counter()
    failures, details = [], []
    for k in (2, 3):
        fam = gen_appendix_a(k)
        eps = fam.epsilon
        recompute = run_stream(fam.arrivals, fam.m, eps, "recompute-lpt", compute_opt=False)
        online = run_stream(fam.arrivals, fam.m, eps, "online-lpt", compute_opt=False)
        rf, of = recompute.rows[-1].migration_factor, online.rows[-1].migration_factor
        cap = ONLINE_LPT_FACTOR_C / eps**3 * floor_log2(1 / eps)
        details.append(f"k={k}: recompute {rf} vs m/2={Fraction(fam.m, 2)}, online {of} <= {cap}")
        if rf < Fraction(fam.m, 2):
            failures.append(f"appendix-a k={k}: recompute-LPT factor {rf} < m/2")
        if of > cap:
            failures.append(f"appendix-a k={k}: online factor {of} > {cap}")
        if online.ledgers[-1].phase_trace and not online.ledgers[-1].phase_trace.growth_ok():
            failures.append(f"appendix-a k={k}: phase growth")
    eps = Fraction(1, 8)
    cap = ONLINE_LPT_FACTOR_C / eps**3 * floor_log2(1 / eps)
    for spec in random_streams(300, 12, 3, eps, seed0=2000):
        report = run_stream(spec.arrivals, spec.m, eps, "online-lpt", compute_opt=False)
        if report.max_factor > cap:
            failures.append(f"{spec.params}: factor {report.max_factor}")
        if not all(l.phase_trace.growth_ok() for l in report.ledgers):
            failures.append(f"{spec.params}: phase growth")
    elapsed = time.perf_counter() - start
    ok = record(7, not failures, "; ".join(details + failures[:3]), elapsed, 60)
    assert ok, failures


def test_c08_seventeen_sixteen():
    start = time.perf_counter()
    fam = gen_17_16(10)
    base, smalls = fam.arrivals[:6], fam.arrivals[6:]
    pre = brute_force_opt(base, 3)
    post = brute_force_opt(fam.arrivals, 3)
    frozen = best_without_migration(fam.notes["reference"], smalls)
    small_ok = all(j.size < Fraction(1, 10) for j in smalls) and sum(j.size for j in smalls) == Fraction(22, 17)
    passed = pre == 5 and post == 6 and frozen == Fraction(96, 17) and post / frozen == Fraction(17, 16) and small_ok
    elapsed = time.perf_counter() - start
    ok = record(8, passed, f"pre {pre}, post {post}, frozen best {frozen}, ratio {post / frozen}", elapsed, 5)
    assert ok


def test_c09_swap_family():
    start = time.perf_counter()
    k = 2
    fam = gen_swap_lb(k)
    m = swap_machine_count(k)
    identity = m // 2 + 6 * sum(10 ** (k - i) for i in range(1, k + 1)) + 2 * 10 ** (k - 1) \
        + 12 * sum(10 ** (k - i - 1) for i in range(1, k)) + 1
    swap_low = fam.swap_schedule.min_load()
    recipe_low = fam.recipe_schedule.min_load()
    unique = sum(1 for v in fam.swap_schedule.loads if v == swap_low) == 1
    swap_ok = is_swap_optimal(fam.swap_schedule)
    r = recipe_low / swap_low
    passed = (
        identity == m == fam.instance.m == 198
        and fam.delta == Fraction(1, 300)
        and swap_ok
        and recipe_low == Fraction(17, 10) - Fraction(1, 300)
        and swap_low == 1 + Fraction(1, 1187)
        and unique
        and r >= Fraction(1694, 1000)
    )
    elapsed = time.perf_counter() - start
    detail = f"|M|={m}, swap-optimal={swap_ok}, OPT>={recipe_low}, swap min={swap_low}, ratio {float(r):.5f}"
    ok = record(9, passed, detail, elapsed, 30)
    assert ok


def test_c10_census():
    start = time.perf_counter()
    counts = [
        distinct_load_census(CensusMode.POWERS_OF_TWO, Fraction(1, 2), pow2(i), 1, exact_total=pow2(i)).multisets
        for i in range(4)
    ]
    expected = [merge_recurrence(i) for i in range(4)]
    geometric = distinct_load_census(CensusMode.GEOMETRIC, Fraction(1, 3), 1, Fraction(1, 3))
    arithmetic_ok = True
    for eps in (Fraction(1, 2), Fraction(1, 4)):
        for ub in (Fraction(16), Fraction(10), Fraction(7, 3), Fraction(100)):
            if census_for_context(build_context(eps, ub)).count > 2 / eps**2 + 1:
                arithmetic_ok = False
    passed = counts == expected == [1, 2, 4, 11] and geometric.all_distinct and arithmetic_ok
    elapsed = time.perf_counter() - start
    detail = f"pow2 enumeration {counts} vs recurrence {expected}; geometric distinct={geometric.all_distinct}; " \
             f"arithmetic within 2/eps^2+1={arithmetic_ok}"
    ok = record(10, passed, detail, elapsed, 30)
    assert ok, detail


def test_c11_vector_lemmas():
    start = time.perf_counter()
    bad, cases = [], 0
    shifts = [(a, b) for a in range(-1, 2) for b in range(-1, 2) if a <= b]
    for n in range(1, 6):
        vectors = [LoadProfile(v) for v in itertools.combinations_with_replacement(range(5), n)]
        for x in vectors:
            for y in vectors:
                if not profile_dominates(x, y):
                    continue
                for i in range(n):
                    for a, b in shifts:
                        if x[i] + a < 0 or y[i] + b < 0:
                            continue
                        cases += 1
                        if not profile_dominates(profile_insert_sorted(x, i, a), profile_insert_sorted(y, i, b)):
                            bad.append(("insert", x, y, i, a, b))
                    if n > 1:
                        for j in range(n):
                            if x[j] == y[i]:
                                cases += 1
                                if not profile_dominates(profile_remove_entry(x, j), profile_remove_entry(y, i)):
                                    bad.append(("remove", x, y, i, j))
    elapsed = time.perf_counter() - start
    ok = record(11, not bad, f"{cases} cases", elapsed, 10)
    assert ok, bad[:5]
