import random
from fractions import Fraction

from hypothesis import given, settings, strategies as st

from mcover.core import Instance, Job, Schedule, ScheduleError, load_profile
from mcover.generators import gen_appendix_a
from mcover.lpt import (
    LOWEST_INDEX,
    PreferSet,
    is_lpt_solution,
    list_schedule,
    lpt_following,
    lpt_loads,
    lpt_schedule,
)
from mcover.oracle import brute_force_opt

import pytest


def inst(sizes, m):
    return Instance(tuple(Job.exact(i, s) for i, s in enumerate(sizes)), m)


def test_list_schedule_examples():
    s = list_schedule(Schedule(2), [Job.exact(0, 4)])
    assert s.machine_of(0) == 0
    base = Schedule(2, [(Job.exact(0, 5), 0), (Job.exact(1, 5), 1)])
    out = list_schedule(base, [Job.exact(2, 2)], PreferSet({1}))
    assert out.machine_of(2) == 1 and out.loads == (5, 7)
    assert 2 not in base
    base = Schedule(2, [(Job.exact(0, 3), 0), (Job.exact(1, 5), 1)])
    out = list_schedule(base, [Job.exact(2, 4), Job.exact(3, 4)], LOWEST_INDEX)
    assert out.machine_of(2) == 0 and out.machine_of(3) == 1 and out.loads == (7, 9)


def test_prefer_set_falls_back():
    assert PreferSet({5}).pick([0, 2]) == 0
    assert PreferSet({2, 3}).pick([0, 2, 3]) == 2


def test_lpt_schedule_examples():
    assert load_profile(lpt_schedule(inst((3, 3, 2, 2, 2), 2))) == (5, 7)
    assert load_profile(lpt_schedule(inst((1,), 3))) == (0, 0, 1)
    assert sorted(lpt_loads(inst((3, 3, 2, 2, 2), 2).jobs, 2)) == [5, 7]


def test_appendix_a_profiles():
    fam = gen_appendix_a(2)
    before = lpt_schedule(Instance(fam.arrivals[:-1], fam.m))
    after = lpt_schedule(Instance(fam.arrivals, fam.m))
    assert load_profile(before) == (1, 1, 1, Fraction(5, 4), Fraction(5, 4))
    assert load_profile(after) == (Fraction(13, 12),) * 2 + (Fraction(4, 3),) * 3


def test_is_lpt_solution_examples():
    i = inst((3, 3, 2, 2, 2), 2)
    s = lpt_schedule(i)
    assert is_lpt_solution(s, i)
    both = Schedule(2, [(i.jobs[0], 0), (i.jobs[1], 0), (i.jobs[2], 1), (i.jobs[3], 1), (i.jobs[4], 1)])
    assert not is_lpt_solution(both, i)
    swapped = s.copy()
    a, b = swapped.machine_of(2), swapped.machine_of(3)
    swapped.move(2, b)
    swapped.move(3, a)
    assert is_lpt_solution(swapped, i)
    assert is_lpt_solution(Schedule(2), Instance((), 2))


def test_is_lpt_solution_rejects_mismatch():
    i = inst((3, 2), 2)
    with pytest.raises(ScheduleError):
        is_lpt_solution(Schedule(3), i)
    with pytest.raises(ScheduleError):
        is_lpt_solution(Schedule(2, [(i.jobs[0], 0)]), i)


def test_huge_jobs_sharing_machine_not_lpt():
    i = inst((20, 20, 1), 3)
    s = Schedule(3, [(i.jobs[0], 0), (i.jobs[1], 0), (i.jobs[2], 1)])
    assert not is_lpt_solution(s, i)


def test_integer_quotient_allows_either_count():
    # loads (0, 2) then two jobs of size 2: lam = 2, machine 0 may take 1 or 2
    i = inst((2, 2, 2), 2)
    s = Schedule(2, [(i.jobs[0], 1), (i.jobs[1], 0), (i.jobs[2], 0)])
    assert is_lpt_solution(s, i)


def all_tie_breaks(instance):
    """Every schedule LPT can produce, by exploring each tie."""
    out = []

    def rec(s, rest):
        if not rest:
            out.append(s)
            return
        for i in s.least_loaded():
            nxt = s.copy()
            nxt.assign(rest[0], i)
            rec(nxt, rest[1:])

    rec(Schedule(instance.m), sorted(instance.jobs, key=lambda j: (-j.rounded_size, j.id)))
    return out


def shape(s):
    # equal-size jobs are interchangeable in LPT's sorted order
    return tuple(tuple(sorted(j.rounded_size for j in s.jobs_on(i))) for i in range(s.m))


def test_certifier_matches_enumeration():
    import itertools

    rng = random.Random(5)
    for _ in range(60):
        m = rng.randint(1, 3)
        i = inst([rng.choice((1, 2, 3)) for _ in range(rng.randint(1, 6))], m)
        lpt_outputs = {shape(s) for s in all_tie_breaks(i)}
        for combo in itertools.product(range(m), repeat=len(i)):
            s = Schedule(m, zip(i.jobs, combo))
            assert is_lpt_solution(s, i) == (shape(s) in lpt_outputs)


def test_lpt_following_reproduces_target():
    i = inst((3, 3, 2, 2, 2, 1), 2)
    s = lpt_schedule(i, PreferSet({1}))
    guided = lpt_following(i, s.assignment)
    assert guided == s
    bad = {0: 0, 1: 0, 2: 1, 3: 1, 4: 1, 5: 1}
    assert lpt_following(i, bad) is None


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(1, 12), min_size=1, max_size=9), st.integers(1, 3))
def test_lpt_guarantee(sizes, m):
    i = inst(sizes, m)
    low = lpt_schedule(i).min_load()
    assert low >= Fraction(3 * m - 1, 4 * m - 2) * brute_force_opt(i.jobs, m)
