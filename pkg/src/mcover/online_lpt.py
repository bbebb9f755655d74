"""Online LPT: re-run LPT at every arrival while keeping unchanged machines unchanged.

Big and huge jobs are assigned phase by phase, one ladder size at a time.  In
each phase the machines whose assignment of larger jobs still agrees with the
previous schedule (the *equal* machines) receive exactly their old jobs of
that size, the remaining jobs of the size are list-scheduled with ties broken
towards the *unequal* machines, and the split is recomputed.  Small jobs stay
put on equal machines, the rest are list-scheduled, and a final loop moves
small jobs off machines that exceed ``l_min + 2^ell``.
"""
from __future__ import annotations

from collections import Counter, defaultdict
from fractions import Fraction
from typing import Dict, List, Optional, Set, Tuple

from .core import Instance, Job, Schedule, ScheduleError, lpt_key, ratio
from .lpt import PreferSet, is_lpt_solution, list_schedule_into, lpt_following
from .migration import MigrationLedger, PhaseRecord, PhaseTrace
from .rounding import RoundingContext, build_context, compute_ub, validate_epsilon


class IntegrityError(ScheduleError):
    """The schedule handed to an online step is not a valid previous output."""


def _phase_index(ctx: RoundingContext) -> Dict[Fraction, int]:
    return {q: h for h, q in enumerate(ctx.ladder, start=1)}


def phase_of(job: Job, ctx: RoundingContext, index: Optional[Dict[Fraction, int]] = None) -> Optional[int]:
    """0 for huge jobs, ``h`` for big jobs of ladder size ``q_h``, ``None`` for small jobs."""
    if ctx.is_small(job):
        return None
    if ctx.degenerate or job.rounded_size >= ctx.huge_threshold:
        return 0
    index = index if index is not None else _phase_index(ctx)
    return index[job.rounded_size]


def big_restriction(s: Schedule, ctx: RoundingContext) -> Schedule:
    return s.restrict(lambda j: not ctx.is_small(j))


def verify_big_restriction(s: Schedule, inst: Instance, ctx: RoundingContext) -> bool:
    """Is the big/huge part of ``s`` something LPT could have produced?"""
    restricted = big_restriction(s, ctx)
    jobs = tuple(j for j in inst.jobs if not ctx.is_small(j))
    return is_lpt_solution(restricted, Instance(jobs, inst.m))


def lpt_reference(s: Schedule, inst: Instance, ctx: RoundingContext) -> Optional[Schedule]:
    """A genuine LPT run on ``inst`` that reproduces the big/huge placement of ``s``."""
    target = {j.id: s.machine_of(j.id) for j in s}
    return lpt_following(inst, target, follow=lambda j: not ctx.is_small(j))


def online_lpt_insert(
    s: Schedule,
    inst: Instance,
    job: Job,
    epsilon,
    *,
    check_input: bool = False,
) -> Tuple[Schedule, MigrationLedger]:
    eps = validate_epsilon(epsilon)
    m = inst.m
    new_inst = inst.with_job(job)
    ub = compute_ub(new_inst.jobs, m)
    ctx = build_context(eps, ub)
    if check_input and not verify_big_restriction(s, inst, build_context(eps, compute_ub(inst.jobs, m))):
        raise IntegrityError("input schedule is not an LPT solution on its big jobs")

    index = _phase_index(ctx)
    old_by_phase: Dict[Optional[int], List[Job]] = defaultdict(list)
    for j in sorted(s, key=lpt_key):
        old_by_phase[phase_of(j, ctx, index)].append(j)
    arrival_phase = phase_of(job, ctx, index)

    out = Schedule(m)
    old_sets: List[Set[int]] = [set() for _ in range(m)]
    new_sets: List[Set[int]] = [set() for _ in range(m)]
    equal: Set[int] = set(range(m))
    trace = PhaseTrace()

    for h in range(len(ctx.ladder) + 1):
        old_h = old_by_phase.get(h, [])
        for j in old_h:
            i = s.machine_of(j.id)
            old_sets[i].add(j.id)
            if i in equal:
                out.assign(j, i)
        rest = [j for j in old_h if j.id not in out]
        if arrival_phase == h:
            rest.append(job)
        rest.sort(key=lpt_key)
        tb = PreferSet(set(range(m)) - equal)
        onto_equal = sum(1 for i in list_schedule_into(out, rest, tb) if i in equal)
        for j in old_h + ([job] if arrival_phase == h else []):
            new_sets[out.machine_of(j.id)].add(j.id)
        equal = {i for i in range(m) if old_sets[i] == new_sets[i]}
        trace.phases.append(
            PhaseRecord(h, ctx.ladder[h - 1] if h else None, frozenset(equal), frozenset(set(range(m)) - equal), onto_equal)
        )

    for j in old_by_phase.get(None, []):
        i = s.machine_of(j.id)
        if i in equal:
            out.assign(j, i)
    remaining = sorted((j for j in new_inst.jobs if j.id not in out), key=lpt_key)
    list_schedule_into(out, remaining)

    moved: Counter = Counter()
    slack = ctx.small_threshold
    while True:
        carrying = [i for i in range(m) if any(ctx.is_small(j) for j in out.jobs_on(i))]
        low = out.min_load()
        if not any(out.load(i) > low + slack for i in carrying):
            break
        top = max(carrying, key=lambda i: (out.load(i), -i))
        smallest = min(out.jobs_on(top), key=lambda j: (j.rounded_size, j.id))
        out.move(smallest.id, out.least_loaded()[0])
        moved[smallest.id] += 1

    return out, MigrationLedger.between(s, out, job, ub, moved, trace)


class OnlineLPTSession:
    """Stateful driver for Online LPT: instance, schedule and ledger history."""

    def __init__(self, m: int, epsilon, *, check_input: bool = False, initial: Optional[Schedule] = None):
        self.epsilon = validate_epsilon(epsilon)
        self.schedule = initial.copy() if initial is not None else Schedule(m)
        self.instance = Instance(tuple(self.schedule), m)
        self.check_input = check_input
        self.history: List[MigrationLedger] = []

    @property
    def m(self) -> int:
        return self.instance.m

    def context(self) -> RoundingContext:
        return build_context(self.epsilon, compute_ub(self.instance.jobs, self.m))

    def insert(self, job: Job) -> MigrationLedger:
        out, ledger = online_lpt_insert(
            self.schedule, self.instance, job, self.epsilon, check_input=self.check_input
        )
        self.schedule = out
        self.instance = self.instance.with_job(job)
        self.history.append(ledger)
        return ledger


def competitive_check(s: Schedule, inst: Instance, epsilon=None, *, budget: int = 5_000_000) -> Fraction:
    """``OPT / l_min`` on original sizes, with OPT from the exact oracle."""
    from .oracle import brute_force_opt

    opt = brute_force_opt([j.size for j in inst.jobs], inst.m, budget=budget)
    r = ratio(opt, s.min_original_load())
    if r is None:
        raise ZeroDivisionError("schedule leaves a machine empty although OPT > 0")
    return r
