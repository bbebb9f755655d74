"""Jump/swap local optimality, Push, and online maintenance of jump-optimality."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

from .core import Instance, Job, Schedule, ScheduleError, integer_scale, lpt_key
from .lpt import list_schedule_into
from .migration import MigrationLedger
from .rounding import RoundingContext, build_context, compute_ub, validate_epsilon

TargetRule = Callable[[Schedule, Sequence[int], Job], int]


def is_jump_optimal(s: Schedule) -> bool:
    """No machine keeps more than ``l_min`` after losing any one of its jobs."""
    low = s.min_load()
    for i in range(s.m):
        jobs = s.jobs_on(i)
        if jobs and s.load(i) - min(j.rounded_size for j in jobs) > low:
            return False
    return True


def is_lex_jump_optimal(s: Schedule) -> bool:
    """No single job move makes the sorted load vector lexicographically larger.

    Enumerates every move explicitly; this is the definition, not the
    closed-form characterisation used by :func:`is_jump_optimal`.
    """
    loads = list(s.loads)
    current = sorted(loads)
    for job in s:
        src = s.machine_of(job.id)
        for dst in range(s.m):
            if dst == src:
                continue
            trial = list(loads)
            trial[src] -= job.rounded_size
            trial[dst] += job.rounded_size
            if sorted(trial) > current:
                return False
    return True


def is_swap_optimal(s: Schedule) -> bool:
    """No single move and no two-job exchange improves ``(l_min, #non-least-loaded)``.

    Jobs are grouped by (machine, rounded size) since equal jobs on one machine
    give identical neighbours; arithmetic runs on integers after scaling.
    """
    m = s.m
    if m == 1:
        return True
    scale = integer_scale(j.rounded_size for j in s) if len(s) else 1
    loads = [int(v * scale) for v in s.loads]
    values = sorted(Counter(loads).items())
    base = (values[0][0], m - values[0][1])

    def weight(a: int, na: int, b: int, nb: int) -> Tuple[int, int]:
        gone = Counter((loads[a], loads[b]))
        other = None
        for v, c in values:
            if c - gone[v] > 0:
                other = (v, c - gone[v])
                break
        low = min(na, nb) if other is None else min(other[0], na, nb)
        cnt = (other[1] if other is not None and other[0] == low else 0) + (na == low) + (nb == low)
        return (low, m - cnt)

    groups = sorted({(s.machine_of(j.id), int(j.rounded_size * scale)) for j in s})
    for a, p in groups:
        for b in range(m):
            if b != a and weight(a, loads[a] - p, b, loads[b] + p) > base:
                return False
    for x, (a, p) in enumerate(groups):
        for b, q in groups[x + 1:]:
            if a == b or p == q:
                continue
            if weight(a, loads[a] - p + q, b, loads[b] - q + p) > base:
                return False
    return True


# -- Push ----------------------------------------------------------------

@dataclass
class PushResult:
    expelled: List[Job]
    schedule: Schedule


def push_into(s: Schedule, target: int, job: Job) -> List[Job]:
    """Push ``job`` onto ``target`` of ``s`` in place and return the expelled jobs.

    The original occupants are scanned largest first (ties by id); an occupant
    leaves when the target minus its size still exceeds the current minimum
    load.  Passes repeat until one expels nothing.
    """
    occupants = sorted(s.jobs_on(target), key=lpt_key)
    s.assign(job, target)
    expelled: List[Job] = []
    changed = True
    while changed:
        changed = False
        for k in occupants:
            if k.id in s and s.load(target) - k.rounded_size > s.min_load():
                s.remove(k.id)
                expelled.append(k)
                changed = True
    return expelled


def push(s: Schedule, target: int, job: Job) -> PushResult:
    if job.id in s:
        raise ScheduleError(f"job {job.id} is already assigned")
    out = s.copy()
    return PushResult(push_into(out, target, job), out)


def lowest_least_loaded(s: Schedule, candidates: Sequence[int], job: Job) -> int:
    return candidates[0]


def largest_smaller_job(s: Schedule, candidates: Sequence[int], job: Job) -> int:
    """Adversarial target: the least loaded machine holding the largest job smaller than ``job``."""
    best, best_size = candidates[0], None
    for i in candidates:
        sizes = [k.rounded_size for k in s.jobs_on(i) if k.rounded_size < job.rounded_size]
        if sizes and (best_size is None or max(sizes) > best_size):
            best, best_size = i, max(sizes)
    return best


# -- online jump-optimality ------------------------------------------------

def online_jump_insert(
    s: Schedule,
    inst: Instance,
    job: Job,
    epsilon,
    *,
    target_rule: TargetRule = lowest_least_loaded,
    ub: Optional[Fraction] = None,
) -> Tuple[Schedule, MigrationLedger]:
    """Insert ``job`` keeping a relaxed jump-optimal schedule; ``s`` is left untouched.

    ``ub`` overrides the LPT-based upper bound (used by constructions that fix
    the optimum in advance).
    """
    eps = validate_epsilon(epsilon)
    new_inst = inst.with_job(job)
    if ub is None:
        ub = compute_ub(new_inst.jobs, inst.m)
    ctx = build_context(eps, ub)
    out = s.copy()
    removals: Counter = Counter()

    if ctx.is_small(job):
        out.assign(job, out.least_loaded()[0])
    else:
        big = out.restrict(lambda k: not ctx.is_small(k))
        slack = ctx.small_threshold
        queue_big = [job]
        queue_small: List[Job] = []
        while queue_big:
            queue_big.sort(key=lpt_key)
            j = queue_big.pop(0)
            target = target_rule(big, big.least_loaded(), j)
            expelled = push_into(big, target, j)
            out.assign(j, target)
            for k in expelled:
                out.remove(k.id)
                removals[k.id] += 1
            while out.load(target) > out.min_load() + slack:
                on_target = out.jobs_on(target)
                if not any(ctx.is_small(k) for k in on_target):
                    break
                smallest = min(on_target, key=lambda k: (k.rounded_size, k.id))
                out.remove(smallest.id)
                removals[smallest.id] += 1
                queue_small.append(smallest)
            queue_big.extend(expelled)
        list_schedule_into(out, sorted(queue_small, key=lpt_key))

    return out, MigrationLedger.between(s, out, job, ub, removals)


class JumpSession:
    """Stateful driver: one instance, one schedule, and the ledger history."""

    def __init__(self, m: int, epsilon, *, target_rule: TargetRule = lowest_least_loaded, initial: Optional[Schedule] = None):
        self.epsilon = validate_epsilon(epsilon)
        self.schedule = initial.copy() if initial is not None else Schedule(m)
        self.instance = Instance(tuple(self.schedule), m)
        self.target_rule = target_rule
        self.history: List[MigrationLedger] = []

    @property
    def m(self) -> int:
        return self.instance.m

    def context(self) -> RoundingContext:
        return build_context(self.epsilon, compute_ub(self.instance.jobs, self.m))

    def insert(self, job: Job, ub: Optional[Fraction] = None) -> MigrationLedger:
        out, ledger = online_jump_insert(
            self.schedule, self.instance, job, self.epsilon, target_rule=self.target_rule, ub=ub
        )
        self.schedule = out
        self.instance = self.instance.with_job(job)
        self.history.append(ledger)
        return ledger


# -- relaxed versions --------------------------------------------------------

@dataclass(frozen=True)
class RelaxedCertificate:
    k1: Fraction
    k2: Fraction
    witnessed: bool
    same_large_assignment: bool
    small_machines_flat: bool


def check_relaxed(s: Schedule, reference: Schedule, k1, k2, epsilon, opt) -> RelaxedCertificate:
    """Is ``s`` a ``(k1, k2)``-relaxed version of ``reference`` (rounded sizes)?

    Jobs of size at least ``k1*eps*opt`` must sit where ``reference`` puts them,
    and any machine carrying a smaller job may exceed the minimum load by at
    most ``k2*eps*opt``.
    """
    k1, k2, eps, opt = Fraction(k1), Fraction(k2), Fraction(epsilon), Fraction(opt)
    if s.m != reference.m or set(s.assignment) != set(reference.assignment):
        raise ScheduleError("schedules cover different instances")
    cut = k1 * eps * opt
    same = all(s.machine_of(j.id) == reference.machine_of(j.id) for j in s if j.rounded_size >= cut)
    ceiling = s.min_load() + k2 * eps * opt
    flat = all(
        s.load(i) <= ceiling for i in range(s.m) if any(j.rounded_size < cut for j in s.jobs_on(i))
    )
    return RelaxedCertificate(k1, k2, same and flat, same, flat)


def jump_optimal_completion(s: Schedule, max_steps: int = 100_000) -> Schedule:
    """Repair jump-optimality by pulling out violating jobs and re-inserting them with Push.

    Only jobs that break the characterisation are moved, so a schedule whose big
    jobs are already in place keeps them.
    """
    out = s.copy()
    pending: List[Job] = []
    for _ in range(max_steps):
        if not pending:
            low = out.min_load()
            violator = None
            for i in sorted(range(out.m), key=lambda i: (-out.load(i), i)):
                jobs = out.jobs_on(i)
                if jobs:
                    k = min(jobs, key=lambda k: (k.rounded_size, k.id))
                    if out.load(i) - k.rounded_size > low:
                        violator = k
                        break
            if violator is None:
                return out
            out.remove(violator.id)
            pending.append(violator)
        pending.sort(key=lpt_key)
        j = pending.pop(0)
        pending.extend(push_into(out, out.least_loaded()[0], j))
    raise RuntimeError("jump-optimal completion did not converge")
