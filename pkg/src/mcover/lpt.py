"""Offline LPT, list scheduling with pluggable tie-breaking, and an LPT-solution certifier."""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from itertools import groupby
from math import ceil
from typing import Callable, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from .core import Instance, Job, Schedule, ScheduleError, lpt_key


class TieBreak:
    """Chooses one machine among several least loaded candidates (given in index order)."""

    def pick(self, candidates: Sequence[int]) -> int:
        raise NotImplementedError


@dataclass(frozen=True)
class LowestIndex(TieBreak):
    def pick(self, candidates: Sequence[int]) -> int:
        return candidates[0]


@dataclass(frozen=True)
class PreferSet(TieBreak):
    """Prefer candidates in ``machines``; lowest index inside either group."""

    machines: FrozenSet[int]

    def __init__(self, machines: Iterable[int]) -> None:
        object.__setattr__(self, "machines", frozenset(machines))

    def pick(self, candidates: Sequence[int]) -> int:
        for c in candidates:
            if c in self.machines:
                return c
        return candidates[0]


LOWEST_INDEX = LowestIndex()


def lpt_order(jobs: Iterable[Job]) -> List[Job]:
    return sorted(jobs, key=lpt_key)


def list_schedule_into(s: Schedule, jobs: Iterable[Job], tb: TieBreak = LOWEST_INDEX) -> List[int]:
    """Place ``jobs`` in the given order on ``s`` itself; returns the chosen machines."""
    chosen = []
    for job in jobs:
        if job.id in s:
            raise ScheduleError(f"job {job.id} is already assigned")
        machine = tb.pick(s.least_loaded())
        s.assign(job, machine)
        chosen.append(machine)
    return chosen


def list_schedule(s: Schedule, jobs: Iterable[Job], tb: TieBreak = LOWEST_INDEX) -> Schedule:
    """Copy of ``s`` with ``jobs`` list-scheduled in the given order."""
    out = s.copy()
    list_schedule_into(out, jobs, tb)
    return out


def lpt_schedule(inst: Instance, tb: TieBreak = LOWEST_INDEX) -> Schedule:
    s = Schedule(inst.m)
    list_schedule_into(s, lpt_order(inst.jobs), tb)
    return s


def lpt_loads(jobs: Iterable[Job], m: int) -> Tuple[Fraction, ...]:
    """Machine loads of LPT (rounded sizes), as an unordered tuple; tie-breaking is irrelevant."""
    heap = [(Fraction(0), i) for i in range(m)]
    for job in lpt_order(jobs):
        load, i = heapq.heappop(heap)
        heapq.heappush(heap, (load + job.rounded_size, i))
    return tuple(load for load, _ in heap)


def _list_fill_min(loads: Sequence[Fraction], size: Fraction, count: int) -> Fraction:
    heap = list(loads)
    heapq.heapify(heap)
    for _ in range(count):
        heapq.heapreplace(heap, heap[0] + size)
    return heap[0]


def is_lpt_solution(s: Schedule, inst: Instance) -> bool:
    """Whether some tie-breaking rule makes LPT produce exactly ``s``.

    Size classes are processed in decreasing order.  For each class the
    tie-independent level ``lam`` reached by list scheduling the class is
    recomputed from scratch, and every machine's share of the class must be
    ``ceil((lam - load)+ / p)``, or one of ``x``, ``x + 1`` when that quotient
    ``x`` is an integer and the machine starts at or below ``lam``.
    """
    if s.m != inst.m:
        raise ScheduleError("machine counts differ")
    ids = {j.id for j in inst.jobs}
    if set(s.assignment) != ids:
        raise ScheduleError("schedule and instance hold different jobs")

    loads = [Fraction(0)] * s.m
    for size, group in groupby(lpt_order(inst.jobs), key=lambda j: j.rounded_size):
        group = list(group)
        lam = _list_fill_min(loads, size, len(group))
        counts = [0] * s.m
        for job in group:
            counts[s.machine_of(job.id)] += 1
        for i in range(s.m):
            if loads[i] > lam:
                # already above the level the class fills up to: never least loaded
                if counts[i]:
                    return False
                continue
            x = (lam - loads[i]) / size
            if x.denominator != 1:
                if counts[i] != ceil(x):
                    return False
            elif counts[i] not in (x.numerator, x.numerator + 1):
                return False
            loads[i] += counts[i] * size
    return True


def lpt_following(
    inst: Instance,
    target: Mapping[int, int],
    follow: Optional[Callable[[Job], bool]] = None,
    tb: TieBreak = LOWEST_INDEX,
) -> Optional[Schedule]:
    """Run LPT while steering followed jobs onto the machines named in ``target``.

    Within a size class, the next job placed is the lowest-id followed job whose
    target is currently least loaded; jobs that are not followed use ``tb``.
    Returns ``None`` when no valid LPT order reaches the targets.
    """
    follow = follow or (lambda job: True)
    s = Schedule(inst.m)
    for _, group in groupby(lpt_order(inst.jobs), key=lambda j: j.rounded_size):
        pending = list(group)
        while pending:
            least = s.least_loaded()
            least_set = set(least)
            for idx, job in enumerate(pending):
                if not follow(job):
                    s.assign(job, tb.pick(least))
                    break
                if target[job.id] in least_set:
                    s.assign(job, target[job.id])
                    break
            else:
                return None
            del pending[idx]
    return s
