"""Exact optimum at desk scale, frozen-schedule placement, and stream replay."""
from __future__ import annotations

import enum
import json
import csv
import io
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import linear_sum_assignment

from .core import Instance, Job, Schedule, format_rational, integer_scale, load_profile, profile_dominates, ratio
from .jump import JumpSession, TargetRule, lowest_least_loaded
from .lpt import lpt_schedule
from .migration import MigrationLedger
from .online_lpt import OnlineLPTSession, verify_big_restriction
from .rounding import build_context, compute_ub, validate_epsilon


class BudgetExceeded(RuntimeError):
    pass


def _sizes(items: Iterable[Union[Job, Fraction, int]]) -> List[Fraction]:
    return [it.size if isinstance(it, Job) else Fraction(it) for it in items]


def _water_level(loads: Sequence[int], mass: int) -> int:
    """Floor of the level reached by pouring ``mass`` fractionally onto ``loads``."""
    ordered = sorted(loads)
    acc = 0
    for k in range(1, len(ordered) + 1):
        acc += ordered[k - 1]
        level = (mass + acc) // k
        if k == len(ordered) or level <= ordered[k]:
            return level
    raise AssertionError("unreachable")


def _max_min_int(sizes: List[int], loads: List[int], budget: int) -> int:
    m = len(loads)
    sizes = sorted(sizes, reverse=True)
    n = len(sizes)
    if m == 1:
        return loads[0] + sum(sizes)
    suffix = [0] * (n + 1)
    for t in range(n - 1, -1, -1):
        suffix[t] = suffix[t + 1] + sizes[t]
    cap = _water_level(loads, suffix[0])

    greedy = list(loads)
    for p in sizes:
        greedy[greedy.index(min(greedy))] += p
    best = min(greedy)
    nodes = 0

    def rec(t: int) -> None:
        nonlocal best, nodes
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded(f"more than {budget} search nodes")
        if t == n:
            best = max(best, min(loads))
            return
        if _water_level(loads, suffix[t]) <= best:
            return
        p = sizes[t]
        tried = set()
        for i in sorted(range(m), key=loads.__getitem__):
            if loads[i] in tried:
                continue
            tried.add(loads[i])
            loads[i] += p
            rec(t + 1)
            loads[i] -= p
            if best >= cap:
                return

    if best < cap:
        loads = list(loads)
        rec(0)
    return best


def brute_force_opt(
    jobs: Iterable[Union[Job, Fraction, int]],
    m: int,
    *,
    initial_loads: Optional[Sequence[Fraction]] = None,
    budget: int = 5_000_000,
) -> Fraction:
    """Maximum over all assignments of the minimum machine load, on original sizes.

    Depth-first branch and bound: jobs in decreasing size, machines with equal
    load tried once, and a fractional water-filling bound for pruning.
    """
    sizes = _sizes(jobs)
    base = [Fraction(v) for v in (initial_loads or [0] * m)]
    if len(base) != m:
        raise ValueError("initial_loads must have one entry per machine")
    if initial_loads is None and len(sizes) < m:
        return Fraction(0)
    scale = integer_scale(sizes + base)
    best = _max_min_int([int(p * scale) for p in sizes], [int(v * scale) for v in base], budget)
    return Fraction(best, scale)


def dp_opt(jobs: Iterable[Union[Job, Fraction, int]], m: int, *, budget: int = 2_000_000) -> Fraction:
    """Independent oracle: forward DP over sorted load vectors, loads capped at ``total/m``."""
    sizes = _sizes(jobs)
    if not sizes:
        return Fraction(0)
    scale = integer_scale(sizes)
    ints = [int(p * scale) for p in sizes]
    cap = sum(ints) // m
    states = {tuple([0] * m)}
    for p in ints:
        nxt = set()
        for st in states:
            for i in range(m):
                if i and st[i] == st[i - 1]:
                    continue
                row = list(st)
                row[i] = min(row[i] + p, cap)
                nxt.add(tuple(sorted(row)))
        states = nxt
        if len(states) > budget:
            raise BudgetExceeded(f"more than {budget} DP states")
    return Fraction(max(st[0] for st in states), scale)


def best_without_migration(s: Schedule, new_jobs: Iterable[Union[Job, Fraction, int]], *, budget: int = 5_000_000) -> Fraction:
    """Best minimum load when the jobs of ``s`` stay frozen and only ``new_jobs`` are placed."""
    sizes = _sizes(new_jobs)
    loads = list(s.original_loads())
    if len(set(sizes)) <= 1:
        # identical items: always topping up a least loaded machine is optimal
        for p in sizes:
            i = loads.index(min(loads))
            loads[i] += p
        return min(loads)
    return brute_force_opt(sizes, s.m, initial_loads=loads, budget=budget)


# -- migration under relabelling ------------------------------------------------

def relabel_migration(before: Schedule, after: Schedule) -> Tuple[Fraction, Fraction]:
    """Least migrated volume (rounded, original) over machine relabellings and swaps of equal jobs."""
    content_b = [Counter((j.size, j.rounded_size) for j in before.jobs_on(i)) for i in range(before.m)]
    content_a = [Counter((j.size, j.rounded_size) for j in after.jobs_on(i)) for i in range(after.m)]
    scale = integer_scale(j.size for j in before) if len(before) else 1
    m = before.m
    weight = np.zeros((m, m), dtype=np.int64)
    for i in range(m):
        for k in range(m):
            common = content_b[i] & content_a[k]
            weight[i, k] = int(sum(size * c for (size, _), c in common.items()) * scale)
    rows, cols = linear_sum_assignment(weight, maximize=True)
    kept_o = kept_r = Fraction(0)
    for i, k in zip(rows, cols):
        for (size, rsize), c in (content_b[i] & content_a[k]).items():
            kept_o += size * c
            kept_r += rsize * c
    total_o = sum((j.size for j in before), Fraction(0))
    total_r = sum((j.rounded_size for j in before), Fraction(0))
    return total_r - kept_r, total_o - kept_o


# -- stream replay -----------------------------------------------------------

class Algorithm(enum.Enum):
    JUMP = "jump"
    ONLINE_LPT = "online-lpt"
    RECOMPUTE_LPT = "recompute-lpt"


REPORT_COLUMNS = [
    "arrival_id",
    "arrival_size",
    "migrated_volume_rounded",
    "migrated_volume_original",
    "migration_factor",
    "min_load",
    "min_load_original",
    "opt_original",
    "ratio",
    "ub",
    "m_unequal",
    "placed_on_equal",
]


@dataclass
class StreamRow:
    arrival_id: int
    arrival_size: Fraction
    migrated_volume_rounded: Fraction
    migrated_volume_original: Fraction
    migration_factor: Fraction
    min_load: Fraction
    min_load_original: Fraction
    ub: Fraction
    opt_original: Optional[Fraction] = None
    ratio: Optional[Fraction] = None
    m_unequal: Optional[int] = None
    placed_on_equal: Optional[int] = None

    def as_strings(self) -> Dict[str, str]:
        out = {}
        for name in REPORT_COLUMNS:
            v = getattr(self, name)
            if v is None:
                out[name] = ""
            elif isinstance(v, Fraction):
                out[name] = format_rational(v)
            else:
                out[name] = str(v)
        return out


@dataclass
class StreamReport:
    algorithm: Algorithm
    m: int
    epsilon: Fraction
    rows: List[StreamRow] = field(default_factory=list)
    ledgers: List[MigrationLedger] = field(default_factory=list)
    violations: List[str] = field(default_factory=list)
    final_schedule: Optional[Schedule] = None

    @property
    def max_ratio(self) -> Optional[Fraction]:
        vals = [r.ratio for r in self.rows if r.ratio is not None]
        return max(vals) if vals else None

    @property
    def max_factor(self) -> Fraction:
        return max((r.migration_factor for r in self.rows), default=Fraction(0))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=REPORT_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in self.rows:
            writer.writerow(row.as_strings())
        return buf.getvalue()

    def to_json(self) -> str:
        def fmt(v):
            return None if v is None else format_rational(v)

        doc = {
            "algorithm": self.algorithm.value,
            "m": self.m,
            "epsilon": format_rational(self.epsilon),
            "rows": [{k: (v if v != "" else None) for k, v in r.as_strings().items()} for r in self.rows],
            "max_ratio": fmt(self.max_ratio),
            "max_factor": fmt(self.max_factor),
            "violations": list(self.violations),
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _jump_violations(before: Schedule, ledger: MigrationLedger) -> List[str]:
    out = []
    arrival = ledger.arrival
    for job_id in ledger.moves:
        if before.job(job_id).rounded_size >= arrival.rounded_size:
            out.append(f"arrival {arrival.id}: job {job_id} migrated although not smaller than the arrival")
    for job_id, times in ledger.removals.items():
        if times > 1:
            out.append(f"arrival {arrival.id}: job {job_id} migrated {times} times")
    return out


def _online_lpt_violations(before: Schedule, after: Schedule, inst: Instance, ledger: MigrationLedger, epsilon) -> List[str]:
    out = []
    arrival = ledger.arrival
    ctx = build_context(epsilon, ledger.ub)
    if not verify_big_restriction(after, inst, ctx):
        out.append(f"arrival {arrival.id}: big jobs do not form an LPT solution")
    if ledger.phase_trace is not None and not ledger.phase_trace.growth_ok():
        out.append(f"arrival {arrival.id}: unequal machines grew faster than placements")
    for job_id in ledger.moves:
        job = before.job(job_id)
        if not ctx.is_small(job) and job.rounded_size >= ctx.huge_threshold:
            out.append(f"arrival {arrival.id}: huge job {job_id} migrated")
        if ctx.is_small(arrival) and not ctx.is_small(job):
            out.append(f"arrival {arrival.id}: big job {job_id} migrated on a small arrival")
    for job_id, times in ledger.removals.items():
        if times > 1:
            out.append(f"arrival {arrival.id}: job {job_id} rebalanced {times} times")
    ceiling = after.min_load() + ctx.small_threshold
    for i in range(after.m):
        if any(ctx.is_small(j) for j in after.jobs_on(i)) and after.load(i) > ceiling:
            out.append(f"arrival {arrival.id}: machine {i} carries small jobs above l_min + 2^ell")
    return out


def run_stream(
    arrivals: Sequence[Job],
    m: int,
    epsilon,
    algorithm: Union[Algorithm, str],
    *,
    initial: Optional[Schedule] = None,
    compute_opt: bool = True,
    opt_limit: int = 16,
    budget: int = 5_000_000,
    target_rule: TargetRule = lowest_least_loaded,
    ub_override: Optional[Fraction] = None,
    verify: bool = False,
) -> StreamReport:
    """Feed ``arrivals`` one at a time and measure ratio and migration after each.

    ``RECOMPUTE_LPT`` rebuilds LPT from scratch every time and charges the
    smallest migration over machine relabellings.
    """
    eps = validate_epsilon(epsilon)
    algorithm = Algorithm(algorithm)
    report = StreamReport(algorithm, m, eps)
    schedule = initial.copy() if initial is not None else Schedule(m)
    inst = Instance(tuple(schedule), m)
    jump = lpt_session = None
    if algorithm is Algorithm.JUMP:
        jump = JumpSession(m, eps, target_rule=target_rule, initial=schedule)
    elif algorithm is Algorithm.ONLINE_LPT:
        lpt_session = OnlineLPTSession(m, eps, initial=schedule)

    for job in arrivals:
        before = schedule
        new_inst = inst.with_job(job)
        if jump is not None:
            ledger = jump.insert(job, ub=ub_override)
            schedule = jump.schedule
        elif lpt_session is not None:
            ledger = lpt_session.insert(job)
            schedule = lpt_session.schedule
        else:
            schedule = lpt_schedule(new_inst)
            vol_r, vol_o = relabel_migration(before, schedule)
            ledger = MigrationLedger(
                job, {}, vol_r, vol_o, compute_ub(new_inst.jobs, m), schedule.min_load(), schedule.min_original_load()
            )
        report.ledgers.append(ledger)
        row = StreamRow(
            job.id,
            job.size,
            ledger.volume_rounded,
            ledger.volume_original,
            ledger.factor,
            schedule.min_load(),
            schedule.min_original_load(),
            ledger.ub,
        )
        if ledger.phase_trace is not None:
            row.m_unequal = ledger.phase_trace.final_unequal
            row.placed_on_equal = ledger.phase_trace.total_placed_on_equal
        if compute_opt and len(new_inst) <= opt_limit:
            try:
                row.opt_original = brute_force_opt(new_inst.jobs, m, budget=budget)
                row.ratio = ratio(row.opt_original, row.min_load_original)
            except BudgetExceeded:
                pass
        report.rows.append(row)

        if verify:
            schedule.audit()
            if algorithm is Algorithm.JUMP:
                report.violations += _jump_violations(before, ledger)
            elif algorithm is Algorithm.ONLINE_LPT:
                report.violations += _online_lpt_violations(before, schedule, new_inst, ledger, eps)
            elif len(before) and not profile_dominates(load_profile(before), load_profile(schedule)):
                report.violations.append(f"arrival {job.id}: LPT load profile decreased")
            if row.opt_original is not None and row.min_load_original > row.opt_original:
                report.violations.append(f"arrival {job.id}: minimum load exceeds the optimum")
        inst = new_inst

    report.final_schedule = schedule
    return report
