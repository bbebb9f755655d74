"""Size rounding, the UB estimate, the big-job size ladder and job classes.

A size ``p`` is rounded down to ``2^e + k*eps*2^e`` where ``2^e <= p < 2^(e+1)``.
The rounded value depends on ``eps`` only, never on the current optimum, so a
job's rounded size is fixed for its whole lifetime.
"""
from __future__ import annotations

import enum
import json
from collections import Counter
from dataclasses import dataclass
from functools import cached_property, lru_cache
from fractions import Fraction
from typing import Dict, Iterable, List, NamedTuple, Optional, Tuple

from .core import Job, RationalLike, as_rational, format_rational


class CensusBudgetExceeded(RuntimeError):
    pass


def validate_epsilon(epsilon: RationalLike) -> Fraction:
    """Return ``epsilon`` as a Fraction, insisting that ``1/epsilon`` is an integer >= 2."""
    eps = as_rational(epsilon)
    if not 0 < eps < 1 or eps.numerator != 1:
        raise ValueError(f"epsilon must be a unit fraction 1/k with k >= 2, got {eps}")
    return eps


@lru_cache(maxsize=512)
def pow2(e: int) -> Fraction:
    return Fraction(1 << e) if e >= 0 else Fraction(1, 1 << -e)


def floor_log2(x: Fraction) -> int:
    """Largest integer ``e`` with ``2^e <= x`` (x > 0), computed without floats."""
    x = Fraction(x)
    a, b = x.numerator, x.denominator
    if a <= 0:
        raise ValueError("floor_log2 needs a positive argument")
    e = a.bit_length() - b.bit_length()
    fits = (b << e) <= a if e >= 0 else (a << -e) >= b
    return e if fits else e - 1


def ceil_log2(x: Fraction) -> int:
    e = floor_log2(x)
    return e if pow2(e) == x else e + 1


def round_size(p: RationalLike, epsilon: RationalLike) -> Fraction:
    """``2^e + floor((p - 2^e) / (eps 2^e)) * eps 2^e`` with ``e = floor(log2 p)``.

    Equivalently ``2^e * floor(p k / 2^e) / k`` for ``eps = 1/k``, which is
    what is evaluated here in integers.
    """
    p = as_rational(p)
    k = validate_epsilon(epsilon).denominator
    if p <= 0:
        raise ValueError(f"job sizes must be positive, got {p}")
    a, b = p.numerator, p.denominator
    e = floor_log2(p)
    if e >= 0:
        return Fraction(((a * k) // (b << e)) << e, k)
    return Fraction((a * k << -e) // b, k << -e)


class JobClass(enum.Enum):
    SMALL = "small"
    BIG = "big"
    HUGE = "huge"


@dataclass(frozen=True)
class RoundingContext:
    """Everything derived from ``(epsilon, UB)``.

    ``ell``/``u`` bound the exponent range, ``grid`` is ``eps * 2^ell`` and
    ``ladder`` lists the admissible rounded big sizes in decreasing order.  With
    ``ub == 0`` the context is degenerate: no ladder, and every job is huge.
    """

    epsilon: Fraction
    ub: Fraction
    ell: Optional[int]
    u: Optional[int]
    grid: Optional[Fraction]

    @cached_property
    def ladder(self) -> Tuple[Fraction, ...]:
        if self.ell is None:
            return ()
        inv = self.epsilon.denominator
        out: List[Fraction] = []
        for i in range(self.u, self.ell - 1, -1):
            base = pow2(i)
            step = base / inv
            out += [base + k * step for k in range(inv - 1, -1, -1)]
        return tuple(out)

    def on_ladder(self, q: Fraction) -> bool:
        """Membership in the ladder without materialising it."""
        if self.ell is None or q <= 0:
            return False
        e = floor_log2(q)
        return self.ell <= e <= self.u and ((q - pow2(e)) * self.epsilon.denominator / pow2(e)).denominator == 1

    @property
    def degenerate(self) -> bool:
        return self.ell is None

    @property
    def small_threshold(self) -> Fraction:
        """``2^ell``; zero in the degenerate context, so nothing is small."""
        return Fraction(0) if self.ell is None else pow2(self.ell)

    @property
    def huge_threshold(self) -> Fraction:
        return Fraction(0) if self.u is None else pow2(self.u + 1)

    def classify(self, rounded_size: Fraction) -> JobClass:
        return classify(rounded_size, self)

    def is_small(self, job: Job) -> bool:
        return job.rounded_size < self.small_threshold

    def to_dict(self) -> Dict[str, object]:
        return {
            "epsilon": format_rational(self.epsilon),
            "ub": format_rational(self.ub),
            "ell": self.ell,
            "u": self.u,
            "grid": None if self.grid is None else format_rational(self.grid),
            "ladder": [format_rational(q) for q in self.ladder],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def build_context(epsilon: RationalLike, ub: RationalLike) -> RoundingContext:
    eps = validate_epsilon(epsilon)
    ub = as_rational(ub)
    if ub < 0:
        raise ValueError("UB must be non-negative")
    if ub == 0:
        return RoundingContext(eps, ub, None, None, None)
    ell = ceil_log2(eps * ub)
    u = floor_log2(ub)
    if pow2(u) == ub:
        u -= 1
    return RoundingContext(eps, ub, ell, u, eps * pow2(ell))


def classify(rounded_size: Fraction, ctx: RoundingContext) -> JobClass:
    if ctx.degenerate:
        return JobClass.HUGE
    if rounded_size < ctx.small_threshold:
        return JobClass.SMALL
    if rounded_size < ctx.huge_threshold:
        return JobClass.BIG
    return JobClass.HUGE


def compute_ub(jobs: Iterable[Job], m: int) -> Fraction:
    """Twice the minimum load of an LPT schedule on the rounded sizes."""
    from .lpt import lpt_loads

    return 2 * min(lpt_loads(jobs, m))


def context_for(jobs: Iterable[Job], m: int, epsilon: RationalLike) -> RoundingContext:
    return build_context(epsilon, compute_ub(jobs, m))


def is_grid_multiple(value: Fraction, ctx: RoundingContext) -> bool:
    return ctx.grid is not None and (Fraction(value) / ctx.grid).denominator == 1


# -- census of achievable loads ------------------------------------------

class CensusMode(enum.Enum):
    ARITHMETIC = "arithmetic"
    GEOMETRIC = "geometric"
    POWERS_OF_TWO = "pow2"


class CensusResult(NamedTuple):
    count: int
    all_distinct: bool
    multisets: int


def admissible_sizes(mode: CensusMode, epsilon: RationalLike, bound: Fraction, size_floor: Fraction) -> List[Fraction]:
    """Rounded sizes in ``[size_floor, bound]`` for the given rounding family, decreasing."""
    bound, size_floor = as_rational(bound), as_rational(size_floor)
    if size_floor <= 0 or size_floor > bound:
        raise ValueError("need 0 < size_floor <= bound")
    sizes: List[Fraction] = []
    if mode is CensusMode.ARITHMETIC:
        eps = validate_epsilon(epsilon)
        for e in range(floor_log2(size_floor), floor_log2(bound) + 1):
            for k in range(int(1 / eps)):
                q = pow2(e) + k * eps * pow2(e)
                if size_floor <= q <= bound:
                    sizes.append(q)
    elif mode is CensusMode.POWERS_OF_TWO:
        sizes = [pow2(e) for e in range(ceil_log2(size_floor), floor_log2(bound) + 1)]
    else:
        base = 1 + as_rational(epsilon)
        e = 0
        while base ** e > size_floor:
            e -= 1
        while base ** e < size_floor:
            e += 1
        while base ** e <= bound:
            sizes.append(base ** e)
            e += 1
    return sorted(set(sizes), reverse=True)


def distinct_load_census(
    mode: CensusMode,
    epsilon: RationalLike,
    bound: RationalLike,
    size_floor: RationalLike,
    *,
    exact_total: Optional[RationalLike] = None,
    guard: int = 2_000_000,
) -> CensusResult:
    """Enumerate non-empty multisets of admissible sizes with total at most ``bound``.

    ``count`` is the number of distinct totals, ``all_distinct`` tells whether no
    two multisets share a total, and ``multisets`` is the number enumerated.  With
    ``exact_total`` only multisets summing to exactly that value are kept.
    """
    bound = as_rational(bound)
    target = None if exact_total is None else as_rational(exact_total)
    sizes = admissible_sizes(mode, epsilon, bound, as_rational(size_floor))
    totals: Counter = Counter()
    visited = 0

    def walk(start: int, total: Fraction, nonempty: bool) -> None:
        nonlocal visited
        visited += 1
        if visited > guard:
            raise CensusBudgetExceeded(f"more than {guard} search nodes")
        if nonempty and (target is None or total == target):
            totals[total] += 1
        for idx in range(start, len(sizes)):
            nxt = total + sizes[idx]
            if nxt <= bound and (target is None or nxt <= target):
                walk(idx, nxt, True)

    walk(0, Fraction(0), False)
    return CensusResult(len(totals), all(c == 1 for c in totals.values()), sum(totals.values()))


def census_for_context(ctx: RoundingContext, guard: int = 2_000_000) -> CensusResult:
    """Loads realisable by big/huge jobs of ``ctx`` on one machine, up to ``2*UB``."""
    if ctx.degenerate:
        return CensusResult(0, True, 0)
    return distinct_load_census(CensusMode.ARITHMETIC, ctx.epsilon, 2 * ctx.ub, ctx.small_threshold, guard=guard)


def merge_recurrence(i: int) -> int:
    """``C_0 = 1``, ``C_{i+1} = 1 + C_i (C_i + 1) / 2``: one job, or a pair of halves."""
    c = 1
    for _ in range(i):
        c = 1 + c * (c + 1) // 2
    return c
