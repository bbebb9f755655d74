"""Instance families: lower-bound constructions and seeded random streams."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor
from typing import Dict, List, NamedTuple, Optional, Tuple

from .core import Instance, Job, RationalLike, Schedule, as_rational
from .jump import TargetRule, largest_smaller_job, lowest_least_loaded
from .rounding import pow2, validate_epsilon

TARGET_RULES: Dict[str, TargetRule] = {
    "lowest": lowest_least_loaded,
    "largest-smaller": largest_smaller_job,
}


class ParameterError(ValueError):
    """A family was asked for parameters outside its construction's range."""


@dataclass
class StreamSpec:
    """A generated stream: optional starting schedule, then arrivals in order.

    ``epsilon`` is the rounding accuracy the family is meant to be run with;
    ``ub`` pins the upper bound when the construction fixes the optimum.
    """

    family: str
    params: Dict[str, object]
    m: int
    epsilon: Fraction
    arrivals: Tuple[Job, ...]
    initial: Optional[Schedule] = None
    ub: Optional[Fraction] = None
    target_rule: str = "lowest"
    notes: Dict[str, object] = field(default_factory=dict)

    @property
    def base_jobs(self) -> Tuple[Job, ...]:
        return tuple(self.initial) if self.initial is not None else ()

    def instance(self) -> Instance:
        return Instance(self.base_jobs + self.arrivals, self.m)

    def rule(self) -> TargetRule:
        return TARGET_RULES[self.target_rule]


def _job(id: int, size: RationalLike, eps: Fraction) -> Job:
    return Job.create(id, size, eps)


def _unit_at_most(eps: Fraction) -> Fraction:
    return Fraction(1, ceil(1 / eps))


def gen_appendix_a(k: int, epsilon: Optional[RationalLike] = None) -> StreamSpec:
    """4k+1 jobs on 2k+1 machines whose recomputed LPT moves a job off every machine.

    The base jobs arrive first (in LPT order); the last arrival is ``1/2 + k*eps``.
    """
    if not isinstance(k, int) or k < 2:
        raise ParameterError("appendix-a needs an integer k >= 2")
    eps = Fraction(1, 6 * k) if epsilon is None else as_rational(epsilon)
    if not 0 < eps <= Fraction(1, 6 * k):
        raise ParameterError(f"appendix-a needs 0 < eps <= 1/{6 * k}")
    rnd = _unit_at_most(eps)
    half = Fraction(1, 2)
    sizes: List[Fraction] = [Fraction(1)] * (k + 1)
    for i in range(k):
        sizes += [half + i * eps, half - (i + 1) * eps]
    sizes += [half - k * eps] * k
    sizes.sort(reverse=True)
    arrivals = [_job(n, p, rnd) for n, p in enumerate(sizes)]
    arrivals.append(_job(len(sizes), half + k * eps, rnd))
    return StreamSpec("appendix-a", {"k": k, "eps": eps}, 2 * k + 1, rnd, tuple(arrivals))


def jump_lb_sizes(ell: int, u: int, epsilon: Fraction) -> List[Fraction]:
    """Ladder sizes below ``2^u``: ``2^k + j*eps*2^k`` for ``ell <= k < u``, ``0 <= j < 1/eps``."""
    inv = int(1 / epsilon)
    return sorted(
        (pow2(k) + j * epsilon * pow2(k) for k in range(ell, u) for j in range(inv)), reverse=True
    )


def gen_jump_mig_lb(ell: int, u: int, epsilon: RationalLike) -> StreamSpec:
    """Jump-optimal schedule with every machine at ``2^{u+1}``; the arrival ``2^u`` cascades.

    Each machine is built around one ladder size ``t = 2^k + j eps 2^k < 2^u``
    and completed by ``2^k + (1/eps - j) eps 2^k``, ``2^k`` and ``2^{k'}`` for
    ``k' = k+2..u``.  The stream ships the adversarial Push target rule.
    """
    eps = validate_epsilon(epsilon)
    if eps * pow2(u + 1) != pow2(ell):
        raise ParameterError("jump-lb needs eps * 2^(u+1) == 2^ell")
    if u <= ell:
        raise ParameterError("jump-lb needs u > ell")
    inv = int(1 / eps)
    placements: List[Tuple[Fraction, int]] = []
    machine = 0
    for k in range(u - 1, ell - 1, -1):
        for j in range(inv - 1, -1, -1):
            unit = pow2(k)
            parts = [unit + j * eps * unit, unit + (inv - j) * eps * unit, unit]
            parts += [pow2(kk) for kk in range(k + 2, u + 1)]
            placements += [(p, machine) for p in parts]
            machine += 1
    s = Schedule(machine, ((_job(n, p, eps), i) for n, (p, i) in enumerate(placements)))
    arrival = _job(len(placements), pow2(u), eps)
    return StreamSpec(
        "jump-lb",
        {"ell": ell, "u": u, "eps": eps},
        machine,
        eps,
        (arrival,),
        initial=s,
        ub=pow2(u + 1),
        target_rule="largest-smaller",
    )


def jump_lb_bound(ell: int, u: int, epsilon: RationalLike) -> Fraction:
    """Closed-form lower bound on the volume the cascade migrates."""
    eps = as_rational(epsilon)
    inv1 = 1 / eps - 1
    return inv1 * (pow2(u) - pow2(ell + 1)) + Fraction(1, 2) * inv1 * pow2(u)


SEVENTEEN_BASE = (Fraction(2), Fraction(2), Fraction(2), Fraction(3), Fraction(3), Fraction(80, 17))
SMALL_MASS = Fraction(22, 17)


def seventeen_small_count(c: Fraction) -> int:
    """Smallest even count whose equal share of ``22/17`` is below ``1/C``.

    An even count lets the two machines at load 5 each take exactly ``11/17``.
    """
    n = floor(SMALL_MASS * c) + 1
    return n + (n % 2)


def gen_17_16(c: RationalLike, epsilon: RationalLike = Fraction(1, 8)) -> StreamSpec:
    """Three machines, six jobs with the unique near-optimal layout, then a flood of small jobs."""
    c = as_rational(c)
    if c < 1:
        raise ParameterError("17/16 family needs C >= 1")
    eps = validate_epsilon(epsilon)
    n = seventeen_small_count(c)
    quantum = SMALL_MASS / n
    jobs = [_job(i, p, eps) for i, p in enumerate(SEVENTEEN_BASE)]
    jobs += [_job(len(SEVENTEEN_BASE) + t, quantum, eps) for t in range(n)]
    reference = Schedule(3, ((jobs[5], 0), (jobs[0], 0), (jobs[3], 1), (jobs[1], 1), (jobs[4], 2), (jobs[2], 2)))
    return StreamSpec(
        "17-16", {"C": c}, 3, eps, tuple(jobs), notes={"small_count": n, "quantum": quantum, "reference": reference}
    )


class SwapLowerBound(NamedTuple):
    instance: Instance
    swap_schedule: Schedule
    recipe_schedule: Schedule
    delta: Fraction
    n: Tuple[int, ...]


def swap_machine_count(k: int) -> int:
    return 2 * (10**k - 1)


def gen_swap_lb(k: int) -> SwapLowerBound:
    """Swap-optimal schedule with minimum load just above 1 against an optimum near 1.7.

    Jobs are grid-exact (rounded size equals size).  ``c_{i+1}`` pairs with
    five ``d_i``, which is what gives those machines load ``6/5 - n_i delta``.
    """
    if not isinstance(k, int) or k < 2:
        raise ParameterError("swap-lb needs an integer k >= 2")
    n = [0]
    for _ in range(k):
        n.append(4 * n[-1] + 2)
    delta = Fraction(1, 30 * n[k])
    machines = swap_machine_count(k)
    half, fifth = Fraction(1, 2), Fraction(1, 5)
    a = {i: half + (n[i] - 1) * delta for i in range(1, k + 1)}
    b = {i: half - (n[i] - 1) * delta for i in range(1, k + 1)}
    c = {i: fifth + 4 * n[i - 1] * delta for i in range(1, k + 1)}
    d = {i: fifth - n[i] * delta for i in range(1, k)}
    d[k] = Fraction(1, 6 * machines - 1)

    pools: Dict[Tuple[str, int], List[Job]] = {}
    next_id = 0

    def make(kind: str, i: int, size: Fraction, count: int) -> None:
        nonlocal next_id
        pools[(kind, i)] = [Job.exact(next_id + t, size) for t in range(count)]
        next_id += count

    make("one", 0, Fraction(1), machines)
    for i in range(1, k + 1):
        make("a", i, a[i], 6 * 10 ** (k - i))
        make("b", i, b[i], 12 * 10 ** (k - i))
        make("c", i, c[i], 12 * 10 ** (k - i))
    for i in range(1, k):
        make("d", i, d[i], 6 * 10 ** (k - i))
    make("d", k, d[k], 6 * machines)
    all_jobs = tuple(j for pool in pools.values() for j in pool)

    def build(groups: List[List[Job]]) -> Schedule:
        if len(groups) != machines:
            raise AssertionError(f"layout uses {len(groups)} machines, expected {machines}")
        return Schedule(machines, ((j, i) for i, g in enumerate(groups) for j in g))

    def take(kind: str, i: int, count: int, pool_copy: Dict) -> List[Job]:
        out = pool_copy[(kind, i)][:count]
        del pool_copy[(kind, i)][:count]
        return out

    left = {key: list(v) for key, v in pools.items()}
    swap: List[List[Job]] = []
    for _ in range(machines // 2):
        swap.append(take("one", 0, 2, left))
    for i in range(1, k + 1):
        for _ in range(6 * 10 ** (k - i)):
            swap.append(take("a", i, 1, left) + take("b", i, 2, left))
    for _ in range(2 * 10 ** (k - 1)):
        swap.append(take("c", 1, 6, left))
    for i in range(1, k):
        for _ in range(12 * 10 ** (k - i - 1)):
            swap.append(take("c", i + 1, 1, left) + take("d", i, 5, left))
    swap.append(take("d", k, 6 * machines, left))

    left = {key: list(v) for key, v in pools.items()}
    recipe: List[List[Job]] = []
    for i in range(1, k):
        for _ in range(6 * 10 ** (k - i)):
            recipe.append(take("one", 0, 1, left) + take("a", i, 1, left) + take("d", i, 1, left))
    for i in range(1, k + 1):
        for _ in range(12 * 10 ** (k - i)):
            recipe.append(take("one", 0, 1, left) + take("b", i, 1, left) + take("c", i, 1, left))
    for _ in range(6):
        recipe.append(take("one", 0, 1, left) + take("a", k, 1, left) + take("d", k, machines, left))

    return SwapLowerBound(Instance(all_jobs, machines), build(swap), build(recipe), delta, tuple(n))


def swap_lb_spec(k: int) -> StreamSpec:
    fam = gen_swap_lb(k)
    eps = Fraction(1, 8)
    return StreamSpec("swap-lb", {"k": k}, fam.instance.m, eps, (), initial=fam.swap_schedule)


RANDOM_LAWS = ("uniform-grid", "heavy-tail-dyadic", "small-flood")


def gen_random(
    seed: int,
    n: int,
    m: int = 3,
    law: str = "uniform-grid",
    epsilon: RationalLike = Fraction(1, 8),
    quantum: RationalLike = Fraction(1, 4),
) -> StreamSpec:
    """Seeded stream of ``n`` arrivals.

    ``uniform-grid`` draws multiples of ``quantum`` up to 16 quanta;
    ``heavy-tail-dyadic`` draws ``2^e (1 + t/8)`` with ``e`` geometric;
    ``small-flood`` starts with a few unit-scale jobs and then floods sizes
    far below ``eps`` times the running optimum.
    """
    if law not in RANDOM_LAWS:
        raise ParameterError(f"unknown law {law!r}; choose from {', '.join(RANDOM_LAWS)}")
    if n < 0 or m < 1:
        raise ParameterError("need n >= 0 and m >= 1")
    eps = validate_epsilon(epsilon)
    q = as_rational(quantum)
    rng = random.Random(seed)
    sizes: List[Fraction] = []
    for t in range(n):
        if law == "uniform-grid":
            sizes.append(q * rng.randint(1, 16))
        elif law == "heavy-tail-dyadic":
            e = 0
            while e < 6 and rng.random() < 0.5:
                e += 1
            sizes.append(pow2(e - 2) * (1 + Fraction(rng.randint(0, 7), 8)))
        else:
            if t < m:
                sizes.append(Fraction(rng.randint(4, 8)))
            else:
                sizes.append(Fraction(rng.randint(1, 8), 64))
    arrivals = tuple(_job(i, p, eps) for i, p in enumerate(sizes))
    return StreamSpec("random", {"seed": seed, "n": n, "m": m, "law": law}, m, eps, arrivals)


FAMILIES = ("appendix-a", "jump-lb", "17-16", "swap-lb", "random")


def parse_family(text: str) -> Tuple[str, Dict[str, str]]:
    """``"name:key=value,key=value"`` into a name and a raw parameter dict."""
    name, _, rest = text.partition(":")
    name = name.strip().replace("_", "-")
    aliases = {"gen-17-16": "17-16", "17/16": "17-16", "gen-appendix-a": "appendix-a", "gen-swap-lb": "swap-lb",
               "gen-jump-mig-lb": "jump-lb", "gen-random": "random"}
    name = aliases.get(name, name)
    if name not in FAMILIES:
        raise ParameterError(f"unknown family {name!r}; choose from {', '.join(FAMILIES)}")
    params: Dict[str, str] = {}
    for item in filter(None, (p.strip() for p in rest.split(","))):
        key, eq, value = item.partition("=")
        if not eq:
            raise ParameterError(f"malformed parameter {item!r}, expected key=value")
        params[key.strip()] = value.strip()
    return name, params


def build_family(text: str, epsilon: Optional[RationalLike] = None) -> StreamSpec:
    """Construct a family from its command-line description."""
    name, raw = parse_family(text)
    try:
        if name == "appendix-a":
            return gen_appendix_a(int(raw.get("k", 2)), raw.get("eps"))
        if name == "jump-lb":
            eps = as_rational(raw.get("eps", epsilon or "1/4"))
            ell = int(raw.get("ell", 0))
            u = int(raw.get("u", ell + int(1 / eps).bit_length() - 2))
            return gen_jump_mig_lb(ell, u, eps)
        if name == "17-16":
            return gen_17_16(as_rational(raw.get("C", raw.get("c", "10"))), epsilon or Fraction(1, 8))
        if name == "swap-lb":
            return swap_lb_spec(int(raw.get("k", 2)))
        return gen_random(
            int(raw.get("seed", 0)),
            int(raw.get("n", 20)),
            int(raw.get("m", 3)),
            raw.get("law", "uniform-grid"),
            epsilon or Fraction(1, 8),
        )
    except (TypeError, ZeroDivisionError) as exc:
        raise ParameterError(str(exc)) from exc
